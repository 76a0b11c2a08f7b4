//! The skewed strip model of an ℝ-covered orbit space.
//!
//! The strip is `{(x, y) : x < y < x + 1}`, stable leaves are the horizontals
//! `L_c = {y = c}` and unstable leaves the verticals `U_d = {x = d}`. An orbit
//! is `U_d ∩ L_c`, stored as `(d, c)`. All arithmetic is exact.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("({d}, {c}) is outside the strip: need c - 1 < d < c")]
pub struct SkewError {
    pub d: Rational64,
    pub c: Rational64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SkewOrbit {
    d: Rational64,
    c: Rational64,
}

impl SkewOrbit {
    pub fn new(d: Rational64, c: Rational64) -> Result<Self, SkewError> {
        if c - Rational64::one() < d && d < c {
            Ok(SkewOrbit { d, c })
        } else {
            Err(SkewError { d, c })
        }
    }

    /// Shorthand for `(dn/dd, cn/cd)`.
    pub fn from_ratios(dn: i64, dd: i64, cn: i64, cd: i64) -> Result<Self, SkewError> {
        Self::new(Rational64::new(dn, dd), Rational64::new(cn, cd))
    }

    pub fn d(&self) -> Rational64 {
        self.d
    }

    pub fn c(&self) -> Rational64 {
        self.c
    }

    /// The unit translation `(d, c) ↦ (d + n, c + n)`.
    pub fn shift(&self, n: i64) -> Self {
        let n = Rational64::from_integer(n);
        SkewOrbit {
            d: self.d + n,
            c: self.c + n,
        }
    }

    /// Projection to `S¹ × S¹ - Δ`: `(c mod 1, d mod 1)`.
    pub fn nu(&self) -> (Rational64, Rational64) {
        (self.c - self.c.floor(), self.d - self.d.floor())
    }
}

impl fmt::Display for SkewOrbit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.d, self.c)
    }
}

/// Opposite corner of the lozenge lying up and to the right of `o`.
pub fn skew_partner(o: SkewOrbit) -> SkewOrbit {
    SkewOrbit {
        d: o.c,
        c: o.d + Rational64::one(),
    }
}

/// Opposite corner of the lozenge lying down and to the left of `o`.
pub fn skew_partner_inverse(o: SkewOrbit) -> SkewOrbit {
    SkewOrbit {
        d: o.c - Rational64::one(),
        c: o.d,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkewConnection {
    Even { length: u64 },
    Odd { length: u64 },
    NotConnected,
}

impl SkewConnection {
    pub fn length(&self) -> Option<u64> {
        match *self {
            SkewConnection::Even { length } | SkewConnection::Odd { length } => Some(length),
            SkewConnection::NotConnected => None,
        }
    }
}

impl fmt::Display for SkewConnection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SkewConnection::Even { length } => write!(f, "connected-even length={length}"),
            SkewConnection::Odd { length } => write!(f, "connected-odd length={length}"),
            SkewConnection::NotConnected => write!(f, "not-connected"),
        }
    }
}

/// Closed-form chain criterion through the projection `ν`.
///
/// Equal projections force `o₂ = o₁ + n` and a chain of `2|n|` lozenges.
/// Swapped projections force `o₂ = partner(o₁) + m` with `m = d₂ - c₁` and a
/// chain of `|2m + 1|` lozenges. Anything else is not chain-connected.
pub fn skew_chain_connected(a: SkewOrbit, b: SkewOrbit) -> SkewConnection {
    let (na, nb) = (a.nu(), b.nu());
    if na == nb {
        let n = b.c - a.c;
        debug_assert!(n.is_integer() && n == b.d - a.d);
        return SkewConnection::Even {
            length: 2 * n.to_integer().unsigned_abs(),
        };
    }
    if nb == (na.1, na.0) {
        let m = b.d - a.c;
        debug_assert!(m.is_integer() && b.c == a.d + Rational64::one() + m);
        let m = m.to_integer();
        return SkewConnection::Odd {
            length: (2 * m + 1).unsigned_abs(),
        };
    }
    SkewConnection::NotConnected
}

fn in_closed_strip(x: Rational64, y: Rational64) -> bool {
    x <= y && y <= x + Rational64::one()
}

fn in_open_strip(x: Rational64, y: Rational64) -> bool {
    x < y && y < x + Rational64::one()
}

/// Lozenges with a corner at `o`, found from the leaf picture alone. For each
/// quadrant the two half-leaves from `o` run to ideal points on the strip
/// boundary; the opposite corner sits on their perfect-fit partners, and the
/// rectangle spanned must lie in the strip.
pub fn lozenge_neighbors(o: SkewOrbit) -> Vec<SkewOrbit> {
    let one = Rational64::one();
    let mut out = Vec::new();
    for sx in [1i64, -1] {
        for sy in [1i64, -1] {
            // horizontal half-leaf: hits y = x going right, y = x + 1 going left
            let es_x = if sx > 0 { o.c } else { o.c - one };
            // vertical half-leaf: hits y = x + 1 going up, y = x going down
            let eu_y = if sy > 0 { o.d + one } else { o.d };
            let (qx, qy) = (es_x, eu_y);
            let dx = qx - o.d;
            let dy = qy - o.c;
            let right_quadrant = dx.signum() == Rational64::from_integer(sx) && dy.signum() == Rational64::from_integer(sy);
            if !right_quadrant || dx.is_zero() || dy.is_zero() {
                continue;
            }
            if !in_open_strip(qx, qy) || !in_closed_strip(qx, o.c) || !in_closed_strip(o.d, qy) {
                continue;
            }
            out.push(SkewOrbit { d: qx, c: qy });
        }
    }
    out
}

/// Breadth-first search over lozenge moves, the independent oracle for
/// [`skew_chain_connected`]. Returns the minimal chain length, or `None` when
/// `b` is not reached within `depth` lozenges (a semi-decision).
pub fn bfs_chain_length(a: SkewOrbit, b: SkewOrbit, depth: u64) -> Option<u64> {
    let mut dist: HashMap<SkewOrbit, u64> = HashMap::from([(a, 0)]);
    let mut queue = VecDeque::from([a]);
    while let Some(o) = queue.pop_front() {
        let k = dist[&o];
        if o == b {
            return Some(k);
        }
        if k == depth {
            continue;
        }
        for n in lozenge_neighbors(o) {
            dist.entry(n).or_insert_with(|| {
                queue.push_back(n);
                k + 1
            });
        }
    }
    None
}

pub const BFS_DEPTH: u64 = 12;

#[cfg(test)]
mod tests {
    use super::*;

    fn o(dn: i64, dd: i64, cn: i64, cd: i64) -> SkewOrbit {
        SkewOrbit::from_ratios(dn, dd, cn, cd).unwrap()
    }

    #[test]
    fn partner_examples() {
        let a = o(1, 2, 6, 5);
        assert_eq!(skew_partner(a), o(6, 5, 3, 2));
        assert_eq!(skew_partner(skew_partner(a)), o(3, 2, 11, 5));
        assert_eq!(skew_partner(skew_partner(a)), a.shift(1));
        assert_eq!(skew_partner_inverse(skew_partner(a)), a);
    }

    #[test]
    fn validity_enforced() {
        assert!(SkewOrbit::from_ratios(1, 1, 1, 1).is_err());
        assert!(SkewOrbit::from_ratios(0, 1, 1, 1).is_err());
        assert!(SkewOrbit::from_ratios(1, 2, 1, 1).is_ok());
    }

    #[test]
    fn geometric_neighbours_are_the_two_partners() {
        let a = o(1, 2, 6, 5);
        let mut n = lozenge_neighbors(a);
        n.sort();
        let mut expect = vec![skew_partner(a), skew_partner_inverse(a)];
        expect.sort();
        assert_eq!(n, expect);
    }

    #[test]
    fn criterion_examples() {
        let a = o(1, 2, 6, 5);
        assert_eq!(skew_chain_connected(a, o(5, 2, 16, 5)), SkewConnection::Even { length: 4 });
        assert_eq!(bfs_chain_length(a, o(5, 2, 16, 5), BFS_DEPTH), Some(4));
        assert_eq!(skew_chain_connected(a, skew_partner(a)), SkewConnection::Odd { length: 1 });
        assert_eq!(skew_chain_connected(a, o(1, 3, 6, 5)), SkewConnection::NotConnected);
        assert_eq!(bfs_chain_length(a, o(1, 3, 6, 5), BFS_DEPTH), None);
        assert_eq!(skew_chain_connected(a, a), SkewConnection::Even { length: 0 });
    }
}
