//! Stable curve families `μˢₙ = φ⁻ⁿ(μˢ₀)` as graphs `v = g(u)` per strip.
//!
//! A pullback follows `φ⁻¹ = A⁻¹ ∘ f⁻¹` with `f⁻¹(x, y) = (x, y - a(x))`,
//! parametrised by the block coordinate `x`. The window is clipped both near
//! the walls and where `|a(x)|` exceeds a winding cap: without the cap each
//! preimage would wind `~λ tan x` times around the fibre.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt::Write as _;

use thiserror::Error;

use super::{ReturnMapSystem, SystemError};
use crate::assembly::parity;
use crate::blueprint::Polarity;
use crate::closure::GluingMap;

pub const MAX_GENERATION: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurveError {
    #[error("generation {0} exceeds the cap of {MAX_GENERATION}")]
    Generation(usize),
    #[error("generation {generation}: curve on c{component} strip {strip} is not a graph over u near u={u}")]
    NonGraph {
        generation: usize,
        component: usize,
        strip: usize,
        u: f64,
    },
    #[error("generation {generation} would exceed the budget of {budget} curves")]
    Budget { generation: usize, budget: usize },
    #[error(transparent)]
    System(#[from] SystemError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveOptions {
    /// Largest step between samples, radian metric.
    pub h_max: f64,
    /// Pullbacks only use `|a(x)| ≤ max_winding` turns.
    pub max_winding: f64,
    /// Pullbacks only use `|x| ≤ π/2 - wall_clip`.
    pub wall_clip: f64,
    pub max_curves: usize,
}

impl Default for CurveOptions {
    fn default() -> Self {
        Self {
            h_max: 0.1,
            max_winding: 2.0,
            wall_clip: 1e-3,
            max_curves: 250_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSample {
    pub u: f64,
    /// Lifted: continuous along the curve.
    pub v: f64,
    /// `dv/du`.
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StableCurve {
    pub component: usize,
    pub strip: usize,
    /// Strictly increasing in `u`.
    pub samples: Vec<CurveSample>,
}

impl StableCurve {
    /// Cubic Hermite interpolation; `u` must lie in the sampled range.
    pub fn eval(&self, u: f64) -> (f64, f64) {
        let s = &self.samples;
        let i = match s.partition_point(|p| p.u <= u) {
            0 => 0,
            n if n >= s.len() => s.len() - 2,
            n => n - 1,
        };
        let (a, b) = (s[i], s[i + 1]);
        let h = b.u - a.u;
        let t = ((u - a.u) / h).clamp(0.0, 1.0);
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let v = h00 * a.v + h10 * h * a.slope + h01 * b.v + h11 * h * b.slope;
        let d00 = (6.0 * t2 - 6.0 * t) / h;
        let d10 = 3.0 * t2 - 4.0 * t + 1.0;
        let d01 = (-6.0 * t2 + 6.0 * t) / h;
        let d11 = 3.0 * t2 - 2.0 * t;
        let dv = d00 * a.v + d10 * a.slope + d01 * b.v + d11 * b.slope;
        (v, dv)
    }

    pub fn u_range(&self) -> (f64, f64) {
        (self.samples[0].u, self.samples[self.samples.len() - 1].u)
    }

    pub fn is_graph(&self) -> bool {
        self.samples.windows(2).all(|w| w[1].u > w[0].u)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StableCurveFamily {
    pub generation: usize,
    pub curves: Vec<StableCurve>,
    /// Largest sampled `|g'|`.
    pub max_slope: f64,
    /// Every sampled tangent lies outside `C₀`: `2π |g'| < 1/κ`.
    pub tangents_outside_cone: bool,
    /// `|x|` bound used when this generation was pulled back.
    pub x_window: f64,
}

impl StableCurveFamily {
    fn new(generation: usize, curves: Vec<StableCurve>, kappa: f64, x_window: f64) -> Self {
        let max_slope = curves
            .iter()
            .flat_map(|c| c.samples.iter())
            .map(|s| s.slope.abs())
            .fold(0.0, f64::max);
        Self {
            generation,
            tangents_outside_cone: TAU * max_slope < 1.0 / kappa,
            curves,
            max_slope,
            x_window,
        }
    }

    pub fn sample_count(&self) -> usize {
        self.curves.iter().map(|c| c.samples.len()).sum()
    }

    /// Curves per (component, strip).
    pub fn counts(&self) -> Vec<((usize, usize), usize)> {
        let mut m = std::collections::BTreeMap::new();
        for c in &self.curves {
            *m.entry((c.component, c.strip)).or_insert(0) += 1;
        }
        m.into_iter().collect()
    }
}

/// CSV with header `generation,component,curve,u,v`; `v` reduced mod 1.
pub fn curves_csv(families: &[StableCurveFamily], comp_names: &dyn Fn(usize) -> String) -> String {
    let mut s = String::from("generation,component,curve,u,v\n");
    for f in families {
        for (i, c) in f.curves.iter().enumerate() {
            for p in &c.samples {
                let _ = writeln!(
                    s,
                    "{},{},{},{:.9e},{:.9e}",
                    f.generation,
                    comp_names(c.component),
                    i,
                    p.u,
                    crate::circle::wrap(p.v)
                );
            }
        }
    }
    s
}

#[derive(Debug, Clone, Copy)]
struct Node {
    x: f64,
    u: f64,
    v: f64,
    du: f64,
    dv: f64,
}

impl ReturnMapSystem {
    /// Generations `0..=n`.
    pub fn stable_curves(&self, n: usize, opts: &CurveOptions) -> Result<Vec<StableCurveFamily>, CurveError> {
        if n > MAX_GENERATION {
            return Err(CurveError::Generation(n));
        }
        let window = (FRAC_PI_2 - opts.wall_clip).min(self.profile.shear_inverse(opts.max_winding));
        let mut fams = vec![StableCurveFamily::new(
            0,
            self.generation_zero(opts),
            self.kappa,
            window,
        )];
        for g in 1..=n {
            let parents = &fams[g - 1].curves;
            let mut next = Vec::new();
            for c in parents {
                self.pull_back(c, g, window, opts, &mut next)?;
                if next.len() > opts.max_curves {
                    return Err(CurveError::Budget {
                        generation: g,
                        budget: opts.max_curves,
                    });
                }
            }
            for c in &next {
                if !c.is_graph() {
                    return Err(CurveError::NonGraph {
                        generation: g,
                        component: c.component,
                        strip: c.strip,
                        u: c.samples[0].u,
                    });
                }
            }
            fams.push(StableCurveFamily::new(g, next, self.kappa, window));
        }
        Ok(fams)
    }

    /// `A⁻¹(l^s₀)`: the lines `u' ∈ πℤ`, cut into strips.
    fn generation_zero(&self, opts: &CurveOptions) -> Vec<StableCurve> {
        let asm = &self.manifold.assembled;
        let mut out = Vec::new();
        for m in &self.manifold.maps {
            let comp = &asm.components[m.outgoing];
            if comp.polarity != Polarity::Outgoing {
                continue;
            }
            let (a, b, s) = (m.linear[0][0], m.linear[0][1], m.shift.0);
            let slope = -a / b;
            for j in 0..comp.k() {
                let u0 = j as f64 * PI;
                let base = a * u0 + s;
                let (lo, hi) = if b > 0.0 { (base, base + b) } else { (base + b, base) };
                let first = (lo / PI).ceil() as i64;
                let mut n = first;
                while (n as f64) * PI < hi {
                    let steps = ((PI / opts.h_max).max(PI * TAU * slope.abs() / opts.h_max)).ceil() as usize;
                    let samples = (0..=steps)
                        .map(|i| {
                            let u = u0 + PI * i as f64 / steps as f64;
                            CurveSample {
                                u,
                                v: (n as f64 * PI - s - a * u) / b,
                                slope,
                            }
                        })
                        .collect();
                    out.push(StableCurve {
                        component: m.outgoing,
                        strip: j,
                        samples,
                    });
                    n += 1;
                }
            }
        }
        out
    }

    fn pull_back(
        &self,
        parent: &StableCurve,
        generation: usize,
        window: f64,
        opts: &CurveOptions,
        out: &mut Vec<StableCurve>,
    ) -> Result<(), CurveError> {
        let asm = &self.manifold.assembled;
        let comp = &asm.components[parent.component];
        let j2 = parent.strip;
        let block = asm.blocks[comp.entries[j2].edge];
        let (ci, j_in) = block.incoming;
        let map: &GluingMap = self.manifold.map_to(ci).map_err(SystemError::from)?;
        let sigma = if block.reflected { -1.0 } else { 1.0 };
        let p2 = parity(j2 as i64);
        let pin = parity(j_in as i64);
        let offset2 = j2 as f64 * PI + FRAC_PI_2;
        let (ua, ub) = parent.u_range();
        let (xa, xb) = (sigma * (ua - offset2), sigma * (ub - offset2));
        let lo = xa.min(xb).max(-window);
        let hi = xa.max(xb).min(window);
        if hi <= lo {
            return Ok(());
        }
        let node = |x: f64| -> Node {
            let (g, dg) = parent.eval(sigma * x + offset2);
            let y_in = sigma * p2 * g - self.profile.shear_unchecked(x);
            let dy_in = p2 * dg - self.profile.shear_derivative_unchecked(x);
            let up = x + j_in as f64 * PI + FRAC_PI_2;
            let vp = pin * y_in;
            let (u, v) = map.inverse_lifted(up, vp);
            let inv = &map.inverse;
            let dvp = pin * dy_in;
            Node {
                x,
                u,
                v,
                du: inv[0][0] + inv[0][1] * dvp,
                dv: inv[1][0] + inv[1][1] * dvp,
            }
        };
        let fine = |a: &Node, b: &Node| (b.u - a.u).abs() <= opts.h_max && TAU * (b.v - a.v).abs() <= opts.h_max;
        let mut nodes = Vec::new();
        let coarse = 8;
        let mut prev = node(lo);
        nodes.push(prev);
        for i in 1..=coarse {
            let x = lo + (hi - lo) * i as f64 / coarse as f64;
            let next = node(x);
            refine(&node, &fine, prev, next, 0, &mut nodes);
            nodes.push(next);
            prev = next;
        }
        let sign = nodes[0].du.signum();
        let non_graph = |u: f64| CurveError::NonGraph {
            generation,
            component: map.outgoing,
            strip: 0,
            u,
        };
        if nodes.iter().any(|n| n.du == 0.0 || n.du.signum() != sign) {
            return Err(non_graph(nodes[0].u));
        }
        if nodes.windows(2).any(|w| (w[1].u - w[0].u) * sign <= 0.0) {
            return Err(non_graph(nodes[0].u));
        }

        // split at u ∈ πℤ
        let k = asm.components[map.outgoing].k() as i64;
        let mut pieces: Vec<Vec<Node>> = vec![vec![nodes[0]]];
        for w in nodes.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (sa, sb) = ((a.u / PI).floor(), (b.u / PI).floor());
            if sa != sb {
                let m = sa.max(sb) * PI;
                let (mut x0, mut x1) = (a.x, b.x);
                for _ in 0..100 {
                    let xm = 0.5 * (x0 + x1);
                    if (node(xm).u - m) * sign < 0.0 {
                        x0 = xm;
                    } else {
                        x1 = xm;
                    }
                }
                let mut cut = node(0.5 * (x0 + x1));
                cut.u = m;
                pieces.last_mut().unwrap().push(cut);
                pieces.push(vec![cut]);
            }
            pieces.last_mut().unwrap().push(b);
        }
        for mut piece in pieces {
            if piece.len() < 2 {
                continue;
            }
            if sign < 0.0 {
                piece.reverse();
            }
            // a node sitting exactly on a seam duplicates the cut point
            piece.dedup_by(|b, a| b.u - a.u < 1e-13);
            if piece.len() < 2 {
                continue;
            }
            let (u0, u1) = (piece[0].u, piece[piece.len() - 1].u);
            if u1 - u0 < 1e-12 {
                continue;
            }
            let total = (0.5 * (u0 + u1) / PI).floor() as i64;
            let strip = total.rem_euclid(k) as usize;
            let shift = (total - strip as i64) as f64 * PI;
            out.push(StableCurve {
                component: map.outgoing,
                strip,
                samples: piece
                    .iter()
                    .map(|n| CurveSample {
                        u: n.u - shift,
                        v: n.v,
                        slope: n.dv / n.du,
                    })
                    .collect(),
            });
        }
        Ok(())
    }
}

fn refine<F, G>(node: &F, fine: &G, a: Node, b: Node, depth: usize, out: &mut Vec<Node>)
where
    F: Fn(f64) -> Node,
    G: Fn(&Node, &Node) -> bool,
{
    if depth >= 40 || fine(&a, &b) {
        return;
    }
    let m = node(0.5 * (a.x + b.x));
    refine(node, fine, a, m, depth + 1, out);
    out.push(m);
    refine(node, fine, m, b, depth + 1, out);
}
