//! Lower-bound density probe for `∪ μˢ_m`.
//!
//! A box meets `μˢ_m` when `φ^m` of some segment inside it crosses `μˢ₀`.
//! Each box contributes its central vertical segment; the segment is pushed
//! forward as a polyline, refined so consecutive `A`-images stay close, and
//! the first step at which it crosses `u' ∈ πℤ` is recorded. Hits are
//! therefore sound but may undercount.

use std::f64::consts::{PI, TAU};

use super::{ReturnMapSystem, SystemError};
use crate::assembly::SurfaceClass;
use crate::blueprint::Polarity;

const MAX_POINTS: usize = 20_000;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityReport {
    pub delta: f64,
    pub generations: usize,
    pub boxes: usize,
    /// Boxes first hit at generation `m`.
    pub first_hits: Vec<usize>,
    /// Boxes whose refinement budget ran out before a hit.
    pub unresolved: usize,
}

impl DensityReport {
    /// Cumulative fraction hit by generations `0..=m`.
    pub fn fractions(&self) -> Vec<f64> {
        let mut acc = 0;
        self.first_hits
            .iter()
            .map(|h| {
                acc += h;
                acc as f64 / self.boxes as f64
            })
            .collect()
    }
}

#[derive(Clone, Copy)]
struct Pt {
    t: f64,
    u: f64,
    v: f64,
}

impl ReturnMapSystem {
    pub fn density_probe(&self, delta: f64, n: usize) -> Result<DensityReport, SystemError> {
        let asm = &self.manifold.assembled;
        let mut first_hits = vec![0; n + 1];
        let mut boxes = 0;
        let mut unresolved = 0;
        for (ci, c) in asm.components.iter().enumerate() {
            if c.polarity != Polarity::Outgoing || c.class != SurfaceClass::Torus {
                continue;
            }
            let nu = (c.period() / delta).ceil() as usize;
            let nv = (TAU / delta).ceil() as usize;
            let (wu, wv) = (c.period() / nu as f64, 1.0 / nv as f64);
            for a in 0..nu {
                let u = (a as f64 + 0.5) * wu;
                for b in 0..nv {
                    boxes += 1;
                    let v0 = b as f64 * wv;
                    match self.first_hit(ci, u, v0, v0 + wv, n)? {
                        Hit::At(m) => first_hits[m] += 1,
                        Hit::Unresolved => unresolved += 1,
                        Hit::None => {}
                    }
                }
            }
        }
        Ok(DensityReport {
            delta,
            generations: n,
            boxes,
            first_hits,
            unresolved,
        })
    }

    fn first_hit(&self, comp: usize, u: f64, v0: f64, v1: f64, n: usize) -> Result<Hit, SystemError> {
        // pushes p(t) forward `steps` times from scratch
        let fresh = |t: f64, steps: usize| -> Result<Result<(usize, f64, f64), usize>, SystemError> {
            let (mut c, mut uu, mut vv) = (comp, u, v0 + t * (v1 - v0));
            for s in 0..steps {
                match self.trace_lifted(c, uu, vv)? {
                    Ok(tr) => {
                        c = tr.landed.component;
                        uu = tr.landed.u;
                        vv = tr.landed.v;
                    }
                    Err(_) => return Ok(Err(s)),
                }
            }
            Ok(Ok((c, uu, vv)))
        };
        let mut pts: Vec<Pt> = (0..=4)
            .map(|i| {
                let t = i as f64 / 4.0;
                Pt {
                    t,
                    u,
                    v: v0 + t * (v1 - v0),
                }
            })
            .collect();
        let mut cur = comp;
        for step in 0..=n {
            let map = self.manifold.map_from(cur)?;
            let mut images: Vec<(f64, f64)> = pts.iter().map(|p| map.forward_lifted(p.u, p.v)).collect();
            let mut i = 0;
            while i + 1 < pts.len() {
                let (a, b) = (images[i], images[i + 1]);
                if (a.0 - b.0).abs() <= PI / 8.0 && (a.1 - b.1).abs() <= 0.125 {
                    if (a.0 / PI).floor() != (b.0 / PI).floor() {
                        return Ok(Hit::At(step));
                    }
                    i += 1;
                    continue;
                }
                if pts.len() >= MAX_POINTS {
                    return Ok(Hit::Unresolved);
                }
                let t = 0.5 * (pts[i].t + pts[i + 1].t);
                // the pipeline is evaluated on lifts throughout, so fresh
                // points are already on the same sheet as their neighbours
                let (c, uu, vv) = match fresh(t, step)? {
                    Ok(p) => p,
                    Err(s) => return Ok(Hit::At(s)),
                };
                debug_assert_eq!(c, cur);
                pts.insert(i + 1, Pt { t, u: uu, v: vv });
                images.insert(i + 1, map.forward_lifted(uu, vv));
            }
            if images.iter().any(|p| (p.0 / PI).fract() == 0.0) {
                return Ok(Hit::At(step));
            }
            if step == n {
                break;
            }
            let mut next = Vec::with_capacity(pts.len());
            let mut landed_on = cur;
            for p in &pts {
                match self.trace_lifted(cur, p.u, p.v)? {
                    Ok(tr) => {
                        landed_on = tr.landed.component;
                        next.push(Pt {
                            t: p.t,
                            u: tr.landed.u,
                            v: tr.landed.v,
                        });
                    }
                    Err(_) => return Ok(Hit::At(step)),
                }
            }
            cur = landed_on;
            pts = next;
        }
        Ok(Hit::None)
    }
}

enum Hit {
    At(usize),
    None,
    Unresolved,
}

#[cfg(test)]
mod tests {
    use crate::returnmap::tests::circle_system;

    #[test]
    fn fractions_grow() {
        let sys = circle_system(50.0, (0.0, 0.0));
        let r = sys.density_probe(0.3, 2).unwrap();
        let f = r.fractions();
        assert!(f.windows(2).all(|w| w[1] >= w[0]));
        assert!(f[2] > f[0]);
        assert!(f[0] > 0.0);
    }
}
