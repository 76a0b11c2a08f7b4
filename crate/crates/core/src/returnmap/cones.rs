use std::f64::consts::PI;
use std::fmt::Write as _;

use thiserror::Error;

use super::{ReturnMapSystem, SectionPoint, SystemError};
use crate::assembly::SurfaceClass;
use crate::blueprint::Polarity;

/// Collar (in `u'`) around the stable circles excluded from cone grids.
pub const COLLAR: f64 = 1e-3;

/// Image of the cone `|t| ≤ κ` under a matrix in the radian metric, where a
/// tangent vector is written `(t, 1)` with `t = w_u / w_v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeTest {
    /// `atan κ - max |atan t'|`; negative when the image leaves the cone.
    pub margin: f64,
    /// Smallest `|J w| / |w|` over the cone.
    pub min_expansion: f64,
}

impl ConeTest {
    pub fn contained(&self) -> bool {
        self.margin > 0.0
    }
}

/// Exact evaluation on a cone of half-slope `kappa`.
///
/// The slope map `t ↦ (j00 t + j01) / (j10 t + j11)` is a Möbius map, so
/// containment is decided at the two boundary rays once the denominator is
/// known not to vanish. The expansion minimum of the Rayleigh quotient is
/// taken over the endpoints and interior critical points.
pub fn cone_test(j: [[f64; 2]; 2], kappa: f64) -> ConeTest {
    let den = |t: f64| j[1][0] * t + j[1][1];
    let num = |t: f64| j[0][0] * t + j[0][1];
    let (d0, d1) = (den(-kappa), den(kappa));
    let margin = if d0 * d1 <= 0.0 {
        -PI / 2.0
    } else {
        let worst = [-kappa, kappa]
            .iter()
            .map(|&t| (num(t) / den(t)).atan().abs())
            .fold(0.0, f64::max);
        kappa.atan() - worst
    };
    let alpha = j[0][0] * j[0][0] + j[1][0] * j[1][0];
    let gamma = j[0][1] * j[0][1] + j[1][1] * j[1][1];
    let beta = 2.0 * (j[0][0] * j[0][1] + j[1][0] * j[1][1]);
    let quotient = |t: f64| (alpha * t * t + beta * t + gamma) / (t * t + 1.0);
    let mut cands = vec![-kappa, kappa];
    // derivative numerator: -β t² + 2(α - γ) t + β
    let (qa, qb, qc) = (-beta, 2.0 * (alpha - gamma), beta);
    if qa.abs() < 1e-300 {
        if qb.abs() > 0.0 {
            cands.push(-qc / qb);
        }
    } else {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let s = disc.sqrt();
            cands.push((-qb + s) / (2.0 * qa));
            cands.push((-qb - s) / (2.0 * qa));
        }
    }
    let min_q = cands
        .into_iter()
        .filter(|t| t.abs() <= kappa)
        .map(quotient)
        .fold(f64::INFINITY, f64::min);
    ConeTest {
        margin,
        min_expansion: min_q.max(0.0).sqrt(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeSample {
    pub point: SectionPoint,
    pub test: ConeTest,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConeReport {
    pub lambda: f64,
    pub kappa: f64,
    pub grid: usize,
    pub collar: f64,
    pub points: usize,
    pub skipped: usize,
    pub margin: f64,
    pub min_expansion: f64,
    pub contained: bool,
    pub worst_point: Option<SectionPoint>,
}

impl ConeReport {
    pub fn passed(&self) -> bool {
        self.contained && self.min_expansion >= 2.0
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "cones.lambda={}", self.lambda);
        let _ = writeln!(s, "cones.kappa={}", self.kappa);
        let _ = writeln!(s, "cones.grid={}x{} per annulus", self.grid, self.grid);
        let _ = writeln!(s, "cones.collar={}", self.collar);
        let _ = writeln!(s, "cones.points={}", self.points);
        let _ = writeln!(s, "cones.skipped={}", self.skipped);
        let _ = writeln!(s, "cones.contained={}", self.contained);
        let _ = writeln!(s, "cones.margin_rad={:.9e}", self.margin);
        let _ = writeln!(s, "cones.min_expansion={:.9e}", self.min_expansion);
        let _ = writeln!(s, "cones.passed={}", self.passed());
        s
    }
}

impl ReturnMapSystem {
    /// Grid of cell centres, `grid × grid` per annulus of every outgoing
    /// torus, minus the collar around `μˢ₀`.
    pub fn cone_grid(&self, grid: usize) -> (Vec<SectionPoint>, usize) {
        let asm = &self.manifold.assembled;
        let mut pts = Vec::new();
        let mut skipped = 0;
        for (ci, c) in asm.components.iter().enumerate() {
            if c.polarity != Polarity::Outgoing || c.class != SurfaceClass::Torus {
                continue;
            }
            for j in 0..c.k() {
                for a in 0..grid {
                    let u = (j as f64 + (a as f64 + 0.5) / grid as f64) * PI;
                    for b in 0..grid {
                        let p = SectionPoint {
                            component: ci,
                            u,
                            v: (b as f64 + 0.5) / grid as f64,
                        };
                        match self.stable_distance(p) {
                            Ok(d) if d > COLLAR => pts.push(p),
                            _ => skipped += 1,
                        }
                    }
                }
            }
        }
        (pts, skipped)
    }

    pub fn cone_samples(&self, grid: usize) -> Result<Vec<ConeSample>, SystemError> {
        let (pts, _) = self.cone_grid(grid);
        pts.into_iter()
            .map(|p| {
                let j = self.return_jacobian(p)?;
                Ok(ConeSample {
                    point: p,
                    test: cone_test(j.radian(), self.kappa),
                })
            })
            .collect()
    }

    pub fn verify_cones(&self, grid: usize) -> Result<ConeReport, SystemError> {
        let (pts, skipped) = self.cone_grid(grid);
        let mut margin = f64::INFINITY;
        let mut min_expansion = f64::INFINITY;
        let mut worst_point = None;
        for &p in &pts {
            let t = cone_test(self.return_jacobian(p)?.radian(), self.kappa);
            if t.margin < margin {
                margin = t.margin;
                worst_point = Some(p);
            }
            min_expansion = min_expansion.min(t.min_expansion);
        }
        Ok(ConeReport {
            lambda: self.lambda(),
            kappa: self.kappa,
            grid,
            collar: COLLAR,
            points: pts.len(),
            skipped,
            margin,
            min_expansion,
            contained: !pts.is_empty() && margin > 0.0,
            worst_point,
        })
    }

    pub fn cone_csv(&self, grid: usize) -> Result<String, SystemError> {
        let mut s = String::from("component,u,v,margin,expansion\n");
        for c in self.cone_samples(grid)? {
            let _ = writeln!(
                s,
                "c{},{:.12e},{:.12e},{:.9e},{:.9e}",
                self.manifold.assembled.components[c.point.component].id,
                c.point.u,
                c.point.v,
                c.test.margin,
                c.test.min_expansion
            );
        }
        Ok(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Lambda0Error {
    #[error("no λ in [{lo}, {hi}] passes the cone test at grid {grid}: not certifiable at this grid")]
    NotCertifiable { lo: f64, hi: f64, grid: usize },
    #[error(transparent)]
    System(#[from] SystemError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lambda0Estimate {
    /// Smallest passing λ found: the upper end of the final bracket.
    pub lambda0: f64,
    /// Largest failing λ found.
    pub failing: f64,
    pub iterations: usize,
    pub grid: usize,
    pub kappa: f64,
    pub rel_tol: f64,
}

pub const LAMBDA_BRACKET: (f64, f64) = (1e-3, 1e4);

/// Geometric bisection for the passing threshold of [`ReturnMapSystem::verify_cones`].
pub fn estimate_lambda0(template: &ReturnMapSystem, kappa: f64, grid: usize) -> Result<Lambda0Estimate, Lambda0Error> {
    let rel_tol = 1e-4;
    let base = ReturnMapSystem::new(template.manifold.clone(), template.lambda(), kappa)?;
    let passes = |lambda: f64| -> Result<bool, Lambda0Error> { Ok(base.with_lambda(lambda)?.verify_cones(grid)?.passed()) };
    let (mut lo, mut hi) = LAMBDA_BRACKET;
    if !passes(hi)? {
        return Err(Lambda0Error::NotCertifiable { lo, hi, grid });
    }
    let mut iterations = 0;
    if passes(lo)? {
        return Ok(Lambda0Estimate {
            lambda0: lo,
            failing: lo,
            iterations,
            grid,
            kappa,
            rel_tol,
        });
    }
    while hi / lo > 1.0 + rel_tol {
        let mid = (lo * hi).sqrt();
        iterations += 1;
        if passes(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Lambda0Estimate {
        lambda0: hi,
        failing: lo,
        iterations,
        grid,
        kappa,
        rel_tol,
    })
}
