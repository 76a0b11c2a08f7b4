//! First return map `φ = f ∘ A` on the outgoing tori, its Jacobian, the
//! cone-field certificate and the stable curve families.
//!
//! Expansion and cone slopes are measured in the radian metric, where the
//! fibre coordinate `v` (in turns) is scaled by `2π`. The cone `C₀` is
//! `|w_u| ≤ κ |w_v|` in that metric.

mod cones;
mod curves;
mod density;

pub use cones::{cone_test, estimate_lambda0, ConeReport, ConeSample, ConeTest, Lambda0Error, Lambda0Estimate};
pub use curves::{curves_csv, CurveError, CurveOptions, CurveSample, StableCurve, StableCurveFamily};
pub use density::DensityReport;

pub use crate::closure::SectionPoint;

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use thiserror::Error;

use crate::assembly::{parity, SEAM_TOL};
use crate::block::{BlockError, ShearProfile};
use crate::circle;
use crate::closure::{ClosedManifold, LookupError};

/// Distance of the `A`-image to a stable circle at which Jacobians are flagged.
pub const NEAR_SINGULAR: f64 = 1e-8;

pub const DEFAULT_KAPPA: f64 = 0.2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SystemError {
    #[error(transparent)]
    Block(#[from] BlockError),
    #[error("cone half-slope must satisfy 0 < κ < {max}, got {kappa}")]
    Kappa { kappa: f64, max: f64 },
    #[error(transparent)]
    Lookup(#[from] LookupError),
    #[error("point lies on the stable set")]
    OnStableSet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReturnMapSystem {
    pub manifold: ClosedManifold,
    pub profile: ShearProfile,
    pub kappa: f64,
}

/// Outcome of one application of `φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepOutcome {
    Landed(SectionPoint),
    /// `A(p)` lies on `l^s₀`; the orbit falls onto the stable manifold of
    /// the vertical orbit over `vertex`.
    TerminatesAtStableSet { vertex: usize, image: SectionPoint },
}

/// Everything a single step passes through; coordinates are lifted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepTrace {
    /// `A(p)` on the incoming component, unreduced.
    pub image: SectionPoint,
    /// Lifted chart index `floor(u'/π)`.
    pub chart_total: i64,
    pub chart_in: usize,
    pub edge: usize,
    pub x: f64,
    pub y_in: f64,
    pub y_out: f64,
    pub reflected: bool,
    pub chart_out: usize,
    /// Landing point, `u` in the fundamental strip, `v` unreduced.
    pub landed: SectionPoint,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobian {
    /// In `(u, v)` coordinates.
    pub matrix: [[f64; 2]; 2],
    /// `A(p)` within [`NEAR_SINGULAR`] of a stable circle.
    pub near_singular: bool,
}

impl Jacobian {
    pub fn radian(&self) -> [[f64; 2]; 2] {
        let m = &self.matrix;
        [[m[0][0], m[0][1] / TAU], [m[1][0] * TAU, m[1][1]]]
    }

    pub fn det(&self) -> f64 {
        let m = &self.matrix;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }
}

pub(crate) fn mat_mul(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

impl ReturnMapSystem {
    pub fn new(manifold: ClosedManifold, lambda: f64, kappa: f64) -> Result<Self, SystemError> {
        let profile = ShearProfile::new(lambda)?;
        let max = manifold.maps.iter().map(|m| m.kappa_max()).fold(f64::INFINITY, f64::min);
        if !(kappa > 0.0 && kappa < max) {
            return Err(SystemError::Kappa { kappa, max });
        }
        Ok(Self {
            manifold,
            profile,
            kappa,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.profile.lambda()
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self, SystemError> {
        Self::new(self.manifold.clone(), lambda, self.kappa)
    }

    pub fn kappa_max(&self) -> f64 {
        self.manifold.maps.iter().map(|m| m.kappa_max()).fold(f64::INFINITY, f64::min)
    }

    /// Traces one step from lifted coordinates. `Err(vertex)` when the
    /// `A`-image is on a stable circle.
    pub fn trace_lifted(&self, component: usize, u: f64, v: f64) -> Result<Result<StepTrace, usize>, SystemError> {
        let map = self.manifold.map_from(component)?;
        let asm = &self.manifold.assembled;
        let (up, vp) = map.forward_lifted(u, v);
        let comp_in = &asm.components[map.incoming];
        let k = comp_in.k() as i64;
        let q = up / PI;
        let n = q.round();
        if ((q - n) * PI).abs() <= SEAM_TOL {
            let j = (n as i64).rem_euclid(k) as usize;
            return Ok(Err(comp_in.entries[j].enter_vertex));
        }
        let total = q.floor() as i64;
        let chart_in = total.rem_euclid(k) as usize;
        let x = up - total as f64 * PI - FRAC_PI_2;
        let y_in = parity(total) * vp;
        let edge = comp_in.entries[chart_in].edge;
        let block = asm.blocks[edge];
        let y_out = y_in + self.profile.shear_unchecked(x);
        let (xr, yr) = if block.reflected { (-x, -y_out) } else { (x, y_out) };
        let (co, j2) = block.outgoing;
        let landed = SectionPoint {
            component: co,
            u: xr + j2 as f64 * PI + FRAC_PI_2,
            v: parity(j2 as i64) * yr,
        };
        Ok(Ok(StepTrace {
            image: SectionPoint {
                component: map.incoming,
                u: up,
                v: vp,
            },
            chart_total: total,
            chart_in,
            edge,
            x,
            y_in,
            y_out,
            reflected: block.reflected,
            chart_out: j2,
            landed,
        }))
    }

    pub fn return_step(&self, p: SectionPoint) -> Result<StepOutcome, SystemError> {
        Ok(match self.trace_lifted(p.component, p.u, p.v)? {
            Ok(t) => StepOutcome::Landed(SectionPoint {
                v: circle::wrap(t.landed.v),
                ..t.landed
            }),
            Err(vertex) => StepOutcome::TerminatesAtStableSet {
                vertex,
                image: self.manifold.apply_gluing(p)?,
            },
        })
    }

    /// `Dφ = diag(1, ±1) · R · [[1, 0], [a'(x), 1]] · diag(1, ±1) · DA`,
    /// where `R = -I` on reflected blocks.
    pub fn return_jacobian(&self, p: SectionPoint) -> Result<Jacobian, SystemError> {
        let t = self.trace_lifted(p.component, p.u, p.v)?.map_err(|_| SystemError::OnStableSet)?;
        let map = self.manifold.map_from(p.component)?;
        let s1 = parity(t.chart_total);
        let s2 = parity(t.chart_out as i64);
        let r = if t.reflected { -1.0 } else { 1.0 };
        let ap = self.profile.shear_derivative_unchecked(t.x);
        let block = [[r, 0.0], [r * s2 * ap, r * s2 * s1]];
        let matrix = mat_mul(block, map.linear);
        let dist = (t.x.abs() - FRAC_PI_2).abs();
        Ok(Jacobian {
            matrix,
            near_singular: dist <= NEAR_SINGULAR,
        })
    }

    /// Central differences with step `h`, differences taken on the torus.
    pub fn finite_difference_jacobian(&self, p: SectionPoint, h: f64) -> Result<[[f64; 2]; 2], SystemError> {
        let land = |u: f64, v: f64| -> Result<(f64, f64), SystemError> {
            match self.trace_lifted(p.component, u, v)? {
                Ok(t) => Ok((t.landed.u, t.landed.v)),
                Err(_) => Err(SystemError::OnStableSet),
            }
        };
        let period = self.manifold.assembled.components[self.manifold.map_from(p.component)?.outgoing].period();
        let diff = |a: (f64, f64), b: (f64, f64)| {
            let du = circle::signed_diff(a.0 / period, b.0 / period) * period;
            (du, a.1 - b.1)
        };
        let pu = diff(land(p.u + h, p.v)?, land(p.u - h, p.v)?);
        let pv = diff(land(p.u, p.v + h)?, land(p.u, p.v - h)?);
        Ok([
            [pu.0 / (2.0 * h), pv.0 / (2.0 * h)],
            [pu.1 / (2.0 * h), pv.1 / (2.0 * h)],
        ])
    }

    /// Distance (in `u'`) from `A(p)` to the nearest stable circle.
    pub fn stable_distance(&self, p: SectionPoint) -> Result<f64, SystemError> {
        let map = self.manifold.map_from(p.component)?;
        let (up, _) = map.forward_lifted(p.u, p.v);
        let q = up / PI;
        Ok((q - q.round()).abs() * PI)
    }

    /// Iterates `φ` up to `n` times, stopping on the stable set.
    pub fn orbit(&self, p: SectionPoint, n: usize) -> Result<(Vec<SectionPoint>, Option<usize>), SystemError> {
        let mut pts = vec![p];
        let mut cur = p;
        for _ in 0..n {
            match self.return_step(cur)? {
                StepOutcome::Landed(q) => {
                    pts.push(q);
                    cur = q;
                }
                StepOutcome::TerminatesAtStableSet { vertex, .. } => return Ok((pts, Some(vertex))),
            }
        }
        Ok((pts, None))
    }
}
