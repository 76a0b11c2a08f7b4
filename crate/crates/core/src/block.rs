//! The model block `N = I × S¹ × I`, `I = [-π/2, π/2]`, and its flow.
//!
//! The vector field is
//!
//! ```text
//! ẋ = 0
//! ẏ = λ sin(x) cos²(z)
//! ż = cos²(x) + sin²(z) sin²(x)
//! ```
//!
//! with `y` measured in turns. Orbits with `|x| < π/2` enter through the face
//! `z = -π/2` and leave through `z = π/2` after time `π / |cos x|`, sheared in
//! `y` by `a(x) = λπ (tan x - tan(x/2))`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;

use thiserror::Error;

use crate::circle;

/// Open-interval operations accept `|x| <= π/2 - WALL_CUTOFF`.
pub const WALL_CUTOFF: f64 = 1e-8;

const RANGE_SLACK: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BlockError {
    #[error("shear strength must be positive, got {0}")]
    NonPositiveLambda(f64),
    #[error("coordinate {name}={value} outside [-π/2, π/2]")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("x={0} is on a tangential wall: the orbit never crosses the block")]
    TangentialWall(f64),
    #[error("integration step must be positive, got {0}")]
    BadStep(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

fn check_interval(name: &'static str, value: f64) -> Result<f64, BlockError> {
    if !value.is_finite() || value.abs() > FRAC_PI_2 + RANGE_SLACK {
        return Err(BlockError::OutOfRange { name, value });
    }
    Ok(value.clamp(-FRAC_PI_2, FRAC_PI_2))
}

impl BlockPoint {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self, BlockError> {
        Ok(Self {
            x: check_interval("x", x)?,
            y: circle::wrap(y),
            z: check_interval("z", z)?,
        })
    }
}

/// Rejects `x` on or within [`WALL_CUTOFF`] of a tangential wall.
pub fn check_open(x: f64) -> Result<f64, BlockError> {
    let x = check_interval("x", x)?;
    if x.abs() > FRAC_PI_2 - WALL_CUTOFF {
        return Err(BlockError::TangentialWall(x));
    }
    Ok(x)
}

/// Time spent crossing the block at fixed `x`; independent of `λ` and `y`.
pub fn transit_time(x: f64) -> Result<f64, BlockError> {
    let x = check_open(x)?;
    Ok(PI / x.cos().abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShearProfile {
    lambda: f64,
}

impl ShearProfile {
    pub fn new(lambda: f64) -> Result<Self, BlockError> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(BlockError::NonPositiveLambda(lambda));
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn vector_field(&self, p: BlockPoint) -> [f64; 3] {
        field(self.lambda, p.x, p.z)
    }

    /// Exit shear `a(x)` in turns.
    pub fn shear(&self, x: f64) -> Result<f64, BlockError> {
        let x = check_open(x)?;
        Ok(self.shear_unchecked(x))
    }

    /// `a'(x) = λπ (1/2 + tan² x - tan²(x/2) / 2)`, always `>= λπ/2`.
    pub fn shear_derivative(&self, x: f64) -> Result<f64, BlockError> {
        let x = check_open(x)?;
        Ok(self.shear_derivative_unchecked(x))
    }

    pub(crate) fn shear_unchecked(&self, x: f64) -> f64 {
        self.lambda * PI * (x.tan() - (0.5 * x).tan())
    }

    pub(crate) fn shear_derivative_unchecked(&self, x: f64) -> f64 {
        let t = x.tan();
        let h = (0.5 * x).tan();
        self.lambda * PI * (0.5 + t * t - 0.5 * h * h)
    }

    /// Smallest `x >= 0` with `a(x) >= turns` (bisection; `a` is odd and increasing).
    pub(crate) fn shear_inverse(&self, turns: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, FRAC_PI_2 - WALL_CUTOFF);
        if self.shear_unchecked(hi) <= turns {
            return hi;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.shear_unchecked(mid) < turns {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }

    /// Landing point on the exit face of an orbit entering at `(x, y)`.
    pub fn exit_map(&self, x: f64, y: f64) -> Result<(f64, f64), BlockError> {
        let a = self.shear(x)?;
        Ok((x, circle::wrap(y + a)))
    }

    /// Integrates one orbit with classical RK4 until it leaves through the
    /// exit face or the time budget runs out.
    pub fn integrate_orbit(&self, start: BlockPoint, opts: &OrbitOptions) -> Result<Trajectory, BlockError> {
        if !(opts.step > 0.0) || !opts.step.is_finite() {
            return Err(BlockError::BadStep(opts.step));
        }
        let x = start.x;
        let mut t = 0.0;
        let mut y = start.y;
        let mut z = start.z;
        let mut samples = vec![TrajectorySample { t, x, y, z }];
        let stride = opts.sample_every.max(1);
        let mut n = 0usize;
        let h = opts.step;
        while t < opts.time_budget {
            let (y1, z1) = self.rk4(x, y, z, h);
            if z1 >= FRAC_PI_2 {
                // bisect the sub-step landing exactly on z = π/2
                let (mut lo, mut hi) = (0.0, h);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if self.rk4(x, y, z, mid).1 < FRAC_PI_2 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let dt = 0.5 * (lo + hi);
                let (ye, _) = self.rk4(x, y, z, dt);
                t += dt;
                samples.push(TrajectorySample {
                    t,
                    x,
                    y: circle::wrap(ye),
                    z: FRAC_PI_2,
                });
                return Ok(Trajectory {
                    samples,
                    outcome: OrbitOutcome::Exited {
                        time: t,
                        x,
                        y: circle::wrap(ye),
                        unwrapped_shift: ye - start.y,
                    },
                });
            }
            y = y1;
            z = z1;
            t += h;
            n += 1;
            if n % stride == 0 {
                samples.push(TrajectorySample {
                    t,
                    x,
                    y: circle::wrap(y),
                    z,
                });
            }
        }
        Ok(Trajectory {
            samples,
            outcome: OrbitOutcome::NonExiting { time: t, z },
        })
    }

    fn rk4(&self, x: f64, y: f64, z: f64, h: f64) -> (f64, f64) {
        let f = |z: f64| {
            let v = field(self.lambda, x, z);
            (v[1], v[2])
        };
        let (k1y, k1z) = f(z);
        let (k2y, k2z) = f(z + 0.5 * h * k1z);
        let (k3y, k3z) = f(z + 0.5 * h * k2z);
        let (k4y, k4z) = f(z + h * k3z);
        let _ = (k1y, k2y, k3y, k4y);
        (
            y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y),
            z + h / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z),
        )
    }
}

fn field(lambda: f64, x: f64, z: f64) -> [f64; 3] {
    let (sx, cx) = x.sin_cos();
    let (sz, cz) = z.sin_cos();
    [0.0, lambda * sx * cz * cz, cx * cx + sz * sz * sx * sx]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitOptions {
    pub step: f64,
    pub time_budget: f64,
    /// Keep every n-th step in the trajectory.
    pub sample_every: usize,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        Self {
            step: 1e-3,
            time_budget: 200.0,
            sample_every: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OrbitOutcome {
    /// Left through the face `z = π/2`.
    Exited {
        time: f64,
        x: f64,
        y: f64,
        /// Total `y` displacement, not reduced mod 1.
        unwrapped_shift: f64,
    },
    /// Budget exhausted; the orbit is accumulating on a vertical orbit.
    NonExiting { time: f64, z: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    pub outcome: OrbitOutcome,
}

impl Trajectory {
    /// CSV with header `t,x,y,z`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,x,y,z\n");
        for s in &self.samples {
            let _ = writeln!(out, "{:.12e},{:.12e},{:.12e},{:.12e}", s.t, s.x, s.y, s.z);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryReport {
    /// Largest residual under `y`-rotations.
    pub rotation_residual: f64,
    /// Largest residual under `(x, y, z) ↦ (-x, -y, z)`.
    pub reflection_residual: f64,
    pub samples: usize,
}

/// Rotation offsets tested at each sample.
pub const ROTATION_OFFSETS: [f64; 4] = [0.1, 0.25, 0.5, 0.8125];

/// Residuals of the two block symmetries for an arbitrary field.
///
/// For a symmetry `S` with derivative `DS`, the residual at `p` is
/// `max |DS·X(p) - X(S p)|`.
pub fn symmetry_residuals<F>(field: F, samples: &[BlockPoint]) -> SymmetryReport
where
    F: Fn(BlockPoint) -> [f64; 3],
{
    let mut rotation_residual: f64 = 0.0;
    let mut reflection_residual: f64 = 0.0;
    for &p in samples {
        let v = field(p);
        for off in ROTATION_OFFSETS {
            let q = BlockPoint {
                y: circle::wrap(p.y + off),
                ..p
            };
            let w = field(q);
            for i in 0..3 {
                rotation_residual = rotation_residual.max((v[i] - w[i]).abs());
            }
        }
        let q = BlockPoint {
            x: -p.x,
            y: circle::wrap(-p.y),
            z: p.z,
        };
        let w = field(q);
        let pushed = [-v[0], -v[1], v[2]];
        for i in 0..3 {
            reflection_residual = reflection_residual.max((pushed[i] - w[i]).abs());
        }
    }
    SymmetryReport {
        rotation_residual,
        reflection_residual,
        samples: samples.len(),
    }
}

pub fn check_symmetries(profile: &ShearProfile, samples: &[BlockPoint]) -> SymmetryReport {
    symmetry_residuals(|p| profile.vector_field(p), samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64, z: f64) -> BlockPoint {
        BlockPoint::new(x, y, z).unwrap()
    }

    #[test]
    fn field_values() {
        let one = ShearProfile::new(1.0).unwrap();
        assert_eq!(one.vector_field(p(0.0, 0.4, 0.0)), [0.0, 0.0, 1.0]);
        let v = ShearProfile::new(3.0).unwrap().vector_field(p(-FRAC_PI_2, 0.7, 0.0));
        assert_eq!(v[0], 0.0);
        assert!((v[1] + 3.0).abs() < 1e-15);
        assert!(v[2].abs() < 1e-30);
        let w = one.vector_field(p(FRAC_PI_2, 0.0, FRAC_PI_2));
        assert!(w[1].abs() < 1e-15 && (w[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn transit_closed_form() {
        assert!((transit_time(0.0).unwrap() - PI).abs() < 1e-15);
        assert!((transit_time(PI / 3.0).unwrap() - 2.0 * PI).abs() < 1e-13);
        assert!(matches!(transit_time(FRAC_PI_2), Err(BlockError::TangentialWall(_))));
        assert!(transit_time(FRAC_PI_2 - 1e-9).is_err());
        assert!(transit_time(FRAC_PI_2 - 1e-7).is_ok());
    }

    #[test]
    fn shear_values() {
        let s2 = ShearProfile::new(2.0).unwrap();
        assert_eq!(s2.shear(0.0).unwrap(), 0.0);
        assert!((s2.shear(0.7).unwrap() + s2.shear(-0.7).unwrap()).abs() < 1e-15);
        let s1 = ShearProfile::new(1.0).unwrap();
        let expected = PI * (3f64.sqrt() - 1.0 / 3f64.sqrt());
        assert!((s1.shear(PI / 3.0).unwrap() - expected).abs() < 1e-13);
        assert!((expected - 3.62760).abs() < 1e-5);
        assert!(s1.shear(-FRAC_PI_2).is_err());
    }

    #[test]
    fn shear_derivative_matches_finite_differences() {
        let s = ShearProfile::new(1.7).unwrap();
        for i in -14..=14 {
            let x = i as f64 * 0.1;
            let h = 1e-6;
            let fd = (s.shear(x + h).unwrap() - s.shear(x - h).unwrap()) / (2.0 * h);
            let d = s.shear_derivative(x).unwrap();
            assert!((fd - d).abs() <= 1e-6 * d.abs().max(1.0), "x={x} fd={fd} d={d}");
            assert!(d >= 1.7 * PI / 2.0 - 1e-12);
        }
    }

    #[test]
    fn exit_map_examples() {
        let s5 = ShearProfile::new(5.0).unwrap();
        assert_eq!(s5.exit_map(0.0, 0.25).unwrap(), (0.0, 0.25));
        let (_, a) = s5.exit_map(0.3, 0.1).unwrap();
        let (_, b) = s5.exit_map(0.3, 0.6).unwrap();
        assert!((circle::signed_diff(b, a) + 0.5).abs() < 1e-12 || (circle::signed_diff(b, a) - 0.5).abs() < 1e-12);
        let (x, y) = ShearProfile::new(1.0).unwrap().exit_map(PI / 3.0, 0.0).unwrap();
        assert_eq!(x, PI / 3.0);
        assert!((y - 0.62760).abs() < 1e-5);
    }

    #[test]
    fn integration_matches_closed_forms() {
        let s = ShearProfile::new(1.0).unwrap();
        let opts = OrbitOptions::default();
        let tr = s.integrate_orbit(p(0.0, 0.25, -FRAC_PI_2), &opts).unwrap();
        match tr.outcome {
            OrbitOutcome::Exited { time, x, y, .. } => {
                assert!((time - PI).abs() < 1e-6);
                assert_eq!(x, 0.0);
                assert!((y - 0.25).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
        let tr = s.integrate_orbit(p(PI / 3.0, 0.0, -FRAC_PI_2), &opts).unwrap();
        let (_, y_exact) = s.exit_map(PI / 3.0, 0.0).unwrap();
        match tr.outcome {
            OrbitOutcome::Exited { y, time, .. } => {
                assert!(circle::dist(y, y_exact) < 1e-6);
                assert!((time - 2.0 * PI).abs() < 1e-6);
            }
            other => panic!("{other:?}"),
        }
        assert!(tr.samples.iter().all(|q| q.x == PI / 3.0));
    }

    #[test]
    fn wall_orbit_never_exits() {
        let s = ShearProfile::new(1.0).unwrap();
        let opts = OrbitOptions {
            time_budget: 50.0,
            ..OrbitOptions::default()
        };
        let tr = s.integrate_orbit(p(-FRAC_PI_2, 0.3, -FRAC_PI_2), &opts).unwrap();
        match tr.outcome {
            OrbitOutcome::NonExiting { z, .. } => assert!(z < 0.0 && z > -0.1),
            other => panic!("{other:?}"),
        }
        // y decreases along the way, spiralling in the negative direction
        let first = tr.samples[1];
        let start = tr.samples[0];
        assert!(circle::signed_diff(first.y, start.y) < 0.0);
    }

    #[test]
    fn symmetric_field_and_negative_control() {
        let s = ShearProfile::new(2.0).unwrap();
        let pts: Vec<BlockPoint> = (0..50)
            .map(|i| {
                let t = i as f64 / 50.0;
                p((t - 0.5) * 3.0, t * 0.77, (0.5 - t) * 2.9)
            })
            .collect();
        let r = check_symmetries(&s, &pts);
        assert_eq!(r.rotation_residual, 0.0);
        assert!(r.reflection_residual <= 1e-12);
        let bad = symmetry_residuals(
            |q| {
                let mut v = s.vector_field(q);
                v[2] += 0.01 * q.x;
                v
            },
            &pts,
        );
        assert!(bad.reflection_residual > 1e-3);
        let bad_rot = symmetry_residuals(
            |q| {
                let mut v = s.vector_field(q);
                v[1] += 0.01 * (2.0 * PI * q.y).sin();
                v
            },
            &pts,
        );
        assert!(bad_rot.rotation_residual > 1e-4);
    }

    #[test]
    fn bad_inputs() {
        assert!(ShearProfile::new(0.0).is_err());
        assert!(ShearProfile::new(-1.0).is_err());
        assert!(BlockPoint::new(2.0, 0.0, 0.0).is_err());
        let s = ShearProfile::new(1.0).unwrap();
        let opts = OrbitOptions { step: 0.0, ..Default::default() };
        assert!(s.integrate_orbit(p(0.0, 0.0, 0.0), &opts).is_err());
    }

    #[test]
    fn csv_header() {
        let s = ShearProfile::new(1.0).unwrap();
        let tr = s.integrate_orbit(p(0.0, 0.0, -FRAC_PI_2), &OrbitOptions::default()).unwrap();
        assert!(tr.to_csv().starts_with("t,x,y,z\n"));
    }
}
