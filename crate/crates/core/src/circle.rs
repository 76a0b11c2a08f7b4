//! Arithmetic on the fiber circle ℝ/ℤ.

/// Representative in `[0, 1)`.
pub fn wrap(y: f64) -> f64 {
    let r = y - y.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Signed difference `a - b` reduced to `[-1/2, 1/2)`.
pub fn signed_diff(a: f64, b: f64) -> f64 {
    let d = wrap(a - b);
    if d >= 0.5 {
        d - 1.0
    } else {
        d
    }
}

/// Circle distance `min(|Δ|, 1 - |Δ|)`.
pub fn dist(a: f64, b: f64) -> f64 {
    signed_diff(a, b).abs()
}

/// Representative of `x` in `[0, period)`.
pub fn wrap_period(x: f64, period: f64) -> f64 {
    let r = x - (x / period).floor() * period;
    if r >= period {
        0.0
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrapping() {
        assert_eq!(wrap(1.25), 0.25);
        assert_eq!(wrap(-0.25), 0.75);
        assert_eq!(wrap(-1e-18), 0.0);
        assert!((dist(0.95, 0.05) - 0.1).abs() < 1e-15);
        assert!((signed_diff(0.05, 0.95) - 0.1).abs() < 1e-15);
        assert!((wrap_period(-1.0, 4.0) - 3.0).abs() < 1e-15);
    }
}
