//! Principal branch of the Lambert W function.

use crate::{Error, Result};

/// `-1/e`, computed the same way callers compute `-exp(-1)`.
pub fn branch_point() -> f64 {
    -(-1.0f64).exp()
}

/// `W0(z)` for `z >= -1/e`: the real solution of `w exp(w) = z` with `w >= -1`.
///
/// Starts from a branch-point series, a logarithmic guess for large `z`, or
/// `log(1 + z)` elsewhere, then applies Halley steps.
pub fn lambert_w0(z: f64) -> Result<f64> {
    let bp = branch_point();
    if z.is_nan() || z < bp - 4.0 * f64::EPSILON * bp.abs() {
        return Err(Error::domain("z", z, "z >= -1/e"));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    if z.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let q = 2.0 * (std::f64::consts::E * z + 1.0);
    if q <= 0.0 {
        return Ok(-1.0);
    }
    let p = q.sqrt();
    if p < 1e-3 {
        // Truncation error is O(p^5) < 1e-15.
        return Ok(-1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p.powi(3) - 43.0 / 540.0 * p.powi(4));
    }
    let mut w = if p < 0.5 {
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p.powi(3)
    } else if z > 3.0 {
        let l1 = z.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    } else {
        z.ln_1p()
    };
    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - z;
        let wp1 = w + 1.0;
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * w.abs().max(1e-300) {
            return Ok(w);
        }
    }
    Err(Error::NonConvergence {
        what: "lambert_w0",
        residual: (w * w.exp() - z).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_points() {
        assert_eq!(lambert_w0(0.0).unwrap(), 0.0);
        assert!((lambert_w0(std::f64::consts::E).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(lambert_w0(branch_point()).unwrap(), -1.0);
        assert!(lambert_w0(-0.5).is_err());
    }

    #[test]
    fn omega_constant() {
        assert!((lambert_w0(1.0).unwrap() - 0.567_143_290_409_783_8).abs() < 1e-15);
    }

    #[test]
    fn residual_across_range() {
        let mut z = branch_point() * (1.0 - 1e-12);
        while z < 1e12 {
            let w = lambert_w0(z).unwrap();
            let r = (w * w.exp() - z).abs();
            assert!(r <= 1e-14 * z.abs().max(1e-300) || r < 1e-15, "z={z} w={w} r={r}");
            z = if z < 0.0 { z * 0.7 + 1e-18 } else { z * 3.0 + 1e-3 };
            if z.abs() < 1e-16 {
                z = 1e-16;
            }
        }
    }
}
