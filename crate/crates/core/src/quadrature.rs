//! Numerical integration used as an independent check on closed forms:
//! Gauss-Legendre and adaptive Gauss-Kronrod rules, a product rule on the
//! unit sphere, prolate-spheroidal Yukawa overlaps, and polynomial
//! extrapolation to `rho -> 0`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::Vector3;

use crate::model::{Mat4, C64};
use crate::states::Bispinor;
use crate::{Error, Result};

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Polar nodes of the sphere rule.
pub const SPHERE_THETA: usize = 32;
/// Azimuthal nodes of the sphere rule.
pub const SPHERE_PHI: usize = 64;

/// Product rule on the unit sphere: Gauss-Legendre in `cos theta` times the
/// trapezoid rule in `phi`. Weights sum to `4 pi`.
pub fn sphere_rule() -> &'static [(Vector3<f64>, f64)] {
    static RULE: OnceLock<Vec<(Vector3<f64>, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let (ct, wt) = gauss_legendre(SPHERE_THETA);
        let dphi = 2.0 * PI / SPHERE_PHI as f64;
        let mut out = Vec::with_capacity(SPHERE_THETA * SPHERE_PHI);
        for (c, w) in ct.iter().zip(&wt) {
            let s = (1.0 - c * c).sqrt();
            for j in 0..SPHERE_PHI {
                let phi = (j as f64 + 0.5) * dphi;
                out.push((Vector3::new(s * phi.cos(), s * phi.sin(), *c), w * dphi));
            }
        }
        out
    })
}

/// `oint_{|r - c| = rho} Phi_b^dagger W Phi_a dS`.
pub fn sphere_surface_integral(
    phi_b: impl Fn(&Vector3<f64>) -> Result<Bispinor>,
    phi_a: impl Fn(&Vector3<f64>) -> Result<Bispinor>,
    center: &Vector3<f64>,
    rho: f64,
    weight: &Mat4,
) -> Result<C64> {
    let mut s = C64::from(0.0);
    for (mu, w) in sphere_rule() {
        let r = center + mu * rho;
        s += phi_b(&r)?.dotc(&(weight * phi_a(&r)?)) * (w * rho * rho);
    }
    Ok(s)
}

/// Neville extrapolation of `value(rho)` to `rho = 0` through all samples.
pub fn extrapolate_to_zero(samples: &[(f64, C64)]) -> C64 {
    let n = samples.len();
    let mut p: Vec<C64> = samples.iter().map(|s| s.1).collect();
    for m in 1..n {
        for i in 0..n - m {
            let (xi, xj) = (samples[i].0, samples[i + m].0);
            p[i] = (p[i + 1] * xi - p[i] * xj) / (xi - xj);
        }
    }
    p[0]
}

/// 15-point Kronrod rule with embedded 7-point Gauss rule.
const XK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XK[j];
        let s = f(c - dx) + f(c + dx);
        k += WK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss-Kronrod integration to relative tolerance `rtol`.
pub fn integrate_adaptive(f: impl Fn(f64) -> f64, a: f64, b: f64, rtol: f64) -> Result<f64> {
    let mut pieces = vec![(a, b, gk15(&f, a, b))];
    for _ in 0..20_000 {
        let total: f64 = pieces.iter().map(|p| p.2 .0).sum();
        let err: f64 = pieces.iter().map(|p| p.2 .1).sum();
        if err <= rtol * total.abs() || err < 1e-300 {
            return Ok(total);
        }
        let (i, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2 .1.total_cmp(&y.1 .2 .1))
            .unwrap();
        let (lo, hi, _) = pieces.swap_remove(i);
        let mid = 0.5 * (lo + hi);
        pieces.push((lo, mid, gk15(&f, lo, mid)));
        pieces.push((mid, hi, gk15(&f, mid, hi)));
    }
    let err: f64 = pieces.iter().map(|p| p.2 .1).sum();
    Err(Error::NonConvergence {
        what: "integrate_adaptive",
        residual: err,
    })
}

/// Relative tolerance of the radial integrals.
pub const RADIAL_RTOL: f64 = 1e-10;

/// `4 pi int_rho^inf r^2 density(r) dr` for a spherically symmetric density,
/// truncated where `exp(-2 k r)` falls below `1e-26`. The range is split
/// geometrically so the `1/r^2` growth near `rho` is resolved.
pub fn radial_volume_integral(density: impl Fn(f64) -> f64, rho: f64, k: f64) -> Result<f64> {
    if !(rho > 0.0 && k > 0.0) {
        return Err(Error::domain("rho", rho, "rho > 0, k > 0"));
    }
    let end = rho + 30.0 / k;
    let mut edges = vec![rho];
    while *edges.last().unwrap() * 2.0 < end {
        let next = edges.last().unwrap() * 2.0;
        edges.push(next);
    }
    edges.push(end);
    let mut total = 0.0;
    for w in edges.windows(2) {
        total += integrate_adaptive(|r| 4.0 * PI * r * r * density(r), w[0], w[1], RADIAL_RTOL)?;
    }
    Ok(total)
}

/// `int d^3r exp(-a r_1) exp(-b r_2) / (r_1 r_2)` by quadrature in prolate
/// spheroidal coordinates (`xi = (r_1 + r_2)/d`, `eta = (r_1 - r_2)/d`,
/// volume element `d^3/8 (xi^2 - eta^2) dxi deta dphi`). For `d = 0` a
/// radial integral is used instead.
pub fn yukawa_overlap_quadrature(a: f64, b: f64, d: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0 && d >= 0.0) {
        return Err(Error::domain("a, b", a.min(b), "a, b > 0 and d >= 0"));
    }
    if d == 0.0 {
        let s = a + b;
        return integrate_adaptive(|r| 4.0 * PI * (-s * r).exp(), 0.0, 60.0 / s, 1e-12);
    }
    let integrand = |xi: f64, eta: f64| {
        let r1 = 0.5 * d * (xi + eta);
        let r2 = 0.5 * d * (xi - eta);
        let jac = d.powi(3) / 8.0 * (xi * xi - eta * eta);
        2.0 * PI * (-a * r1 - b * r2).exp() / (r1 * r2) * jac
    };
    let xi_max = 1.0 + 60.0 / (d * (a + b));
    let (en, ew) = gauss_legendre(48);
    let inner = |xi: f64| -> f64 { en.iter().zip(&ew).map(|(e, w)| w * integrand(xi, *e)).sum() };
    // Panels of roughly one decay length each in xi.
    let panel = (2.0 / (d * (a + b))).min(xi_max - 1.0);
    let mut total = 0.0;
    let mut lo = 1.0;
    while lo < xi_max {
        let hi = (lo + panel).min(xi_max);
        total += integrate_adaptive(inner, lo, hi, 1e-12)?;
        lo = hi;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in [1, 2, 5, 32] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
            let deg = 2 * n - 1;
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32 - 1)).sum();
            let exact = if (deg - 1) % 2 == 0 { 2.0 / deg as f64 } else { 0.0 };
            assert!((q - exact).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn sphere_rule_area_and_moments() {
        let r = sphere_rule();
        let area: f64 = r.iter().map(|p| p.1).sum();
        assert!((area - 4.0 * PI).abs() < 1e-12);
        let z2: f64 = r.iter().map(|p| p.1 * p.0.z * p.0.z).sum();
        assert!((z2 - 4.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn adaptive_integrates_exponential() {
        let v = integrate_adaptive(|x| (-x).exp(), 0.0, 40.0, 1e-12).unwrap();
        assert!((v - (1.0 - (-40.0f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn extrapolation_is_exact_for_quadratics() {
        let f = |r: f64| C64::new(2.0 + 3.0 * r - r * r, -1.0 + r);
        let s: Vec<(f64, C64)> = [1e-2, 3e-3, 1e-3].iter().map(|&r| (r, f(r))).collect();
        assert!((extrapolate_to_zero(&s) - C64::new(2.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn same_exponent_overlap() {
        let (k, d) = (0.8, 1.5);
        let q = yukawa_overlap_quadrature(k, k, d).unwrap();
        let exact = 2.0 * PI / k * (-k * d).exp();
        assert!(((q - exact) / exact).abs() < 1e-9);
    }
}
