//! Energy-dependent Green's function of the Dirac operator with zero-range
//! centers, as the free Green's function plus its Sturmian expansion:
//!
//! `G(E, r, r') = G0(E, r, r') - (1/eps) sum_a Sigma_a(E, r) Sigma_a^dagger(E, r') / lambda_a(E)`.

use std::f64::consts::PI;

use nalgebra::Vector3;
use serde::Serialize;

use crate::assembly::eig_l;
use crate::model::{f_kernel, g_kernel, sigma_dot, CenterConfig, Kinematics, Mat4, C64};
use crate::states::bispinor;
use crate::{Error, Result};

/// Energies where some `|lambda_a(E)|` is at or below this are poles.
pub const POLE_GUARD: f64 = 1e-10;

/// `(k/4 pi) [[(E+1) f I, i k g (mu . sigma)], [i k g (mu . sigma), (E-1) f I]]`
/// with `f, g` at `k |r - r'|` and `mu = (r - r')/|r - r'|`.
pub fn free_green(energy: f64, r: &Vector3<f64>, rp: &Vector3<f64>) -> Result<Mat4> {
    if !(energy > -1.0 && energy < 1.0) {
        return Err(Error::domain("E", energy, "-1 < E < 1"));
    }
    let kin = Kinematics::from_energy(energy)?;
    let d = r - rp;
    let dist = d.norm();
    if dist == 0.0 {
        return Err(Error::domain("|r - r'|", 0.0, "r != r'"));
    }
    let z = kin.k * dist;
    let diag_up = C64::from((energy + 1.0) * f_kernel(z));
    let diag_dn = C64::from((energy - 1.0) * f_kernel(z));
    let off = sigma_dot(&(d / dist)) * C64::new(0.0, kin.k * g_kernel(z));
    let mut m = Mat4::zeros();
    m[(0, 0)] = diag_up;
    m[(1, 1)] = diag_up;
    m[(2, 2)] = diag_dn;
    m[(3, 3)] = diag_dn;
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(&off);
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(&off);
    Ok(m * C64::from(kin.k / (4.0 * PI)))
}

/// The Sturmian sum `(1/eps) sum_a Sigma_a(r) Sigma_a^dagger(r') / lambda_a`.
pub fn sturmian_part(
    centers: &[CenterConfig],
    energy: f64,
    r: &Vector3<f64>,
    rp: &Vector3<f64>,
) -> Result<Mat4> {
    let eig = eig_l(centers, energy)?;
    let worst = eig.values.iter().fold(f64::INFINITY, |m, l| m.min(l.abs()));
    if worst <= POLE_GUARD {
        return Err(Error::Pole {
            energy,
            lambda: worst,
        });
    }
    let mut s = Mat4::zeros();
    for (a, lam) in eig.values.iter().enumerate() {
        let y = eig.vector(a);
        let sr = bispinor(centers, &eig.kin, &y, r)?;
        let srp = bispinor(centers, &eig.kin, &y, rp)?;
        s += sr * srp.adjoint() * C64::from(1.0 / lam);
    }
    Ok(s / C64::from(eig.kin.eps))
}

pub fn full_green(
    centers: &[CenterConfig],
    energy: f64,
    r: &Vector3<f64>,
    rp: &Vector3<f64>,
) -> Result<Mat4> {
    let g0 = free_green(energy, r, rp)?;
    Ok(g0 - sturmian_part(centers, energy, r, rp)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoleSample {
    pub energy: f64,
    pub min_abs_lambda: f64,
}

/// `min_a |lambda_a(E)|` over `grid`; dips toward zero mark bound-state poles.
pub fn green_pole_scan(centers: &[CenterConfig], grid: &[f64]) -> Result<Vec<PoleSample>> {
    grid.iter()
        .map(|&e| {
            let eig = eig_l(centers, e)?;
            Ok(PoleSample {
                energy: e,
                min_abs_lambda: eig.values.iter().fold(f64::INFINITY, |m, l| m.min(l.abs())),
            })
        })
        .collect()
}
