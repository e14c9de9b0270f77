//! Verification suite: every algebraic identity, oracle comparison and
//! conservation law checked on one configuration, with pinned tolerances.

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::assembly::{build_l, eig_l, EigDecomposition};
use crate::green::full_green;
use crate::model::{distances, validate_centers, CenterConfig, Mat4, C64};
use crate::quadrature::{extrapolate_to_zero, sphere_surface_integral, yukawa_overlap_quadrature};
use crate::spectral::{find_normalized_states, BoundState, SolverOptions};
use crate::states::{
    assemble_sturmian, flux_through_sphere, identity_residual, yukawa_overlap, Identity,
};
use crate::model::DiracMatrices;
use crate::Result;

pub const TOL_IDENTITY: f64 = 1e-10;
pub const TOL_ORTHONORMALITY: f64 = 1e-9;
pub const TOL_DETERMINANT: f64 = 1e-9;
pub const TOL_YUKAWA: f64 = 1e-7;
pub const TOL_STURMIAN_SURFACE: f64 = 1e-5;
pub const TOL_STURMIAN_ALGEBRAIC: f64 = 1e-12;
pub const TOL_GREEN_SYMMETRY: f64 = 1e-12;
pub const TOL_FLUX: f64 = 1e-6;

/// Sphere radii whose surface integrals are extrapolated to `rho = 0`.
pub const STURMIAN_RADII: [f64; 2] = [1e-4, 5e-5];
/// Radius of the flux spheres (shrunk for closely spaced centers).
pub const FLUX_RADIUS: f64 = 1e-3;
/// Number of random point pairs for the Green symmetry check.
pub const GREEN_PAIRS: usize = 20;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub seed: u64,
    pub states: usize,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: &'static str, value: f64, tolerance: f64) {
        self.checks.push(Check {
            name,
            value,
            tolerance,
            pass: value <= tolerance,
        });
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyOptions {
    pub solver: SolverOptions,
    pub seed: u64,
    /// Perturbs the first state's coefficients after normalization; the
    /// null-vector check must then fail.
    pub corrupt: bool,
}

/// A seeded energy in `(-0.9, 0.9)` where every `|lambda_a|` exceeds `1e-6`.
fn regular_energy(centers: &[CenterConfig], rng: &mut ChaCha8Rng) -> Result<EigDecomposition> {
    let mut last = None;
    for _ in 0..100 {
        let e = rng.random_range(-0.9..0.9);
        let eig = eig_l(centers, e)?;
        if eig.values.iter().all(|l| l.abs() > 1e-6) {
            return Ok(eig);
        }
        last = Some(eig);
    }
    Ok(last.expect("at least one draw"))
}

/// A seeded point at least `0.05` away from every center.
fn random_point(centers: &[CenterConfig], rng: &mut ChaCha8Rng) -> Vector3<f64> {
    let mut lo = Vector3::repeat(f64::INFINITY);
    let mut hi = Vector3::repeat(f64::NEG_INFINITY);
    for c in centers {
        lo = lo.inf(&c.pos());
        hi = hi.sup(&c.pos());
    }
    loop {
        let r = Vector3::from_fn(|i, _| rng.random_range(lo[i] - 2.0..hi[i] + 2.0));
        if centers.iter().all(|c| (r - c.pos()).norm() > 0.05) {
            return r;
        }
    }
}

fn min_separation(centers: &[CenterConfig]) -> f64 {
    let d = distances(centers);
    let mut m = f64::INFINITY;
    for i in 0..centers.len() {
        for j in i + 1..centers.len() {
            m = m.min(d[i][j]);
        }
    }
    m
}

/// Largest `|det L(E_a)| / max(||L||, 1)^(2N)` over the states.
fn determinant_residual(centers: &[CenterConfig], states: &[BoundState]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for s in states {
        let l = build_l(centers, s.energy)?;
        let scale = l.norm().max(1.0).powi(l.nrows() as i32);
        worst = worst.max(l.determinant().norm() / scale);
    }
    Ok(worst)
}

/// Closed-form Yukawa overlaps against prolate-spheroidal quadrature for every
/// pair of state momenta and every center distance.
fn yukawa_residual(centers: &[CenterConfig], states: &[BoundState]) -> Result<f64> {
    let d = distances(centers);
    let mut ks: Vec<f64> = states.iter().map(|s| s.kin.k).collect();
    if ks.is_empty() {
        ks.push(0.8);
    }
    ks.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let mut worst: f64 = 0.0;
    for &a in &ks {
        for &b in &ks {
            for row in &d {
                for &dist in row {
                    let exact = yukawa_overlap(a, b, dist);
                    let quad = yukawa_overlap_quadrature(a, b, dist)?;
                    worst = worst.max((exact - quad).abs() / exact);
                }
            }
        }
    }
    Ok(worst)
}

/// `max_ab |(4 pi/k^2) y_b^dagger y_a - delta_ab|`.
fn sturmian_algebraic(eig: &EigDecomposition) -> f64 {
    let y = &eig.vectors;
    let gram = y.adjoint() * y * C64::from(4.0 * std::f64::consts::PI / (eig.kin.k * eig.kin.k));
    let n = gram.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - want).norm());
        }
    }
    worst
}

/// `max_ab |lim sum_n (Sigma_b | beta_plus Sigma_a)_{S_n} - delta_ab|`, the
/// limit taken by extrapolating sphere quadratures in the radius.
fn sturmian_surface(centers: &[CenterConfig], eig: &EigDecomposition) -> Result<f64> {
    let beta_plus: Mat4 = DiracMatrices::new().beta_plus;
    let n = eig.values.len();
    let mut worst: f64 = 0.0;
    for b in 0..n {
        for a in b..n {
            let (yb, ya) = (eig.vector(b), eig.vector(a));
            let mut samples = Vec::with_capacity(STURMIAN_RADII.len());
            for &rho in &STURMIAN_RADII {
                let mut s = C64::from(0.0);
                for c in centers {
                    s += sphere_surface_integral(
                        |r| assemble_sturmian(centers, eig.energy, &yb, r),
                        |r| assemble_sturmian(centers, eig.energy, &ya, r),
                        &c.pos(),
                        rho,
                        &beta_plus,
                    )?;
                }
                samples.push((rho, s));
            }
            let want = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((extrapolate_to_zero(&samples) - want).norm());
        }
    }
    Ok(worst)
}

/// `max ||G(r, r') - G(r', r)^dagger|| / ||G(r, r')||` over seeded pairs.
fn green_symmetry(
    centers: &[CenterConfig],
    energy: f64,
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..GREEN_PAIRS {
        let r = random_point(centers, rng);
        let rp = random_point(centers, rng);
        let g = full_green(centers, energy, &r, &rp)?;
        let gt = full_green(centers, energy, &rp, &r)?;
        worst = worst.max((g - gt.adjoint()).norm() / g.norm());
    }
    Ok(worst)
}

/// Largest `|flux| / oint |j|` over states and centers.
fn flux_residual(centers: &[CenterConfig], states: &[BoundState]) -> Result<f64> {
    let rho = FLUX_RADIUS.min(0.25 * min_separation(centers));
    let mut worst: f64 = 0.0;
    for s in states {
        for n in 0..centers.len() {
            let (flux, mag) = flux_through_sphere(centers, s, n, rho)?;
            if mag > 0.0 {
                worst = worst.max(flux.abs() / mag);
            }
        }
    }
    Ok(worst)
}

pub fn run(centers: &[CenterConfig], opts: &VerifyOptions) -> Result<Report> {
    validate_centers(centers)?;
    let mut states = find_normalized_states(centers, &opts.solver)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    if opts.corrupt {
        if let Some(s) = states.first_mut() {
            let scale = s.coefficients.norm();
            for z in s.coefficients.iter_mut() {
                *z += C64::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)) * scale;
            }
        }
    }
    let mut report = Report {
        seed: opts.seed,
        states: states.len(),
        checks: Vec::new(),
    };
    report.push(
        "null_vector",
        identity_residual(Identity::NullVector, centers, &states)?,
        TOL_IDENTITY,
    );
    report.push("determinant", determinant_residual(centers, &states)?, TOL_DETERMINANT);
    for id in [
        Identity::EnergyDerivative,
        Identity::CrossEnergyK,
        Identity::CrossEnergyEps,
        Identity::CrossEnergyInverseEps,
    ] {
        report.push(id.name(), identity_residual(id, centers, &states)?, TOL_IDENTITY);
    }
    report.push(
        "orthonormality",
        identity_residual(Identity::Orthonormality, centers, &states)?,
        TOL_ORTHONORMALITY,
    );
    report.push(
        "norm_forms",
        identity_residual(Identity::NormForms, centers, &states)?,
        TOL_IDENTITY,
    );
    report.push("yukawa_oracle", yukawa_residual(centers, &states)?, TOL_YUKAWA);
    let eig = regular_energy(centers, &mut rng)?;
    report.push("sturmian_algebraic", sturmian_algebraic(&eig), TOL_STURMIAN_ALGEBRAIC);
    report.push(
        "sturmian_surface",
        sturmian_surface(centers, &eig)?,
        TOL_STURMIAN_SURFACE,
    );
    report.push(
        "green_symmetry",
        green_symmetry(centers, eig.energy, &mut rng)?,
        TOL_GREEN_SYMMETRY,
    );
    report.push("flux", flux_residual(centers, &states)?, TOL_FLUX);
    Ok(report)
}
