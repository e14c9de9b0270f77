//! Bound-state and Sturmian bispinors, the pseudo-product, the algebraic
//! identities satisfied by roots of `L`, and the probability current.
//!
//! A coefficient vector `x = (chi_1, ..., chi_N)` at energy `E` defines
//!
//! `Psi(r) = sum_n ( f(k r_n) chi_n ; i eps g(k r_n) (mu_n . sigma) chi_n )`
//!
//! with `r_n = |r - R_n|` and `mu_n = (r - R_n)/r_n`.

use std::f64::consts::PI;

use nalgebra::{Vector3, Vector4};
use serde::Serialize;

use crate::assembly::{build_dl_de, build_l, CVector};
use crate::model::{
    distances, f_kernel, g_kernel, k_plus, sigma_dot, CenterConfig, DiracMatrices, Kinematics, Mat2, C64,
};
use crate::spectral::BoundState;
use crate::{Error, Result};

pub type Bispinor = Vector4<C64>;

fn chi(x: &CVector, n: usize) -> nalgebra::Vector2<C64> {
    nalgebra::Vector2::new(x[2 * n], x[2 * n + 1])
}

/// Bispinor built from coefficients `x` at kinematics `kin`; fails at a center.
pub fn bispinor(
    centers: &[CenterConfig],
    kin: &Kinematics,
    x: &CVector,
    r: &Vector3<f64>,
) -> Result<Bispinor> {
    let mut psi = Bispinor::zeros();
    for (n, c) in centers.iter().enumerate() {
        let d = r - c.pos();
        let rn = d.norm();
        if rn == 0.0 {
            return Err(Error::domain("|r - R_n|", 0.0, "r away from every center"));
        }
        let z = kin.k * rn;
        let ch = chi(x, n);
        let up = ch * C64::from(f_kernel(z));
        let low = sigma_dot(&(d / rn)) * ch * (C64::new(0.0, kin.eps * g_kernel(z)));
        psi[0] += up[0];
        psi[1] += up[1];
        psi[2] += low[0];
        psi[3] += low[1];
    }
    Ok(psi)
}

pub fn assemble_wavefunction(
    centers: &[CenterConfig],
    state: &BoundState,
    r: &Vector3<f64>,
) -> Result<Bispinor> {
    bispinor(centers, &state.kin, &state.coefficients, r)
}

/// Sturmian function for the eigenvector `y` of `L(E)`.
pub fn assemble_sturmian(
    centers: &[CenterConfig],
    energy: f64,
    y: &CVector,
    r: &Vector3<f64>,
) -> Result<Bispinor> {
    bispinor(centers, &Kinematics::from_energy(energy)?, y, r)
}

/// Boundary operator at center `n` applied to a bispinor sampled at `r`:
/// `[i (r - R_n) . alpha_plus + (|r - R_n|/2) K_n^+ + (eps/k) beta_plus - lambda eps |r - R_n| beta_plus] Psi`.
/// It vanishes linearly as `r -> R_n` for bound states (`lambda = 0`) and
/// for Sturmian functions with eigenvalue `lambda`.
pub fn limiting_bracket(
    centers: &[CenterConfig],
    n: usize,
    kin: &Kinematics,
    lambda: f64,
    r: &Vector3<f64>,
    psi: &Bispinor,
) -> Bispinor {
    let dm = DiracMatrices::new();
    let d = r - centers[n].pos();
    let rho = d.norm();
    let mut op = k_plus(&centers[n].interaction()) * C64::from(0.5 * rho)
        + dm.beta_plus * C64::from(kin.eps / kin.k - lambda * kin.eps * rho);
    for i in 0..3 {
        op += dm.alpha_plus[i] * C64::new(0.0, d[i]);
    }
    op * psi
}

/// Probability current `Psi^dagger alpha Psi`.
pub fn current_density(psi: &Bispinor) -> Vector3<f64> {
    let dm = DiracMatrices::new();
    Vector3::from_fn(|i, _| psi.dotc(&(dm.alpha[i] * psi)).re)
}

/// Outward flux of the current through a sphere of radius `rho` about
/// center `n`, and the surface integral of `|j|` for scale.
pub fn flux_through_sphere(
    centers: &[CenterConfig],
    state: &BoundState,
    n: usize,
    rho: f64,
) -> Result<(f64, f64)> {
    let c = centers[n].pos();
    let mut flux = 0.0;
    let mut mag = 0.0;
    for (mu, w) in crate::quadrature::sphere_rule() {
        let psi = assemble_wavefunction(centers, state, &(c + mu * rho))?;
        let j = current_density(&psi);
        flux += w * rho * rho * mu.dot(&j);
        mag += w * rho * rho * j.norm();
    }
    Ok((flux, mag))
}

/// `lim_{rho->0} sum_n (Psi_b | M Psi_a)_{S_n}` for a 2x2 weight `M_n` on the
/// upper spinor: `(4 pi/(k_b k_a)) sum_n chi_bn^dagger M_n chi_an`.
fn surface_limit(
    centers: &[CenterConfig],
    (kb, xb): (&Kinematics, &CVector),
    (ka, xa): (&Kinematics, &CVector),
    weight: impl Fn(&CenterConfig) -> Mat2,
) -> C64 {
    let mut s = C64::from(0.0);
    for (n, c) in centers.iter().enumerate() {
        s += chi(xb, n).dotc(&(weight(c) * chi(xa, n)));
    }
    s * (4.0 * PI / (kb.k * ka.k))
}

/// `lim sum_n (Psi_b | beta_plus Psi_a)_{S_n}`.
pub fn surface_overlap_beta_plus(centers: &[CenterConfig], b: &BoundState, a: &BoundState) -> C64 {
    surface_limit(
        centers,
        (&b.kin, &b.coefficients),
        (&a.kin, &a.coefficients),
        |_| Mat2::identity(),
    )
}

/// `lim sum_n (Psi_b | K_n^+ Psi_a)_{S_n}`.
pub fn surface_overlap_k(centers: &[CenterConfig], b: &BoundState, a: &BoundState) -> C64 {
    surface_limit(
        centers,
        (&b.kin, &b.coefficients),
        (&a.kin, &a.coefficients),
        CenterConfig::interaction,
    )
}

/// `int d^3r exp(-a r_1) exp(-b r_2) / (r_1 r_2)` for centers a distance `d` apart:
/// `(4 pi/(a + b)) exp(-(a + b) d/2) sinh(q)/q` with `q = (a - b) d/2`.
pub fn yukawa_overlap(a: f64, b: f64, d: f64) -> f64 {
    let q = 0.5 * (a - b) * d;
    let sinhc = if q.abs() < 1e-4 {
        1.0 + q * q / 6.0 * (1.0 + q * q / 20.0)
    } else {
        q.sinh() / q
    };
    4.0 * PI / (a + b) * (-0.5 * (a + b) * d).exp() * sinhc
}

/// `<Psi_b | beta_plus Psi_a>` over all space, in closed form.
pub fn volume_overlap_beta_plus(centers: &[CenterConfig], b: &BoundState, a: &BoundState) -> C64 {
    let d = distances(centers);
    let mut s = C64::from(0.0);
    for n in 0..centers.len() {
        for m in 0..centers.len() {
            let w = yukawa_overlap(b.kin.k, a.kin.k, d[n][m]);
            s += chi(&b.coefficients, n).dotc(&chi(&a.coefficients, m)) * w;
        }
    }
    s / (b.kin.k * a.kin.k)
}

/// Pseudo-product `<<Psi_b|Psi_a>>` through its closed form:
/// `[(E_b + E_a) <Psi_b|beta_plus Psi_a> + (1/2) lim sum_n (Psi_b|K_n^+ Psi_a)_S] / sqrt((E_b + 1)(E_a + 1))`.
pub fn pseudo_product(centers: &[CenterConfig], b: &BoundState, a: &BoundState) -> C64 {
    let num = volume_overlap_beta_plus(centers, b, a) * (b.energy + a.energy)
        + surface_overlap_k(centers, b, a) * 0.5;
    num / ((b.energy + 1.0) * (a.energy + 1.0)).sqrt()
}

/// Self pseudo-product
/// `(2 pi/k^3) [(1 - eps^2) sum_{nn'} chi_n^dagger chi_n' exp(-k d_nn') + eps sum_n chi_n^dagger K_n chi_n]`.
pub fn pseudo_norm_closed(centers: &[CenterConfig], kin: &Kinematics, x: &CVector) -> f64 {
    let d = distances(centers);
    let mut overlap = 0.0;
    let mut kterm = 0.0;
    for n in 0..centers.len() {
        kterm += chi(x, n).dotc(&(centers[n].interaction() * chi(x, n))).re;
        for m in 0..centers.len() {
            overlap += (chi(x, n).dotc(&chi(x, m)) * (-kin.k * d[n][m]).exp()).re;
        }
    }
    2.0 * PI / kin.k.powi(3) * ((1.0 - kin.eps * kin.eps) * overlap + kin.eps * kterm)
}

/// The same quantity through the energy derivative, `(4 pi eps/k^2) x^dagger (dL/dE) x`.
pub fn pseudo_norm_from_slope(centers: &[CenterConfig], kin: &Kinematics, x: &CVector) -> Result<f64> {
    let dl = build_dl_de(centers, kin.energy)?;
    Ok(4.0 * PI * kin.eps / (kin.k * kin.k) * x.dotc(&(dl * x)).re)
}

/// Relative residual `||L(E) x|| / (max(||L||, 1) ||x||)`. The floor keeps
/// the measure finite where `L` vanishes identically, as for one isotropic
/// center at its level.
pub fn eigen_residual(centers: &[CenterConfig], energy: f64, x: &CVector) -> Result<f64> {
    let l = build_l(centers, energy)?;
    Ok((&l * x).norm() / (l.norm().max(1.0) * x.norm()))
}

/// Largest relative eigen-residual accepted by [`normalize_state`].
pub const NULL_VECTOR_RTOL: f64 = 1e-8;

/// Scales the coefficients so the pseudo-norm equals the signature. Null
/// states are scaled to unit Euclidean norm and stay unnormalized.
pub fn normalize_state(centers: &[CenterConfig], mut state: BoundState) -> Result<BoundState> {
    let res = eigen_residual(centers, state.energy, &state.coefficients)?;
    if !(res <= NULL_VECTOR_RTOL) {
        return Err(Error::NotAnEigenvector { residual: res });
    }
    if state.signature == 0 {
        let n = state.coefficients.norm();
        state.coefficients.unscale_mut(n);
        state.pseudo_norm = pseudo_norm_closed(centers, &state.kin, &state.coefficients);
        state.normalized = false;
        return Ok(state);
    }
    let p = pseudo_norm_closed(centers, &state.kin, &state.coefficients);
    state.coefficients.unscale_mut(p.abs().sqrt());
    state.pseudo_norm = pseudo_norm_closed(centers, &state.kin, &state.coefficients);
    state.normalized = true;
    Ok(state)
}

/// Algebraic identities that hold for roots of `L` and their coefficient vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Identity {
    /// `L(E_a) x_a = 0`.
    NullVector,
    /// `(1/2) sum chi^dagger K chi + (E/k) sum_{nn'} exp(-k d) chi_n^dagger chi_n' = k x^dagger (dL/dE) x`.
    EnergyDerivative,
    /// Cross-energy relation weighted by `k`.
    CrossEnergyK,
    /// Cross-energy relation weighted by `eps`.
    CrossEnergyEps,
    /// Cross-energy relation weighted by `1/eps`.
    CrossEnergyInverseEps,
    /// `<<Psi_b|Psi_a>> = delta_ba Delta_a` for normalized states.
    Orthonormality,
    /// Closed-form self pseudo-product equals its slope form.
    NormForms,
}

impl Identity {
    pub const ALL: [Identity; 7] = [
        Identity::NullVector,
        Identity::EnergyDerivative,
        Identity::CrossEnergyK,
        Identity::CrossEnergyEps,
        Identity::CrossEnergyInverseEps,
        Identity::Orthonormality,
        Identity::NormForms,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::NullVector => "null_vector",
            Identity::EnergyDerivative => "energy_derivative",
            Identity::CrossEnergyK => "cross_energy_k",
            Identity::CrossEnergyEps => "cross_energy_eps",
            Identity::CrossEnergyInverseEps => "cross_energy_inverse_eps",
            Identity::Orthonormality => "orthonormality",
            Identity::NormForms => "norm_forms",
        }
    }
}

/// `|sum of terms| / max bound`, where each bound is the term evaluated with
/// absolute values throughout, so that cancellation inside a term (nearly
/// orthogonal coefficient vectors) does not shrink the scale.
fn scaled(terms: &[(C64, f64)]) -> f64 {
    let total: C64 = terms.iter().map(|t| t.0).sum();
    let scale = terms.iter().map(|t| t.1).fold(0.0, f64::max);
    if scale == 0.0 {
        0.0
    } else {
        total.norm() / scale
    }
}

/// Sums entering the cross-energy relations, each paired with its
/// absolute-value bound.
struct CrossTerms {
    /// `sum_n chi_bn^dagger K_n chi_an`.
    kk: (C64, f64),
    /// `sum_n chi_bn^dagger chi_an`.
    ov: (C64, f64),
    /// `sum_{n != m} chi_bn^dagger chi_am (k_b f_b - k_a f_a)`.
    wk: (C64, f64),
    /// The same with `eps` in place of `k`.
    we: (C64, f64),
    /// The same with unit weights.
    wf: (C64, f64),
}

fn cross_terms(centers: &[CenterConfig], b: &BoundState, a: &BoundState) -> CrossTerms {
    let d = distances(centers);
    let (xb, xa) = (&b.coefficients, &a.coefficients);
    let zero = (C64::from(0.0), 0.0);
    let mut t = CrossTerms {
        kk: zero,
        ov: zero,
        wk: zero,
        we: zero,
        wf: zero,
    };
    let add = |acc: &mut (C64, f64), v: C64, bound: f64| {
        acc.0 += v;
        acc.1 += bound;
    };
    for n in 0..centers.len() {
        let (cb, ca) = (chi(xb, n), chi(xa, n));
        let knorm = centers[n].varkappa.abs() + centers[n].kappa_vec().norm();
        add(&mut t.kk, cb.dotc(&(centers[n].interaction() * ca)), knorm * cb.norm() * ca.norm());
        add(&mut t.ov, cb.dotc(&ca), cb.norm() * ca.norm());
        for m in 0..centers.len() {
            if m == n {
                continue;
            }
            let cm = chi(xa, m);
            let p = cb.dotc(&cm);
            let pa = cb.norm() * cm.norm();
            let fb = f_kernel(b.kin.k * d[n][m]);
            let fa = f_kernel(a.kin.k * d[n][m]);
            add(&mut t.wk, p * (b.kin.k * fb - a.kin.k * fa), pa * (b.kin.k * fb + a.kin.k * fa));
            add(
                &mut t.we,
                p * (b.kin.eps * fb - a.kin.eps * fa),
                pa * (b.kin.eps.abs() * fb + a.kin.eps.abs() * fa),
            );
            add(&mut t.wf, p * (fb - fa), pa * (fb + fa));
        }
    }
    t
}

fn times(t: (C64, f64), c: f64) -> (C64, f64) {
    (t.0 * c, t.1 * c.abs())
}

/// Scaled residual of one identity for a single state or an ordered pair.
pub fn pair_residual(
    identity: Identity,
    centers: &[CenterConfig],
    b: &BoundState,
    a: &BoundState,
) -> Result<f64> {
    Ok(match identity {
        Identity::NullVector => eigen_residual(centers, a.energy, &a.coefficients)?,
        Identity::EnergyDerivative => {
            let d = distances(centers);
            let x = &a.coefficients;
            let kin = &a.kin;
            let mut kterm = (C64::from(0.0), 0.0);
            let mut overlap = (C64::from(0.0), 0.0);
            for n in 0..centers.len() {
                let cn = chi(x, n);
                let knorm = centers[n].varkappa.abs() + centers[n].kappa_vec().norm();
                kterm.0 += cn.dotc(&(centers[n].interaction() * cn));
                kterm.1 += knorm * cn.norm_squared();
                for m in 0..centers.len() {
                    let cm = chi(x, m);
                    let e = (-kin.k * d[n][m]).exp();
                    overlap.0 += cn.dotc(&cm) * e;
                    overlap.1 += cn.norm() * cm.norm() * e;
                }
            }
            let dl = build_dl_de(centers, kin.energy)?;
            let rhs = x.dotc(&(&dl * x)) * kin.k;
            let rhs_bound = kin.k * dl.norm() * x.norm_squared();
            scaled(&[
                times(kterm, 0.5),
                times(overlap, kin.energy / kin.k),
                (-rhs, rhs_bound),
            ])
        }
        Identity::CrossEnergyK => {
            let t = cross_terms(centers, b, a);
            scaled(&[
                times(t.kk, 0.5 * (b.energy - a.energy)),
                times(t.ov, -(b.kin.k - a.kin.k)),
                t.wk,
            ])
        }
        Identity::CrossEnergyEps => {
            let t = cross_terms(centers, b, a);
            scaled(&[times(t.ov, b.kin.eps - a.kin.eps), times(t.we, -1.0)])
        }
        Identity::CrossEnergyInverseEps => {
            let t = cross_terms(centers, b, a);
            scaled(&[times(t.kk, 0.5 * (1.0 / b.kin.eps - 1.0 / a.kin.eps)), t.wf])
        }
        Identity::Orthonormality => {
            let p = pseudo_product(centers, b, a);
            let same = std::ptr::eq(a, b);
            let want = if same { f64::from(a.signature) } else { 0.0 };
            (p - want).norm()
        }
        Identity::NormForms => {
            let p40 = pseudo_norm_closed(centers, &a.kin, &a.coefficients);
            let p43 = pseudo_norm_from_slope(centers, &a.kin, &a.coefficients)?;
            (p40 - p43).abs() / p40.abs().max(p43.abs()).max(1e-300)
        }
    })
}

/// Largest scaled residual of `identity` over all states (or all ordered
/// pairs of distinct states for the cross-energy relations; all pairs for
/// orthonormality).
pub fn identity_residual(
    identity: Identity,
    centers: &[CenterConfig],
    states: &[BoundState],
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (i, a) in states.iter().enumerate() {
        match identity {
            Identity::NullVector | Identity::EnergyDerivative | Identity::NormForms => {
                worst = worst.max(pair_residual(identity, centers, a, a)?);
            }
            Identity::Orthonormality => {
                for b in states {
                    worst = worst.max(pair_residual(identity, centers, b, a)?);
                }
            }
            _ => {
                for (j, b) in states.iter().enumerate() {
                    if i != j && (b.energy - a.energy).abs() > crate::spectral::DEDUP_TOL {
                        worst = worst.max(pair_residual(identity, centers, b, a)?);
                    }
                }
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{find_bound_states, find_normalized_states, SolverOptions};

    fn single() -> Vec<CenterConfig> {
        vec![CenterConfig::new([0.0; 3], 1.0, [0.0; 3])]
    }

    #[test]
    fn single_center_wavefunction_value() {
        let c = single();
        let s = find_normalized_states(&c, &SolverOptions::default()).unwrap();
        let psi = assemble_wavefunction(&c, &s[0], &Vector3::new(0.0, 0.0, 1.0)).unwrap();
        let upper = (psi[0].norm_sqr() + psi[1].norm_sqr()).sqrt();
        let want = (0.512 / (2.0 * PI * 1.25)).sqrt() * f_kernel(0.8);
        assert!((upper - want).abs() < 1e-12, "{upper} {want}");
    }

    #[test]
    fn evaluation_at_a_center_fails() {
        let c = single();
        let s = find_bound_states(&c, &SolverOptions::default()).unwrap();
        assert!(assemble_wavefunction(&c, &s[0], &Vector3::zeros()).is_err());
    }

    #[test]
    fn yukawa_limits() {
        let (a, d) = (0.7, 1.3);
        assert!((yukawa_overlap(a, a, d) - 2.0 * PI / a * (-a * d).exp()).abs() < 1e-15);
        assert!((yukawa_overlap(0.4, 0.9, 0.0) - 4.0 * PI / 1.3).abs() < 1e-14);
        let near = yukawa_overlap(a, a * (1.0 + 1e-9), d);
        assert!((near - yukawa_overlap(a, a, d)).abs() < 1e-8);
    }

    #[test]
    fn pseudo_norm_single_center_is_one() {
        let c = single();
        let s = find_normalized_states(&c, &SolverOptions::default()).unwrap();
        for st in &s {
            assert!((pseudo_product(&c, st, st).re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn normalize_rejects_non_null_vectors() {
        let c = single();
        let mut s = find_bound_states(&c, &SolverOptions::default()).unwrap().remove(0);
        s.energy = 0.5;
        s.kin = Kinematics::from_energy(0.5).unwrap();
        assert!(matches!(
            normalize_state(&c, s),
            Err(Error::NotAnEigenvector { .. })
        ));
    }

    #[test]
    fn current_of_single_center_state_is_tangential() {
        let c = vec![CenterConfig::new([0.0; 3], 1.1, [0.2, -0.1, 0.3])];
        let s = find_normalized_states(&c, &SolverOptions::default()).unwrap();
        let r = Vector3::new(0.3, -0.4, 0.5);
        for st in &s {
            let j = current_density(&assemble_wavefunction(&c, st, &r).unwrap());
            assert!(j.dot(&r).abs() < 1e-14 * j.norm().max(1e-300) * r.norm());
        }
    }
}
