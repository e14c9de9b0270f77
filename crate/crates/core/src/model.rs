//! Kinematic variables, radial kernels, Pauli and Dirac matrices, and the
//! per-center interaction matrix.

use nalgebra::{Matrix2, Matrix4, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type C64 = Complex64;
pub type Mat2 = Matrix2<C64>;
pub type Mat4 = Matrix4<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Decay constant and energy parameter belonging to one energy.
///
/// `k = sqrt(1 - E^2)` and `eps = sqrt((1 - E)/(1 + E))`, so that
/// `k = 2 eps/(1 + eps^2)`, `E = (1 - eps^2)/(1 + eps^2)` and
/// `eps/k = 1/(1 + E)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kinematics {
    pub energy: f64,
    pub k: f64,
    pub eps: f64,
}

impl Kinematics {
    pub fn from_energy(energy: f64) -> Result<Self> {
        if !(energy > -1.0 && energy <= 1.0) {
            return Err(Error::domain("E", energy, "-1 < E <= 1"));
        }
        let k = ((1.0 - energy) * (1.0 + energy)).sqrt();
        let eps = ((1.0 - energy) / (1.0 + energy)).sqrt();
        Ok(Self { energy, k, eps })
    }

    pub fn from_epsilon(eps: f64) -> Result<Self> {
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(Error::domain("eps", eps, "0 <= eps < inf"));
        }
        let d = 1.0 + eps * eps;
        Ok(Self {
            energy: (1.0 - eps * eps) / d,
            k: 2.0 * eps / d,
            eps,
        })
    }

    /// Inverts `k(E)`; `upper` selects `E >= 0`.
    pub fn from_k(k: f64, upper: bool) -> Result<Self> {
        if !(k > 0.0 && k <= 1.0) {
            return Err(Error::domain("k", k, "0 < k <= 1"));
        }
        let c = ((1.0 - k) * (1.0 + k)).sqrt();
        let eps = if upper { k / (1.0 + c) } else { (1.0 + c) / k };
        Self::from_epsilon(eps)
    }

    /// `d eps / dE = -eps / (1 - E^2)`.
    pub fn deps_de(&self) -> f64 {
        -self.eps / (self.k * self.k)
    }

    /// `dk / dE = -E / k`.
    pub fn dk_de(&self) -> f64 {
        -self.energy / self.k
    }
}

/// `f(z) = exp(-z)/z`.
pub fn f_kernel(z: f64) -> f64 {
    (-z).exp() / z
}

/// `g(z) = exp(-z)/z + exp(-z)/z^2 = -f'(z)`.
pub fn g_kernel(z: f64) -> f64 {
    (-z).exp() * (1.0 + z) / (z * z)
}

pub fn pauli() -> [Mat2; 3] {
    [
        Mat2::new(ZERO, ONE, ONE, ZERO),
        Mat2::new(ZERO, -I, I, ZERO),
        Mat2::new(ONE, ZERO, ZERO, -ONE),
    ]
}

/// `v . sigma` for a real 3-vector.
pub fn sigma_dot(v: &Vector3<f64>) -> Mat2 {
    let s = pauli();
    s[0] * C64::from(v.x) + s[1] * C64::from(v.y) + s[2] * C64::from(v.z)
}

/// Hermitian 2x2 interaction matrix of one center.
pub type Hermitian2x2 = Mat2;

pub fn interaction_matrix(varkappa: f64, kappa: &Vector3<f64>) -> Hermitian2x2 {
    Mat2::identity() * C64::from(varkappa) + sigma_dot(kappa)
}

/// Recovers `(varkappa, kappa)` from `K` via `varkappa = Tr K / 2` and
/// `kappa_i = Tr(sigma_i K) / 2`.
pub fn decompose_interaction(k: &Mat2) -> Result<(f64, Vector3<f64>)> {
    let asym = (k - k.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let scale = k.iter().map(|z| z.norm()).fold(1.0, f64::max);
    if asym > 1e-12 * scale {
        return Err(Error::NonHermitian { asymmetry: asym });
    }
    let s = pauli();
    let tr = |m: Mat2| 0.5 * m.trace().re;
    Ok((
        tr(*k),
        Vector3::new(tr(s[0] * k), tr(s[1] * k), tr(s[2] * k)),
    ))
}

/// Dirac matrices in the standard representation together with the
/// projectors `beta_plus = (1 + beta)/2`, `beta_minus = (1 - beta)/2` and
/// `alpha_plus = beta_plus alpha = alpha beta_minus`, `alpha_minus = alpha_plus^dagger`.
#[derive(Debug, Clone)]
pub struct DiracMatrices {
    pub alpha: [Mat4; 3],
    pub beta: Mat4,
    pub beta_plus: Mat4,
    pub beta_minus: Mat4,
    pub alpha_plus: [Mat4; 3],
    pub alpha_minus: [Mat4; 3],
}

fn blocks(a: &Mat2, b: &Mat2, c: &Mat2, d: &Mat2) -> Mat4 {
    let mut m = Mat4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(a);
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(b);
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(c);
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(d);
    m
}

impl DiracMatrices {
    pub fn new() -> Self {
        let s = pauli();
        let z = Mat2::zeros();
        let one = Mat2::identity();
        let alpha = s.map(|si| blocks(&z, &si, &si, &z));
        let beta = blocks(&one, &z, &z, &(-one));
        let beta_plus = blocks(&one, &z, &z, &z);
        let beta_minus = blocks(&z, &z, &z, &one);
        let alpha_plus = alpha.map(|a| beta_plus * a);
        let alpha_minus = alpha_plus.map(|a| a.adjoint());
        Self {
            alpha,
            beta,
            beta_plus,
            beta_minus,
            alpha_plus,
            alpha_minus,
        }
    }
}

impl Default for DiracMatrices {
    fn default() -> Self {
        Self::new()
    }
}

/// `diag(K, 0)`: the interaction matrix acting on the upper spinor only.
pub fn k_plus(k: &Mat2) -> Mat4 {
    let z = Mat2::zeros();
    blocks(k, &z, &z, &z)
}

/// One zero-range center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CenterConfig {
    pub position: [f64; 3],
    pub varkappa: f64,
    #[serde(default)]
    pub kappa: [f64; 3],
}

impl CenterConfig {
    pub fn new(position: [f64; 3], varkappa: f64, kappa: [f64; 3]) -> Self {
        Self {
            position,
            varkappa,
            kappa,
        }
    }

    pub fn pos(&self) -> Vector3<f64> {
        Vector3::from(self.position)
    }

    pub fn kappa_vec(&self) -> Vector3<f64> {
        Vector3::from(self.kappa)
    }

    pub fn interaction(&self) -> Mat2 {
        interaction_matrix(self.varkappa, &self.kappa_vec())
    }
}

/// Rejects empty configurations, non-finite parameters and coincident centers.
pub fn validate_centers(centers: &[CenterConfig]) -> Result<()> {
    if centers.is_empty() {
        return Err(Error::NoCenters);
    }
    for c in centers {
        let finite = c.position.iter().chain(c.kappa.iter()).all(|v| v.is_finite())
            && c.varkappa.is_finite();
        if !finite {
            return Err(Error::Config("center parameters must be finite".into()));
        }
    }
    for (i, a) in centers.iter().enumerate() {
        for (j, b) in centers.iter().enumerate().skip(i + 1) {
            if (a.pos() - b.pos()).norm() <= 1e-12 {
                return Err(Error::CoincidentCenters {
                    first: i,
                    second: j,
                });
            }
        }
    }
    Ok(())
}

/// Pairwise center distances, zero on the diagonal.
pub fn distances(centers: &[CenterConfig]) -> Vec<Vec<f64>> {
    centers
        .iter()
        .map(|a| centers.iter().map(|b| (a.pos() - b.pos()).norm()).collect())
        .collect()
}
