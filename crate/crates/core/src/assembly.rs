//! The Hermitian matrix function `L(E)`, its energy derivative, and its
//! eigendecomposition.
//!
//! For `N` centers `L(E)` is `2N x 2N`, built from 2x2 blocks:
//! `K_n/(2 eps) - I` on the diagonal and `f(k d_nn') I` off it.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::model::{distances, f_kernel, g_kernel, validate_centers, CenterConfig, Kinematics, C64};
use crate::{Error, Result};

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Eigenvalues closer than this fraction of `||L||` form one cluster.
pub const DEGENERACY_RTOL: f64 = 1e-10;

fn interior_kinematics(energy: f64) -> Result<Kinematics> {
    if !(energy > -1.0 && energy < 1.0) {
        return Err(Error::domain("E", energy, "-1 < E < 1"));
    }
    Kinematics::from_energy(energy)
}

pub fn build_l(centers: &[CenterConfig], energy: f64) -> Result<CMatrix> {
    validate_centers(centers)?;
    let kin = interior_kinematics(energy)?;
    Ok(assemble(centers, |kn| kn / C64::from(2.0 * kin.eps), -1.0, |d| {
        f_kernel(kin.k * d)
    }))
}

/// `dL/dE`: diagonal blocks `K_n/(2 eps (1 - E^2))`, off-diagonal
/// `(E d/k) g(k d) I`.
pub fn build_dl_de(centers: &[CenterConfig], energy: f64) -> Result<CMatrix> {
    validate_centers(centers)?;
    let kin = interior_kinematics(energy)?;
    let diag = 1.0 / (2.0 * kin.eps * kin.k * kin.k);
    Ok(assemble(centers, |kn| kn * C64::from(diag), 0.0, |d| {
        kin.energy * d / kin.k * g_kernel(kin.k * d)
    }))
}

fn assemble(
    centers: &[CenterConfig],
    diag_block: impl Fn(nalgebra::Matrix2<C64>) -> nalgebra::Matrix2<C64>,
    diag_shift: f64,
    off: impl Fn(f64) -> f64,
) -> CMatrix {
    let n = centers.len();
    let d = distances(centers);
    let mut m = CMatrix::zeros(2 * n, 2 * n);
    for (a, ca) in centers.iter().enumerate() {
        let block = diag_block(ca.interaction());
        for i in 0..2 {
            for j in 0..2 {
                m[(2 * a + i, 2 * a + j)] = block[(i, j)];
            }
            m[(2 * a + i, 2 * a + i)] += C64::from(diag_shift);
        }
        for b in 0..n {
            if b != a {
                let v = C64::from(off(d[a][b]));
                m[(2 * a, 2 * b)] = v;
                m[(2 * a + 1, 2 * b + 1)] = v;
            }
        }
    }
    m
}

/// `det L(E)`; real because `L` is Hermitian.
pub fn det_l(centers: &[CenterConfig], energy: f64) -> Result<f64> {
    Ok(build_l(centers, energy)?.determinant().re)
}

/// Spectral decomposition of `L(E)` with eigenvalues ascending. Eigenvectors
/// (columns) are Sturmian-normalized, `(4 pi / k^2) y^dagger y = 1`, with the
/// largest-magnitude component real and positive.
#[derive(Debug, Clone)]
pub struct EigDecomposition {
    pub energy: f64,
    pub kin: Kinematics,
    pub values: Vec<f64>,
    pub vectors: CMatrix,
    pub l_norm: f64,
}

impl EigDecomposition {
    pub fn vector(&self, i: usize) -> CVector {
        self.vectors.column(i).into_owned()
    }

    /// Index ranges of eigenvalues that agree within `DEGENERACY_RTOL ||L||`.
    pub fn clusters(&self) -> Vec<std::ops::Range<usize>> {
        clusters(&self.values, DEGENERACY_RTOL * self.l_norm.max(1e-300))
    }
}

pub(crate) fn clusters(values: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > tol {
            out.push(start..i);
            start = i;
        }
    }
    out
}

/// Multiplies `v` by a unit phase so its largest-magnitude entry is real positive.
pub fn canonical_phase(v: &mut CVector) {
    let mut best = C64::from(0.0);
    for z in v.iter() {
        if z.norm() > best.norm() * (1.0 + 1e-12) {
            best = *z;
        }
    }
    if best.norm() > 0.0 {
        let ph = best.conj() / best.norm();
        v.iter_mut().for_each(|z| *z *= ph);
    }
}

/// Modified Gram-Schmidt over the given columns, in place.
pub(crate) fn orthonormalize_columns(m: &mut CMatrix, cols: std::ops::Range<usize>) {
    for i in cols.clone() {
        for j in cols.start..i {
            let proj = m.column(j).dotc(&m.column(i));
            let cj = m.column(j).into_owned();
            m.column_mut(i).axpy(-proj, &cj, C64::from(1.0));
        }
        let nrm = m.column(i).norm();
        m.column_mut(i).unscale_mut(nrm);
    }
}

pub fn eig_l(centers: &[CenterConfig], energy: f64) -> Result<EigDecomposition> {
    let l = build_l(centers, energy)?;
    let kin = Kinematics::from_energy(energy)?;
    Ok(eig_hermitian(l, kin))
}

pub(crate) fn eig_hermitian(l: CMatrix, kin: Kinematics) -> EigDecomposition {
    let l_norm = l.norm();
    let eig = SymmetricEigen::new(l);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = eig.eigenvectors.select_columns(&order);
    for c in clusters(&values, DEGENERACY_RTOL * l_norm.max(1e-300)) {
        if c.len() > 1 {
            orthonormalize_columns(&mut vectors, c);
        }
    }
    let scale = C64::from(kin.k / (4.0 * PI).sqrt());
    for j in 0..vectors.ncols() {
        let mut v = vectors.column(j).into_owned();
        v.unscale_mut(v.norm());
        canonical_phase(&mut v);
        vectors.set_column(j, &(v * scale));
    }
    EigDecomposition {
        energy: kin.energy,
        kin,
        values,
        vectors,
        l_norm,
    }
}
