//! Sturmian branch tracking and bound-state search.
//!
//! Each eigenvalue `lambda_a(E)` of `L(E)` is followed across an energy grid
//! by eigenvector continuity; bound states are its zeros. Within clusters of
//! degenerate eigenvalues the branch vectors are propagated by projecting
//! the previous vectors onto the cluster subspace, so exactly degenerate
//! branches (as for spin-independent interactions) stay smooth.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assembly::{
    build_dl_de, build_l, canonical_phase, clusters, eig_hermitian, CMatrix, CVector,
    EigDecomposition, DEGENERACY_RTOL,
};
use crate::model::{validate_centers, CenterConfig, Kinematics, C64};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverOptions {
    pub grid_points: usize,
    /// The scan covers `[-1 + delta, 1 - delta]`.
    pub delta: f64,
    /// Target `|lambda|` at a refined root.
    pub root_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            grid_points: 2001,
            delta: 1e-6,
            root_tol: 1e-12,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points < 3 {
            return Err(Error::Config("grid_points must be at least 3".into()));
        }
        if !(self.delta > 0.0 && self.delta < 0.5) {
            return Err(Error::Config("delta must lie in (0, 0.5)".into()));
        }
        if !(self.root_tol > 0.0) {
            return Err(Error::Config("root_tol must be positive".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        let (a, b) = (-1.0 + self.delta, 1.0 - self.delta);
        let n = self.grid_points - 1;
        (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
    }
}

/// Minimum eigenvector overlap accepted between neighbouring samples.
pub const OVERLAP_MIN: f64 = 0.5;
/// Maximum number of interval halvings while tracking.
pub const MAX_DEPTH: usize = 40;
/// Bracket width at which bisection stops.
pub const BISECTION_WIDTH: f64 = 1e-13;
/// Roots closer than this are one (possibly degenerate) level.
pub const DEDUP_TOL: f64 = 1e-10;
/// Slopes below this magnitude give signature 0.
pub const NULL_SLOPE: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct BranchSample {
    pub energy: f64,
    pub lambda: f64,
    /// Hellmann-Feynman slope `d lambda / dE`.
    pub slope: f64,
    /// Sturmian-normalized eigenvector.
    pub vector: CVector,
}

#[derive(Debug, Clone)]
pub struct SturmianBranch {
    pub label: usize,
    pub samples: Vec<BranchSample>,
}

/// A bound state. `coefficients` holds the spinors `chi_n` stacked per
/// center. Freshly found states carry the Sturmian normalization
/// `(4 pi / k^2) |x|^2 = 1`; after [`normalize_state`] the pseudo-norm equals
/// the signature.
///
/// [`normalize_state`]: crate::states::normalize_state
#[derive(Debug, Clone)]
pub struct BoundState {
    pub energy: f64,
    pub kin: Kinematics,
    pub coefficients: CVector,
    pub signature: i8,
    pub slope: f64,
    pub pseudo_norm: f64,
    pub normalized: bool,
    pub branch: usize,
}

/// A branch whose eigenvalue is still shrinking toward zero at the upper
/// end of the scan: a level may sit at or just below the threshold `E = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdCandidate {
    pub branch: usize,
    pub energy: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone)]
pub struct Spectrum {
    pub states: Vec<BoundState>,
    pub threshold_candidates: Vec<ThresholdCandidate>,
}

/// Branch vectors and Rayleigh data at one energy. Vectors have unit norm.
#[derive(Debug, Clone)]
struct Frame {
    energy: f64,
    kin: Kinematics,
    lambdas: Vec<f64>,
    slopes: Vec<f64>,
    vectors: Vec<CVector>,
}

struct Eval {
    eig: EigDecomposition,
    l: CMatrix,
    dl: CMatrix,
}

fn evaluate(centers: &[CenterConfig], energy: f64) -> Result<Eval> {
    let l = build_l(centers, energy)?;
    let dl = build_dl_de(centers, energy)?;
    let kin = Kinematics::from_energy(energy)?;
    Ok(Eval {
        eig: eig_hermitian(l.clone(), kin),
        l,
        dl,
    })
}

fn rayleigh(m: &CMatrix, v: &CVector) -> f64 {
    v.dotc(&(m * v)).re / v.norm_squared()
}

fn unit_eigvectors(eig: &EigDecomposition) -> Vec<CVector> {
    (0..eig.values.len())
        .map(|j| {
            let v = eig.vector(j);
            let n = v.norm();
            v / C64::from(n)
        })
        .collect()
}

/// Projection of `u` onto the span of the orthonormal `basis`.
fn project(basis: &[&CVector], u: &CVector) -> CVector {
    let mut p = CVector::zeros(u.len());
    for b in basis {
        p.axpy(b.dotc(u), b, C64::from(1.0));
    }
    p
}

fn align_phase(v: &mut CVector, reference: &CVector) {
    let ov = v.dotc(reference);
    if ov.norm() > 0.0 {
        let ph = ov / ov.norm();
        v.iter_mut().for_each(|z| *z *= ph);
    }
}

fn first_frame(ev: &Eval) -> Frame {
    let vectors = unit_eigvectors(&ev.eig);
    Frame {
        energy: ev.eig.energy,
        kin: ev.eig.kin,
        lambdas: vectors.iter().map(|v| rayleigh(&ev.l, v)).collect(),
        slopes: vectors.iter().map(|v| rayleigh(&ev.dl, v)).collect(),
        vectors,
    }
}

/// Continues every branch of `prev` into the decomposition `ev`. Returns the
/// new frame and the smallest subspace overlap encountered.
fn continue_frame(prev: &Frame, ev: &Eval) -> (Frame, f64) {
    let nb = prev.vectors.len();
    let units = unit_eigvectors(&ev.eig);
    let groups = clusters(&ev.eig.values, DEGENERACY_RTOL * ev.eig.l_norm.max(1e-300));
    // weights[b][c] = squared norm of the projection of branch b onto cluster c.
    let weights: Vec<Vec<f64>> = prev
        .vectors
        .iter()
        .map(|u| {
            groups
                .iter()
                .map(|g| g.clone().map(|j| units[j].dotc(u).norm_sqr()).sum())
                .collect()
        })
        .collect();
    let mut pairs: Vec<(usize, usize)> =
        (0..nb).flat_map(|b| (0..groups.len()).map(move |c| (b, c))).collect();
    pairs.sort_by(|a, b| weights[b.0][b.1].total_cmp(&weights[a.0][a.1]));
    let mut capacity: Vec<usize> = groups.iter().map(|g| g.len()).collect();
    let mut assigned = vec![usize::MAX; nb];
    for (b, c) in pairs {
        if assigned[b] == usize::MAX && capacity[c] > 0 {
            assigned[b] = c;
            capacity[c] -= 1;
        }
    }
    let mut vectors = vec![CVector::zeros(0); nb];
    let mut min_overlap = f64::INFINITY;
    for (c, g) in groups.iter().enumerate() {
        let mut members: Vec<usize> = (0..nb).filter(|&b| assigned[b] == c).collect();
        members.sort_by(|&a, &b| weights[b][c].total_cmp(&weights[a][c]));
        let basis: Vec<&CVector> = g.clone().map(|j| &units[j]).collect();
        let mut done: Vec<CVector> = Vec::new();
        for &b in &members {
            min_overlap = min_overlap.min(weights[b][c].sqrt());
            let mut v = project(&basis, &prev.vectors[b]);
            for d in &done {
                let p = d.dotc(&v);
                v.axpy(-p, d, C64::from(1.0));
            }
            if v.norm() < 1e-6 {
                // Fall back to the cluster vector least represented so far.
                v = basis
                    .iter()
                    .map(|e| {
                        let mut w = (*e).clone();
                        for d in &done {
                            let p = d.dotc(&w);
                            w.axpy(-p, d, C64::from(1.0));
                        }
                        w
                    })
                    .max_by(|a, b| a.norm().total_cmp(&b.norm()))
                    .expect("cluster is non-empty");
            }
            let n = v.norm();
            v.unscale_mut(n);
            align_phase(&mut v, &prev.vectors[b]);
            done.push(v.clone());
            vectors[b] = v;
        }
    }
    let frame = Frame {
        energy: ev.eig.energy,
        kin: ev.eig.kin,
        lambdas: vectors.iter().map(|v| rayleigh(&ev.l, v)).collect(),
        slopes: vectors.iter().map(|v| rayleigh(&ev.dl, v)).collect(),
        vectors,
    };
    (frame, min_overlap)
}

fn check_grid(grid: &[f64]) -> Result<()> {
    let inside = grid.iter().all(|&e| e > -1.0 && e < 1.0);
    let increasing = grid.windows(2).all(|w| w[1] > w[0]);
    if grid.len() < 2 || !inside || !increasing {
        return Err(Error::BadGrid);
    }
    Ok(())
}

/// Tracks all `2N` branches over `grid`, halving intervals where the
/// eigenvector overlap between neighbours drops below [`OVERLAP_MIN`].
fn track(centers: &[CenterConfig], grid: &[f64]) -> Result<Vec<Frame>> {
    validate_centers(centers)?;
    check_grid(grid)?;
    let evals: Vec<Eval> = grid
        .par_iter()
        .map(|&e| evaluate(centers, e))
        .collect::<Result<_>>()?;
    let mut frames = vec![first_frame(&evals[0])];
    for ev in evals.into_iter().skip(1) {
        let prev = frames.last().unwrap().clone();
        refine_into(centers, &prev, ev, 0, &mut frames)?;
    }
    Ok(frames)
}

fn refine_into(
    centers: &[CenterConfig],
    prev: &Frame,
    ev: Eval,
    depth: usize,
    out: &mut Vec<Frame>,
) -> Result<()> {
    let (frame, overlap) = continue_frame(prev, &ev);
    if overlap >= OVERLAP_MIN {
        out.push(frame);
        return Ok(());
    }
    if depth >= MAX_DEPTH {
        return Err(Error::GridTooCoarse {
            lo: prev.energy,
            hi: ev.eig.energy,
        });
    }
    let mid = 0.5 * (prev.energy + ev.eig.energy);
    refine_into(centers, prev, evaluate(centers, mid)?, depth + 1, out)?;
    let mid_frame = out.last().unwrap().clone();
    refine_into(centers, &mid_frame, ev, depth + 1, out)
}

fn sturmian_scale(kin: &Kinematics) -> C64 {
    C64::from(kin.k / (4.0 * PI).sqrt())
}

/// Follows all branches of `L(E)` across `grid` (strictly increasing, inside
/// `(-1, 1)`). Samples inserted by adaptive refinement are included.
pub fn trace_branches(centers: &[CenterConfig], grid: &[f64]) -> Result<Vec<SturmianBranch>> {
    let frames = track(centers, grid)?;
    let nb = frames[0].vectors.len();
    Ok((0..nb)
        .map(|b| SturmianBranch {
            label: b,
            samples: frames
                .iter()
                .map(|f| BranchSample {
                    energy: f.energy,
                    lambda: f.lambdas[b],
                    slope: f.slopes[b],
                    vector: &f.vectors[b] * sturmian_scale(&f.kin),
                })
                .collect(),
        })
        .collect())
}

/// Branch value at `energy`, continued from the unit vector `reference`.
struct Follow {
    lambda: f64,
    slope: f64,
    vector: CVector,
}

fn follow(centers: &[CenterConfig], energy: f64, reference: &CVector) -> Result<Follow> {
    let ev = evaluate(centers, energy)?;
    let prev = Frame {
        energy,
        kin: ev.eig.kin,
        lambdas: vec![0.0],
        slopes: vec![0.0],
        vectors: vec![reference.clone()],
    };
    let (mut frame, _) = continue_frame(&prev, &ev);
    Ok(Follow {
        lambda: frame.lambdas[0],
        slope: frame.slopes[0],
        vector: frame.vectors.pop().unwrap(),
    })
}

#[derive(Debug, Clone)]
struct RawRoot {
    energy: f64,
    branch: usize,
    vector: CVector,
    lambda: f64,
    tangential: bool,
}

/// Bisection on a sign change of one branch, then Newton polishing with the
/// Hellmann-Feynman slope.
fn refine_root(
    centers: &[CenterConfig],
    branch: usize,
    (mut lo, mut lam_lo, mut v_lo): (f64, f64, CVector),
    mut hi: f64,
    root_tol: f64,
) -> Result<RawRoot> {
    while hi - lo > BISECTION_WIDTH {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f = follow(centers, mid, &v_lo)?;
        if f.lambda == 0.0 {
            lo = mid;
            hi = mid;
            v_lo = f.vector;
            break;
        }
        if (f.lambda > 0.0) == (lam_lo > 0.0) {
            lo = mid;
            lam_lo = f.lambda;
        } else {
            hi = mid;
        }
        v_lo = f.vector;
    }
    let (a, b) = (lo, hi);
    let mut e = 0.5 * (lo + hi);
    let mut f = follow(centers, e, &v_lo)?;
    for _ in 0..4 {
        if f.lambda.abs() <= root_tol || f.slope == 0.0 {
            break;
        }
        let next = e - f.lambda / f.slope;
        let w = (b - a).max(BISECTION_WIDTH);
        if !(next > a - w && next < b + w) || next <= -1.0 || next >= 1.0 {
            break;
        }
        let g = follow(centers, next, &f.vector)?;
        if g.lambda.abs() >= f.lambda.abs() {
            break;
        }
        e = next;
        f = g;
    }
    Ok(RawRoot {
        energy: e,
        branch,
        vector: f.vector,
        lambda: f.lambda,
        tangential: false,
    })
}

/// Locates a stationary point of a branch between two samples whose slopes
/// differ in sign, by bisection on the slope.
fn branch_extremum(
    centers: &[CenterConfig],
    (mut lo, mut s_lo, mut v): (f64, f64, CVector),
    mut hi: f64,
) -> Result<(f64, Follow)> {
    while hi - lo > BISECTION_WIDTH {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f = follow(centers, mid, &v)?;
        if (f.slope > 0.0) == (s_lo > 0.0) {
            lo = mid;
            s_lo = f.slope;
        } else {
            hi = mid;
        }
        v = f.vector;
    }
    let e = 0.5 * (lo + hi);
    Ok((e, follow(centers, e, &v)?))
}

fn roots_on_branch(
    centers: &[CenterConfig],
    frames: &[Frame],
    b: usize,
    root_tol: f64,
) -> Result<Vec<RawRoot>> {
    let mut out = Vec::new();
    for w in frames.windows(2) {
        let (p, q) = (&w[0], &w[1]);
        let (lp, lq) = (p.lambdas[b], q.lambdas[b]);
        let start = (p.energy, lp, p.vectors[b].clone());
        if lp == 0.0 {
            out.push(RawRoot {
                energy: p.energy,
                branch: b,
                vector: p.vectors[b].clone(),
                lambda: 0.0,
                tangential: false,
            });
            continue;
        }
        if lp * lq < 0.0 {
            out.push(refine_root(centers, b, start, q.energy, root_tol)?);
            continue;
        }
        let (sp, sq) = (p.slopes[b], q.slopes[b]);
        if sp * sq < 0.0 {
            // The branch turns inside the interval; it may touch or cross zero twice.
            let (e_ext, ext) = branch_extremum(centers, (p.energy, sp, p.vectors[b].clone()), q.energy)?;
            if ext.lambda.abs() <= root_tol {
                out.push(RawRoot {
                    energy: e_ext,
                    branch: b,
                    vector: ext.vector,
                    lambda: ext.lambda,
                    tangential: true,
                });
            } else if (ext.lambda > 0.0) != (lp > 0.0) {
                out.push(refine_root(centers, b, start, e_ext, root_tol)?);
                out.push(refine_root(
                    centers,
                    b,
                    (e_ext, ext.lambda, ext.vector),
                    q.energy,
                    root_tol,
                )?);
            }
        }
    }
    Ok(out)
}

fn threshold_candidates(frames: &[Frame]) -> Vec<ThresholdCandidate> {
    let n = frames.len();
    if n < 3 {
        return Vec::new();
    }
    let last = &frames[n - 1];
    (0..last.lambdas.len())
        .filter(|&b| {
            let a = [&frames[n - 3], &frames[n - 2], last].map(|f| f.lambdas[b].abs());
            a[2] < a[1] && a[1] < a[0] && a[2] < 1e-2
        })
        .map(|b| ThresholdCandidate {
            branch: b,
            energy: last.energy,
            lambda: last.lambdas[b],
        })
        .collect()
}

/// Hellmann-Feynman slope `y^dagger (dL/dE) y / y^dagger y`.
pub fn hellmann_feynman_slope(centers: &[CenterConfig], energy: f64, y: &CVector) -> Result<f64> {
    Ok(rayleigh(&build_dl_de(centers, energy)?, y))
}

/// `sgn(d lambda/dE)`, with 0 for slopes below [`NULL_SLOPE`].
pub fn signature_from_slope(slope: f64) -> i8 {
    if slope.abs() < NULL_SLOPE {
        0
    } else if slope > 0.0 {
        1
    } else {
        -1
    }
}

pub fn signature_of(centers: &[CenterConfig], state: &BoundState) -> Result<i8> {
    Ok(signature_from_slope(hellmann_feynman_slope(
        centers,
        state.energy,
        &state.coefficients,
    )?))
}

/// `A = sqrt(eps |d lambda / dE|)`: dividing a Sturmian function by `A`
/// gives the pseudo-normalized bound state.
pub fn sturmian_normalizer(eps: f64, slope: f64) -> f64 {
    (eps * slope.abs()).sqrt()
}

/// Groups nearby roots into levels. Degenerate levels are rotated to the
/// eigenbasis of `dL/dE` restricted to the null space, which diagonalizes
/// the pseudo-product there.
fn assemble_levels(centers: &[CenterConfig], mut raw: Vec<RawRoot>) -> Result<Vec<BoundState>> {
    raw.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    let mut groups: Vec<Vec<RawRoot>> = Vec::new();
    for r in raw {
        match groups.last_mut() {
            Some(g) if r.energy - g[0].energy <= DEDUP_TOL => {
                if !g.iter().any(|o| o.branch == r.branch) {
                    g.push(r);
                }
            }
            _ => groups.push(vec![r]),
        }
    }
    let mut states = Vec::new();
    for g in groups {
        let best = g
            .iter()
            .min_by(|a, b| a.lambda.abs().total_cmp(&b.lambda.abs()))
            .unwrap();
        let energy = best.energy;
        let tangential = g.iter().any(|r| r.tangential);
        let kin = Kinematics::from_energy(energy)?;
        let dl = build_dl_de(centers, energy)?;
        let m = g.len();
        let mut y = CMatrix::zeros(g[0].vector.len(), m);
        for (j, r) in g.iter().enumerate() {
            y.set_column(j, &r.vector);
        }
        crate::assembly::orthonormalize_columns(&mut y, 0..m);
        let small = y.adjoint() * &dl * &y;
        let eig = nalgebra::SymmetricEigen::new(small);
        let rotated = &y * eig.eigenvectors;
        for (j, r) in g.iter().enumerate() {
            let mut v = rotated.column(j).into_owned();
            v.unscale_mut(v.norm());
            canonical_phase(&mut v);
            let slope = rayleigh(&dl, &v);
            let signature = if tangential { 0 } else { signature_from_slope(slope) };
            let coefficients = v * sturmian_scale(&kin);
            let pseudo_norm = crate::states::pseudo_norm_closed(centers, &kin, &coefficients);
            states.push(BoundState {
                energy,
                kin,
                coefficients,
                signature,
                slope,
                pseudo_norm,
                normalized: false,
                branch: r.branch,
            });
        }
    }
    Ok(states)
}

/// Bound states and threshold candidates over the default scan of `opts`.
pub fn solve_spectrum(centers: &[CenterConfig], opts: &SolverOptions) -> Result<Spectrum> {
    opts.validate()?;
    let frames = track(centers, &opts.grid())?;
    let nb = frames[0].vectors.len();
    let raw: Vec<RawRoot> = (0..nb)
        .into_par_iter()
        .map(|b| roots_on_branch(centers, &frames, b, opts.root_tol))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(Spectrum {
        states: assemble_levels(centers, raw)?,
        threshold_candidates: threshold_candidates(&frames),
    })
}

/// Bound states ascending in energy, Sturmian-normalized.
pub fn find_bound_states(centers: &[CenterConfig], opts: &SolverOptions) -> Result<Vec<BoundState>> {
    Ok(solve_spectrum(centers, opts)?.states)
}

/// Bound states ascending in energy, each pseudo-normalized to its
/// signature. Null states keep unit Euclidean norm.
pub fn find_normalized_states(
    centers: &[CenterConfig],
    opts: &SolverOptions,
) -> Result<Vec<BoundState>> {
    find_bound_states(centers, opts)?
        .into_iter()
        .map(|s| crate::states::normalize_state(centers, s))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_spans_the_gap() {
        let g = SolverOptions::default().grid();
        assert_eq!(g.len(), 2001);
        assert_eq!(g[0], -1.0 + 1e-6);
        assert!((g[2000] - (1.0 - 1e-6)).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_grids() {
        let c = [CenterConfig::new([0.0; 3], 1.0, [0.0; 3])];
        assert!(trace_branches(&c, &[0.1, 0.0]).is_err());
        assert!(trace_branches(&c, &[-1.0, 0.0]).is_err());
    }

    #[test]
    fn isotropic_single_center() {
        let c = [CenterConfig::new([0.0; 3], 1.0, [0.0; 3])];
        let s = find_bound_states(&c, &SolverOptions::default()).unwrap();
        assert_eq!(s.len(), 2);
        for st in &s {
            assert!((st.energy - 0.6).abs() < 1e-12);
            assert_eq!(st.signature, 1);
            assert!((st.slope - 1.0 / 0.64).abs() < 1e-9);
        }
        let o = s[0].coefficients.dotc(&s[1].coefficients);
        assert!(o.norm() < 1e-14);
    }

    #[test]
    fn normalizer_single_center() {
        // slope 1/k^2 at k = 0.8, eps = 0.5
        let a = sturmian_normalizer(0.5, 1.0 / 0.64);
        assert!((a - (0.5f64 / 0.64).sqrt()).abs() < 1e-15);
    }
}
