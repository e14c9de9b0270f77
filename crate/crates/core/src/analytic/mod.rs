//! Closed forms and one-dimensional solvers used as benchmarks for the
//! general solver: single-center levels, the symmetric two-center universal
//! functions, their critical point and asymptotic series, and the
//! nonrelativistic limit.

pub mod lambert;
pub mod series;
pub mod single_center;
pub mod universal;

pub use lambert::lambert_w0;
pub use series::{series_eval, SeriesKind};
pub use single_center::{single_center_spectrum, SingleCenterLevel};
pub use universal::{
    critical_point, existence_map, find_xc, solve_eps_g, solve_eps_u, Branch, CriticalPoint,
    Existence, GeradeRoots, UniversalPoint, UniversalSolver,
};

use crate::model::Kinematics;
use crate::Result;

/// Hellmann-Feynman slope of a symmetric two-center Sturmian branch at a
/// root of energy `E`; `parity` is +1 for gerade and -1 for ungerade:
///
/// `(1/(2 eps k)) [(1 + p e) + eps^2 (1 - p e - 2 p e/(k R))]`, `e = exp(-k R)`.
pub fn two_center_slope(energy: f64, parity: f64, r: f64) -> Result<f64> {
    let kin = Kinematics::from_energy(energy)?;
    let (eps, k) = (kin.eps, kin.k);
    let e = (-k * r).exp();
    Ok(((1.0 + parity * e) + eps * eps * (1.0 - parity * e - 2.0 * parity * e / (k * r)))
        / (2.0 * eps * k))
}

/// Nonrelativistic approximation `E = 1 - [y + W0(p exp(-y))]^2 / (2 R^2)`
/// with `p = +1` (gerade) or `-1` (ungerade). `None` where the level does not exist.
pub fn nonrel_energy(branch_parity: f64, r: f64, y: f64) -> Result<Option<f64>> {
    let z = branch_parity * (-y).exp();
    if z < lambert::branch_point() {
        return Ok(None);
    }
    let s = y + lambert_w0(z)?;
    if s < 0.0 {
        return Ok(None);
    }
    Ok(Some(1.0 - s * s / (2.0 * r * r)))
}

/// Nonrelativistic two-center levels for `varkappa +- kappa`:
/// `[g(+), u(+), g(-), u(-)]`.
pub fn nonrel_energies(r: f64, varkappa: f64, kappa: f64) -> Result<[Option<f64>; 4]> {
    let yp = (varkappa + kappa) * r;
    let ym = (varkappa - kappa) * r;
    Ok([
        nonrel_energy(1.0, r, yp)?,
        nonrel_energy(-1.0, r, yp)?,
        nonrel_energy(1.0, r, ym)?,
        nonrel_energy(-1.0, r, ym)?,
    ])
}

/// Nonrelativistic single-center levels `1 - (varkappa +- kappa)^2/2` for
/// `varkappa +- kappa >= 0`.
pub fn nonrel_single_center(varkappa: f64, kappa: f64) -> [Option<f64>; 2] {
    [varkappa + kappa, varkappa - kappa].map(|s| (s >= 0.0).then_some(1.0 - 0.5 * s * s))
}
