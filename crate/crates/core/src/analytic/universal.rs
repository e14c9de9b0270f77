//! Universal energy functions of the symmetric two-center system.
//!
//! With `x = 1/R` and `y = (varkappa +- kappa) R`, the gerade and ungerade
//! levels `eps = E` solve
//!
//! `(x y / 2) sqrt((1 + eps)/(1 - eps)) - 1 +- x exp(-sqrt(1 - eps^2)/x)/sqrt(1 - eps^2) = 0`
//!
//! with `+` for gerade and `-` for ungerade. Writing `eps = cos t`, the
//! equation is linear in `y`, so `y = Y(t)` with
//! `Y(t) = (1 -+ h(t)) / a(t)`, `a = (x/2) cot(t/2)`, `h = x exp(-sin t/x)/sin t`.
//! `Y_u` rises monotonically from 1 (t = 0) to infinity (t = pi). `Y_g` rises
//! from -1 to its maximum `y_c` at `t_c` and then falls to -infinity; the
//! rising part is the `g+` branch and the falling part the `g-` branch.

use serde::Serialize;

use crate::{Error, Result};

/// Symmetry of a two-center level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    GMinus,
    GPlus,
    U,
}

impl Branch {
    pub const ALL: [Branch; 3] = [Branch::GMinus, Branch::GPlus, Branch::U];

    pub fn name(self) -> &'static str {
        match self {
            Branch::GMinus => "g_minus",
            Branch::GPlus => "g_plus",
            Branch::U => "u",
        }
    }

    /// +1 for gerade, -1 for ungerade: the sign of `f(kR)` in the Sturmian eigenvalue.
    pub fn parity(self) -> f64 {
        match self {
            Branch::U => -1.0,
            _ => 1.0,
        }
    }
}

/// A root `eps = cos t`. `one_plus` and `one_minus` hold `1 + eps` and
/// `1 - eps` without cancellation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UniversalPoint {
    pub eps: f64,
    pub t: f64,
    pub one_plus: f64,
    pub one_minus: f64,
}

impl UniversalPoint {
    pub fn from_t(t: f64) -> Self {
        let (s, c) = (0.5 * t).sin_cos();
        Self {
            eps: t.cos(),
            t,
            one_plus: 2.0 * c * c,
            one_minus: 2.0 * s * s,
        }
    }

    fn threshold() -> Self {
        Self {
            eps: 1.0,
            t: 0.0,
            one_plus: 2.0,
            one_minus: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub x: f64,
    pub y_c: f64,
    pub eps_gc: UniversalPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Existence {
    pub g_minus: bool,
    pub g_plus: bool,
    pub u: bool,
}

fn check_x(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("x", x, "x > 0"))
    }
}

fn check_y(y: f64) -> Result<()> {
    if y.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("y", y, "finite"))
    }
}

/// `(a(t), h(t))` evaluated through half angles.
fn ah(x: f64, t: f64) -> (f64, f64) {
    let (s2, c2) = (0.5 * t).sin_cos();
    let s = 2.0 * s2 * c2;
    (0.5 * x * c2 / s2, x * (-s / x).exp() / s)
}

fn y_gerade(x: f64, t: f64) -> f64 {
    let (a, h) = ah(x, t);
    (1.0 - h) / a
}

fn y_ungerade(x: f64, t: f64) -> f64 {
    let (a, h) = ah(x, t);
    (1.0 + h) / a
}

/// Stationarity of `Y_g`: `1 - x e/s + cos t (1 + x/s) e` with `s = sin t`, `e = exp(-s/x)`.
fn stationarity(x: f64, t: f64) -> f64 {
    let s = t.sin();
    let e = (-s / x).exp();
    1.0 - x * e / s + t.cos() * (1.0 + x / s) * e
}

/// Bisection on a monotone function until the bracket collapses to adjacent doubles.
fn bisect(mut lo: f64, mut hi: f64, mut f_lo_neg: impl FnMut(f64) -> bool) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f_lo_neg(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Residual of the gerade equation in the energy variable.
pub fn g_residual(x: f64, y: f64, eps: f64) -> f64 {
    let s = (1.0 - eps * eps).sqrt();
    0.5 * x * y * ((1.0 + eps) / (1.0 - eps)).sqrt() - 1.0 + x * (-s / x).exp() / s
}

/// Residual of the ungerade equation in the energy variable.
pub fn u_residual(x: f64, y: f64, eps: f64) -> f64 {
    let s = (1.0 - eps * eps).sqrt();
    0.5 * x * y * ((1.0 + eps) / (1.0 - eps)).sqrt() - 1.0 - x * (-s / x).exp() / s
}

/// Residual of the gerade equation written in `t`, `a(t) y - 1 + h(t)`;
/// well conditioned near both ends of the energy range.
pub fn g_residual_t(x: f64, y: f64, t: f64) -> f64 {
    let (a, h) = ah(x, t);
    a * y - 1.0 + h
}

pub fn u_residual_t(x: f64, y: f64, t: f64) -> f64 {
    let (a, h) = ah(x, t);
    a * y - 1.0 - h
}

/// Number of grid cells used to bracket the stationary point of `Y_g`.
const CRITICAL_GRID: usize = 4000;

/// Maximum `y_c` of `Y_g` and the energy `eps_gc` at which the two gerade
/// branches merge.
pub fn critical_point(x: f64) -> Result<CriticalPoint> {
    check_x(x)?;
    let pi = std::f64::consts::PI;
    let ts: Vec<f64> = (1..CRITICAL_GRID).map(|i| pi * i as f64 / CRITICAL_GRID as f64).collect();
    // The stationarity function is positive near t = 0 and negative near t = pi;
    // among all sign changes keep the one with the largest Y_g.
    let mut best: Option<(f64, f64)> = None;
    let mut prev = (ts[0], stationarity(x, ts[0]));
    for &t in &ts[1..] {
        let g = stationarity(x, t);
        if prev.1 > 0.0 && g <= 0.0 {
            let tc = bisect(prev.0, t, |m| stationarity(x, m) > 0.0);
            let yc = y_gerade(x, tc);
            if best.is_none_or(|(_, b)| yc > b) {
                best = Some((tc, yc));
            }
        }
        prev = (t, g);
    }
    let (tc, yc) = match best {
        Some(b) => b,
        None => {
            // The stationary point lies in an end cell.
            let first = ts[0];
            let last = *ts.last().unwrap();
            if stationarity(x, first) <= 0.0 {
                let tc = bisect(f64::MIN_POSITIVE, first, |m| stationarity(x, m) > 0.0);
                (tc, y_gerade(x, tc))
            } else if stationarity(x, last) > 0.0 {
                let tc = bisect(last, pi, |m| stationarity(x, m) > 0.0);
                (tc, y_gerade(x, tc))
            } else {
                return Err(Error::NonConvergence {
                    what: "critical_point",
                    residual: stationarity(x, last),
                });
            }
        }
    };
    Ok(CriticalPoint {
        x,
        y_c: yc,
        eps_gc: UniversalPoint::from_t(tc),
    })
}

/// Gerade solver for a fixed `x`, caching the critical point.
#[derive(Debug, Clone, Copy)]
pub struct UniversalSolver {
    pub x: f64,
    pub critical: CriticalPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeradeRoots {
    pub g_minus: Option<UniversalPoint>,
    pub g_plus: Option<UniversalPoint>,
}

impl UniversalSolver {
    pub fn new(x: f64) -> Result<Self> {
        Ok(Self {
            x,
            critical: critical_point(x)?,
        })
    }

    pub fn gerade(&self, y: f64) -> Result<GeradeRoots> {
        check_y(y)?;
        let x = self.x;
        let tc = self.critical.eps_gc.t;
        if y > self.critical.y_c {
            return Ok(GeradeRoots {
                g_minus: None,
                g_plus: None,
            });
        }
        if y == self.critical.y_c {
            return Ok(GeradeRoots {
                g_minus: Some(self.critical.eps_gc),
                g_plus: Some(self.critical.eps_gc),
            });
        }
        let pi = std::f64::consts::PI;
        let minus = bisect(tc, pi, |t| y_gerade(x, t) > y);
        let plus = if y < -1.0 {
            None
        } else if y == -1.0 {
            Some(UniversalPoint::threshold())
        } else {
            Some(UniversalPoint::from_t(bisect(0.0, tc, |t| {
                y_gerade(x, t) < y
            })))
        };
        Ok(GeradeRoots {
            g_minus: Some(UniversalPoint::from_t(minus)),
            g_plus: plus,
        })
    }

    pub fn branch(&self, branch: Branch, y: f64) -> Result<Option<UniversalPoint>> {
        Ok(match branch {
            Branch::GMinus => self.gerade(y)?.g_minus,
            Branch::GPlus => self.gerade(y)?.g_plus,
            Branch::U => solve_eps_u(self.x, y)?,
        })
    }

    pub fn existence(&self, y: f64) -> Existence {
        Existence {
            g_minus: y <= self.critical.y_c,
            g_plus: (-1.0..=self.critical.y_c).contains(&y),
            u: y >= 1.0,
        }
    }
}

/// Ungerade level; exists for `y >= 1` and equals 1 exactly at `y = 1`.
pub fn solve_eps_u(x: f64, y: f64) -> Result<Option<UniversalPoint>> {
    check_x(x)?;
    check_y(y)?;
    if y < 1.0 {
        return Ok(None);
    }
    if y == 1.0 {
        return Ok(Some(UniversalPoint::threshold()));
    }
    let t = bisect(0.0, std::f64::consts::PI, |t| y_ungerade(x, t) < y);
    Ok(Some(UniversalPoint::from_t(t)))
}

/// Both gerade levels; `g_plus` equals 1 exactly at `y = -1`.
pub fn solve_eps_g(x: f64, y: f64) -> Result<GeradeRoots> {
    UniversalSolver::new(x)?.gerade(y)
}

pub fn existence_map(x: f64, y: f64) -> Result<Existence> {
    check_y(y)?;
    Ok(UniversalSolver::new(x)?.existence(y))
}

/// The `x` at which the two gerade branches merge exactly at `y = 1`,
/// i.e. `y_c(x) = 1`, and the merged energy there.
pub fn find_xc() -> Result<CriticalPoint> {
    let (mut lo, mut hi) = (0.5, 1.5);
    let yc = |x: f64| critical_point(x).map(|c| c.y_c - 1.0);
    if !(yc(lo)? > 0.0 && yc(hi)? < 0.0) {
        return Err(Error::NonConvergence {
            what: "find_xc bracket",
            residual: yc(lo)?,
        });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if yc(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    critical_point(0.5 * (lo + hi))
}
