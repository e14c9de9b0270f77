//! Asymptotic expansions of the universal energy functions.

use serde::Serialize;

use super::lambert::lambert_w0;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    /// Upper gerade level for small `x`, through `W0(exp(-y))`.
    GPlusSmallX,
    /// Upper gerade level near its threshold `y = -1`.
    GPlusNearThreshold,
    /// Lower gerade level for large negative `y`.
    GMinusLargeNegativeY,
    /// Ungerade level for small `x`, through `W0(-exp(-y))`.
    USmallX,
    /// Ungerade level near its threshold `y = 1`.
    UNearThreshold,
    /// Ungerade level for large positive `y`.
    ULargeY,
}

/// Shared small-`x` form `1 - (x^2/2)(y+w)^2 + (x^4/8)(y+w)^3/(1+w) (y - (y+1) w - w^2)`.
fn small_x(x: f64, y: f64, w: f64) -> f64 {
    let s = y + w;
    let x2 = x * x;
    // At the threshold s = 0 and 1 + w = 0 together; the quartic term vanishes.
    let quartic = if s == 0.0 {
        0.0
    } else {
        x2 * x2 / 8.0 * s.powi(3) / (1.0 + w) * (y - (y + 1.0) * w - w * w)
    };
    1.0 - 0.5 * x2 * s * s + quartic
}

pub fn series_eval(kind: SeriesKind, x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::domain("x", x, "x > 0"));
    }
    let x2 = x * x;
    Ok(match kind {
        SeriesKind::GPlusSmallX => {
            if y < -1.0 {
                return Err(Error::domain("y", y, "y >= -1"));
            }
            small_x(x, y, lambert_w0((-y).exp())?)
        }
        SeriesKind::USmallX => {
            if y < 1.0 {
                return Err(Error::domain("y", y, "y >= 1"));
            }
            let z = (-(-y).exp()).max(super::lambert::branch_point());
            small_x(x, y, lambert_w0(z)?)
        }
        SeriesKind::GPlusNearThreshold => {
            if y < -1.0 {
                return Err(Error::domain("y", y, "y >= -1"));
            }
            let d = y + 1.0;
            1.0 - x2 * d * d / 8.0 - x2 * (x2 + 2.0) * d.powi(3) / 64.0
        }
        SeriesKind::GMinusLargeNegativeY => {
            if y >= 0.0 {
                return Err(Error::domain("y", y, "y < 0"));
            }
            let a = y.abs();
            -1.0 + 2.0 / a - 8.0 / (x * a.powf(1.5)) + 20.0 / (x2 * a * a)
                + 4.0 * (3.0 * x2 - 32.0) / (3.0 * x2 * x * a.powf(2.5))
                - 4.0 * (27.0 * x2 - 71.0) / (3.0 * x2 * x2 * a.powi(3))
        }
        SeriesKind::UNearThreshold => {
            if y < 1.0 {
                return Err(Error::domain("y", y, "y >= 1"));
            }
            let d = y - 1.0;
            let p = x2 + 2.0;
            1.0 - 2.0 * x2 / p * d - 8.0 / 3.0 * x2 / p.powf(2.5) * d.powf(1.5)
                + 2.0 / 3.0 * x2 * (3.0 * x2.powi(3) + 6.0 * x2 * x2 + 2.0 * x2 - 4.0) / p.powi(4) * d * d
        }
        SeriesKind::ULargeY => {
            if y <= 0.0 {
                return Err(Error::domain("y", y, "y > 0"));
            }
            -1.0 + 2.0 / y + 4.0 / (x2 * y * y) - 8.0 / (3.0 * x2 * x * y.powf(2.5))
                - 4.0 * (3.0 * x2 - 7.0) / (3.0 * x2 * x2 * y.powi(3))
        }
    })
}
