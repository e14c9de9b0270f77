//! Published two-center reference energies and critical data.
//!
//! Each entry stores a value the way it is printed: either a plain mantissa
//! or an offset from a continuum edge (`-1 + d` or `1 - d`). The tolerance is
//! half a unit in the last printed digit of that mantissa.

use zrp_core::analytic::{Branch, UniversalPoint};

#[derive(Debug, Clone, Copy)]
pub enum Printed {
    /// `1` exactly.
    Threshold,
    /// Plain value with `digits` decimals.
    Plain(f64, i32),
    /// `-1 + m * 10^e`, mantissa printed with four decimals.
    AboveMinusOne(f64, i32),
    /// `1 - m * 10^e`.
    BelowOne(f64, i32),
}

impl Printed {
    /// Distance of `p` from the printed value, and the allowed half unit.
    pub fn compare(self, p: &UniversalPoint) -> (f64, f64) {
        match self {
            Printed::Threshold => ((p.eps - 1.0).abs(), 0.0),
            Printed::Plain(v, digits) => ((p.eps - v).abs(), 0.5 * 10f64.powi(-digits)),
            Printed::AboveMinusOne(m, e) => {
                let want = m * 10f64.powi(e);
                ((p.one_plus - want).abs(), 0.5e-4 * 10f64.powi(e))
            }
            Printed::BelowOne(m, e) => {
                let want = m * 10f64.powi(e);
                ((p.one_minus - want).abs(), 0.5e-4 * 10f64.powi(e))
            }
        }
    }
}

pub struct Entry {
    pub x: f64,
    /// `None` marks the critical row `y = y_c(x)`.
    pub y: Option<f64>,
    pub branch: Branch,
    pub value: Printed,
}

const fn e(x: f64, y: Option<f64>, branch: Branch, value: Printed) -> Entry {
    Entry { x, y, branch, value }
}

use Branch::{GMinus as GM, GPlus as GP, U};
use Printed::{AboveMinusOne as Am, BelowOne as Bo, Plain as Pl, Threshold as Th};

pub const TABLE: &[Entry] = &[
    // x = 0.01
    e(0.01, Some(-100.0), GM, Am(1.6054, -5)),
    e(0.01, Some(-10.0), GM, Am(1.6080, -5)),
    e(0.01, Some(-1.0), GM, Am(1.6082, -5)),
    e(0.01, Some(-1.0), GP, Th),
    e(0.01, Some(1.0), GM, Am(1.6083, -5)),
    e(0.01, Some(1.0), GP, Bo(8.1723, -5)),
    e(0.01, Some(1.0), U, Th),
    e(0.01, Some(10.0), GM, Am(1.6086, -5)),
    e(0.01, Some(10.0), GP, Bo(4.9876, -3)),
    e(0.01, Some(10.0), U, Bo(4.9875, -3)),
    e(0.01, Some(100.0), GM, Am(1.6112, -5)),
    e(0.01, Some(100.0), GP, Pl(0.60000, 5)),
    e(0.01, Some(100.0), U, Pl(0.60000, 5)),
    e(0.01, Some(1000.0), GM, Am(1.6381, -5)),
    e(0.01, Some(1000.0), GP, Am(7.6923, -2)),
    e(0.01, Some(1000.0), U, Am(7.6923, -2)),
    e(0.01, Some(10000.0), GM, Am(1.9939, -5)),
    e(0.01, Some(10000.0), GP, Am(7.9219, -4)),
    e(0.01, Some(10000.0), U, Am(8.0687, -4)),
    e(0.01, None, GM, Am(5.6189, -5)),
    e(0.01, None, GP, Am(5.6189, -5)),
    e(0.01, None, U, Am(1.5048, -4)),
    e(0.01, Some(100000.0), U, Am(2.3836, -5)),
    // x = 0.5
    e(0.5, Some(-100.0), GM, Am(9.6266, -3)),
    e(0.5, Some(-10.0), GM, Am(2.8822, -2)),
    e(0.5, Some(-1.0), GM, Am(3.9225, -2)),
    e(0.5, Some(-1.0), GP, Th),
    e(0.5, Some(1.0), GM, Am(4.3115, -2)),
    e(0.5, Some(1.0), GP, Pl(0.79970, 5)),
    e(0.5, Some(1.0), U, Th),
    e(0.5, None, GM, Pl(-0.86525, 5)),
    e(0.5, None, GP, Pl(-0.86525, 5)),
    e(0.5, None, U, Pl(-0.62449, 5)),
    e(0.5, Some(10.0), U, Pl(-0.65311, 5)),
    e(0.5, Some(100.0), U, Am(2.1489, -2)),
    // x = 1.5
    e(1.5, Some(-100.0), GM, Am(1.5460, -2)),
    e(1.5, Some(-10.0), GM, Am(9.4260, -2)),
    e(1.5, Some(-1.0), GM, Pl(-0.70313, 5)),
    e(1.5, Some(-1.0), GP, Th),
    e(1.5, None, GM, Pl(-0.16277, 5)),
    e(1.5, None, GP, Pl(-0.16277, 5)),
    e(1.5, Some(1.0), U, Th),
    e(1.5, Some(10.0), U, Pl(-0.78507, 5)),
    e(1.5, Some(100.0), U, Am(2.0170, -2)),
];

/// `(x, y_c, y_c printed decimals, eps_gc)` as printed.
pub const CRITICAL: &[(f64, f64, i32, Printed)] = &[
    (0.01, 25401.358108598, 9, Am(5.6189, -5)),
    (0.5, 9.436540350268, 12, Pl(-0.86525, 5)),
    (1.5, 0.33389617926, 11, Pl(-0.16277, 5)),
];

pub const X_C: f64 = 1.198076;
pub const EPS_GC_AT_X_C: f64 = -0.379162;
