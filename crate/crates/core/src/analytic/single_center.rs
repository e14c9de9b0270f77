//! Closed-form spectrum of a single center.

use nalgebra::Vector3;

use crate::model::{Kinematics, C64};

/// One single-center level. `sign` is +1 for the spin-aligned level
/// `eps = (varkappa + kappa)/2` and -1 for `eps = (varkappa - kappa)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleCenterLevel {
    pub sign: i8,
    pub eps: f64,
    pub energy: f64,
    pub k: f64,
    /// Normalized spin eigenvector of `kappa . sigma` with eigenvalue `sign |kappa|`.
    pub spinor: [C64; 2],
}

impl SingleCenterLevel {
    /// Hellmann-Feynman slope of the Sturmian branch at the root, `1/k^2`.
    pub fn slope(&self) -> f64 {
        1.0 / (self.k * self.k)
    }

    /// Coefficient of the normalized bound state, `sqrt(k^3/(2 pi (1 + eps^2)))`.
    pub fn coefficient(&self) -> f64 {
        (self.k.powi(3) / (2.0 * std::f64::consts::PI * (1.0 + self.eps * self.eps))).sqrt()
    }
}

/// Spin eigenvectors `xi_+ = (cos(theta/2), sin(theta/2) e^{i phi})` and
/// `xi_- = (sin(theta/2), -cos(theta/2) e^{i phi})` for the direction of `kappa`.
/// A zero vector is treated as pointing along `z`.
pub fn spinors(kappa: &Vector3<f64>) -> [[C64; 2]; 2] {
    let r = kappa.norm();
    let (theta, phi) = if r == 0.0 {
        (0.0, 0.0)
    } else {
        ((kappa.z / r).clamp(-1.0, 1.0).acos(), kappa.y.atan2(kappa.x))
    };
    let (s, c) = (theta / 2.0).sin_cos();
    let ph = C64::from_polar(1.0, phi);
    [
        [C64::from(c), ph * s],
        [C64::from(s), -ph * c],
    ]
}

/// Levels with `eps >= 0`, ascending in energy. None exist for
/// `varkappa < -|kappa|`; only the `+` level for `-|kappa| <= varkappa < |kappa|`.
pub fn single_center_spectrum(varkappa: f64, kappa: &Vector3<f64>) -> Vec<SingleCenterLevel> {
    let kn = kappa.norm();
    let sp = spinors(kappa);
    let mut out = Vec::new();
    for (sign, spinor) in [(1i8, sp[0]), (-1i8, sp[1])] {
        let eps = 0.5 * (varkappa + sign as f64 * kn);
        if eps >= 0.0 {
            let kin = Kinematics::from_epsilon(eps).expect("eps >= 0");
            out.push(SingleCenterLevel {
                sign,
                eps,
                energy: kin.energy,
                k: kin.k,
                spinor,
            });
        }
    }
    out.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    out
}

/// Sturmian eigenvalues `eps_pm/eps - 1` at kinematic parameter `eps`.
pub fn single_center_sturmian_eigenvalues(varkappa: f64, kappa: f64, eps: f64) -> [f64; 2] {
    [
        0.5 * (varkappa + kappa) / eps - 1.0,
        0.5 * (varkappa - kappa) / eps - 1.0,
    ]
}
