//! Seeded random configurations and the universal-function prediction for
//! symmetric two-center systems.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zrp_core::analytic::{solve_eps_u, Branch, UniversalSolver};
use zrp_core::model::CenterConfig;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn unit_vector(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 0.1 && n <= 1.0 {
            return v.map(|c| c / n);
        }
    }
}

/// `(varkappa, kappa_vec)` whose levels `eps = (varkappa +- |kappa|)/2` stay
/// clear of the threshold `eps = 0` (`E = 1`).
pub fn single_center(rng: &mut ChaCha8Rng) -> CenterConfig {
    loop {
        let vk: f64 = rng.random_range(-2.0..3.0);
        let kappa: f64 = rng.random_range(0.0..1.5);
        if (vk + kappa).abs() < 0.02 || (vk - kappa).abs() < 0.02 {
            continue;
        }
        let dir = unit_vector(rng);
        return CenterConfig::new([0.0; 3], vk, dir.map(|c| c * kappa));
    }
}

/// Two identical centers a distance `r` apart along a random axis.
pub fn symmetric_pair(rng: &mut ChaCha8Rng, r: f64, vk: f64, kappa: [f64; 3]) -> Vec<CenterConfig> {
    let axis = unit_vector(rng);
    let half = axis.map(|c| 0.5 * r * c);
    vec![
        CenterConfig::new(half.map(|c| -c), vk, kappa),
        CenterConfig::new(half, vk, kappa),
    ]
}

/// `n` centers in a cube of side 3 with separations of at least 0.6.
pub fn general(rng: &mut ChaCha8Rng, n: usize) -> Vec<CenterConfig> {
    let mut out: Vec<CenterConfig> = Vec::new();
    while out.len() < n {
        let p: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.5..1.5));
        let far = out.iter().all(|c| {
            let d: f64 = (0..3).map(|i| (c.position[i] - p[i]).powi(2)).sum();
            d.sqrt() >= 0.6
        });
        if !far {
            continue;
        }
        let vk = rng.random_range(0.3..2.5);
        let kappa: [f64; 3] = std::array::from_fn(|_| rng.random_range(-0.4..0.4));
        out.push(CenterConfig::new(p, vk, kappa));
    }
    out
}

/// Margin from the existence boundaries `y = -1, 1, y_c` and from `E = +-1`
/// that makes a symmetric two-center level "interior".
pub const Y_MARGIN: f64 = 1e-2;
pub const E_MARGIN: f64 = 1e-4;

/// Energies predicted by the universal functions for two identical centers
/// at distance `r`, sorted; `None` if any level lies near a boundary.
pub fn two_center_prediction(r: f64, vk: f64, kappa: f64) -> Option<Vec<f64>> {
    let solver = UniversalSolver::new(1.0 / r).ok()?;
    let mut out = Vec::new();
    for y in [(vk + kappa) * r, (vk - kappa) * r] {
        for edge in [-1.0, 1.0, solver.critical.y_c] {
            if (y - edge).abs() < Y_MARGIN {
                return None;
            }
        }
        for branch in Branch::ALL {
            let p = match branch {
                Branch::U => solve_eps_u(1.0 / r, y).ok()?,
                _ => solver.branch(branch, y).ok()?,
            };
            if let Some(p) = p {
                if p.one_plus < E_MARGIN || p.one_minus < E_MARGIN {
                    return None;
                }
                out.push(p.eps);
            }
        }
    }
    out.sort_by(f64::total_cmp);
    Some(out)
}
