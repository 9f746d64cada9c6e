//! Three-wave mixing between polariton modes.

use serde::{Deserialize, Serialize};

use crate::hopfield::{polariton_frequencies, rabi_shares, Branch};
use crate::params::{CavityDispersion, SystemParams};
use crate::{Error, Result};

/// Dimensionless modification of the effective chi(2):
/// `Omega_{l1,k1} Omega_{l2,k2} Omega_{l3,k3} / Omega_e^3`.
pub fn chi2_effective(p: &SystemParams, legs: [(Branch, f64); 3]) -> f64 {
    legs.iter()
        .map(|&(branch, omega_k)| {
            let (lp, up) = rabi_shares(p, omega_k);
            match branch {
                Branch::Lower => lp.sqrt(),
                Branch::Upper => up.sqrt(),
            }
        })
        .product()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Triplet {
    pub l1: Branch,
    pub k1: f64,
    pub l2: Branch,
    pub k2: f64,
    pub l3: Branch,
    pub k3: f64,
    /// `omega_1 + omega_2 - omega_3`.
    pub mismatch: f64,
    pub chi2_scale: f64,
}

/// All collinear processes `(l1,k1) + (l2,k2) -> (l3,k3)` with
/// `k1 + k2 = k3` on the grid and `|omega_1 + omega_2 - omega_3| < tol_omega`.
///
/// The two input legs are unordered: each pair appears once, with the
/// first leg at the lower grid index.
pub fn find_phase_matched_triplets(
    p: &SystemParams,
    dispersion: &CavityDispersion,
    k_grid: &[f64],
    tol_omega: f64,
) -> Result<Vec<Triplet>> {
    if k_grid.is_empty() {
        return Err(Error::Empty("k grid"));
    }
    let freqs: Vec<(f64, f64)> = k_grid
        .iter()
        .map(|&k| polariton_frequencies(p, dispersion.omega(k)))
        .collect();
    let omega = |i: usize, b: Branch| match b {
        Branch::Lower => freqs[i].0,
        Branch::Upper => freqs[i].1,
    };
    let mut sorted: Vec<usize> = (0..k_grid.len()).collect();
    sorted.sort_by(|&a, &b| k_grid[a].total_cmp(&k_grid[b]));
    let lookup = |k: f64| -> Option<usize> {
        let tol = 1e-9 * k.abs().max(1.0);
        let pos = sorted.partition_point(|&i| k_grid[i] < k - tol);
        sorted.get(pos).copied().filter(|&i| (k_grid[i] - k).abs() <= tol)
    };

    let mut out = Vec::new();
    for i in 0..k_grid.len() {
        for j in i..k_grid.len() {
            let Some(m) = lookup(k_grid[i] + k_grid[j]) else { continue };
            for l1 in Branch::BOTH {
                for l2 in Branch::BOTH {
                    if i == j && l2 == Branch::Lower && l1 == Branch::Upper {
                        continue;
                    }
                    for l3 in Branch::BOTH {
                        let mismatch = omega(i, l1) + omega(j, l2) - omega(m, l3);
                        if mismatch.abs() < tol_omega {
                            let legs = [
                                (l1, dispersion.omega(k_grid[i])),
                                (l2, dispersion.omega(k_grid[j])),
                                (l3, dispersion.omega(k_grid[m])),
                            ];
                            out.push(Triplet {
                                l1,
                                k1: k_grid[i],
                                l2,
                                k2: k_grid[j],
                                l3,
                                k3: k_grid[m],
                                mismatch,
                                chi2_scale: chi2_effective(p, legs),
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi2_scales() {
        let bare = SystemParams::new(0.0, 0.5, 0.1).unwrap();
        let photon = (Branch::Lower, 0.5);
        assert!((chi2_effective(&bare, [photon; 3]) - 1.0).abs() < 1e-15);
        let g = SystemParams::new(1.0, (5f64.sqrt() - 1.0) / 2.0, 0.1).unwrap();
        let v = chi2_effective(&g, [(Branch::Lower, 1.0); 3]);
        assert!((v - 1.376_381_920_471_173_5f64.powi(3)).abs() < 1e-12);
        assert_eq!(chi2_effective(&g, [(Branch::Lower, 1.0), (Branch::Upper, 0.0), (Branch::Lower, 1.0)]), 0.0);
    }

    #[test]
    fn light_line_matches_everything_collinear() {
        let bare = SystemParams::new(0.0, 0.5, 0.1).unwrap();
        let disp = CavityDispersion::default();
        let grid: Vec<f64> = (1..=8).map(|i| 0.1 * i as f64).collect();
        let found = find_phase_matched_triplets(&bare, &disp, &grid, 1e-12).unwrap();
        // Every k1 <= k2 with k1 + k2 on the grid, all photon-like legs.
        let mut pairs = 0;
        for i in 0..grid.len() {
            for j in i..grid.len() {
                if grid.iter().any(|&k| (k - grid[i] - grid[j]).abs() < 1e-9) {
                    pairs += 1;
                }
            }
        }
        let photonic = found.iter().filter(|t| t.l1 == Branch::Lower && t.l2 == Branch::Lower && t.l3 == Branch::Lower);
        assert_eq!(photonic.count(), pairs);
        assert!(find_phase_matched_triplets(&bare, &disp, &grid, 0.0).unwrap().is_empty());
        assert!(find_phase_matched_triplets(&bare, &disp, &[], 0.1).is_err());
    }

    #[test]
    fn concave_lower_branch_has_no_lp_lp_lp() {
        let g = SystemParams::new(1.0, 0.5, 0.1).unwrap();
        let disp = CavityDispersion::default();
        // Subadditivity of a concave branch through the origin: the
        // mismatch is positive and only O(k^3), so stay away from k = 0.
        let grid: Vec<f64> = (10..=100).map(|i| 0.05 * i as f64).collect();
        let found = find_phase_matched_triplets(&g, &disp, &grid, 1e-4).unwrap();
        assert!(!found.iter().any(|t| [t.l1, t.l2, t.l3] == [Branch::Lower; 3]));
        let near_zero: Vec<f64> = (1..=20).map(|i| 0.01 * i as f64).collect();
        let all = find_phase_matched_triplets(&g, &disp, &near_zero, 1.0).unwrap();
        assert!(all.iter().filter(|t| [t.l1, t.l2, t.l3] == [Branch::Lower; 3]).all(|t| t.mismatch > 0.0));
        // Brute-force oracle for lp + lp -> up.
        let mut expect = 0;
        for i in 0..grid.len() {
            for j in i..grid.len() {
                if let Some(m) = grid.iter().position(|&k| (k - grid[i] - grid[j]).abs() < 1e-9) {
                    let (a, _) = polariton_frequencies(&g, grid[i]);
                    let (b, _) = polariton_frequencies(&g, grid[j]);
                    let (_, c) = polariton_frequencies(&g, grid[m]);
                    if (a + b - c).abs() < 1e-4 {
                        expect += 1;
                    }
                }
            }
        }
        let got = found.iter().filter(|t| [t.l1, t.l2, t.l3] == [Branch::Lower, Branch::Lower, Branch::Upper]).count();
        assert_eq!(got, expect);
    }
}
