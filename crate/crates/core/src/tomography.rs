//! Hybridization-angle tomography: sweep a weak emitter across the
//! polariton branches, find its minimal anticrossing with each branch in
//! simulated transmission maps, and rebuild `tan(theta_k)` from the
//! measured splittings.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classical::{transmission_map, SpectralMap};
use crate::hopfield::{mixing_angle, Branch};
use crate::params::{CavityDispersion, SystemParams};
use crate::{Error, ErrorKind, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub omega: f64,
    pub height: f64,
    pub prominence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakSet {
    pub k: f64,
    /// Sorted by frequency.
    pub peaks: Vec<Peak>,
}

/// Local maxima of a sampled intensity `column` over the uniform grid
/// `omega`, kept when their topographic prominence is at least
/// `min_prominence` times the column maximum. Positions and heights are
/// refined with the parabola through the three samples around each maximum.
pub fn detect_peaks(k: f64, column: &[f64], omega: &[f64], min_prominence: f64) -> Result<PeakSet> {
    let n = column.len();
    if n < 3 || omega.len() != n {
        return Err(Error::Empty("transmission column (need at least 3 samples)"));
    }
    if column.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("non-finite transmission at k = {k}")));
    }
    let step = (omega[n - 1] - omega[0]) / (n - 1) as f64;
    if step.is_nan() || step <= 0.0 || omega.windows(2).any(|w| ((w[1] - w[0]) - step).abs() > 1e-6 * step) {
        return Err(Error::Domain("peak detection needs a uniform, increasing omega grid".into()));
    }
    let top = column.iter().copied().fold(0.0, f64::max);
    let threshold = min_prominence * top;

    let mut peaks = Vec::new();
    for i in 1..n - 1 {
        let h = column[i];
        if !(h > column[i - 1] && h >= column[i + 1]) {
            continue;
        }
        let mut left = h;
        for &v in column[..i].iter().rev() {
            if v > h {
                break;
            }
            left = left.min(v);
        }
        let mut right = h;
        for &v in &column[i + 1..] {
            if v > h {
                break;
            }
            right = right.min(v);
        }
        let prominence = h - left.max(right);
        if prominence <= 0.0 || prominence < threshold {
            continue;
        }
        let (a, c) = (column[i - 1], column[i + 1]);
        let curv = a - 2.0 * h + c;
        let off = if curv != 0.0 { 0.5 * (a - c) / curv } else { 0.0 };
        peaks.push(Peak {
            omega: omega[i] + off * step,
            height: h - 0.25 * (a - c) * off,
            prominence,
        });
    }
    Ok(PeakSet { k, peaks })
}

/// One anticrossing measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TomographyRecord {
    pub branch: Branch,
    pub omega_e: f64,
    pub k_x: f64,
    pub omega_plus: f64,
    pub omega_minus: f64,
    /// `(omega_plus + omega_minus) / 2`.
    pub omega_bar: f64,
    /// `(omega_plus - omega_minus) / 2`.
    pub rabi_bar: f64,
}

/// Peak pairing and acceptance rules for the anticrossing search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakCriteria {
    /// Peaks further than this from `omega_e` are ignored.
    pub window: f64,
    /// Relative to the column maximum.
    pub min_prominence: f64,
    /// Smallest accepted half-splitting.
    pub threshold: f64,
}

impl PeakCriteria {
    /// Window `5 max(Omega_e, linewidths)` and threshold `max(linewidths)/2`.
    pub fn for_params(p: &SystemParams, min_prominence: f64) -> Self {
        let widest = p.max_linewidth();
        Self {
            window: 5.0 * p.rabi_e.max(widest),
            min_prominence,
            threshold: 0.5 * widest,
        }
    }
}

/// For every `k`, pairs the nearest prominent peaks strictly above and
/// strictly below `omega_e` inside the window, and keeps the `k` with the
/// smallest splitting.
pub fn minimal_anticrossing(
    map: &SpectralMap,
    omega_e: f64,
    branch: Branch,
    criteria: &PeakCriteria,
) -> Result<TomographyRecord> {
    let mut best: Option<(usize, f64, f64)> = None;
    for (i, &k) in map.k.iter().enumerate() {
        let column: Vec<f64> = map.row(i).iter().map(|z| z.norm_sqr()).collect();
        let set = detect_peaks(k, &column, &map.omega, criteria.min_prominence)?;
        let above = set
            .peaks
            .iter()
            .map(|p| p.omega)
            .filter(|&w| w > omega_e && w - omega_e < criteria.window)
            .fold(f64::INFINITY, f64::min);
        let below = set
            .peaks
            .iter()
            .map(|p| p.omega)
            .filter(|&w| w < omega_e && omega_e - w < criteria.window)
            .fold(f64::NEG_INFINITY, f64::max);
        if !(above.is_finite() && below.is_finite()) {
            continue;
        }
        if best.is_none_or(|(_, hi, lo)| above - below < hi - lo) {
            best = Some((i, above, below));
        }
    }
    let (i, omega_plus, omega_minus) = best.ok_or(Error::NoAnticrossing { omega_e })?;
    let rabi_bar = 0.5 * (omega_plus - omega_minus);
    if rabi_bar < criteria.threshold {
        return Err(Error::Unresolved { omega_e, half_splitting: rabi_bar, threshold: criteria.threshold });
    }
    Ok(TomographyRecord {
        branch,
        omega_e,
        k_x: map.k[i],
        omega_plus,
        omega_minus,
        omega_bar: 0.5 * (omega_plus + omega_minus),
        rabi_bar,
    })
}

/// Which polariton branch an emitter at `omega_e` can anticross with;
/// `None` inside the gap.
pub fn branch_for(p: &SystemParams, omega_e: f64) -> Option<Branch> {
    let (lower, upper) = p.gap();
    if omega_e < lower {
        Some(Branch::Lower)
    } else if omega_e > upper {
        Some(Branch::Upper)
    } else {
        None
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TomographyGrids {
    pub k: Vec<f64>,
    pub omega: Vec<f64>,
    pub dispersion: CavityDispersion,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub min_prominence: f64,
    /// Number of common `k` samples on the branch overlap.
    pub samples: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { min_prominence: 1e-3, samples: 30 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionCurve {
    pub k: Vec<f64>,
    pub tan_reconstructed: Vec<f64>,
    pub tan_analytic: Vec<f64>,
    pub relative_error: Vec<f64>,
    pub records: Vec<TomographyRecord>,
    /// Sweep points that produced no accepted record, with the reason.
    pub rejected: Vec<(f64, String)>,
}

impl ReconstructionCurve {
    pub fn median_error(&self) -> f64 {
        median(&self.relative_error)
    }
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    match v.len() {
        0 => f64::NAN,
        n if n % 2 == 1 => v[n / 2],
        n => 0.5 * (v[n / 2 - 1] + v[n / 2]),
    }
}

// Sorted (k, value) samples with repeated k averaged.
fn branch_samples(records: &[TomographyRecord], branch: Branch) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.branch == branch)
        .map(|r| (r.k_x, r.omega_bar * r.rabi_bar))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64, usize)> = Vec::new();
    for (k, v) in pts {
        match out.last_mut() {
            Some(last) if last.0 == k => {
                last.1 += v;
                last.2 += 1;
            }
            _ => out.push((k, v, 1)),
        }
    }
    out.into_iter().map(|(k, v, n)| (k, v / n as f64)).collect()
}

fn interp(pts: &[(f64, f64)], x: f64) -> f64 {
    let i = pts.partition_point(|p| p.0 < x);
    if i == 0 {
        return pts[0].1;
    }
    if i == pts.len() {
        return pts[i - 1].1;
    }
    let (a, b) = (pts[i - 1], pts[i]);
    a.1 + (b.1 - a.1) * (x - a.0) / (b.0 - a.0)
}

/// Full protocol: one transmission map per emitter frequency, a record per
/// resolvable anticrossing, and `tan(theta) = [omega_bar Omega_bar]_up /
/// [omega_bar Omega_bar]_lp` on the overlap of the two branches' `k` ranges.
pub fn tomography_sweep(
    p: &SystemParams,
    omega_e_list: &[f64],
    grids: &TomographyGrids,
    options: &SweepOptions,
) -> Result<ReconstructionCurve> {
    tomography_with_maps(p, omega_e_list, &grids.dispersion, options, |_, omega_e| {
        let q = SystemParams { omega_e, ..*p };
        transmission_map(&q, &grids.dispersion, &grids.k, &grids.omega)
    })
}

/// The protocol on externally supplied maps: `map_for(i, omega_e)` yields
/// the transmission map measured with the emitter at `omega_e_list[i]`.
/// Maps are requested in parallel and dropped once analysed.
pub fn tomography_with_maps<F>(
    p: &SystemParams,
    omega_e_list: &[f64],
    dispersion: &CavityDispersion,
    options: &SweepOptions,
    map_for: F,
) -> Result<ReconstructionCurve>
where
    F: Fn(usize, f64) -> Result<SpectralMap> + Sync,
{
    if omega_e_list.is_empty() {
        return Err(Error::Empty("omega_e sweep"));
    }
    let criteria = PeakCriteria::for_params(p, options.min_prominence);
    let outcomes = omega_e_list
        .par_iter()
        .enumerate()
        .map(|(i, &omega_e)| -> Result<std::result::Result<TomographyRecord, String>> {
            let Some(branch) = branch_for(p, omega_e) else {
                return Ok(Err("inside the polariton gap".into()));
            };
            let map = map_for(i, omega_e)?;
            match minimal_anticrossing(&map, omega_e, branch, &criteria) {
                Ok(r) => Ok(Ok(r)),
                Err(e) if e.kind() == ErrorKind::Resolvability => Ok(Err(e.to_string())),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let mut records = Vec::new();
    let mut rejected = Vec::new();
    for (&omega_e, outcome) in omega_e_list.iter().zip(outcomes) {
        match outcome {
            Ok(r) => records.push(r),
            Err(reason) => rejected.push((omega_e, reason)),
        }
    }

    let lp = branch_samples(&records, Branch::Lower);
    let up = branch_samples(&records, Branch::Upper);
    for (pts, branch) in [(&lp, Branch::Lower), (&up, Branch::Upper)] {
        if pts.len() < 2 {
            return Err(Error::Coverage { branch: branch.label(), records: pts.len() });
        }
    }
    let lo = lp[0].0.max(up[0].0);
    let hi = lp[lp.len() - 1].0.min(up[up.len() - 1].0);
    if hi.is_nan() || lo.is_nan() || hi <= lo {
        return Err(Error::Domain(format!(
            "the branches' anticrossing ranges do not overlap (lp up to {}, up from {})",
            lp[lp.len() - 1].0,
            up[0].0
        )));
    }
    let n = options.samples.max(2);
    let k: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let tan_reconstructed: Vec<f64> = k.iter().map(|&x| interp(&up, x) / interp(&lp, x)).collect();
    let tan_analytic: Vec<f64> = k
        .iter()
        .map(|&x| mixing_angle(p, dispersion.omega(x)).tan())
        .collect();
    let relative_error = tan_reconstructed
        .iter()
        .zip(&tan_analytic)
        .map(|(r, a)| (r - a).abs() / a)
        .collect();
    Ok(ReconstructionCurve { k, tan_reconstructed, tan_analytic, relative_error, records, rejected })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopfield::resonant_wavevector;

    fn lorentzian(w: f64, w0: f64, g: f64) -> f64 {
        (0.5 * g).powi(2) / ((w - w0).powi(2) + (0.5 * g).powi(2))
    }

    fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn single_lorentzian() {
        let w = grid(0.0, 2.0, 2001);
        let col: Vec<f64> = w.iter().map(|&x| lorentzian(x, 1.00037, 0.05)).collect();
        let set = detect_peaks(0.0, &col, &w, 1e-3).unwrap();
        assert_eq!(set.peaks.len(), 1);
        let step = 1e-3;
        assert!((set.peaks[0].omega - 1.00037).abs() < step * step / 0.05);
    }

    #[test]
    fn flat_and_degenerate_columns() {
        let w = grid(0.0, 1.0, 11);
        assert!(detect_peaks(0.0, &[1.0; 11], &w, 1e-3).unwrap().peaks.is_empty());
        assert!(detect_peaks(0.0, &[1.0, 2.0], &w[..2], 1e-3).is_err());
        let mut uneven = w.clone();
        uneven[5] += 0.03;
        assert!(detect_peaks(0.0, &[0.0; 11], &uneven, 1e-3).is_err());
    }

    #[test]
    fn two_lorentzians_in_order() {
        let w = grid(0.0, 2.0, 4001);
        let col: Vec<f64> = w.iter().map(|&x| lorentzian(x, 0.8, 0.02) + 0.5 * lorentzian(x, 1.0, 0.02)).collect();
        let set = detect_peaks(0.0, &col, &w, 1e-3).unwrap();
        assert_eq!(set.peaks.len(), 2);
        assert!((set.peaks[0].omega - 0.8).abs() < 1e-3 && (set.peaks[1].omega - 1.0).abs() < 1e-3);
        assert!(set.peaks[0].height > set.peaks[1].height);
    }

    #[test]
    fn bare_cavity_vacuum_rabi_doublet() {
        let p = SystemParams::new(0.0, 1.0, 0.1).unwrap().with_losses(0.01, 0.0, 0.01).unwrap();
        let k = grid(0.8, 1.2, 201);
        let w = grid(0.7, 1.3, 3001);
        let map = transmission_map(&p, &CavityDispersion::default(), &k, &w).unwrap();
        let r = minimal_anticrossing(&map, 1.0, Branch::Lower, &PeakCriteria::for_params(&p, 1e-3)).unwrap();
        let asym = (r.omega_plus - 1.0) - (1.0 - r.omega_minus);
        assert!(asym.abs() < 0.05 * (r.omega_plus - r.omega_minus), "{r:?}");
        assert!((r.k_x - 1.0).abs() < 0.01, "{r:?}");
        assert!((r.rabi_bar - 0.05).abs() < 0.01 * 0.05 * 10.0);
    }

    #[test]
    fn detuned_emitter_has_no_anticrossing() {
        let p = SystemParams::new(0.0, 2.5, 0.2).unwrap();
        let k = grid(0.02, 1.0, 60);
        let w = grid(0.0, 3.2, 800);
        let map = transmission_map(&p, &CavityDispersion::default(), &k, &w).unwrap();
        let e = minimal_anticrossing(&map, 2.5, Branch::Upper, &PeakCriteria::for_params(&p, 1e-3)).unwrap_err();
        assert_eq!(e.kind(), ErrorKind::Resolvability);
    }

    #[test]
    fn anticrossing_sits_just_below_the_resonant_wavevector() {
        // Default CLI system. The emitter coupling grows with k, which pulls
        // the minimum of the splitting about 2% below the bare crossing.
        let p = SystemParams::new(1.0, 0.7, 0.2).unwrap();
        let disp = CavityDispersion::default();
        let k = grid(0.02, 3.0, 400);
        let w = grid(0.0, 3.2, 2000);
        let map = transmission_map(&p, &disp, &k, &w).unwrap();
        let r = minimal_anticrossing(&map, 0.7, Branch::Lower, &PeakCriteria::for_params(&p, 1e-3)).unwrap();
        let kr = resonant_wavevector(&p, &disp, Branch::Lower).unwrap();
        assert!(r.k_x < kr && kr - r.k_x < 0.03 * kr, "{} vs {kr}", r.k_x);
        assert!(r.omega_plus > r.omega_minus && r.omega_minus < 0.7 && r.omega_plus > 0.7);
    }

    #[test]
    fn empty_sweep_is_rejected() {
        let p = SystemParams::new(1.0, 0.6, 0.2).unwrap();
        let grids = TomographyGrids { k: grid(0.1, 1.0, 5), omega: grid(0.0, 2.0, 5), dispersion: CavityDispersion::default() };
        assert!(matches!(tomography_sweep(&p, &[], &grids, &SweepOptions::default()), Err(Error::Empty(_))));
        let e = tomography_sweep(&p, &[0.5], &grids, &SweepOptions::default()).unwrap_err();
        assert_eq!(e.kind(), ErrorKind::Resolvability);
    }

    #[test]
    fn interpolation_helpers() {
        let pts = [(0.0, 0.0), (1.0, 2.0), (3.0, 2.0)];
        assert_eq!(interp(&pts, 0.5), 1.0);
        assert_eq!(interp(&pts, -1.0), 0.0);
        assert_eq!(interp(&pts, 5.0), 2.0);
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
