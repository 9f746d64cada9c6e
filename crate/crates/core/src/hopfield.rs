//! Cavity–dresser polaritons and the full cavity–dresser–emitter normal modes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::params::{CavityDispersion, SystemParams};
use crate::{Error, Result};

/// Polariton branch, labelled by frequency ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    #[serde(rename = "lp")]
    Lower,
    #[serde(rename = "up")]
    Upper,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Lower, Branch::Upper];

    pub fn label(self) -> &'static str {
        match self {
            Branch::Lower => "lp",
            Branch::Upper => "up",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lp" | "lower" => Ok(Branch::Lower),
            "up" | "upper" => Ok(Branch::Upper),
            _ => Err(Error::Invalid(format!("unknown branch `{s}` (expected lp or up)"))),
        }
    }
}

/// Squared Hopfield mixing coefficients of the two-mode problem.
///
/// `cos2` is the photonic weight carried by the lower polariton.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixingAngle {
    pub cos2: f64,
    pub sin2: f64,
}

impl MixingAngle {
    /// Angle in `[0, pi/2]`.
    pub fn theta(&self) -> f64 {
        self.sin2.sqrt().atan2(self.cos2.sqrt())
    }

    pub fn tan(&self) -> f64 {
        (self.sin2 / self.cos2).sqrt()
    }
}

// Quadratic-form entries of the 2x2 problem: Omega_X, Omega_A and 2G.
fn two_mode_entries(p: &SystemParams, omega_k: f64) -> (f64, f64, f64) {
    let ox = p.omega_d * p.omega_d + p.rabi_d * p.rabi_d;
    let oa = omega_k * omega_k;
    (ox, oa, 2.0 * p.rabi_d * omega_k)
}

/// `(omega_lp, omega_up)` at cavity frequency `omega_k >= 0`.
///
/// The lower root is taken from `omega_lp * omega_up = omega_k * omega_d`,
/// which avoids cancellation at large detuning.
pub fn polariton_frequencies(p: &SystemParams, omega_k: f64) -> (f64, f64) {
    let (ox, oa, g2) = two_mode_entries(p, omega_k);
    let disc = (ox - oa).hypot(g2);
    let up = (0.5 * (ox + oa + disc)).sqrt();
    (omega_k * p.omega_d / up, up)
}

/// Hopfield angle from the `Omega_X - Omega_A` closed form.
pub fn mixing_angle(p: &SystemParams, omega_k: f64) -> MixingAngle {
    let (ox, oa, g2) = two_mode_entries(p, omega_k);
    let delta = ox - oa;
    let disc = delta.hypot(g2);
    if disc == 0.0 {
        // Decoupled and resonant: the symmetric limit.
        return MixingAngle { cos2: 0.5, sin2: 0.5 };
    }
    // Whichever of cos2, sin2 would suffer cancellation is rewritten through g2^2.
    if delta >= 0.0 {
        let cos2 = (disc + delta) / (2.0 * disc);
        let sin2 = g2 * g2 / (2.0 * disc * (disc + delta));
        MixingAngle { cos2, sin2 }
    } else {
        let sin2 = (disc - delta) / (2.0 * disc);
        let cos2 = g2 * g2 / (2.0 * disc * (disc - delta));
        MixingAngle { cos2, sin2 }
    }
}

/// Hopfield angle from the eigenfrequency form
/// `cos^2 = (omega_up^2 - omega_k^2) / (omega_up^2 - omega_lp^2)`.
pub fn mixing_angle_from_frequencies(p: &SystemParams, omega_k: f64) -> MixingAngle {
    let (lp, up) = polariton_frequencies(p, omega_k);
    let span = up * up - lp * lp;
    if span == 0.0 {
        return MixingAngle { cos2: 0.5, sin2: 0.5 };
    }
    MixingAngle {
        cos2: (up * up - omega_k * omega_k) / span,
        sin2: (omega_k * omega_k - lp * lp) / span,
    }
}

/// Squared emitter–polariton couplings relative to `Omega_e^2`.
///
/// These are the zero-point amplitude shares and stay finite at `Omega_e = 0`.
pub fn rabi_shares(p: &SystemParams, omega_k: f64) -> (f64, f64) {
    let (_, up) = polariton_frequencies(p, omega_k);
    let m = mixing_angle(p, omega_k);
    // omega_k^2 / omega_lp == omega_k * omega_up / omega_d, finite at k = 0.
    let lp_share = omega_k * up * m.cos2 / (p.omega_e * p.omega_d);
    let up_share = omega_k * omega_k * m.sin2 / (p.omega_e * up);
    (lp_share, up_share)
}

/// Effective vacuum Rabi frequencies `(Omega_lp, Omega_up)` of the emitter.
pub fn emitter_polariton_rabi(p: &SystemParams, omega_k: f64) -> (f64, f64) {
    let (lp, up) = rabi_shares(p, omega_k);
    (p.rabi_e * lp.sqrt(), p.rabi_e * up.sqrt())
}

/// Per-wavevector two-mode data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub k: f64,
    pub omega_k: f64,
    pub omega_lp: f64,
    pub omega_up: f64,
    pub theta: f64,
    pub rabi_lp: f64,
    pub rabi_up: f64,
}

impl BranchPoint {
    pub fn new(p: &SystemParams, dispersion: &CavityDispersion, k: f64) -> Self {
        let omega_k = dispersion.omega(k);
        let (omega_lp, omega_up) = polariton_frequencies(p, omega_k);
        let (rabi_lp, rabi_up) = emitter_polariton_rabi(p, omega_k);
        BranchPoint {
            k,
            omega_k,
            omega_lp,
            omega_up,
            theta: mixing_angle(p, omega_k).theta(),
            rabi_lp,
            rabi_up,
        }
    }

    pub fn omega(&self, branch: Branch) -> f64 {
        match branch {
            Branch::Lower => self.omega_lp,
            Branch::Upper => self.omega_up,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Component {
    Photon,
    Dresser,
    Emitter,
}

/// Normal modes of the three coupled oscillators, sorted by frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreeModeSpectrum {
    pub omega_k: f64,
    pub omega: [f64; 3],
    /// `(photon, dresser, emitter)` weight fractions per mode.
    pub weights: [[f64; 3]; 3],
}

impl ThreeModeSpectrum {
    /// Dominant bare component of mode `i`; ties go photon, dresser, emitter.
    pub fn dominant(&self, i: usize) -> Component {
        let w = self.weights[i];
        if w[0] >= w[1] && w[0] >= w[2] {
            Component::Photon
        } else if w[1] >= w[2] {
            Component::Dresser
        } else {
            Component::Emitter
        }
    }
}

/// Eigen-decomposition of a symmetric 3x3 matrix by cyclic Jacobi sweeps.
/// Returns eigenvalues and the eigenvectors as columns.
fn jacobi3(mut a: [[f64; 3]; 3]) -> ([f64; 3], [[f64; 3]; 3]) {
    let mut v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let scale: f64 = a.iter().flatten().map(|x| x * x).sum();
    for _ in 0..64 {
        let off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
        if off <= 1e-34 * scale {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            if a[p][q] == 0.0 {
                continue;
            }
            let th = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
            let t = th.signum() / (th.abs() + (th * th + 1.0).sqrt());
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            let mut j = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
            j[p][p] = c;
            j[q][q] = c;
            j[p][q] = s;
            j[q][p] = -s;
            a = mat_mul(&transpose(&j), &mat_mul(&a, &j));
            a[p][q] = 0.0;
            a[q][p] = 0.0;
            v = mat_mul(&v, &j);
        }
    }
    ([a[0][0], a[1][1], a[2][2]], v)
}

fn mat_mul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    out
}

fn transpose(a: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[j][i];
        }
    }
    out
}

/// Quadratic-form matrix in `(dresser, emitter, photon)` coordinates.
///
/// The emitter diagonal carries `omega_e^2 + Omega_e^2`; with it the
/// characteristic polynomial coincides with the classical dispersion
/// relation and with the lossless dynamical matrix.
pub fn three_mode_matrix(p: &SystemParams, omega_k: f64) -> [[f64; 3]; 3] {
    let cd = p.rabi_d * omega_k;
    let ce = p.rabi_e * omega_k;
    [
        [p.omega_d * p.omega_d + p.rabi_d * p.rabi_d, 0.0, cd],
        [0.0, p.omega_e * p.omega_e + p.rabi_e * p.rabi_e, ce],
        [cd, ce, omega_k * omega_k],
    ]
}

pub fn three_mode_spectrum(p: &SystemParams, omega_k: f64) -> ThreeModeSpectrum {
    let (vals, vecs) = jacobi3(three_mode_matrix(p, omega_k));
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
    let mut omega = [0.0; 3];
    let mut weights = [[0.0; 3]; 3];
    for (slot, &i) in order.iter().enumerate() {
        omega[slot] = vals[i].max(0.0).sqrt();
        let (d, e, a) = (vecs[0][i], vecs[1][i], vecs[2][i]);
        let norm = d * d + e * e + a * a;
        weights[slot] = [a * a / norm, d * d / norm, e * e / norm];
    }
    ThreeModeSpectrum { omega_k, omega, weights }
}

/// Wavevector at which `branch` is resonant with the emitter.
///
/// Inverts the 2x2 secular equation in closed form:
/// `omega_k^2 = w^2 (omega_d^2 + Omega_d^2 - w^2) / (omega_d^2 - w^2)`.
pub fn resonant_wavevector(p: &SystemParams, dispersion: &CavityDispersion, branch: Branch) -> Result<f64> {
    let w = p.omega_e;
    let (lo, hi) = p.gap();
    let gap_err = Error::Gap { omega_e: w, lower: lo, upper: hi };
    let range_err = Error::Range { omega_e: w, branch: branch.label() };
    match branch {
        Branch::Lower if w >= lo => return Err(if w < hi { gap_err } else { range_err }),
        Branch::Upper if w <= hi => return Err(if w > lo { gap_err } else { range_err }),
        _ if !(w > 0.0 && w.is_finite()) => return Err(range_err),
        _ => {}
    }
    let w2 = w * w;
    let wd2 = p.omega_d * p.omega_d;
    let ok2 = w2 * (wd2 + p.rabi_d * p.rabi_d - w2) / (wd2 - w2);
    Ok(dispersion.wavevector(ok2.sqrt()))
}
