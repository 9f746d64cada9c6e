//! TM0 displacement correlator, its lossless Fourier kernel and the
//! emitter effective-Hamiltonian coefficients built from it.

mod phase;
mod potential;

pub use phase::{chi2_effective, find_phase_matched_triplets, Triplet};
pub use potential::{
    effective_potential, effective_potential_hankel, kernel_tail, PotentialProfile, PotentialSettings, TailCoefficients,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::hopfield::{mixing_angle, polariton_frequencies};
use crate::params::SystemParams;
use crate::{Error, Result};

/// Minimum distance to a pole accepted by the lossless expressions.
pub const POLE_GUARD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorPoint {
    pub omega_k: f64,
    pub omega: f64,
    pub value: Complex64,
}

fn guard(omega: f64, pole: f64, branch: &'static str) -> Result<()> {
    if (omega - pole).abs() < POLE_GUARD {
        Err(Error::Pole { branch, omega })
    } else {
        Ok(())
    }
}

/// Per-mode TM0 correlator
/// `(1/2)(omega_e/Omega_e^2) sum_b Omega_b^2 / (omega - omega_b - i gamma_b/2)`.
///
/// The emitter frequency and coupling cancel: the residues are
/// `omega_k^2 cos^2 / omega_lp` and `omega_k^2 sin^2 / omega_up`.
/// `linewidths` are the dressed `(gamma_lp, gamma_up)`; a zero width makes
/// the corresponding pole guarded.
pub fn correlator_tm0_fourier(
    p: &SystemParams,
    omega_k: f64,
    omega: f64,
    linewidths: (f64, f64),
) -> Result<Complex64> {
    let (lp, up) = polariton_frequencies(p, omega_k);
    let m = mixing_angle(p, omega_k);
    let (g_lp, g_up) = linewidths;
    // omega_k^2 / omega_lp rewritten as omega_k omega_up / omega_d (finite at k = 0)
    let r_lp = omega_k * up / p.omega_d * m.cos2;
    let r_up = omega_k * omega_k / up * m.sin2;
    if g_lp == 0.0 && r_lp != 0.0 {
        guard(omega, lp, "lp")?;
    }
    if g_up == 0.0 && r_up != 0.0 {
        guard(omega, up, "up")?;
    }
    let term = |r: f64, w: f64, g: f64| {
        if r == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            r / Complex64::new(omega - w, -0.5 * g)
        }
    };
    Ok(0.5 * (term(r_lp, lp, g_lp) + term(r_up, up, g_up)))
}

/// Lossless Fourier kernel
/// `K = c w/(w - omega_lp) - D w/(w - omega_d) + s w/(w - omega_up)` with
/// `c = (omega_k/omega_lp)^2 cos^2`, `s = (omega_k/omega_up)^2 sin^2`,
/// `D = Omega_d^2/omega_d^2`.
pub fn kernel_k(p: &SystemParams, omega_k: f64, omega: f64) -> Result<f64> {
    if p.rabi_d == 0.0 {
        // Only the bare photon pole survives.
        guard(omega, omega_k, "photon")?;
        return Ok(omega / (omega - omega_k));
    }
    let (lp, up) = polariton_frequencies(p, omega_k);
    let m = mixing_angle(p, omega_k);
    let wd = p.omega_d;
    let d = p.rabi_d * p.rabi_d / (wd * wd);
    let wk2 = omega_k * omega_k;
    let s = wk2 / (up * up) * m.sin2;
    if omega_k > 0.0 {
        guard(omega, lp, "lp")?;
    }
    guard(omega, up, "up")?;
    guard(omega, wd, "dresser")?;

    // omega_up^2 - omega_k^2 without cancellation.
    let ox = wd * wd + p.rabi_d * p.rabi_d;
    let delta = ox - wk2;
    let g2 = 2.0 * p.rabi_d * omega_k;
    let disc = delta.hypot(g2);
    let up2_minus_k2 = if delta >= 0.0 {
        0.5 * (disc + delta)
    } else {
        0.5 * g2 * g2 / (disc - delta)
    };
    let one_minus_s = (up2_minus_k2 + wk2 * m.cos2) / (up * up);
    let wd_minus_lp = wd * wd * up2_minus_k2 / (up * up * (wd + lp));

    // The sum rule c = 1 + D - s lets the lp and up terms be combined,
    // removing the O(1) cancellation between them at large k.
    let photon = omega * (omega - s * lp - one_minus_s * up) / ((omega - lp) * (omega - up));
    let dresser = d * omega * wd_minus_lp / ((omega - lp) * (omega - wd));
    Ok(photon - dresser)
}

/// Lossless correlator minus its static and dresser parts, i.e. the
/// identity `2 C = -1 + D omega_d/(omega - omega_d) + K` rearranged.
pub fn decomposition_residual(p: &SystemParams, omega_k: f64, omega: f64) -> Result<f64> {
    let c = correlator_tm0_fourier(p, omega_k, omega, (0.0, 0.0))?;
    let d = p.rabi_d * p.rabi_d / (p.omega_d * p.omega_d);
    let k = kernel_k(p, omega_k, omega)?;
    Ok(2.0 * c.re - (-1.0 + d * p.omega_d / (omega - p.omega_d) + k))
}

/// Coefficients of the emitter's effective Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftCoefficients {
    /// `-(Omega_e^2 / (4 omega_e omega_d)) Omega_d^2 / (omega_d - omega_e)`.
    pub electrostatic: f64,
    params: SystemParams,
}

impl ShiftCoefficients {
    /// `(Omega_e^2 / (4 omega_e)) K_{omega_e}(k)`.
    ///
    /// Needs `omega_e` inside the gap or below the lower polariton.
    pub fn kernel(&self, omega_k: f64) -> Result<f64> {
        let p = &self.params;
        let (lp, _) = polariton_frequencies(p, omega_k);
        if !(p.in_gap(p.omega_e) || p.omega_e < lp || p.rabi_d == 0.0) {
            return Err(Error::Domain(format!(
                "kernel coefficient needs omega_e in the gap or below omega_lp, got {}",
                p.omega_e
            )));
        }
        if p.rabi_d == 0.0 {
            return Ok(0.0);
        }
        Ok(p.rabi_e * p.rabi_e / (4.0 * p.omega_e) * kernel_k(p, omega_k, p.omega_e)?)
    }
}

pub fn emitter_shift_coefficients(p: &SystemParams) -> Result<ShiftCoefficients> {
    guard(p.omega_e, p.omega_d, "dresser")?;
    let electrostatic = -(p.rabi_e * p.rabi_e / (4.0 * p.omega_e * p.omega_d)) * p.rabi_d * p.rabi_d
        / (p.omega_d - p.omega_e);
    Ok(ShiftCoefficients { electrostatic, params: *p })
}
