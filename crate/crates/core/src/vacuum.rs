//! Observables of the dressed polariton vacuum.
//!
//! Field fluctuations are expressed relative to their bare-cavity values,
//! so every quantity reduces to `1` or `0` when `Omega_d = 0`.

use serde::{Deserialize, Serialize};

use crate::hopfield::{mixing_angle, polariton_frequencies, rabi_shares};
use crate::params::SystemParams;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VacuumObservables {
    pub omega_k: f64,
    pub d2_ratio: f64,
    pub e2_ratio: f64,
    pub dzp_lp: f64,
    pub dzp_up: f64,
    pub n_ph: f64,
    pub n_d: f64,
    pub n_int: f64,
    pub dw_zp: f64,
}

fn require_positive(omega_k: f64) -> Result<()> {
    if omega_k > 0.0 && omega_k.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("vacuum observables need omega_k > 0 (omega_lp vanishes at k = 0), got {omega_k}")))
    }
}

/// `<D_k^2> / (eps0 E_k)^2 = (omega_k/omega_up) sin^2 + (omega_k/omega_lp) cos^2`.
pub fn displacement_fluctuations(p: &SystemParams, omega_k: f64) -> Result<f64> {
    require_positive(omega_k)?;
    if p.rabi_d == 0.0 {
        // Decoupled: the photon keeps its bare fluctuations exactly.
        return Ok(1.0);
    }
    let (lp, up) = polariton_frequencies(p, omega_k);
    let m = mixing_angle(p, omega_k);
    Ok(omega_k / up * m.sin2 + omega_k / lp * m.cos2)
}

/// Shares `Omega_lp^2 / Omega_e^2` and `Omega_up^2 / Omega_e^2` of the
/// zero-point displacement amplitude.
pub fn zero_point_amplitudes(p: &SystemParams, omega_k: f64) -> (f64, f64) {
    rabi_shares(p, omega_k)
}

/// Electric-field fluctuations, `(1 + Omega_d^2 / (omega_d omega_k)) d2_ratio`.
pub fn efield_fluctuations(p: &SystemParams, omega_k: f64) -> Result<f64> {
    let d2 = displacement_fluctuations(p, omega_k)?;
    Ok((1.0 + p.rabi_d * p.rabi_d / (p.omega_d * omega_k)) * d2)
}

/// Four-term form: displacement plus dresser polarization fluctuations.
pub fn efield_fluctuations_expanded(p: &SystemParams, omega_k: f64) -> Result<f64> {
    require_positive(omega_k)?;
    let (lp, up) = polariton_frequencies(p, omega_k);
    let m = mixing_angle(p, omega_k);
    let d2 = omega_k / up * m.sin2 + omega_k / lp * m.cos2;
    let ratio = p.rabi_d * p.rabi_d / (p.omega_d * p.omega_d);
    Ok(d2 + ratio * (lp / omega_k * m.sin2 + up / omega_k * m.cos2))
}

/// Virtual photon and dresser populations `(N_ph, N_d)` of the vacuum.
pub fn virtual_populations(p: &SystemParams, omega_k: f64) -> Result<(f64, f64)> {
    require_positive(omega_k)?;
    let (lp, up) = polariton_frequencies(p, omega_k);
    let m = mixing_angle(p, omega_k);
    let wk = omega_k;
    let wd = p.omega_d;
    // (w^2 + v^2) / (2 w v) - 1 = (w - v)^2 / (2 w v), which keeps the
    // populations exactly zero and non-negative in the decoupled limit.
    let excess = |w: f64, v: f64| (w - v) * (w - v) / (4.0 * w * v);
    let n_ph = m.sin2 * excess(up, wk) + m.cos2 * excess(lp, wk);
    let n_d = m.sin2 * excess(lp, wd) + m.cos2 * excess(up, wd);
    Ok((n_ph, n_d))
}

/// Differential zero-point frequency and the interaction term:
/// `dw_zp = (omega_up + omega_lp - omega_k - omega_d) / 2` and `n_int`
/// solved from `dw_zp = omega_k N_ph + omega_d N_d + Omega_d N_int`.
pub fn zero_point_shift(p: &SystemParams, omega_k: f64) -> Result<(f64, f64)> {
    let (n_ph, n_d) = virtual_populations(p, omega_k)?;
    let dw = differential_zero_point(p, omega_k);
    if p.rabi_d == 0.0 {
        return Ok((dw, 0.0));
    }
    let n_int = (dw - omega_k * n_ph - p.omega_d * n_d) / p.rabi_d;
    Ok((dw, n_int))
}

/// `(omega_up + omega_lp)/2 - (omega_k + omega_d)/2`, using
/// `(omega_up + omega_lp)^2 = (omega_k + omega_d)^2 + Omega_d^2`.
pub fn differential_zero_point(p: &SystemParams, omega_k: f64) -> f64 {
    let s = omega_k + p.omega_d;
    let o2 = p.rabi_d * p.rabi_d;
    0.5 * o2 / (s.hypot(p.rabi_d) + s)
}

pub fn vacuum_observables(p: &SystemParams, omega_k: f64) -> Result<VacuumObservables> {
    let d2_ratio = displacement_fluctuations(p, omega_k)?;
    let e2_ratio = efield_fluctuations(p, omega_k)?;
    let (dzp_lp, dzp_up) = zero_point_amplitudes(p, omega_k);
    let (n_ph, n_d) = virtual_populations(p, omega_k)?;
    let (dw_zp, n_int) = zero_point_shift(p, omega_k)?;
    Ok(VacuumObservables { omega_k, d2_ratio, e2_ratio, dzp_lp, dzp_up, n_ph, n_d, n_int, dw_zp })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(rabi_d: f64, omega_e: f64) -> SystemParams {
        SystemParams::new(rabi_d, omega_e, 0.1).unwrap()
    }

    #[test]
    fn bare_vacuum() {
        let bare = p(0.0, 0.5);
        for wk in [0.1, 0.5, 1.0, 3.0] {
            let v = vacuum_observables(&bare, wk).unwrap();
            assert_eq!((v.d2_ratio, v.e2_ratio), (1.0, 1.0));
            assert_eq!((v.n_ph, v.n_d, v.n_int, v.dw_zp), (0.0, 0.0, 0.0, 0.0));
        }
        assert_eq!(zero_point_amplitudes(&p(0.0, 0.5), 0.5), (1.0, 0.0));
        assert_eq!(zero_point_amplitudes(&p(0.0, 1.5), 1.5), (0.0, 1.0));
    }

    #[test]
    fn golden_ratio_values() {
        let g = p(1.0, 1.0);
        // sqrt(9/5) = 3 / sqrt 5
        let d2 = displacement_fluctuations(&g, 1.0).unwrap();
        assert!((d2 - 3.0 / 5f64.sqrt()).abs() < 1e-15);
        assert!((efield_fluctuations(&g, 1.0).unwrap() - 6.0 / 5f64.sqrt()).abs() < 1e-14);
        let (a, b) = zero_point_amplitudes(&g, 1.0);
        assert!((a - 1.170_820_393_249_937).abs() < 1e-14 && (b - 0.170_820_393_249_937).abs() < 1e-14);
        assert!(((a + b) - d2).abs() < 1e-14);
    }

    #[test]
    fn expanded_field_form_agrees() {
        for rd in [0.1, 0.7, 1.0, 2.0] {
            for wk in [0.01, 0.3, 1.0, 4.0, 100.0] {
                let a = efield_fluctuations(&p(rd, 0.5), wk).unwrap();
                let b = efield_fluctuations_expanded(&p(rd, 0.5), wk).unwrap();
                assert!((a - b).abs() <= 1e-12 * a, "{rd} {wk}: {a} {b}");
            }
        }
    }

    #[test]
    fn resonant_populations() {
        let g = p(1.0, 0.5);
        let (n_ph, n_d) = virtual_populations(&g, 1.0).unwrap();
        let exact = 0.5 * (1.25f64.sqrt() - 1.0);
        assert!((n_ph - exact).abs() < 1e-15 && (n_d - exact).abs() < 1e-15);
        let (dw, n_int) = zero_point_shift(&g, 1.0).unwrap();
        assert!(n_int.abs() < 1e-15);
        assert!((dw - 2.0 * exact).abs() < 1e-15);
        for rd in [0.1, 0.5, 2.0] {
            let (a, b) = virtual_populations(&p(rd, 0.5), 1.0).unwrap();
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn shift_grows_with_coupling() {
        let mut last = 0.0;
        for i in 1..40 {
            let (dw, _) = zero_point_shift(&p(0.05 * i as f64, 0.5), 0.7).unwrap();
            assert!(dw > last);
            last = dw;
        }
    }

    #[test]
    fn zero_wavevector_is_a_domain_error() {
        assert!(matches!(displacement_fluctuations(&p(1.0, 0.5), 0.0), Err(Error::Domain(_))));
        assert!(virtual_populations(&p(1.0, 0.5), 0.0).is_err());
    }
}
