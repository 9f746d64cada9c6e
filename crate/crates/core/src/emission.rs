//! Dressed polariton linewidths under Ohmic baths and the resulting
//! Purcell emission rates of a weakly coupled emitter.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::hopfield::{emitter_polariton_rabi, mixing_angle, polariton_frequencies, Branch};
use crate::params::SystemParams;
use crate::{Error, Result};

/// Which bath dominates the polariton losses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossModel {
    Cavity,
    Dresser,
    /// Independent cavity and dresser baths, rates added.
    Combined,
}

impl fmt::Display for LossModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LossModel::Cavity => "cavity",
            LossModel::Dresser => "dresser",
            LossModel::Combined => "combined",
        })
    }
}

impl FromStr for LossModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cavity" => Ok(LossModel::Cavity),
            "dresser" => Ok(LossModel::Dresser),
            "combined" => Ok(LossModel::Combined),
            _ => Err(Error::Invalid(format!("unknown loss model `{s}` (cavity, dresser or combined)"))),
        }
    }
}

/// `(gamma_lp, gamma_up)`: the cavity bath feeds the photonic weights
/// `(cos^2, sin^2)`, the dresser bath the matter weights `(sin^2, cos^2)`.
pub fn polariton_linewidths(p: &SystemParams, omega_k: f64, model: LossModel) -> (f64, f64) {
    let m = mixing_angle(p, omega_k);
    let cavity = (p.gamma_c * m.cos2, p.gamma_c * m.sin2);
    let dresser = (p.kappa_d * m.sin2, p.kappa_d * m.cos2);
    match model {
        LossModel::Cavity => cavity,
        LossModel::Dresser => dresser,
        LossModel::Combined => (cavity.0 + dresser.0, cavity.1 + dresser.1),
    }
}

/// Emitter decay rate `Omega_b^2 / (2 gamma_b)` through one branch.
pub fn purcell_rate(p: &SystemParams, omega_k: f64, model: LossModel, branch: Branch) -> Result<f64> {
    let (g_lp, g_up) = polariton_linewidths(p, omega_k, model);
    let (o_lp, o_up) = emitter_polariton_rabi(p, omega_k);
    let (g, o) = match branch {
        Branch::Lower => (g_lp, o_lp),
        Branch::Upper => (g_up, o_up),
    };
    if g <= 0.0 {
        return Err(Error::InfiniteRate { branch: branch.label() });
    }
    Ok(o * o / (2.0 * g))
}

/// `(Gamma_lp, Gamma_up)`; fails if either dressed linewidth vanishes.
pub fn purcell_rates(p: &SystemParams, omega_k: f64, model: LossModel) -> Result<(f64, f64)> {
    Ok((
        purcell_rate(p, omega_k, model, Branch::Lower)?,
        purcell_rate(p, omega_k, model, Branch::Upper)?,
    ))
}

/// Closed forms valid when the emitter is resonant with `branch`:
/// `(Omega_e^2 / 2 gamma)(omega_k/omega_b)^2` for cavity losses, and the
/// same with `kappa_d` times `cot^2` (lp) or `tan^2` (up) for dresser losses.
pub fn purcell_rate_resonant(p: &SystemParams, omega_k: f64, model: LossModel, branch: Branch) -> Result<f64> {
    let (lp, up) = polariton_frequencies(p, omega_k);
    let m = mixing_angle(p, omega_k);
    let wb = match branch {
        Branch::Lower => lp,
        Branch::Upper => up,
    };
    let geometric = (omega_k / wb).powi(2) * p.rabi_e * p.rabi_e / 2.0;
    let rate = match (model, branch) {
        (LossModel::Cavity, _) => geometric / p.gamma_c,
        (LossModel::Dresser, Branch::Lower) => geometric / p.kappa_d * m.cos2 / m.sin2,
        (LossModel::Dresser, Branch::Upper) => geometric / p.kappa_d * m.sin2 / m.cos2,
        (LossModel::Combined, _) => return purcell_rate(p, omega_k, model, branch),
    };
    if rate.is_finite() {
        Ok(rate)
    } else {
        Err(Error::InfiniteRate { branch: branch.label() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmissionPoint {
    pub omega_k: f64,
    pub theta: f64,
    pub gamma_lp: f64,
    pub gamma_up: f64,
    /// `None` where the dressed linewidth vanishes.
    pub rate_lp: Option<f64>,
    pub rate_up: Option<f64>,
    /// Both branches satisfy `gamma_b >= 3 Omega_b`, the Markovian-decay regime.
    pub weak_coupling: bool,
}

pub fn emission_point(p: &SystemParams, omega_k: f64, model: LossModel) -> EmissionPoint {
    let (gamma_lp, gamma_up) = polariton_linewidths(p, omega_k, model);
    let (o_lp, o_up) = emitter_polariton_rabi(p, omega_k);
    EmissionPoint {
        omega_k,
        theta: mixing_angle(p, omega_k).theta(),
        gamma_lp,
        gamma_up,
        rate_lp: purcell_rate(p, omega_k, model, Branch::Lower).ok(),
        rate_up: purcell_rate(p, omega_k, model, Branch::Upper).ok(),
        weak_coupling: gamma_lp >= 3.0 * o_lp && gamma_up >= 3.0 * o_up,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linewidth_sharing() {
        let weak = SystemParams::new(1e-9, 1.0, 0.01).unwrap();
        let (a, b) = polariton_linewidths(&weak, 1.0, LossModel::Cavity);
        assert!((a - 0.005).abs() < 1e-9 && (b - 0.005).abs() < 1e-9);
        let g = SystemParams::new(1.0, 0.618, 0.01).unwrap();
        let (a, b) = polariton_linewidths(&g, 1.0, LossModel::Cavity);
        assert!((a - 0.007_236_067_977_499_79).abs() < 1e-15 && (b - 0.002_763_932_022_500_21).abs() < 1e-15);
        let bare = SystemParams::new(0.0, 0.5, 0.01).unwrap();
        assert_eq!(polariton_linewidths(&bare, 0.5, LossModel::Cavity), (0.01, 0.0));
        let (c0, c1) = polariton_linewidths(&g, 1.0, LossModel::Combined);
        let (d0, d1) = polariton_linewidths(&g, 1.0, LossModel::Dresser);
        assert!((c0 - a - d0).abs() < 1e-16 && (c1 - b - d1).abs() < 1e-16);
    }

    #[test]
    fn textbook_purcell_rate() {
        let bare = SystemParams::new(0.0, 0.5, 0.01).unwrap();
        let g = purcell_rate(&bare, 0.5, LossModel::Cavity, Branch::Lower).unwrap();
        assert!((g - 0.01 * 0.01 / (2.0 * 0.01)).abs() < 1e-15);
        assert!(matches!(
            purcell_rate(&bare, 0.5, LossModel::Cavity, Branch::Upper),
            Err(Error::InfiniteRate { branch: "up" })
        ));
    }

    #[test]
    fn lower_branch_enhancement() {
        let lp = (5f64.sqrt() - 1.0) / 2.0;
        let g = SystemParams::new(1.0, lp, 0.01).unwrap();
        let bare = SystemParams::new(0.0, lp, 0.01).unwrap();
        let gamma = purcell_rate(&g, 1.0, LossModel::Cavity, Branch::Lower).unwrap();
        let gamma0 = purcell_rate(&bare, lp, LossModel::Cavity, Branch::Lower).unwrap();
        assert!((gamma / gamma0 - (1.0 + 5f64.sqrt()) / 2.0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn general_and_resonant_forms_agree() {
        for (rd, wk) in [(0.3, 0.4), (1.0, 1.0), (1.7, 2.5)] {
            for model in [LossModel::Cavity, LossModel::Dresser] {
                for branch in Branch::BOTH {
                    let base = SystemParams::new(rd, 0.5, 0.02).unwrap();
                    let (lp, up) = polariton_frequencies(&base, wk);
                    let we = if branch == Branch::Lower { lp } else { up };
                    let p = SystemParams { omega_e: we, ..base };
                    let a = purcell_rate(&p, wk, model, branch).unwrap();
                    let b = purcell_rate_resonant(&p, wk, model, branch).unwrap();
                    assert!((a - b).abs() <= 1e-12 * a, "{rd} {wk} {model} {branch}: {a} {b}");
                }
            }
        }
    }

    #[test]
    fn loss_model_parsing() {
        for m in [LossModel::Cavity, LossModel::Dresser, LossModel::Combined] {
            assert_eq!(m.to_string().parse::<LossModel>().unwrap(), m);
        }
        assert!("ohmic".parse::<LossModel>().is_err());
    }
}
