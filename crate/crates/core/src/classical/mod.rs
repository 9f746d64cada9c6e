//! Classical electrodynamics of the layered cavity: the dynamical matrix,
//! transmission, effective permittivity, dispersion roots and the
//! radiative-damping Purcell rate.

mod map;

pub use map::{transmission_map, SpectralMap};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::correlator::POLE_GUARD;
use crate::emission::{polariton_linewidths, LossModel};
use crate::hopfield::{polariton_frequencies, Branch};
use crate::params::SystemParams;
use crate::{Error, Result};

pub type Matrix3 = [[Complex64; 3]; 3];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Dynamical matrix in `(A, X_d, X_e)` ordering, with damping entering
/// as `(omega + i gamma/2)^2` on the diagonal.
pub fn dynamical_matrix(p: &SystemParams, omega_k: f64, omega: f64) -> Matrix3 {
    let damped = |w0: f64, g: f64| {
        let z = c(omega, 0.5 * g);
        c(w0 * w0, 0.0) - z * z
    };
    let xd = c(0.0, omega * p.rabi_d);
    let xe = c(0.0, omega * p.rabi_e);
    let de = c(-p.rabi_d * p.rabi_e, 0.0);
    [
        [damped(omega_k, p.gamma_c), xd, xe],
        [-xd, damped(p.omega_d, p.kappa_d), de],
        [-xe, de, damped(p.omega_e, p.kappa_e)],
    ]
}

pub fn determinant(m: &Matrix3) -> Complex64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Cavity transmission `T = gamma omega_k [M^-1]_00`, via the adjugate.
///
/// A slab with zero coupling is dropped from the matrix first, so its bare
/// resonance does not make `M` singular.
pub fn transmission(p: &SystemParams, omega_k: f64, omega: f64) -> Result<Complex64> {
    if p.gamma_c == 0.0 {
        return Ok(c(0.0, 0.0));
    }
    let m = dynamical_matrix(p, omega_k, omega);
    let active: Vec<usize> = [(0, true), (1, p.rabi_d != 0.0), (2, p.rabi_e != 0.0)]
        .into_iter()
        .filter_map(|(i, on)| on.then_some(i))
        .collect();
    let (cof, det) = match active[..] {
        [0] => (c(1.0, 0.0), m[0][0]),
        [0, j] => (m[j][j], m[0][0] * m[j][j] - m[0][j] * m[j][0]),
        _ => (m[1][1] * m[2][2] - m[1][2] * m[2][1], determinant(&m)),
    };
    if det == c(0.0, 0.0) || !det.is_finite() {
        return Err(Error::Singular { k: omega_k, omega });
    }
    Ok(p.gamma_c * omega_k * cof / det)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PermittivityResult {
    pub omega: f64,
    pub eps_hopfield: Complex64,
    pub eps_matrix: Complex64,
}

pub fn permittivity(p: &SystemParams, omega: f64) -> Result<PermittivityResult> {
    Ok(PermittivityResult {
        omega,
        eps_hopfield: permittivity_hopfield(p, omega)?,
        eps_matrix: permittivity_matrix(p, omega)?,
    })
}

/// Positive pole frequencies of the lossless permittivity, i.e. the
/// normal modes of the two slabs coupled only through their fields.
/// An uncoupled slab has zero residue and contributes no pole.
pub fn permittivity_poles(p: &SystemParams) -> Vec<f64> {
    let (a, b) = (p.omega_d * p.omega_d, p.omega_e * p.omega_e);
    match (p.rabi_d != 0.0, p.rabi_e != 0.0) {
        (false, false) => return vec![],
        (true, false) => return vec![p.omega_d],
        (false, true) => return vec![p.omega_e],
        (true, true) => {}
    }
    let cross = p.rabi_d * p.rabi_d * p.rabi_e * p.rabi_e;
    let disc = (a - b).hypot(2.0 * cross.sqrt());
    let hi = 0.5 * (a + b + disc);
    // Product of the roots is a b - cross.
    let lo = (a * b - cross) / hi;
    [lo, hi].into_iter().filter(|x| *x > 0.0).map(f64::sqrt).collect()
}

fn guard_poles(p: &SystemParams, omega: f64) -> Result<()> {
    if p.kappa_d == 0.0 && p.kappa_e == 0.0 {
        for pole in permittivity_poles(p) {
            if (omega - pole).abs() < POLE_GUARD {
                return Err(Error::Pole { branch: "permittivity", omega });
            }
        }
    }
    Ok(())
}

/// Two-slab susceptibility-matrix form
/// `eps = 1 + [Od^2 (we^2 - w^2) + Oe^2 (wd^2 - w^2) + 2 Od^2 Oe^2] / [(wd^2 - w^2)(we^2 - w^2) - Od^2 Oe^2]`,
/// with losses through `w_a^2 -> w_a^2 - i kappa_a w`.
pub fn permittivity_matrix(p: &SystemParams, omega: f64) -> Result<Complex64> {
    guard_poles(p, omega)?;
    let w2 = omega * omega;
    let d = c(p.omega_d * p.omega_d - w2, -p.kappa_d * omega);
    let e = c(p.omega_e * p.omega_e - w2, -p.kappa_e * omega);
    let (od2, oe2) = (p.rabi_d * p.rabi_d, p.rabi_e * p.rabi_e);
    // An uncoupled slab cancels between numerator and denominator.
    if oe2 == 0.0 {
        return Ok(1.0 + od2 / d);
    }
    if od2 == 0.0 {
        return Ok(1.0 + oe2 / e);
    }
    let num = od2 * e + oe2 * d + 2.0 * od2 * oe2;
    let den = d * e - od2 * oe2;
    Ok(1.0 + num / den)
}

/// Clausius–Mossotti-like form
/// `eps = 1 / (1 - Od^2/(wd_bar^2 - w^2 - i kd w) - Oe^2/(we_bar^2 - w^2 - i ke w))`
/// with `w_bar^2 = w^2 + O^2` for both slabs.
pub fn permittivity_hopfield(p: &SystemParams, omega: f64) -> Result<Complex64> {
    guard_poles(p, omega)?;
    let w2 = omega * omega;
    let (od2, oe2) = (p.rabi_d * p.rabi_d, p.rabi_e * p.rabi_e);
    let dd = c(p.omega_d * p.omega_d + od2 - w2, -p.kappa_d * omega);
    let de = c(p.omega_e * p.omega_e + oe2 - w2, -p.kappa_e * omega);
    let zero = c(0.0, 0.0);
    // A vanishing inner denominator is a zero of eps, not a pole.
    if (od2 > 0.0 && dd == zero) || (oe2 > 0.0 && de == zero) {
        return Ok(zero);
    }
    let term = |o2: f64, den: Complex64| if o2 == 0.0 { zero } else { o2 / den };
    Ok(1.0 / (1.0 - term(od2, dd) - term(oe2, de)))
}

// Cubic in x = omega^2 whose roots are the solutions of x eps(x) = omega_k^2,
// obtained by clearing the permittivity denominator.
fn dispersion_cubic(p: &SystemParams, omega_k: f64) -> [f64; 4] {
    let (a, b) = (p.omega_d * p.omega_d, p.omega_e * p.omega_e);
    let (od2, oe2) = (p.rabi_d * p.rabi_d, p.rabi_e * p.rabi_e);
    let k2 = omega_k * omega_k;
    let d0 = a * b - od2 * oe2;
    let n0 = od2 * b + oe2 * a + 2.0 * od2 * oe2;
    // x (D + N) - k2 D with D = x^2 - (a + b) x + d0 and N = n0 - (od2 + oe2) x.
    [1.0, -(a + b) - (od2 + oe2) - k2, d0 + n0 + k2 * (a + b), -k2 * d0]
}

fn horner(c: &[f64; 4], x: f64) -> f64 {
    ((c[0] * x + c[1]) * x + c[2]) * x + c[3]
}

fn bisect(c: &[f64; 4], mut lo: f64, mut hi: f64) -> Result<f64> {
    let (mut flo, fhi) = (horner(c, lo), horner(c, hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Bracket { lo, hi, detail: format!("no sign change ({flo:e}, {fhi:e})") });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = horner(c, mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Positive real solutions of `omega^2 eps(omega) = omega_k^2` for the
/// lossless matrix permittivity, sorted ascending.
///
/// Roots are bracketed on the monotone pieces of the cleared cubic and
/// refined by bisection. A slab with zero coupling only contributes a
/// pole, so its bare frequency is not reported as a root.
pub fn classical_dispersion_roots(p: &SystemParams, omega_k: f64) -> Result<Vec<f64>> {
    if p.rabi_d * p.rabi_e >= p.omega_d * p.omega_e {
        // The static permittivity changes sign and one mode goes imaginary.
        return Err(Error::Domain(format!(
            "Omega_d Omega_e = {} reaches omega_d omega_e = {}; the vacuum is unstable",
            p.rabi_d * p.rabi_e,
            p.omega_d * p.omega_e
        )));
    }
    let cub = dispersion_cubic(p, omega_k);
    // Gershgorin-type bound on the largest root.
    let top = 1.0 + cub[1].abs() + cub[2].abs().sqrt() + cub[3].abs().cbrt();
    let mut cuts = vec![0.0];
    let (qa, qb, qc) = (3.0 * cub[0], 2.0 * cub[1], cub[2]);
    let disc = qb * qb - 4.0 * qa * qc;
    if disc > 0.0 {
        let s = disc.sqrt();
        let q = -0.5 * (qb + qb.signum() * s);
        let mut crit = [q / qa, qc / q];
        crit.sort_by(f64::total_cmp);
        cuts.extend(crit.into_iter().filter(|x| *x > 0.0 && *x < top));
    }
    cuts.push(top);

    let mut roots = Vec::with_capacity(3);
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let (flo, fhi) = (horner(&cub, lo), horner(&cub, hi));
        if flo == 0.0 && lo > 0.0 {
            roots.push(lo);
        } else if flo.signum() != fhi.signum() && fhi != 0.0 {
            roots.push(bisect(&cub, lo, hi)?);
        }
    }
    roots.retain(|x| *x > 0.0);
    roots.dedup();
    let mut remove_nearest = |target: f64| {
        if let Some((i, _)) = roots
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - target).abs().total_cmp(&(b.1 - target).abs()))
        {
            roots.remove(i);
        }
    };
    if p.rabi_e == 0.0 {
        remove_nearest(p.omega_e * p.omega_e);
    }
    if p.rabi_d == 0.0 {
        remove_nearest(p.omega_d * p.omega_d);
    }
    if roots.len() > 3 {
        return Err(Error::Bracket { lo: 0.0, hi: top, detail: format!("found {} roots", roots.len()) });
    }
    Ok(roots.into_iter().map(f64::sqrt).collect())
}

/// Emitter decay rate from the classical susceptibilities
/// `chi_E = w^2 (wd_bar^2 - w^2)/D` and `chi_d = Od^2 k^2 / D`,
/// `D = (w_up^2 - w^2)(w_lp^2 - w^2)`, with the resonant factor of `D`
/// replaced by `-i gamma_b w` (radiative damping of the branch).
pub fn classical_purcell(p: &SystemParams, branch: Branch, omega_k: f64, model: LossModel) -> Result<f64> {
    let (lp, up) = polariton_frequencies(p, omega_k);
    let (g_lp, g_up) = polariton_linewidths(p, omega_k, model);
    let (wb, other, g) = match branch {
        Branch::Lower => (lp, up, g_lp),
        Branch::Upper => (up, lp, g_up),
    };
    if (p.omega_e - wb).abs() >= 1e-6 {
        return Err(Error::Domain(format!(
            "emitter at {} is not resonant with the {branch} branch at {wb}",
            p.omega_e
        )));
    }
    if g <= 0.0 {
        return Err(Error::InfiniteRate { branch: branch.label() });
    }
    let w2 = wb * wb;
    let wd_bar2 = p.omega_d * p.omega_d + p.rabi_d * p.rabi_d;
    let den = c(other * other - w2, 0.0) * c(0.0, -g * wb);
    let chi = (w2 * (wd_bar2 - w2) + p.rabi_d * p.rabi_d * omega_k * omega_k) / den;
    Ok(p.rabi_e * p.rabi_e * chi.im / (2.0 * p.omega_e))
}
