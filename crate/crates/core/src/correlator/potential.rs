//! Real-space emitter–emitter potential
//! `U(r) = (1/2) int d^2k/(2pi)^2 K(k) e^{ik.r} = (1/4pi) int_0^inf k K(k) J0(kr) dk`.
//!
//! The kernel decays only as `-omega/k`, so a plain DFT would need an
//! enormous box in k. The primary route subtracts three analytic tails
//! with closed-form transforms and Fourier-transforms the remainder
//! (which falls off as `k^-4`) on a square grid. A direct Hankel
//! quadrature serves as an independent check.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use puruspe::{Jn, Kn};
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::kernel_k;
use crate::params::SystemParams;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialSettings {
    /// Points per side of the square grid (power of two).
    pub fft_size: usize,
    /// Side of the periodic real-space box, in `r0`.
    pub box_size: f64,
    /// Regulator `a` of the subtracted tails `(k^2 + a^2)^{-n/2}`.
    pub tail_scale: f64,
}

impl Default for PotentialSettings {
    fn default() -> Self {
        PotentialSettings { fft_size: 2048, box_size: 204.8, tail_scale: 1.0 }
    }
}

impl PotentialSettings {
    pub fn k_max(&self) -> f64 {
        PI * self.fft_size as f64 / self.box_size
    }

    pub fn dr(&self) -> f64 {
        self.box_size / self.fft_size as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialProfile {
    pub omega: f64,
    pub r: Vec<f64>,
    pub u: Vec<f64>,
    /// Largest `|U|` on this profile's grid.
    pub max_abs: f64,
}

impl PotentialProfile {
    fn new(omega: f64, r: Vec<f64>, u: Vec<f64>) -> Self {
        let max_abs = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        PotentialProfile { omega, r, u, max_abs }
    }

    /// Values divided by a reference maximum, e.g. a shared reference across several profiles.
    pub fn normalized(&self, reference: f64) -> Vec<f64> {
        if reference == 0.0 {
            return vec![0.0; self.u.len()];
        }
        self.u.iter().map(|v| v / reference).collect()
    }
}

/// Large-k expansion `K ~ c1/k + c2/k^2 + c3/k^3` of the kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailCoefficients {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

pub fn kernel_tail(p: &SystemParams, omega: f64) -> TailCoefficients {
    let wd = p.omega_d;
    let o2 = p.rabi_d * p.rabi_d;
    let det = omega - wd;
    let c2 = -omega * (2.0 * omega * wd * det * det - 4.0 * o2 * wd * det + o2 * o2) / (2.0 * wd * det * det);
    TailCoefficients { c1: -omega, c2, c3: 0.5 * omega * (5.0 * o2 - 2.0 * omega * omega) }
}

// Subtracted part S(k) = b1 (k^2+a^2)^{-1/2} + b2 (k^2+a^2)^{-1} + b3 (k^2+a^2)^{-3/2},
// matched to the kernel through order k^-3.
#[derive(Debug)]
struct Subtraction {
    a: f64,
    b1: f64,
    b2: f64,
    b3: f64,
}

impl Subtraction {
    fn new(t: &TailCoefficients, a: f64) -> Self {
        Subtraction { a, b1: t.c1, b2: t.c2, b3: t.c3 + 0.5 * t.c1 * a * a }
    }

    fn at(&self, k: f64) -> f64 {
        let q = k * k + self.a * self.a;
        let s = q.sqrt();
        self.b1 / s + self.b2 / q + self.b3 / (q * s)
    }

    /// `(1/2)` times the 2D inverse transform of `S`.
    fn potential(&self, r: f64) -> f64 {
        let a = self.a;
        let e = (-a * r).exp();
        (self.b1 * e / r + self.b2 * Kn(0, a * r) + self.b3 * e / a) / (4.0 * PI)
    }
}

fn check_request(p: &SystemParams, omega: f64, r_grid: &[f64]) -> Result<()> {
    if r_grid.is_empty() {
        return Err(Error::Empty("r grid"));
    }
    if let Some(r) = r_grid.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
        return Err(Error::Domain(format!("potential radii must be positive, got {r}")));
    }
    if omega != 0.0 && !p.in_gap(omega) {
        let (lo, hi) = p.gap();
        return Err(Error::Domain(format!("omega = {omega} is outside the polariton gap ({lo}, {hi})")));
    }
    Ok(())
}

/// Potential profile from a 2D DFT of the tail-subtracted kernel.
///
/// `omega = 0` is the electrostatic limit where the kernel vanishes
/// identically; any other `omega` must lie strictly inside the gap.
pub fn effective_potential(
    p: &SystemParams,
    omega: f64,
    r_grid: &[f64],
    settings: &PotentialSettings,
) -> Result<PotentialProfile> {
    check_request(p, omega, r_grid)?;
    if omega == 0.0 {
        return Ok(PotentialProfile::new(omega, r_grid.to_vec(), vec![0.0; r_grid.len()]));
    }
    let n = settings.fft_size;
    if !n.is_power_of_two() || n < 64 {
        return Err(Error::Resolution(format!("fft_size must be a power of two >= 64, got {n}")));
    }
    let l = settings.box_size;
    let dr = settings.dr();
    let r_max = r_grid.iter().copied().fold(0.0, f64::max);
    if r_max > 0.25 * l {
        return Err(Error::Resolution(format!(
            "r = {r_max} exceeds a quarter of the box ({l}); periodic images would contaminate it"
        )));
    }

    let sub = Subtraction::new(&kernel_tail(p, omega), settings.tail_scale);
    let remainder = |k: f64| -> Result<f64> { Ok(kernel_k(p, k, omega)? - sub.at(k)) };

    // Beyond the band edge the remainder falls off as k^-4, so the part the
    // grid cannot represent contributes about |R(k_max)| k_max^2 / (8 pi).
    let k_max = settings.k_max();
    let truncation = remainder(k_max)?.abs() * k_max * k_max / (8.0 * PI);

    let dk = 2.0 * PI / l;
    let freq = |j: usize| if j < n / 2 { j as f64 } else { j as f64 - n as f64 } * dk;
    // The remainder is radial, so each cell only needs |k|.
    let mut grid: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); n * n];
    grid.par_chunks_mut(n).enumerate().try_for_each(|(j, row)| -> Result<()> {
        let kx = freq(j);
        for (m, cell) in row.iter_mut().enumerate() {
            let ky = freq(m);
            *cell = Complex64::new(remainder(kx.hypot(ky))?, 0.0);
        }
        Ok(())
    })?;

    let fft = FftPlanner::new().plan_fft_inverse(n);
    grid.par_chunks_mut(n).for_each(|row| fft.process(row));
    transpose_square(&mut grid, n);
    grid.par_chunks_mut(n).for_each(|row| fft.process(row));

    // After the transpose, row 0 holds the samples along x at y = 0.
    let norm = 1.0 / (2.0 * l * l);
    let axis: Vec<f64> = grid[..n / 2 + 1].iter().map(|c| c.re * norm).collect();

    let u = r_grid
        .iter()
        .map(|&r| interpolate_even(&axis, dr, r) + sub.potential(r))
        .collect();
    let profile = PotentialProfile::new(omega, r_grid.to_vec(), u);
    if truncation > 1e-3 * profile.max_abs {
        return Err(Error::Resolution(format!(
            "band-edge truncation error {truncation:.3e} exceeds 1e-3 of max |U| = {:.3e}; refine the grid",
            profile.max_abs
        )));
    }
    Ok(profile)
}

fn transpose_square(a: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in i + 1..n {
            a.swap(i * n + j, j * n + i);
        }
    }
}

/// Four-point Lagrange interpolation of an even function sampled at `i dr`.
fn interpolate_even(samples: &[f64], dr: f64, r: f64) -> f64 {
    let x = r / dr;
    let i = (x.floor() as isize).clamp(0, samples.len() as isize - 3);
    let at = |j: isize| samples[j.unsigned_abs()];
    let t = x - i as f64;
    let (y0, y1, y2, y3) = (at(i - 1), at(i), at(i + 1), at(i + 2));
    let (tm, t1, t2) = (t + 1.0, t - 1.0, t - 2.0);
    -y0 * t * t1 * t2 / 6.0 + y1 * tm * t1 * t2 / 2.0 - y2 * tm * t * t2 / 2.0 + y3 * tm * t * t1 / 6.0
}

/// Zeros of J0 from McMahon's expansion (accurate well below 1e-4 for all m).
fn j0_zero(m: usize) -> f64 {
    let b = (m as f64 - 0.25) * PI;
    let b2 = b * b;
    b + 1.0 / (8.0 * b) - 31.0 / (384.0 * b * b2) + 3779.0 / (15360.0 * b * b2 * b2)
}

/// Oracle: `U(r) = (1/4pi) [ -omega/r + int_0^inf (k K + omega) J0(kr) dk ]`,
/// integrated between consecutive zeros of `J0(kr)` with Gauss–Legendre
/// panels and accelerated by repeated averaging of the partial sums.
pub fn effective_potential_hankel(p: &SystemParams, omega: f64, r_grid: &[f64]) -> Result<PotentialProfile> {
    check_request(p, omega, r_grid)?;
    if omega == 0.0 {
        return Ok(PotentialProfile::new(omega, r_grid.to_vec(), vec![0.0; r_grid.len()]));
    }
    let rule = GaussLegendre::new(NonZeroUsize::new(24).expect("nonzero"));
    const ZEROS: usize = 4000;
    const PANEL: f64 = 0.25;
    const FINE_REGION: f64 = 40.0;

    let u = r_grid
        .par_iter()
        .map(|&r| {
            // Inside the gap the kernel has no poles, so evaluation cannot fail.
            let f = |k: f64| (k * kernel_k(p, k, omega).unwrap_or(0.0) + omega) * Jn(0, k * r);
            let mut partial = Vec::with_capacity(ZEROS);
            let mut total = 0.0;
            let mut lo = 0.0;
            for m in 1..=ZEROS {
                let hi = j0_zero(m) / r;
                // Panels resolve the kernel's own structure at small k.
                let width = if lo < FINE_REGION { PANEL } else { hi - lo };
                let panels = ((hi - lo) / width).ceil().max(1.0) as usize;
                let h = (hi - lo) / panels as f64;
                for s in 0..panels {
                    let a = lo + s as f64 * h;
                    total += rule.integrate(a, a + h, f);
                }
                partial.push(total);
                lo = hi;
            }
            // Repeated averaging of the last partial sums (Euler-type).
            let mut tail: Vec<f64> = partial[ZEROS - 8..].to_vec();
            while tail.len() > 1 {
                tail = tail.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
            }
            (tail[0] - omega / r) / (4.0 * PI)
        })
        .collect();
    Ok(PotentialProfile::new(omega, r_grid.to_vec(), u))
}
