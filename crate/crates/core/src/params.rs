//! Parameter model, unit conventions and configuration ingestion.
//!
//! All frequencies are measured in units of the dresser frequency `omega_d`
//! and lengths in `r0 = c / omega_d`. The only SI entry point is
//! [`rabi_from_doping`].

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::emission::LossModel;
use crate::{Error, Result};

/// Elementary charge (C), CODATA 2018 exact value.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Vacuum permittivity (F/m), CODATA 2022.
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_818_8e-12;
/// Electron rest mass (kg), CODATA 2022.
pub const ELECTRON_MASS: f64 = 9.109_383_713_9e-31;

/// Emitter couplings above this fraction of `omega_e` leave the weak-emitter regime.
pub const WEAK_EMITTER_RATIO: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub omega_d: f64,
    /// Dresser Rabi frequency.
    pub rabi_d: f64,
    pub omega_e: f64,
    /// Emitter Rabi frequency.
    pub rabi_e: f64,
    /// Bare cavity linewidth.
    pub gamma_c: f64,
    pub kappa_d: f64,
    pub kappa_e: f64,
}

impl SystemParams {
    pub const DEFAULT_GAMMA_C: f64 = 0.01;
    pub const DEFAULT_KAPPA: f64 = 0.05;

    /// Parameters with `omega_d = 1` and the default linewidths.
    pub fn new(rabi_d: f64, omega_e: f64, rabi_e: f64) -> Result<Self> {
        let p = SystemParams {
            omega_d: 1.0,
            rabi_d,
            omega_e,
            rabi_e,
            gamma_c: Self::DEFAULT_GAMMA_C,
            kappa_d: Self::DEFAULT_KAPPA,
            kappa_e: Self::DEFAULT_KAPPA,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_losses(mut self, gamma_c: f64, kappa_d: f64, kappa_e: f64) -> Result<Self> {
        self.gamma_c = gamma_c;
        self.kappa_d = kappa_d;
        self.kappa_e = kappa_e;
        self.validate()?;
        Ok(self)
    }

    /// Same system with every linewidth set to zero.
    pub fn lossless(mut self) -> Self {
        self.gamma_c = 0.0;
        self.kappa_d = 0.0;
        self.kappa_e = 0.0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("omega_d", self.omega_d),
            ("Omega_d", self.rabi_d),
            ("omega_e", self.omega_e),
            ("Omega_e", self.rabi_e),
            ("gamma_c", self.gamma_c),
            ("kappa_d", self.kappa_d),
            ("kappa_e", self.kappa_e),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::Invalid(format!("{name} must be finite, got {v}")));
            }
        }
        if self.omega_d <= 0.0 {
            return Err(Error::Invalid(format!("omega_d must be > 0, got {}", self.omega_d)));
        }
        if self.omega_e <= 0.0 {
            return Err(Error::Invalid(format!("omega_e must be > 0, got {}", self.omega_e)));
        }
        for (name, v) in &fields[..] {
            if *v < 0.0 {
                return Err(Error::Invalid(format!("{name} must be >= 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Advisory only: the emitter is treated in the rotating-wave picture,
    /// which assumes `Omega_e` small against `omega_e`.
    pub fn is_weak_emitter(&self) -> bool {
        self.rabi_e < WEAK_EMITTER_RATIO * self.omega_e
    }

    /// Open polariton gap `(omega_d, sqrt(omega_d^2 + Omega_d^2))`.
    pub fn gap(&self) -> (f64, f64) {
        (self.omega_d, self.omega_d.hypot(self.rabi_d))
    }

    pub fn in_gap(&self, omega: f64) -> bool {
        let (lo, hi) = self.gap();
        omega > lo && omega < hi
    }

    /// Largest of the three bare linewidths.
    pub fn max_linewidth(&self) -> f64 {
        self.gamma_c.max(self.kappa_d).max(self.kappa_e)
    }
}

/// Photon dispersion of the cavity mode. Only the TM0 light line ships.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CavityDispersion {
    Linear { c: f64 },
}

impl Default for CavityDispersion {
    fn default() -> Self {
        CavityDispersion::Linear { c: 1.0 }
    }
}

impl CavityDispersion {
    pub fn omega(&self, k: f64) -> f64 {
        match *self {
            CavityDispersion::Linear { c } => c * k.abs(),
        }
    }

    /// Non-negative wavevector with the given cavity frequency.
    pub fn wavevector(&self, omega_k: f64) -> f64 {
        match *self {
            CavityDispersion::Linear { c } => omega_k / c,
        }
    }
}

/// Quantum-well doping data in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DopingInput {
    /// Sheet electron density (m^-2).
    pub n_2d: f64,
    pub f_osc: f64,
    /// Cavity height (m).
    pub l_c: f64,
    /// Effective electron mass (kg).
    pub m_eff: f64,
}

/// Rabi frequency (rad/s) from `Omega^2 = f e^2 n / (eps0 m L_c)`.
///
/// A zero density is accepted and gives a zero coupling.
pub fn rabi_from_doping(d: &DopingInput) -> Result<f64> {
    if !(d.n_2d >= 0.0 && d.n_2d.is_finite()) {
        return Err(Error::Domain(format!("n_2d must be >= 0, got {}", d.n_2d)));
    }
    if !(d.f_osc > 0.0 && d.f_osc <= 1.0) {
        return Err(Error::Domain(format!("f_osc must lie in (0, 1], got {}", d.f_osc)));
    }
    if !(d.l_c > 0.0 && d.l_c.is_finite()) {
        return Err(Error::Domain(format!("L_c must be > 0, got {}", d.l_c)));
    }
    if !(d.m_eff > 0.0 && d.m_eff.is_finite()) {
        return Err(Error::Domain(format!("m_eff must be > 0, got {}", d.m_eff)));
    }
    let e2 = ELEMENTARY_CHARGE * ELEMENTARY_CHARGE;
    Ok((d.f_osc * e2 * d.n_2d / (VACUUM_PERMITTIVITY * d.m_eff * d.l_c)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GridScale {
    Linear,
    Log,
}

/// Inclusive sample grid `start:stop:count`, optionally `:log` spaced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub scale: GridScale,
}

impl Grid {
    pub fn linear(start: f64, stop: f64, count: usize) -> Result<Self> {
        let g = Grid { start, stop, count, scale: GridScale::Linear };
        g.validate()?;
        Ok(g)
    }

    pub fn log(start: f64, stop: f64, count: usize) -> Result<Self> {
        let g = Grid { start, stop, count, scale: GridScale::Log };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        if self.count < 2 {
            return Err(Error::Invalid(format!("grid count must be >= 2, got {}", self.count)));
        }
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::Invalid("grid endpoints must be finite".into()));
        }
        if self.scale == GridScale::Log && (self.start <= 0.0 || self.stop <= 0.0) {
            return Err(Error::Invalid("log grid endpoints must be > 0".into()));
        }
        Ok(())
    }

    /// Uniform step; only meaningful for linear grids.
    pub fn step(&self) -> f64 {
        (self.stop - self.start) / (self.count - 1) as f64
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.count - 1;
        (0..self.count)
            .map(|i| {
                if i == n {
                    return self.stop;
                }
                let t = i as f64 / n as f64;
                match self.scale {
                    GridScale::Linear => self.start + (self.stop - self.start) * t,
                    GridScale::Log => self.start * (self.stop / self.start).powf(t),
                }
            })
            .collect()
    }

    /// Text form accepted by the config parser.
    pub fn spec(&self) -> String {
        let mut s = format!("{:?}:{:?}:{}", self.start, self.stop, self.count);
        if self.scale == GridScale::Log {
            s.push_str(":log");
        }
        s
    }
}

/// A fully resolved run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub params: SystemParams,
    pub k_grid: Option<Grid>,
    pub omega_grid: Option<Grid>,
    pub r_grid: Option<Grid>,
    /// Emitter frequencies swept by the tomography protocol.
    pub omega_e_sweep: Vec<Grid>,
    pub loss_model: LossModel,
    pub fft_size: usize,
    /// Peak prominence threshold relative to each column maximum.
    pub min_prominence: f64,
    /// Frequency tolerance for phase matching.
    pub tol_omega: f64,
}

const REQUIRED_KEYS: [&str; 3] = ["Omega_d", "omega_e", "Omega_e"];
const KNOWN_KEYS: [&str; 15] = [
    "omega_d",
    "Omega_d",
    "omega_e",
    "Omega_e",
    "gamma_c",
    "kappa_d",
    "kappa_e",
    "k_grid",
    "omega_grid",
    "r_grid",
    "omega_e_sweep",
    "loss_model",
    "fft_size",
    "min_prominence",
    "tol_omega",
];

impl Config {
    pub const DEFAULT_FFT_SIZE: usize = 2048;
    pub const DEFAULT_MIN_PROMINENCE: f64 = 1e-3;
    pub const DEFAULT_TOL_OMEGA: f64 = 1e-3;

    pub fn new(params: SystemParams) -> Self {
        Config {
            params,
            k_grid: None,
            omega_grid: None,
            r_grid: None,
            omega_e_sweep: Vec::new(),
            loss_model: LossModel::Cavity,
            fft_size: Self::DEFAULT_FFT_SIZE,
            min_prominence: Self::DEFAULT_MIN_PROMINENCE,
            tol_omega: Self::DEFAULT_TOL_OMEGA,
        }
    }

    /// Concatenated values of every `omega_e_sweep` segment.
    pub fn omega_e_values(&self) -> Vec<f64> {
        self.omega_e_sweep.iter().flat_map(|g| g.values()).collect()
    }

    /// Canonical text form; `load_config` of the result gives back `self`.
    pub fn to_config_string(&self) -> String {
        let p = &self.params;
        let mut s = String::new();
        for (key, v) in [
            ("omega_d", p.omega_d),
            ("Omega_d", p.rabi_d),
            ("omega_e", p.omega_e),
            ("Omega_e", p.rabi_e),
            ("gamma_c", p.gamma_c),
            ("kappa_d", p.kappa_d),
            ("kappa_e", p.kappa_e),
        ] {
            let _ = writeln!(s, "{key} = {v:?}");
        }
        for (key, g) in [("k_grid", &self.k_grid), ("omega_grid", &self.omega_grid), ("r_grid", &self.r_grid)] {
            if let Some(g) = g {
                let _ = writeln!(s, "{key} = {}", g.spec());
            }
        }
        if !self.omega_e_sweep.is_empty() {
            let parts: Vec<String> = self.omega_e_sweep.iter().map(Grid::spec).collect();
            let _ = writeln!(s, "omega_e_sweep = {}", parts.join(", "));
        }
        let _ = writeln!(s, "loss_model = {}", self.loss_model);
        let _ = writeln!(s, "fft_size = {}", self.fft_size);
        let _ = writeln!(s, "min_prominence = {:?}", self.min_prominence);
        let _ = writeln!(s, "tol_omega = {:?}", self.tol_omega);
        s
    }
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

fn parse_f64(v: &str, line: usize, column: usize) -> Result<f64> {
    v.parse::<f64>()
        .map_err(|_| parse_err(line, column, format!("expected a number, found `{v}`")))
}

fn parse_grid(v: &str, line: usize, column: usize) -> Result<Grid> {
    let parts: Vec<&str> = v.split(':').map(str::trim).collect();
    let scale = match parts.len() {
        3 => GridScale::Linear,
        4 if parts[3] == "log" => GridScale::Log,
        4 if parts[3] == "linear" => GridScale::Linear,
        _ => {
            return Err(parse_err(line, column, format!("expected start:stop:count[:log], found `{v}`")))
        }
    };
    let start = parse_f64(parts[0], line, column)?;
    let stop = parse_f64(parts[1], line, column)?;
    let count = parts[2]
        .parse::<usize>()
        .map_err(|_| parse_err(line, column, format!("grid count must be an integer, found `{}`", parts[2])))?;
    let g = Grid { start, stop, count, scale };
    g.validate().map_err(|e| parse_err(line, column, e.to_string()))?;
    Ok(g)
}

/// Parse a `key = value` document into a validated [`Config`].
///
/// Lines are trimmed, `#` starts a comment, keys are case-sensitive and
/// unknown or repeated keys are rejected.
pub fn load_config(text: &str) -> Result<Config> {
    let mut seen: Vec<&str> = Vec::new();
    let mut p = SystemParams {
        omega_d: 1.0,
        rabi_d: f64::NAN,
        omega_e: f64::NAN,
        rabi_e: f64::NAN,
        gamma_c: SystemParams::DEFAULT_GAMMA_C,
        kappa_d: SystemParams::DEFAULT_KAPPA,
        kappa_e: SystemParams::DEFAULT_KAPPA,
    };
    let mut cfg = Config::new(p);

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        let Some(eq) = body.find('=') else {
            let col = body.len() - body.trim_start().len() + 1;
            return Err(parse_err(line, col, "expected `key = value`"));
        };
        let key = body[..eq].trim();
        let key_col = body.len() - body.trim_start().len() + 1;
        let value = body[eq + 1..].trim();
        let val_col = eq + 2 + (body[eq + 1..].len() - body[eq + 1..].trim_start().len());
        let Some(&known) = KNOWN_KEYS.iter().find(|k| **k == key) else {
            return Err(parse_err(line, key_col, format!("unknown key `{key}`")));
        };
        if seen.contains(&known) {
            return Err(parse_err(line, key_col, format!("duplicate key `{key}`")));
        }
        seen.push(known);
        if value.is_empty() {
            return Err(parse_err(line, val_col, format!("missing value for `{key}`")));
        }
        match known {
            "omega_d" => p.omega_d = parse_f64(value, line, val_col)?,
            "Omega_d" => p.rabi_d = parse_f64(value, line, val_col)?,
            "omega_e" => p.omega_e = parse_f64(value, line, val_col)?,
            "Omega_e" => p.rabi_e = parse_f64(value, line, val_col)?,
            "gamma_c" => p.gamma_c = parse_f64(value, line, val_col)?,
            "kappa_d" => p.kappa_d = parse_f64(value, line, val_col)?,
            "kappa_e" => p.kappa_e = parse_f64(value, line, val_col)?,
            "k_grid" => cfg.k_grid = Some(parse_grid(value, line, val_col)?),
            "omega_grid" => cfg.omega_grid = Some(parse_grid(value, line, val_col)?),
            "r_grid" => cfg.r_grid = Some(parse_grid(value, line, val_col)?),
            "omega_e_sweep" => {
                cfg.omega_e_sweep = value
                    .split(',')
                    .map(|g| parse_grid(g.trim(), line, val_col))
                    .collect::<Result<_>>()?;
            }
            "loss_model" => {
                cfg.loss_model = value
                    .parse()
                    .map_err(|e: Error| parse_err(line, val_col, e.to_string()))?;
            }
            "fft_size" => {
                let n = value
                    .parse::<usize>()
                    .map_err(|_| parse_err(line, val_col, format!("expected an integer, found `{value}`")))?;
                if !n.is_power_of_two() || n < 64 {
                    return Err(Error::Invalid(format!("fft_size must be a power of two >= 64, got {n}")));
                }
                cfg.fft_size = n;
            }
            "min_prominence" => cfg.min_prominence = parse_f64(value, line, val_col)?,
            "tol_omega" => cfg.tol_omega = parse_f64(value, line, val_col)?,
            _ => unreachable!("key list and match arms out of sync"),
        }
    }

    let missing: Vec<&'static str> = REQUIRED_KEYS.iter().copied().filter(|k| !seen.contains(k)).collect();
    if !missing.is_empty() {
        return Err(Error::MissingKeys(missing));
    }
    p.validate()?;
    if !(cfg.min_prominence >= 0.0 && cfg.min_prominence.is_finite()) {
        return Err(Error::Invalid(format!("min_prominence must be >= 0, got {}", cfg.min_prominence)));
    }
    if !(cfg.tol_omega >= 0.0 && cfg.tol_omega.is_finite()) {
        return Err(Error::Invalid(format!("tol_omega must be >= 0, got {}", cfg.tol_omega)));
    }
    cfg.params = p;
    Ok(cfg)
}
