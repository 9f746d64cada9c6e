//! `uscpol`: data files for every observable of the cavity–dresser–emitter model.
//!
//! Exit status: 0 success, 2 configuration error, 3 numerical or domain
//! error, 4 resolvability error (tomography could not resolve a splitting).

mod commands;
mod output;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use uscpol::params::{load_config, Config, Grid};
use uscpol::{ErrorKind, SystemParams};

use output::{OutputDir, RunManifest, MANIFEST};

#[derive(Parser)]
#[command(name = "uscpol", version, about = "Ultra-strong coupling cavity QED calculations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Config file (`key = value` lines); defaults to Omega_d = 1, omega_e = 0.7, Omega_e = 0.2.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, env = "USCPOL_THREADS")]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Bin,
}

#[derive(Subcommand)]
enum Command {
    #[command(flatten)]
    Task(Task),
    /// Rerun a manifest's command and check every output hash.
    Replay { manifest: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Task {
    /// Polariton branches, mixing angle, Rabi shares and three-mode spectrum.
    Dispersion,
    /// Vacuum fluctuations and virtual populations.
    Vacuum,
    /// Real-space emitter potential at omega = omega_e.
    Potential {
        /// Also evaluate the direct Hankel quadrature and report the difference.
        #[arg(long)]
        oracle: bool,
    },
    /// Dressed linewidths and Purcell rates.
    Emission,
    /// Complex transmission map over (k, omega).
    Transmission,
    /// Mixing-angle tomography from an omega_e sweep.
    Tomography {
        /// Read `map_NNN.bin` per sweep point from this directory instead of simulating.
        #[arg(long)]
        maps: Option<PathBuf>,
        /// Also write every simulated map to `OUT/maps/`.
        #[arg(long)]
        save_maps: bool,
    },
    /// Both permittivity forms and the classical dispersion roots.
    Permittivity,
}

impl Task {
    fn name(&self) -> &'static str {
        match self {
            Task::Dispersion => "dispersion",
            Task::Vacuum => "vacuum",
            Task::Potential { .. } => "potential",
            Task::Emission => "emission",
            Task::Transmission => "transmission",
            Task::Tomography { .. } => "tomography",
            Task::Permittivity => "permittivity",
        }
    }
}

/// A problem with the invocation or config file (exit status 2).
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn default_config() -> Config {
    Config::new(SystemParams::new(1.0, 0.7, 0.2).expect("valid defaults"))
}

/// Grids not given in the config; a full-range spectral map and a sweep on both sides of the gap.
fn fill_defaults(cfg: &mut Config) -> uscpol::Result<()> {
    if cfg.k_grid.is_none() {
        cfg.k_grid = Some(Grid::linear(0.02, 3.0, 400)?);
    }
    if cfg.omega_grid.is_none() {
        cfg.omega_grid = Some(Grid::linear(0.0, 3.2, 2000)?);
    }
    if cfg.r_grid.is_none() {
        cfg.r_grid = Some(Grid::log(0.05, 6.0, 80)?);
    }
    if cfg.omega_e_sweep.is_empty() {
        cfg.omega_e_sweep = vec![Grid::linear(0.3, 0.92, 20)?, Grid::linear(1.47, 2.8, 20)?];
    }
    Ok(())
}

fn read_config(path: Option<&Path>) -> Result<Config> {
    let mut cfg = match path {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
            load_config(&text).with_context(|| format!("in config {}", path.display()))?
        }
        None => default_config(),
    };
    fill_defaults(&mut cfg)?;
    Ok(cfg)
}

fn run(task: &Task, cfg: &Config, format: Format, out_dir: &Path) -> Result<RunManifest> {
    let mut out = OutputDir::create(out_dir)?;
    let report = match task {
        Task::Dispersion => commands::dispersion(cfg, &mut out, format)?,
        Task::Vacuum => commands::vacuum(cfg, &mut out, format)?,
        Task::Potential { oracle } => commands::potential(cfg, &mut out, format, *oracle)?,
        Task::Emission => commands::emission(cfg, &mut out, format)?,
        Task::Transmission => commands::transmission(cfg, &mut out, format)?,
        Task::Tomography { maps, save_maps } => {
            commands::tomography(cfg, &mut out, format, maps.as_deref(), *save_maps)?
        }
        Task::Permittivity => commands::permittivity_cmd(cfg, &mut out, format)?,
    };
    let mut grids = BTreeMap::new();
    for (name, g) in [("k_grid", &cfg.k_grid), ("omega_grid", &cfg.omega_grid), ("r_grid", &cfg.r_grid)] {
        if let Some(g) = g {
            grids.insert(name.to_string(), g.spec());
        }
    }
    let sweep: Vec<String> = cfg.omega_e_sweep.iter().map(Grid::spec).collect();
    grids.insert("omega_e_sweep".to_string(), sweep.join(", "));
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        task: task.clone(),
        format,
        config: cfg.to_config_string(),
        params: cfg.params,
        grids,
        settings: report.settings,
        diagnostics: report.diagnostics,
        outputs: out.finish(),
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    output::write_atomic(&out_dir.join(MANIFEST), text.as_bytes())?;
    Ok(manifest)
}

fn replay(manifest_path: &Path, out_dir: &Path) -> Result<()> {
    let text = std::fs::read_to_string(manifest_path)
        .map_err(|e| UsageError(format!("cannot read manifest {}: {e}", manifest_path.display())))?;
    let old: RunManifest =
        serde_json::from_str(&text).map_err(|e| UsageError(format!("malformed manifest: {e}")))?;
    let cfg = load_config(&old.config).context("in the manifest's config")?;
    let new = run(&old.task, &cfg, old.format, out_dir)?;
    let mismatched: Vec<&str> = old
        .outputs
        .iter()
        .filter(|o| !new.outputs.contains(o))
        .map(|o| o.file.as_str())
        .collect();
    if !mismatched.is_empty() || old.outputs.len() != new.outputs.len() {
        bail!("replay differs from the manifest in: {}", mismatched.join(", "));
    }
    println!("replayed {} outputs of `{}`, all hashes match", new.outputs.len(), old.task.name());
    Ok(())
}

fn exit_status(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<uscpol::Error>() {
            return match e.kind() {
                ErrorKind::Config => 2,
                ErrorKind::Numeric => 3,
                ErrorKind::Resolvability => 4,
            };
        }
        if cause.is::<UsageError>() {
            return 2;
        }
    }
    3
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = (|| -> Result<()> {
        if let Some(n) = cli.threads {
            if n == 0 {
                bail!(UsageError("--threads must be at least 1".into()));
            }
            rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
        }
        match &cli.command {
            Command::Task(task) => {
                let cfg = read_config(cli.config.as_deref())?;
                let m = run(task, &cfg, cli.format, &cli.out)?;
                for o in &m.outputs {
                    println!("{}", cli.out.join(&o.file).display());
                }
                Ok(())
            }
            Command::Replay { manifest } => replay(manifest, &cli.out),
        }
    })();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_status(&e))
        }
    }
}
