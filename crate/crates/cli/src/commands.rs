//! One function per subcommand. Each writes its data files and returns
//! the settings and diagnostics that go into the manifest.

use std::path::Path;

use anyhow::{bail, Result};
use rayon::prelude::*;
use serde_json::{json, Value};
use uscpol::classical::{classical_dispersion_roots, permittivity, transmission_map, SpectralMap};
use uscpol::correlator::{effective_potential, effective_potential_hankel, PotentialSettings};
use uscpol::emission::emission_point;
use uscpol::hopfield::{three_mode_spectrum, BranchPoint};
use uscpol::params::{Config, Grid};
use uscpol::tomography::{tomography_with_maps, PeakCriteria, SweepOptions};
use uscpol::vacuum::vacuum_observables;
use uscpol::{CavityDispersion, Error};

use crate::output::{num, write_atomic, OutputDir, Table};
use crate::{Format, UsageError};

pub struct Report {
    pub settings: Value,
    pub diagnostics: Value,
}

fn plain(settings: Value) -> Report {
    Report { settings, diagnostics: Value::Null }
}

fn csv_only(format: Format, command: &str) -> Result<()> {
    if format != Format::Csv {
        bail!(UsageError(format!("`{command}` only writes CSV; --format bin applies to transmission")));
    }
    Ok(())
}

fn grid(g: &Option<Grid>) -> Vec<f64> {
    g.as_ref().map(Grid::values).unwrap_or_default()
}

pub fn dispersion(cfg: &Config, out: &mut OutputDir, format: Format) -> Result<Report> {
    csv_only(format, "dispersion")?;
    let p = &cfg.params;
    let disp = CavityDispersion::default();
    let mut header = vec!["k", "omega_k", "omega_lp", "omega_up", "theta", "Omega_lp", "Omega_up"];
    let modes = [
        ["omega_1", "photon_1", "dresser_1", "emitter_1"],
        ["omega_2", "photon_2", "dresser_2", "emitter_2"],
        ["omega_3", "photon_3", "dresser_3", "emitter_3"],
    ];
    header.extend(modes.iter().flatten());
    let mut t = Table::new(&header);
    for k in grid(&cfg.k_grid) {
        let b = BranchPoint::new(p, &disp, k);
        let s = three_mode_spectrum(p, b.omega_k);
        let mut row = vec![k, b.omega_k, b.omega_lp, b.omega_up, b.theta, b.rabi_lp, b.rabi_up];
        for i in 0..3 {
            row.push(s.omega[i]);
            row.extend(s.weights[i]);
        }
        t.numbers(&row);
    }
    out.write("dispersion.csv", &t.into_bytes())?;
    Ok(plain(json!({ "three_mode_weights": "photon, dresser, emitter" })))
}

pub fn vacuum(cfg: &Config, out: &mut OutputDir, format: Format) -> Result<Report> {
    csv_only(format, "vacuum")?;
    let disp = CavityDispersion::default();
    let mut t = Table::new(&["k", "omega_k", "d2_ratio", "e2_ratio", "dzp_lp", "dzp_up", "n_ph", "n_d", "n_int", "dw_zp"]);
    for k in grid(&cfg.k_grid) {
        let v = vacuum_observables(&cfg.params, disp.omega(k))?;
        t.numbers(&[k, v.omega_k, v.d2_ratio, v.e2_ratio, v.dzp_lp, v.dzp_up, v.n_ph, v.n_d, v.n_int, v.dw_zp]);
    }
    out.write("vacuum.csv", &t.into_bytes())?;
    Ok(plain(Value::Null))
}

pub fn potential(cfg: &Config, out: &mut OutputDir, format: Format, oracle: bool) -> Result<Report> {
    csv_only(format, "potential")?;
    let p = &cfg.params;
    let settings = PotentialSettings { fft_size: cfg.fft_size, ..PotentialSettings::default() };
    let r = grid(&cfg.r_grid);
    let prof = effective_potential(p, p.omega_e, &r, &settings)?;
    let norm = prof.normalized(prof.max_abs);
    let check = if oracle { Some(effective_potential_hankel(p, p.omega_e, &r)?) } else { None };
    let mut header = vec!["r", "U", "U_normalized"];
    if check.is_some() {
        header.extend(["U_hankel", "rel_diff"]);
    }
    let mut t = Table::new(&header);
    let mut worst = 0.0f64;
    for i in 0..r.len() {
        let mut row = vec![r[i], prof.u[i], norm[i]];
        if let Some(h) = &check {
            let d = (prof.u[i] - h.u[i]).abs() / h.u[i].abs().max(f64::MIN_POSITIVE);
            worst = worst.max(d);
            row.extend([h.u[i], d]);
        }
        t.numbers(&row);
    }
    out.write("potential.csv", &t.into_bytes())?;
    Ok(Report {
        settings: json!({
            "omega": p.omega_e,
            "fft_size": settings.fft_size,
            "box_size": settings.box_size,
            "tail_scale": settings.tail_scale,
            "normalization": "max |U| on the r grid",
        }),
        diagnostics: json!({ "max_abs_u": prof.max_abs, "max_rel_diff_vs_hankel": check.map(|_| worst) }),
    })
}

pub fn emission(cfg: &Config, out: &mut OutputDir, format: Format) -> Result<Report> {
    csv_only(format, "emission")?;
    let disp = CavityDispersion::default();
    let mut t = Table::new(&["k", "omega_k", "theta", "gamma_lp", "gamma_up", "Gamma_lp", "Gamma_up", "weak_coupling"]);
    for k in grid(&cfg.k_grid) {
        let e = emission_point(&cfg.params, disp.omega(k), cfg.loss_model);
        let mut cells: Vec<String> = [k, e.omega_k, e.theta, e.gamma_lp, e.gamma_up]
            .iter()
            .map(|&v| num(v))
            .collect();
        cells.push(num(e.rate_lp.unwrap_or(f64::NAN)));
        cells.push(num(e.rate_up.unwrap_or(f64::NAN)));
        cells.push(u8::from(e.weak_coupling).to_string());
        t.row(cells);
    }
    out.write("emission.csv", &t.into_bytes())?;
    Ok(plain(json!({ "loss_model": cfg.loss_model.to_string(), "diverging_rates": "nan" })))
}

pub fn transmission(cfg: &Config, out: &mut OutputDir, format: Format) -> Result<Report> {
    let map = transmission_map(&cfg.params, &CavityDispersion::default(), &grid(&cfg.k_grid), &grid(&cfg.omega_grid))?;
    let mut bytes = Vec::new();
    match format {
        Format::Csv => {
            map.write_csv(&mut bytes)?;
            out.write("transmission.csv", &bytes)?;
        }
        Format::Bin => {
            map.write_binary(&mut bytes)?;
            out.write("transmission.bin", &bytes)?;
        }
    }
    Ok(plain(json!({ "quantity": "complex T = gamma omega_k [M^-1]_00" })))
}

fn map_name(i: usize) -> String {
    format!("map_{i:03}.bin")
}

pub fn tomography(
    cfg: &Config,
    out: &mut OutputDir,
    format: Format,
    maps: Option<&Path>,
    save_maps: bool,
) -> Result<Report> {
    csv_only(format, "tomography")?;
    let p = &cfg.params;
    let disp = CavityDispersion::default();
    let (k, omega) = (grid(&cfg.k_grid), grid(&cfg.omega_grid));
    let sweep = cfg.omega_e_values();
    let options = SweepOptions { min_prominence: cfg.min_prominence, ..SweepOptions::default() };
    let map_dir = out.path().join("maps");
    if save_maps {
        std::fs::create_dir_all(&map_dir)?;
    }
    let saved = std::sync::Mutex::new(Vec::new());
    let io = |e: anyhow::Error| Error::Format(format!("{e:#}"));

    let curve = tomography_with_maps(p, &sweep, &disp, &options, |i, omega_e| {
        let map = match maps {
            Some(dir) => {
                let path = dir.join(map_name(i));
                let file = std::fs::File::open(&path)
                    .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
                SpectralMap::read_binary(std::io::BufReader::new(file))?
            }
            None => {
                let q = uscpol::SystemParams { omega_e, ..*p };
                transmission_map(&q, &disp, &k, &omega)?
            }
        };
        if save_maps {
            let mut bytes = Vec::new();
            map.write_binary(&mut bytes)?;
            let hash = write_atomic(&map_dir.join(map_name(i)), &bytes).map_err(io)?;
            saved.lock().expect("poisoned").push((format!("maps/{}", map_name(i)), hash));
        }
        Ok(map)
    })?;
    for (name, hash) in saved.into_inner().expect("poisoned") {
        out.record(name, hash);
    }

    let mut t = Table::new(&["k", "tan_theta_rec", "tan_theta_analytic", "rel_error"]);
    for i in 0..curve.k.len() {
        t.numbers(&[curve.k[i], curve.tan_reconstructed[i], curve.tan_analytic[i], curve.relative_error[i]]);
    }
    out.write("tomography.csv", &t.into_bytes())?;

    let mut r = Table::new(&["branch", "omega_e", "k_x", "omega_plus", "omega_minus", "omega_bar", "Omega_bar"]);
    for rec in &curve.records {
        let mut cells = vec![rec.branch.to_string()];
        cells.extend([rec.omega_e, rec.k_x, rec.omega_plus, rec.omega_minus, rec.omega_bar, rec.rabi_bar].map(num));
        r.row(cells);
    }
    out.write("records.csv", &r.into_bytes())?;

    let criteria = PeakCriteria::for_params(p, options.min_prominence);
    Ok(Report {
        settings: json!({
            "window": criteria.window,
            "resolvability_threshold": criteria.threshold,
            "min_prominence": criteria.min_prominence,
            "min_prominence_reference": "maximum of each |T|^2 column",
            "common_k_samples": options.samples,
            "pairing": "omega_bar * Omega_bar of each branch linearly interpolated onto uniform k samples spanning the overlap of the two branches' k_x ranges",
            "maps_from": maps.map(|d| d.display().to_string()),
        }),
        diagnostics: json!({
            "median_rel_error": curve.median_error(),
            "records": curve.records,
            "rejected": curve
                .rejected
                .iter()
                .map(|(w, why)| json!({ "omega_e": w, "reason": why }))
                .collect::<Vec<_>>(),
        }),
    })
}

pub fn permittivity_cmd(cfg: &Config, out: &mut OutputDir, format: Format) -> Result<Report> {
    csv_only(format, "permittivity")?;
    let p = &cfg.params;
    let mut t = Table::new(&["omega", "eps_cm_re", "eps_cm_im", "eps_matrix_re", "eps_matrix_im", "abs_diff"]);
    let mut worst = 0.0f64;
    let rows = grid(&cfg.omega_grid)
        .par_iter()
        .map(|&w| permittivity(p, w))
        .collect::<uscpol::Result<Vec<_>>>()?;
    for e in rows {
        let d = (e.eps_hopfield - e.eps_matrix).norm();
        worst = worst.max(d);
        t.numbers(&[e.omega, e.eps_hopfield.re, e.eps_hopfield.im, e.eps_matrix.re, e.eps_matrix.im, d]);
    }
    out.write("permittivity.csv", &t.into_bytes())?;

    let disp = CavityDispersion::default();
    let mut roots = Table::new(&["k", "root_1", "root_2", "root_3"]);
    for k in grid(&cfg.k_grid) {
        let r = classical_dispersion_roots(&p.lossless(), disp.omega(k))?;
        let mut row = vec![k];
        row.extend((0..3).map(|i| r.get(i).copied().unwrap_or(f64::NAN)));
        roots.numbers(&row);
    }
    out.write("roots.csv", &roots.into_bytes())?;
    Ok(Report {
        settings: json!({ "roots": "lossless matrix permittivity, missing roots written as nan" }),
        diagnostics: json!({ "max_abs_form_discrepancy": worst }),
    })
}
