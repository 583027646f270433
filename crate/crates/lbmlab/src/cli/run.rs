//! Subcommand implementations: resolve settings, run pipelines, write CSVs
//! plus a manifest that is sufficient to re-run the job exactly.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use super::config::{ConfigError, RunConfig};
use super::{Cli, CliError, Command, CommonArgs};
use crate::dispersion::{
    full_brillouin_grid, stability_scan, track_hydrodynamic_modes, uniform_samples, Background,
    FitOptions, ModeKind,
};
use crate::experiments::{
    fourier_toy_evolution, plane_wave_relative_advection, run_gaussian_dot, run_gaussian_vortex,
    GaussianConfig, ToyConfig,
};
use crate::kernel::{format_float, write_field_csv};
use crate::model::{
    build_model, default_params, rate_groups, Model, ModelName,
};
use crate::theory::{
    anomaly_a1, predicted_transport, tune, AnomalyRoute, Objective,
};

const PARAM_KEYS: [&str; 8] = ["alpha", "beta", "gamma", "c1", "q", "d1", "d2", "a"];
const RATE_KEYS: [&str; 13] =
    ["s1", "s3", "s4", "s5", "s6", "s8", "s10", "s11", "s12", "s14", "s15", "s16", "s17"];
const VELOCITY_KEYS: [&str; 3] = ["vx", "vy", "vz"];

fn common_keys() -> Vec<&'static str> {
    let mut keys = vec!["model", "jobs", "seed"];
    keys.extend(PARAM_KEYS);
    keys.extend(RATE_KEYS);
    keys.extend(VELOCITY_KEYS);
    keys
}

/// Config file overridden by flags, in that order.
fn resolve(common: &CommonArgs) -> Result<RunConfig, ConfigError> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    cfg.set_str("model", common.model.as_deref());
    cfg.set_usize("jobs", common.jobs);
    cfg.set("seed", format!("{}", common.seed));
    let floats: [(&str, Option<f64>); 24] = [
        ("alpha", common.alpha),
        ("beta", common.beta),
        ("gamma", common.gamma),
        ("c1", common.c1),
        ("q", common.q),
        ("d1", common.d1),
        ("d2", common.d2),
        ("a", common.a),
        ("s1", common.s1),
        ("s3", common.s3),
        ("s4", common.s4),
        ("s5", common.s5),
        ("s6", common.s6),
        ("s8", common.s8),
        ("s10", common.s10),
        ("s11", common.s11),
        ("s12", common.s12),
        ("s14", common.s14),
        ("s15", common.s15),
        ("s16", common.s16),
        ("s17", common.s17),
        ("vx", common.vx),
        ("vy", common.vy),
        ("vz", common.vz),
    ];
    for (key, value) in floats {
        cfg.set_f64(key, value);
    }
    if let Some(jobs) = common.jobs {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    Ok(cfg)
}

/// Model from the resolved settings: named defaults for missing parameters,
/// rate 1 for missing symbols.
fn model_from(cfg: &RunConfig) -> Result<Model, CliError> {
    let name = ModelName::parse(cfg.require("model")?)?;
    let mut params = default_params(name);
    for key in PARAM_KEYS {
        if let Some(v) = cfg.f64(key)? {
            if params.contains_key(key) {
                params.insert(key.to_string(), v);
            }
        }
    }
    let mut rates = BTreeMap::new();
    for (sym, _) in rate_groups(name) {
        rates.insert(sym.to_string(), cfg.f64(sym)?.unwrap_or(1.0));
    }
    Ok(build_model(name, params, rates)?)
}

fn background_from(cfg: &RunConfig) -> Result<Background, CliError> {
    Ok(Background::with_velocity([
        cfg.f64_or("vx", 0.0)?,
        cfg.f64_or("vy", 0.0)?,
        cfg.f64_or("vz", 0.0)?,
    ]))
}

fn write_manifest(out: &Path, subcommand: &str, cfg: &RunConfig) -> Result<(), CliError> {
    fs::create_dir_all(out)?;
    let mut file = fs::File::create(out.join("manifest.txt"))?;
    writeln!(file, "lbmlab {}", env!("CARGO_PKG_VERSION"))?;
    writeln!(file, "subcommand={subcommand}")?;
    for line in cfg.manifest_lines() {
        writeln!(file, "{line}")?;
    }
    Ok(())
}

fn csv_file(out: &Path, name: &str) -> Result<fs::File, CliError> {
    fs::create_dir_all(out)?;
    Ok(fs::File::create(out.join(name))?)
}

pub fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Dispersion { common, theta, dir, kmax, samples } => {
            cmd_dispersion(common, theta, dir, kmax, samples)
        }
        Command::Simulate { common, experiment, nx, ny, steps, dump_every, r0, g0, chi, nk, domain, eps } => {
            cmd_simulate(common, experiment, nx, ny, steps, dump_every, r0, g0, chi, nk, domain, eps)
        }
        Command::Tune { common, objective, route, kappa, nu0, sigma1, sigma3, sigma4, sigma6, sigma8, sigma11 } => {
            cmd_tune(common, objective, route, kappa, nu0, sigma1, sigma3, sigma4, sigma6, sigma8, sigma11)
        }
        Command::Verify { common } => cmd_verify(common),
        Command::Toy { common, nx, ny, r0, g0, nu, t, anomaly } => {
            cmd_toy(common, nx, ny, r0, g0, nu, t, anomaly)
        }
        Command::Stability { common, grid } => cmd_stability(common, grid),
    }
}

fn parse_dir(spec: &str) -> Result<[f64; 3], ConfigError> {
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() < 2 || parts.len() > 3 {
        return Err(ConfigError::BadValue {
            key: "dir".into(),
            value: spec.into(),
            want: "x,y or x,y,z",
        });
    }
    let mut out = [0.0; 3];
    for (i, p) in parts.iter().enumerate() {
        out[i] = p.trim().parse().map_err(|_| ConfigError::BadValue {
            key: "dir".into(),
            value: spec.into(),
            want: "floats",
        })?;
    }
    Ok(out)
}

fn cmd_dispersion(
    common: CommonArgs,
    theta_flags: Vec<f64>,
    dir_flag: Option<String>,
    kmax_flag: Option<f64>,
    samples_flag: Option<usize>,
) -> Result<(), CliError> {
    let mut cfg = resolve(&common)?;
    cfg.set_f64("kmax", kmax_flag);
    cfg.set_usize("samples", samples_flag);
    if !theta_flags.is_empty() {
        let list = theta_flags.iter().map(|t| format!("{t}")).collect::<Vec<_>>().join(";");
        cfg.set("theta", list);
    }
    cfg.set_str("dir", dir_flag.as_deref());
    let mut keys = common_keys();
    keys.extend(["kmax", "samples", "theta", "dir"]);
    cfg.validate_keys(&keys)?;

    let model = model_from(&cfg)?;
    let bg = background_from(&cfg)?;
    let kmax = cfg.f64_or("kmax", 0.2)?;
    let n = cfg.usize_or("samples", 12)?;
    let ks = uniform_samples(kmax, n);

    // Direction list: explicit dir, or a theta sweep (2D).
    let mut directions: Vec<(String, [f64; 3])> = Vec::new();
    if let Some(spec) = cfg.get("dir") {
        directions.push((spec.to_string(), parse_dir(spec)?));
    }
    if let Some(thetas) = cfg.get("theta") {
        for t in thetas.split(';') {
            let deg: f64 = t.trim().parse().map_err(|_| ConfigError::BadValue {
                key: "theta".into(),
                value: t.into(),
                want: "degrees",
            })?;
            let rad = deg.to_radians();
            directions.push((format!("{deg}"), [rad.cos(), rad.sin(), 0.0]));
        }
    }
    if directions.is_empty() {
        directions.push(("0".into(), [1.0, 0.0, 0.0]));
    }

    write_manifest(&common.out, "dispersion", &cfg)?;
    let mut modes_csv = csv_file(&common.out, "modes.csv")?;
    writeln!(modes_csv, "direction,k,mode,re_z,im_z,re_gamma,im_gamma")?;
    let mut coeff_csv = csv_file(&common.out, "coefficients.csv")?;
    writeln!(coeff_csv, "direction,mode,a1,a2,a3,a4,residual")?;
    for (label, dir) in &directions {
        let result = track_hydrodynamic_modes(&model, &bg, *dir, &ks, FitOptions::default())?;
        for mode in &result.modes {
            for (i, &k) in result.k_samples.iter().enumerate() {
                let z = mode.z[i];
                let g = mode.gamma[i];
                writeln!(
                    modes_csv,
                    "{label},{},{},{},{},{},{}",
                    format_float(k),
                    mode.kind.as_str(),
                    format_float(z.re),
                    format_float(z.im),
                    format_float(g.re),
                    format_float(g.im)
                )?;
            }
            writeln!(
                coeff_csv,
                "{label},{},{},{},{},{},{}",
                mode.kind.as_str(),
                format_float(mode.a[0]),
                format_float(mode.a[1]),
                format_float(mode.a[2]),
                format_float(mode.a[3]),
                format_float(mode.residual)
            )?;
            println!(
                "direction {label} {}: a1={:+.8e} a2={:+.8e} a3={:+.8e} a4={:+.8e}",
                mode.kind.as_str(),
                mode.a[0],
                mode.a[1],
                mode.a[2],
                mode.a[3]
            );
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    common: CommonArgs,
    experiment: Option<String>,
    nx: Option<usize>,
    ny: Option<usize>,
    steps: Option<u64>,
    dump_every: Option<u64>,
    r0: Option<f64>,
    g0: Option<f64>,
    chi: Option<f64>,
    nk: Option<String>,
    domain: Option<usize>,
    eps: Option<f64>,
) -> Result<(), CliError> {
    let mut cfg = resolve(&common)?;
    cfg.set_str("experiment", experiment.as_deref());
    cfg.set_usize("nx", nx);
    cfg.set_usize("ny", ny);
    if let Some(v) = steps {
        cfg.set("steps", format!("{v}"));
    }
    if let Some(v) = dump_every {
        cfg.set("dump_every", format!("{v}"));
    }
    cfg.set_f64("r0", r0);
    cfg.set_f64("g0", g0);
    cfg.set_f64("chi", chi);
    cfg.set_str("nk", nk.as_deref());
    cfg.set_usize("domain", domain);
    cfg.set_f64("eps", eps);
    let mut keys = common_keys();
    keys.extend([
        "experiment", "nx", "ny", "steps", "dump_every", "r0", "g0", "chi", "nk", "domain", "eps",
    ]);
    cfg.validate_keys(&keys)?;

    let model = model_from(&cfg)?;
    let which = cfg.require("experiment")?.to_string();
    write_manifest(&common.out, &format!("simulate/{which}"), &cfg)?;

    match which.as_str() {
        "gaussian-dot" | "gaussian-vortex" => {
            let velocity = [cfg.f64_or("vx", 0.0)?, cfg.f64_or("vy", 0.0)?];
            let chi = match cfg.f64("chi")? {
                Some(v) => v,
                None => {
                    let t = predicted_transport(&model, 0.0)?;
                    *t.get("kappa").or_else(|| t.get("nu0")).expect("transport map")
                }
            };
            let config = GaussianConfig {
                g0: cfg.f64_or("g0", if which == "gaussian-dot" { 1e-3 } else { 1e-2 })?,
                r0: cfg.f64_or("r0", 5.0)?,
                velocity,
                chi,
                dims: [cfg.usize_or("nx", 101)?, cfg.usize_or("ny", 101)?],
                steps: cfg.u64_or("steps", 3200)?,
                dump_every: cfg.u64_or("dump_every", 400)?,
                center: None,
            };
            let (reports, field, field_name, time) = if which == "gaussian-dot" {
                let result = run_gaussian_dot(&model, &config)?;
                println!(
                    "measured kappa = {:.8e} (variance growth), mass drift = {:.3e}",
                    result.measured_kappa, result.mass_drift
                );
                (result.reports, result.final_field, "rho_deviation", result.final_time)
            } else {
                let result = run_gaussian_vortex(&model, &config)?;
                let (_, peak, peak_ref) = *result.peak_history.last().unwrap();
                println!(
                    "final peak vorticity = {:.6e} (analytic {:.6e}), mass drift = {:.3e}",
                    peak, peak_ref, result.mass_drift
                );
                (result.reports, result.final_vorticity, "vorticity", result.final_time)
            };
            let mut rep_csv = csv_file(&common.out, "anisotropy.csv")?;
            writeln!(
                rep_csv,
                "t,center_x,center_y,e_0,e_1,e_2,e_3,e_4,e_5,e_6,e_7,e_8,anisotropy,l2_error"
            )?;
            for r in &reports {
                let es: Vec<String> = r.harmonic_energy.iter().map(|e| format_float(*e)).collect();
                writeln!(
                    rep_csv,
                    "{},{},{},{},{},{}",
                    r.time,
                    format_float(r.center[0]),
                    format_float(r.center[1]),
                    es.join(","),
                    format_float(r.anisotropy),
                    format_float(r.l2_error)
                )?;
                println!("t={:6}: anisotropy = {:.6e}", r.time, r.anisotropy);
            }
            let mut field_csv = csv_file(&common.out, &format!("{field_name}_final.csv"))?;
            write_field_csv(field_name, &field, [config.dims[0], config.dims[1], 1], time, &mut field_csv)?;
        }
        "plane-wave" => {
            let nk_spec = cfg.require("nk")?;
            let parts: Vec<&str> = nk_spec.split(',').collect();
            if parts.len() != 2 {
                return Err(ConfigError::BadValue {
                    key: "nk".into(),
                    value: nk_spec.into(),
                    want: "two integers nx,ny",
                }
                .into());
            }
            let parse = |s: &str| -> Result<i32, ConfigError> {
                s.trim().parse().map_err(|_| ConfigError::BadValue {
                    key: "nk".into(),
                    value: s.into(),
                    want: "an integer",
                })
            };
            let nk = [parse(parts[0])?, parse(parts[1])?];
            let n = cfg.usize_or("domain", 240)?;
            let v = cfg.f64_or("vx", 0.05)?;
            let eps = cfg.f64_or("eps", 1e-6)?;
            let result = plane_wave_relative_advection(&model, v, nk, n, eps)?;
            let mut csv = csv_file(&common.out, "planewave.csv")?;
            writeln!(csv, "nk_x,nk_y,k,measured_ratio,theory_ratio,attenuation_ratio,steps,contamination")?;
            writeln!(
                csv,
                "{},{},{},{},{},{},{},{}",
                nk[0],
                nk[1],
                format_float(result.k_magnitude),
                format_float(result.measured_ratio),
                format_float(result.theory_ratio),
                format_float(result.attenuation_ratio),
                result.steps,
                format_float(result.contamination)
            )?;
            println!(
                "k = {:.6}: relative advection measured {:.6} vs theory {:.6}",
                result.k_magnitude, result.measured_ratio, result.theory_ratio
            );
        }
        other => {
            return Err(ConfigError::BadValue {
                key: "experiment".into(),
                value: other.into(),
                want: "gaussian-dot | gaussian-vortex | plane-wave",
            }
            .into())
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_tune(
    common: CommonArgs,
    objective: Option<String>,
    route: Option<u8>,
    kappa: Option<f64>,
    nu0: Option<f64>,
    sigma1: Option<f64>,
    sigma3: Option<f64>,
    sigma4: Option<f64>,
    sigma6: Option<f64>,
    sigma8: Option<f64>,
    sigma11: Option<f64>,
) -> Result<(), CliError> {
    let mut cfg = resolve(&common)?;
    cfg.set_str("objective", objective.as_deref());
    if let Some(r) = route {
        cfg.set("route", format!("{r}"));
    }
    for (key, value) in [
        ("kappa", kappa),
        ("nu0", nu0),
        ("sigma1", sigma1),
        ("sigma3", sigma3),
        ("sigma4", sigma4),
        ("sigma6", sigma6),
        ("sigma8", sigma8),
        ("sigma11", sigma11),
    ] {
        cfg.set_f64(key, value);
    }
    let mut keys = common_keys();
    keys.extend([
        "objective", "route", "kappa", "nu0", "sigma1", "sigma3", "sigma4", "sigma6", "sigma8",
        "sigma11",
    ]);
    cfg.validate_keys(&keys)?;

    let name = ModelName::parse(cfg.require("model")?)?;
    let route = match cfg.usize_or("route", 1)? {
        1 => AnomalyRoute::RouteOne,
        2 => AnomalyRoute::RouteTwo,
        other => {
            return Err(ConfigError::BadValue {
                key: "route".into(),
                value: format!("{other}"),
                want: "1 or 2",
            }
            .into())
        }
    };
    let objective = match cfg.require("objective")? {
        "isotropic-advection" => Objective::IsotropicAdvection(route),
        "zero-anomaly" => Objective::ZeroAnomaly(route),
        "quartic" => Objective::Quartic,
        "null-hyperdiffusivity" => Objective::NullHyperdiffusivity,
        other => {
            return Err(ConfigError::BadValue {
                key: "objective".into(),
                value: other.into(),
                want: "isotropic-advection | zero-anomaly | quartic | null-hyperdiffusivity",
            }
            .into())
        }
    };
    let mut fixed = BTreeMap::new();
    for key in [
        "alpha", "beta", "c1", "q", "d1", "d2", "kappa", "nu0", "sigma1", "sigma3", "sigma4",
        "sigma6", "sigma8", "sigma11",
    ] {
        if let Some(v) = cfg.f64(key)? {
            fixed.insert(key.to_string(), v);
        }
    }
    write_manifest(&common.out, "tune", &cfg)?;
    let result = tune(name, objective, &fixed)?;
    let mut csv = csv_file(&common.out, "tune.csv")?;
    writeln!(csv, "key,value")?;
    for (key, value) in &result.assignments {
        println!("{key} = {value:.8}");
        writeln!(csv, "{key},{}", format_float(*value))?;
    }
    if !result.roots.is_empty() {
        let roots: Vec<String> = result.roots.iter().map(|r| format!("{r:.8}")).collect();
        println!("admissible roots: {}", roots.join(", "));
    }
    println!("verified residual = {:.3e}", result.verified_residual);
    writeln!(csv, "verified_residual,{}", format_float(result.verified_residual))?;
    Ok(())
}

fn cmd_verify(common: CommonArgs) -> Result<(), CliError> {
    let cfg = resolve(&common)?;
    cfg.validate_keys(&common_keys())?;
    let model = model_from(&cfg)?;
    let bg = background_from(&cfg)?;
    write_manifest(&common.out, "verify", &cfg)?;
    let rows = verify_rows(&model, &bg)?;
    let mut csv = csv_file(&common.out, "verify.csv")?;
    writeln!(csv, "model,condition,parameters,predicted,measured,relative_error")?;
    for row in &rows {
        writeln!(
            csv,
            "{},{},{},{},{},{}",
            model.name,
            row.condition,
            row.parameters,
            format_float(row.predicted),
            format_float(row.measured),
            format_float(row.relative_error)
        )?;
        println!(
            "{:28} predicted {:+.8e} measured {:+.8e} rel {:.2e}",
            row.condition, row.predicted, row.measured, row.relative_error
        );
    }
    Ok(())
}

pub struct VerifyRow {
    pub condition: String,
    pub parameters: String,
    pub predicted: f64,
    pub measured: f64,
    pub relative_error: f64,
}

/// Closed-form coefficient vs dispersion fit, one row per quantity the
/// source states for this scheme.
pub fn verify_rows(model: &Model, bg: &Background) -> Result<Vec<VerifyRow>, CliError> {
    let ks = uniform_samples(0.2, 12);
    let transport = predicted_transport(model, {
        let v = bg.velocity;
        (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
    })?;
    let params = {
        let rates: Vec<String> = model
            .rate_symbols()
            .iter()
            .map(|s| format!("{s}={}", model.rate_map()[*s]))
            .collect();
        rates.join(" ")
    };
    let mut rows = Vec::new();
    let mut push = |condition: &str, predicted: f64, measured: f64| {
        let relative_error = (measured - predicted).abs() / predicted.abs().max(1e-300);
        rows.push(VerifyRow {
            condition: condition.to_string(),
            parameters: params.clone(),
            predicted,
            measured,
            relative_error,
        });
    };
    if model.name.is_advection_diffusion() {
        let result = track_hydrodynamic_modes(model, bg, [1.0, 0.0, 0.0], &ks, FitOptions::default())?;
        let mode = result.mode(ModeKind::Density).expect("density mode");
        push("kappa vs fitted a2", transport["kappa"], mode.a[1]);
        if model.name == ModelName::D2Q9Ad && (model.param("d1") + 1.0).abs() < 1e-12 {
            // The d1 = -1 anomaly branch: closed form vs V->0 extrapolation.
            let a1 = anomaly_a1(
                model.param("alpha"),
                -1.0,
                model.sigma("s1"),
                model.sigma("s3"),
                model.sigma("s4"),
            )?;
            let dir = [1.0, 0.0, 0.0];
            let mut h = [0.0; 3];
            for (i, scale) in [1.0, 0.5, 0.25].iter().enumerate() {
                let v = 0.08 * scale;
                let vb = Background::with_velocity([v, 0.0, 0.0]);
                h[i] = crate::dispersion::measure_anomalous_advection(
                    model,
                    &vb,
                    dir,
                    &ks,
                    FitOptions::default(),
                )?;
            }
            let h0 = (64.0 * h[2] - 20.0 * h[1] + h[0]) / 45.0;
            push("anomaly A1 vs measured h", a1, h0);
        }
    } else {
        let rest = Background::at_rest();
        let result =
            track_hydrodynamic_modes(model, &rest, [1.0, 0.0, 0.0], &ks, FitOptions::default())?;
        let shear = result.mode(ModeKind::Shear).expect("shear mode");
        let plus = result.mode(ModeKind::AcousticPlus).expect("acoustic mode");
        push("nu0 vs fitted a2 (transverse)", transport["nu0"], shear.a[1]);
        push("cs vs fitted a1 (acoustic)", transport["cs"], plus.a[0]);
        let vmag = (bg.velocity[0].powi(2) + bg.velocity[1].powi(2)).sqrt();
        if vmag > 0.0 {
            // V parallel to k along x.
            let vb = Background::with_velocity([vmag, 0.0, 0.0]);
            let result =
                track_hydrodynamic_modes(model, &vb, [1.0, 0.0, 0.0], &ks, FitOptions::default())?;
            let shear = result.mode(ModeKind::Shear).expect("shear mode");
            push("nu_eff(V) vs fitted a2", transport["nu_eff"], shear.a[1]);
        }
    }
    Ok(rows)
}

fn cmd_toy(
    common: CommonArgs,
    nx: Option<usize>,
    ny: Option<usize>,
    r0: Option<f64>,
    g0: Option<f64>,
    nu: Option<f64>,
    t: Option<f64>,
    anomaly: Option<f64>,
) -> Result<(), CliError> {
    let mut cfg = resolve(&common)?;
    cfg.set_usize("nx", nx);
    cfg.set_usize("ny", ny);
    cfg.set_f64("r0", r0);
    cfg.set_f64("g0", g0);
    cfg.set_f64("nu", nu);
    cfg.set_f64("t", t);
    cfg.set_f64("anomaly", anomaly);
    let mut keys = common_keys();
    keys.extend(["nx", "ny", "r0", "g0", "nu", "t", "anomaly"]);
    cfg.validate_keys(&keys)?;

    let config = ToyConfig {
        g0: cfg.f64_or("g0", 1.0)?,
        r0: cfg.f64_or("r0", 4.0)?,
        nu: cfg.f64_or("nu", 0.003)?,
        velocity: [cfg.f64_or("vx", 0.1)?, cfg.f64_or("vy", 0.0)?],
        dims: [cfg.usize_or("nx", 80)?, cfg.usize_or("ny", 80)?],
        t: cfg.f64_or("t", 400.0)?,
        anomaly: cfg.f64_or("anomaly", 0.01)?,
    };
    write_manifest(&common.out, "toy", &cfg)?;
    let result = fourier_toy_evolution(&config)?;
    let dims3 = [config.dims[0], config.dims[1], 1];
    let mut psi = csv_file(&common.out, "psi.csv")?;
    write_field_csv("psi", &result.psi, dims3, config.t as u64, &mut psi)?;
    let mut vort = csv_file(&common.out, "vorticity.csv")?;
    write_field_csv("vorticity", &result.vorticity, dims3, config.t as u64, &mut vort)?;
    println!(
        "toy anisotropy = {:.6e} (center {:.2}, {:.2})",
        result.report.anisotropy, result.report.center[0], result.report.center[1]
    );
    Ok(())
}

fn cmd_stability(common: CommonArgs, grid: Option<usize>) -> Result<(), CliError> {
    let mut cfg = resolve(&common)?;
    cfg.set_usize("grid", grid);
    let mut keys = common_keys();
    keys.push("grid");
    cfg.validate_keys(&keys)?;

    let model = model_from(&cfg)?;
    let bg = background_from(&cfg)?;
    let n = cfg.usize_or("grid", 32)?;
    write_manifest(&common.out, "stability", &cfg)?;
    let report = stability_scan(&model, &bg, &full_brillouin_grid(model.dim(), n))?;
    let mut csv = csv_file(&common.out, "stability.csv")?;
    writeln!(csv, "kx,ky,kz,max_abs_z")?;
    for (k, m) in &report.entries {
        writeln!(
            csv,
            "{},{},{},{}",
            format_float(k[0]),
            format_float(k[1]),
            format_float(k[2]),
            format_float(*m)
        )?;
    }
    println!(
        "max |z| = {:.12} over {} wavevectors; unstable: {}",
        report.max_abs,
        report.entries.len(),
        report.unstable.len()
    );
    if !report.unstable.is_empty() {
        let mut un = csv_file(&common.out, "unstable.csv")?;
        writeln!(un, "kx,ky,kz,max_abs_z")?;
        for (k, m) in &report.unstable {
            writeln!(
                un,
                "{},{},{},{}",
                format_float(k[0]),
                format_float(k[1]),
                format_float(k[2]),
                format_float(*m)
            )?;
        }
    }
    Ok(())
}
