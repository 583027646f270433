//! Solvers that turn the tuning conditions into concrete parameter sets,
//! verified against the dispersion module before being returned.

use std::collections::BTreeMap;

use super::{
    d3_conditions, hyperdiffusivity_null, solve_bisect, AnomalyRoute, D3Case, Objective,
    TheoryError, TuneResult, SQRT12_INV,
};
use crate::dispersion::{
    full_brillouin_grid, measure_anomalous_advection, stability_scan, track_hydrodynamic_modes,
    uniform_samples, Background, FitOptions, ModeKind,
};
use crate::model::{build_model, rate_from_sigma, ModelName};

fn get(fixed: &BTreeMap<String, f64>, key: &str) -> Result<f64, TheoryError> {
    fixed.get(key).copied().ok_or_else(|| TheoryError::MissingInput(key.to_string()))
}

/// sigma1 from an explicit value or from a requested diffusivity.
fn sigma1_for_ad(name: ModelName, fixed: &BTreeMap<String, f64>, alpha: f64) -> Result<f64, TheoryError> {
    if let Some(s) = fixed.get("sigma1") {
        return Ok(*s);
    }
    if let Some(kappa) = fixed.get("kappa") {
        let factor = match name {
            ModelName::D2Q9Ad => (alpha + 4.0) / 6.0,
            ModelName::D3Q15Ad => (2.0 + alpha) / 3.0,
            ModelName::D3Q19Ad => (alpha + 30.0) / 57.0,
            _ => return Err(TheoryError::MissingInput("sigma1".into())),
        };
        if factor.abs() < 1e-300 {
            return Err(TheoryError::SingularDenominator("kappa prefactor is zero".into()));
        }
        return Ok(kappa / factor);
    }
    Err(TheoryError::MissingInput("sigma1 (or kappa)".into()))
}

fn check_sigma(name: &str, value: f64) -> Result<(), TheoryError> {
    if !(value > 0.0 && value.is_finite()) {
        return Err(TheoryError::Infeasible(format!("{name} = {value} is not a positive sigma")));
    }
    let s = rate_from_sigma(value);
    if !(s > 0.0 && s < 2.0) {
        return Err(TheoryError::Infeasible(format!("{name} maps to rate {s} outside (0,2)")));
    }
    Ok(())
}

/// Measured anomaly h extrapolated to V -> 0 (three-point Richardson in V^2).
fn h_extrapolated(
    model: &crate::model::Model,
    dir: [f64; 3],
    v0: f64,
) -> Result<f64, TheoryError> {
    let ks = uniform_samples(0.15, 12);
    let mut h = [0.0; 3];
    for (i, scale) in [1.0, 0.5, 0.25].iter().enumerate() {
        let v = v0 * scale;
        let bg = Background::with_velocity([dir[0] * v, dir[1] * v, dir[2] * v]);
        h[i] = measure_anomalous_advection(model, &bg, dir, &ks, FitOptions::default())?;
    }
    Ok((64.0 * h[2] - 20.0 * h[1] + h[0]) / 45.0)
}

fn verify_ad_anomaly(
    name: ModelName,
    params: &[(&str, f64)],
    sigmas: &[(&str, f64)],
) -> Result<f64, TheoryError> {
    let model = build_ad_model(name, params, sigmas)?;
    let dirs: &[[f64; 3]] = if model.dim() == 2 {
        &[[1.0, 0.0, 0.0], [0.83867, 0.54464, 0.0], [0.5, 0.5, 0.0]]
    } else {
        &[[1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [1.0, 1.0, 1.0], [0.3, 0.7, 0.2]]
    };
    let mut worst = 0.0f64;
    for dir in dirs {
        let n = (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]).sqrt();
        let d = [dir[0] / n, dir[1] / n, dir[2] / n];
        worst = worst.max(h_extrapolated(&model, d, 0.08)?.abs());
    }
    Ok(worst)
}

fn build_ad_model(
    name: ModelName,
    params: &[(&str, f64)],
    sigmas: &[(&str, f64)],
) -> Result<crate::model::Model, TheoryError> {
    let p: BTreeMap<String, f64> = params.iter().map(|&(k, v)| (k.to_string(), v)).collect();
    let mut rates: BTreeMap<String, f64> = crate::model::rate_groups(name)
        .iter()
        .map(|(sym, _)| (sym.to_string(), 1.0))
        .collect();
    for &(sym, sigma) in sigmas {
        rates.insert(sym.to_string(), rate_from_sigma(sigma));
    }
    Ok(build_model(name, p, rates)?)
}

/// Solve the requested tuning objective; see the module docs for the menu.
/// Every returned set has all sigmas positive, all rates inside (0, 2), and
/// a dispersion-verified residual at or below 1e-8 (reported in the result).
pub fn tune(
    name: ModelName,
    objective: Objective,
    fixed: &BTreeMap<String, f64>,
) -> Result<TuneResult, TheoryError> {
    match (name, objective) {
        (ModelName::D2Q9Ad, Objective::IsotropicAdvection(route)) => d2q9_ad_isotropic(fixed, route),
        (ModelName::D2Q9Ad, Objective::ZeroAnomaly(route)) => d2q9_ad_zero(fixed, route),
        (ModelName::D2Q9Ns, Objective::IsotropicAdvection(_)) => d2q9_ns_isotropic(fixed),
        (ModelName::D2Q9Ns | ModelName::D2Q13Ns, Objective::Quartic) => quartic(name, fixed),
        (ModelName::D2Q13Ns, Objective::IsotropicAdvection(_)) => d2q13_isotropic(fixed),
        (ModelName::D2Q13Ns, Objective::ZeroAnomaly(_)) => quartic(name, fixed),
        (ModelName::D3Q15Ad | ModelName::D3Q19Ad, Objective::ZeroAnomaly(route))
        | (ModelName::D3Q15Ad | ModelName::D3Q19Ad, Objective::IsotropicAdvection(route)) => {
            d3_zero(name, fixed, route)
        }
        (ModelName::D3Q15Ad | ModelName::D3Q19Ad, Objective::NullHyperdiffusivity) => {
            d3_hyper(name, fixed)
        }
        (model, objective) => {
            Err(TheoryError::BadObjective { model, objective: format!("{objective:?}") })
        }
    }
}

fn d2q9_ad_isotropic(
    fixed: &BTreeMap<String, f64>,
    route: AnomalyRoute,
) -> Result<TuneResult, TheoryError> {
    let alpha = get(fixed, "alpha")?;
    let mut assignments = BTreeMap::new();
    match route {
        AnomalyRoute::RouteOne => {
            assignments.insert("d1".into(), -1.0);
        }
        AnomalyRoute::RouteTwo => {
            let sigma1 = sigma1_for_ad(ModelName::D2Q9Ad, fixed, alpha)?;
            let sigma4 = 1.0 / (12.0 * sigma1);
            check_sigma("sigma1", sigma1)?;
            check_sigma("sigma4", sigma4)?;
            assignments.insert("sigma1".into(), sigma1);
            assignments.insert("sigma4".into(), sigma4);
        }
    }
    // Isotropy only: verify the direction-spread of h, not its value.
    let sigma1 = assignments.get("sigma1").copied().or(fixed.get("sigma1").copied()).unwrap_or(0.45);
    let sigma4 = assignments
        .get("sigma4")
        .copied()
        .or(fixed.get("sigma4").copied())
        .unwrap_or(0.6);
    let d1 = assignments.get("d1").copied().or(fixed.get("d1").copied()).unwrap_or(0.4);
    let model = build_ad_model(
        ModelName::D2Q9Ad,
        &[("alpha", alpha), ("beta", 1.0), ("d1", d1), ("a", -3.0)],
        &[
            ("s1", sigma1),
            ("s3", fixed.get("sigma3").copied().unwrap_or(0.55)),
            ("s4", sigma4),
        ],
    )?;
    let mut hs = Vec::new();
    for deg in [0.0f64, 22.5, 45.0, 67.5] {
        let th = deg.to_radians();
        hs.push(h_extrapolated(&model, [th.cos(), th.sin(), 0.0], 0.08)?);
    }
    let spread = hs.iter().cloned().fold(f64::MIN, f64::max)
        - hs.iter().cloned().fold(f64::MAX, f64::min);
    if spread.abs() > 1e-8 {
        return Err(TheoryError::Infeasible(format!(
            "dispersion verification failed: anisotropy spread {spread:.3e}"
        )));
    }
    Ok(TuneResult { assignments, roots: vec![], verified_residual: spread.abs() })
}

fn d2q9_ad_zero(
    fixed: &BTreeMap<String, f64>,
    route: AnomalyRoute,
) -> Result<TuneResult, TheoryError> {
    let alpha = get(fixed, "alpha")?;
    let mut assignments = BTreeMap::new();
    let mut roots = Vec::new();
    let (sigma1, sigma3, sigma4, d1);
    match route {
        AnomalyRoute::RouteOne => {
            d1 = -1.0;
            assignments.insert("d1".into(), d1);
            match (fixed.get("sigma1"), fixed.get("sigma3"), fixed.get("sigma4")) {
                (None, Some(&s3), Some(&s4)) if !fixed.contains_key("kappa") => {
                    // A1(sigma1) = 0: quadratic; report every admissible root.
                    let f = |s1: f64| {
                        2.0 + alpha + 4.0 * (alpha * s3 - 2.0 * s4) * s1
                            + 8.0 * (4.0 + alpha) * s1 * s1
                    };
                    roots = solve_bisect(&f, 1e-3, 10.0);
                    let s1 = *roots
                        .first()
                        .ok_or_else(|| TheoryError::Infeasible("A1 has no positive root".into()))?;
                    (sigma1, sigma3, sigma4) = (s1, s3, s4);
                }
                _ => {
                    let s1 = sigma1_for_ad(ModelName::D2Q9Ad, fixed, alpha)?;
                    match (fixed.get("sigma3"), fixed.get("sigma4")) {
                        (Some(&s3), None) => {
                            let s4 = (2.0 + alpha
                                + 4.0 * alpha * s3 * s1
                                + 8.0 * (4.0 + alpha) * s1 * s1)
                                / (8.0 * s1);
                            (sigma1, sigma3, sigma4) = (s1, s3, s4);
                        }
                        (None, Some(&s4)) => {
                            if alpha.abs() < 1e-12 {
                                return Err(TheoryError::SingularDenominator(
                                    "solving A1 for sigma3 needs alpha != 0".into(),
                                ));
                            }
                            let s3 = (-(2.0 + alpha) + 8.0 * s4 * s1
                                - 8.0 * (4.0 + alpha) * s1 * s1)
                                / (4.0 * alpha * s1);
                            (sigma1, sigma3, sigma4) = (s1, s3, s4);
                        }
                        _ => {
                            // Symmetric fill-in sigma3 = sigma4.
                            if (alpha - 2.0).abs() < 1e-12 {
                                return Err(TheoryError::SingularDenominator(
                                    "symmetric solve needs alpha != 2".into(),
                                ));
                            }
                            let x = -(2.0 + alpha + 8.0 * (4.0 + alpha) * s1 * s1)
                                / (4.0 * (alpha - 2.0) * s1);
                            (sigma1, sigma3, sigma4) = (s1, x, x);
                        }
                    }
                }
            }
        }
        AnomalyRoute::RouteTwo => {
            let s1 = sigma1_for_ad(ModelName::D2Q9Ad, fixed, alpha)?;
            let s4 = 1.0 / (12.0 * s1);
            d1 = fixed.get("d1").copied().ok_or(TheoryError::MissingInput("d1".into()))?;
            let den = 12.0 * s1 * (1.0 - alpha + d1);
            if den.abs() < 1e-12 {
                return Err(TheoryError::SingularDenominator("1 - alpha + d1 = 0".into()));
            }
            let s3 = -(7.0 - d1 + 3.0 * alpha - 24.0 * s1 * s1 * (4.0 + alpha)) / den;
            (sigma1, sigma3, sigma4) = (s1, s3, s4);
            assignments.insert("d1".into(), d1);
        }
    }
    check_sigma("sigma1", sigma1)?;
    check_sigma("sigma3", sigma3)?;
    check_sigma("sigma4", sigma4)?;
    assignments.insert("sigma1".into(), sigma1);
    assignments.insert("sigma3".into(), sigma3);
    assignments.insert("sigma4".into(), sigma4);
    let residual = verify_ad_anomaly(
        ModelName::D2Q9Ad,
        &[("alpha", alpha), ("beta", 1.0), ("d1", d1), ("a", -3.0)],
        &[("s1", sigma1), ("s3", sigma3), ("s4", sigma4)],
    )?;
    if residual > 1e-8 {
        return Err(TheoryError::Infeasible(format!(
            "dispersion verification failed: residual anomaly {residual:.3e}"
        )));
    }
    Ok(TuneResult { assignments, roots, verified_residual: residual })
}

fn d2q9_ns_isotropic(fixed: &BTreeMap<String, f64>) -> Result<TuneResult, TheoryError> {
    let sigma4 = match (fixed.get("sigma4"), fixed.get("nu0")) {
        (Some(&s), _) => s,
        (None, Some(&nu)) => 3.0 * nu,
        _ => return Err(TheoryError::MissingInput("sigma4 (or nu0)".into())),
    };
    let sigma3 = sigma4;
    let sigma6 = 1.0 / (12.0 * sigma4);
    check_sigma("sigma3", sigma3)?;
    check_sigma("sigma4", sigma4)?;
    check_sigma("sigma6", sigma6)?;
    // The paper warns sigma3 = sigma4 is incompatible with stability at small
    // shear viscosity; scan before blessing the assignment.
    let model = build_ad_model(
        ModelName::D2Q9Ns,
        &[("alpha", -2.0), ("beta", 1.0)],
        &[("s3", sigma3), ("s4", sigma4), ("s6", sigma6)],
    )?;
    let report = stability_scan(&model, &Background::at_rest(), &full_brillouin_grid(2, 24))?;
    if !report.unstable.is_empty() {
        return Err(TheoryError::Infeasible(format!(
            "sigma3 = sigma4 = {sigma4} is unstable (max |z| = {:.6} at k = {:?})",
            report.max_abs, report.unstable[0].0
        )));
    }
    let mut assignments = BTreeMap::new();
    assignments.insert("sigma3".into(), sigma3);
    assignments.insert("sigma4".into(), sigma4);
    assignments.insert("sigma6".into(), sigma6);
    // Verified residual: the angular part of the parallel third-order term.
    let b = 1.0 - 12.0 * sigma4 * sigma6;
    Ok(TuneResult { assignments, roots: vec![], verified_residual: b.abs() })
}

fn quartic(name: ModelName, fixed: &BTreeMap<String, f64>) -> Result<TuneResult, TheoryError> {
    let sigma4 = SQRT12_INV;
    let mut assignments = BTreeMap::new();
    assignments.insert("sigma4".into(), sigma4);
    let mut residual = 0.0;
    if name == ModelName::D2Q13Ns {
        let s68 = 1.0 / (12.0 * sigma4);
        assignments.insert("sigma6".into(), s68);
        assignments.insert("sigma8".into(), s68);
        let c1 = fixed.get("c1").copied().unwrap_or(-1.0);
        let q = fixed.get("q").copied().unwrap_or(-7.0 / 6.0);
        let model = build_ad_model(
            ModelName::D2Q13Ns,
            &[("alpha", -2.0), ("beta", 1.0), ("gamma", 1.0), ("c1", c1), ("q", q)],
            &[("s4", sigma4), ("s6", s68), ("s8", s68)],
        )?;
        // Verify: the shear third-order phase term vanishes at the quartic
        // point (V -> 0 extrapolated, one oblique direction).
        let th = 25f64.to_radians();
        let dir = [th.cos(), th.sin(), 0.0];
        let ks = uniform_samples(0.15, 12);
        let mut vals = [0.0; 3];
        for (i, scale) in [1.0, 0.5, 0.25].iter().enumerate() {
            let v = 0.08 * scale;
            let bg = Background::with_velocity([dir[0] * v, dir[1] * v, 0.0]);
            let res = track_hydrodynamic_modes(&model, &bg, dir, &ks, FitOptions::default())?;
            vals[i] = res.mode(ModeKind::Shear).unwrap().a[2] / v;
        }
        residual = ((64.0 * vals[2] - 20.0 * vals[1] + vals[0]) / 45.0).abs();
        if residual > 1e-8 {
            return Err(TheoryError::Infeasible(format!(
                "dispersion verification failed: quartic residual {residual:.3e}"
            )));
        }
    }
    Ok(TuneResult { assignments, roots: vec![], verified_residual: residual })
}

fn d2q13_isotropic(fixed: &BTreeMap<String, f64>) -> Result<TuneResult, TheoryError> {
    let sigma4 = match (fixed.get("sigma4"), fixed.get("nu0"), fixed.get("c1")) {
        (Some(&s), _, _) => s,
        (None, Some(&nu), c1) => 4.0 * nu / (3.0 + c1.copied().unwrap_or(-1.0)),
        _ => return Err(TheoryError::MissingInput("sigma4 (or nu0)".into())),
    };
    let s68 = 1.0 / (12.0 * sigma4);
    check_sigma("sigma4", sigma4)?;
    check_sigma("sigma6", s68)?;
    let mut assignments = BTreeMap::new();
    assignments.insert("sigma4".into(), sigma4);
    assignments.insert("sigma6".into(), s68);
    assignments.insert("sigma8".into(), s68);
    // Residual angular bracket is identically zero in closed form here.
    let c1 = fixed.get("c1").copied().unwrap_or(-1.0);
    let b = sigma4 * ((128.0 - 306.0 * c1) / 85.0 * s68 + (306.0 * c1 + 182.0) / 85.0 * s68)
        - 31.0 / 102.0;
    Ok(TuneResult { assignments, roots: vec![], verified_residual: b.abs() })
}

fn d3_zero(
    name: ModelName,
    fixed: &BTreeMap<String, f64>,
    route: AnomalyRoute,
) -> Result<TuneResult, TheoryError> {
    let alpha = get(fixed, "alpha")?;
    let sigma1 = sigma1_for_ad(name, fixed, alpha)?;
    let case = match route {
        AnomalyRoute::RouteOne => D3Case::Case1,
        AnomalyRoute::RouteTwo => D3Case::Case2,
    };
    let assignment = d3_conditions(
        name,
        case,
        alpha,
        sigma1,
        fixed.get("sigma6").copied(),
        fixed.get("d1").copied(),
    )?;
    check_sigma("sigma1", assignment.sigma1)?;
    check_sigma("sigma5", assignment.sigma5)?;
    check_sigma("sigma6", assignment.sigma6)?;
    let mut params: Vec<(&str, f64)> = vec![
        ("alpha", alpha),
        ("beta", fixed.get("beta").copied().unwrap_or(1.0)),
        ("d1", assignment.d1),
    ];
    if name == ModelName::D3Q19Ad {
        params.push(("d2", assignment.d2.unwrap_or(0.0)));
    }
    let sigma11 = fixed.get("sigma11").copied().unwrap_or(0.5);
    let residual = verify_ad_anomaly(
        name,
        &params,
        &[
            ("s1", assignment.sigma1),
            ("s5", assignment.sigma5),
            ("s6", assignment.sigma6),
            ("s11", sigma11),
        ],
    )?;
    if residual > 1e-8 {
        return Err(TheoryError::Infeasible(format!(
            "dispersion verification failed: residual anomaly {residual:.3e}"
        )));
    }
    let mut assignments = BTreeMap::new();
    assignments.insert("d1".into(), assignment.d1);
    if let Some(d2) = assignment.d2 {
        assignments.insert("d2".into(), d2);
    }
    assignments.insert("sigma1".into(), assignment.sigma1);
    assignments.insert("sigma5".into(), assignment.sigma5);
    assignments.insert("sigma6".into(), assignment.sigma6);
    Ok(TuneResult { assignments, roots: vec![], verified_residual: residual })
}

fn d3_hyper(name: ModelName, fixed: &BTreeMap<String, f64>) -> Result<TuneResult, TheoryError> {
    let alpha = get(fixed, "alpha")?;
    let beta = get(fixed, "beta")?;
    let sigma1 = sigma1_for_ad(name, fixed, alpha)?;
    let sigma6 = get(fixed, "sigma6")?;
    let (sigma11, sigma5) = hyperdiffusivity_null(name, alpha, beta, sigma1, sigma6)?;
    check_sigma("sigma11", sigma11)?;
    check_sigma("sigma5", sigma5)?;
    let mut params: Vec<(&str, f64)> =
        vec![("alpha", alpha), ("beta", beta), ("d1", fixed.get("d1").copied().unwrap_or(0.0))];
    if name == ModelName::D3Q19Ad {
        params.push(("d2", fixed.get("d2").copied().unwrap_or(0.0)));
    }
    let model = build_ad_model(
        name,
        &params,
        &[("s1", sigma1), ("s5", sigma5), ("s6", sigma6), ("s11", sigma11)],
    )?;
    let res = track_hydrodynamic_modes(
        &model,
        &Background::at_rest(),
        [0.3, 0.7, 0.2],
        &uniform_samples(0.15, 12),
        FitOptions::default(),
    )?;
    let residual = res.mode(ModeKind::Density).unwrap().a[3].abs();
    if residual > 1e-8 {
        return Err(TheoryError::Infeasible(format!(
            "dispersion verification failed: |a4| = {residual:.3e}"
        )));
    }
    let mut assignments = BTreeMap::new();
    assignments.insert("sigma1".into(), sigma1);
    assignments.insert("sigma5".into(), sigma5);
    assignments.insert("sigma6".into(), sigma6);
    assignments.insert("sigma11".into(), sigma11);
    Ok(TuneResult { assignments, roots: vec![], verified_residual: residual })
}
