use super::*;
use crate::model::{build_model, rate_from_sigma};

fn map(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

fn d2q9_ad_model(s1: f64) -> Model {
    let params = map(&[("alpha", -2.0), ("beta", 1.0), ("d1", -1.0), ("a", -3.0)]);
    let rates = map(&[("s1", s1), ("s3", 1.0), ("s4", 1.0), ("s6", 1.0), ("s8", 1.0)]);
    build_model(ModelName::D2Q9Ad, params, rates).unwrap()
}

#[test]
fn transport_map_examples() {
    // kappa = (alpha+4)/6 sigma1 = 1/6 at alpha=-2, sigma1=0.5 (s1 = 1).
    let m = d2q9_ad_model(1.0);
    let t = predicted_transport(&m, 0.0).unwrap();
    assert!((t["kappa"] - 1.0 / 6.0).abs() < 1e-15);

    // D2Q13 at alpha=-2: cs = 1; nu_eff = nu0 at V=0.
    let m13 = build_model(
        ModelName::D2Q13Ns,
        map(&[("alpha", -2.0), ("beta", 1.0), ("gamma", 1.0), ("c1", -1.0), ("q", -7.0 / 6.0)]),
        map(&[
            ("s3", 1.0),
            ("s4", 1.0),
            ("s6", 1.0),
            ("s8", 1.0),
            ("s10", 1.0),
            ("s11", 1.0),
            ("s12", 1.0),
        ]),
    )
    .unwrap();
    let t = predicted_transport(&m13, 0.0).unwrap();
    assert!((t["cs"] - 1.0).abs() < 1e-15);

    // D2Q9-NS with sigma4 = 0.3: nu_eff(0) = nu0 = 0.1.
    let ns = build_model(
        ModelName::D2Q9Ns,
        map(&[("alpha", -2.0), ("beta", 1.0)]),
        map(&[("s3", 1.0), ("s4", rate_from_sigma(0.3)), ("s6", 1.0), ("s8", 1.0)]),
    )
    .unwrap();
    let t = predicted_transport(&ns, 0.0).unwrap();
    assert!((t["nu0"] - 0.1).abs() < 1e-15);
    assert!((t["nu_eff"] - 0.1).abs() < 1e-15);

    assert!(matches!(
        predicted_transport(
            &crate::model::build_model_uniform_rates(
                ModelName::D2Q5,
                crate::model::default_params(ModelName::D2Q5),
                1.0
            )
            .unwrap(),
            0.0
        ),
        Err(TheoryError::UnsupportedModel(_))
    ));
}

#[test]
fn anomaly_a1_vanishes_on_symmetric_sigmas() {
    for t in [0.1, 0.3, 0.45, 0.9] {
        let a1 = anomaly_a1(-2.0, -1.0, t, t, t).unwrap();
        assert!(a1.abs() < 1e-15, "A1({t}) = {a1}");
    }
    // alpha = -2 reduces A1 to sigma1(2 sigma1 - sigma3 - sigma4)/3.
    let (s1, s3, s4) = (0.4, 0.7, 0.25);
    let a1 = anomaly_a1(-2.0, -1.0, s1, s3, s4).unwrap();
    assert!((a1 - s1 * (2.0 * s1 - s3 - s4) / 3.0).abs() < 1e-15);

    assert!(matches!(
        anomaly_a1(-2.0, 0.0, 0.3, 0.3, 0.3),
        Err(TheoryError::ValidityViolated(_))
    ));
}

#[test]
fn anomaly_a2_on_its_branch() {
    let s1 = 0.4;
    let s4 = 1.0 / (12.0 * s1);
    let s3 = 0.7;
    // alpha = -2, d1 = -1: A2 = (1/72)[2 + 24 s1 s3 - 48 s1^2] (hand expansion).
    let a2 = anomaly_a2(-2.0, -1.0, s1, s3, s4).unwrap();
    let expect = (2.0 + 24.0 * s1 * s3 - 48.0 * s1 * s1) / 72.0;
    assert!((a2 - expect).abs() < 1e-15);

    assert!(matches!(
        anomaly_a2(-2.0, -1.0, 0.4, 0.7, 0.3),
        Err(TheoryError::ValidityViolated(_))
    ));
}

#[test]
fn d2q9_order3_coefficients_and_isotropy() {
    // sigma4 sigma6 = 1/12 kills g2.
    let s4 = 0.3;
    let s6 = 1.0 / (12.0 * s4);
    let c = d2q9_ns_order3(-2.0, 1.0, 0.5, s4, s6).unwrap();
    assert!(c.g2.abs() < 1e-15);
    assert!(!c.isotropic);

    // sigma3 = sigma4 = sigma6 = 1/sqrt(12): g1 = (1 - 6(1/12)2)/24 = 0.
    let s = SQRT12_INV;
    let c = d2q9_ns_order3(-2.0, 1.0, s, s, s).unwrap();
    assert!(c.g1.abs() < 1e-15);
    assert!(c.isotropic);
    // Quartic point: the parallel residual 16 s4 (s4 - s6) vanishes too.
    assert_eq!(c.residual_parallel(0.1), Some(0.0));
    assert_eq!(c.residual_perpendicular(0.1, 0.4), Some(0.0));

    // Isotropy pair with sigma4 != 1/sqrt(12): all angular coefficients die,
    // the isotropic parallel residual survives.
    let s4 = 0.5;
    let c = d2q9_ns_order3(-2.0, 1.0, s4, s4, 1.0 / (12.0 * s4)).unwrap();
    assert!(c.isotropic);
    for v in [c.h1, c.h3, c.g1, c.g2, c.g3] {
        assert!(v.abs() < 1e-15, "angular coefficient {v}");
    }
    let expect = 16.0 * s4 * (s4 - 1.0 / (12.0 * s4)) / 24.0 * 0.1;
    assert!((c.residual_parallel(0.1).unwrap() - expect).abs() < 1e-15);

    assert!(matches!(
        d2q9_ns_order3(-1.0, 1.0, 0.3, 0.3, 0.3),
        Err(TheoryError::ValidityViolated(_))
    ));
}

#[test]
fn d2q13_order3_examples() {
    // q = -7/6 removes the velocity dependence of nu_eff.
    let c = d2q13_order3(0.3, 0.4, 0.5, -1.0, -7.0 / 6.0, 0.1, 0.3).unwrap();
    assert!(c.velocity_coefficient.abs() < 1e-15);
    assert!((c.nu_eff - c.nu0).abs() < 1e-15);

    // Quartic point: sigma6 = sigma8 = 1/(12 sigma4), sigma4 = 1/sqrt(12).
    let s4 = SQRT12_INV;
    let s68 = 1.0 / (12.0 * s4);
    let c = d2q13_order3(s4, s68, s68, -1.0, -7.0 / 6.0, 0.1, 0.3).unwrap();
    assert!(c.isotropic_residual.abs() < 1e-14);
    assert!(c.parallel_f2_bracket.abs() < 1e-14);

    // Zero numerator of the perpendicular correction.
    let (s6, s8) = (0.4, 0.5);
    let s4 = 10055.0 / (89772.0 * s6 + 30888.0 * s8);
    let c = d2q13_order3(s4, s6, s8, -1.0, 0.0, 0.1, 0.3).unwrap();
    assert!(c.perpendicular.abs() < 1e-15);

    assert!(matches!(
        d2q13_order3(-0.1, 0.4, 0.5, -1.0, 0.0, 0.1, 0.3),
        Err(TheoryError::ValidityViolated(_))
    ));
}

#[test]
fn d3_condition_examples() {
    // D3Q19 TRT case 2 is the fixed point sigma1 = sigma6 = 1/sqrt(12).
    let trt = d3_trt_row(ModelName::D3Q19Ad, D3Case::Case2, -11.0, 0.4).unwrap();
    assert!((trt.sigma1 - SQRT12_INV).abs() < 1e-15);
    assert!((trt.sigma6 - SQRT12_INV).abs() < 1e-15);
    let trt15 = d3_trt_row(ModelName::D3Q15Ad, D3Case::Case2, -1.0, 0.4).unwrap();
    assert!((trt15.sigma6 - SQRT12_INV).abs() < 1e-15);

    // D3Q15 case 1 with alpha = 0, sigma1 = sigma6 = 0.5 gives sigma5 = -2.5:
    // infeasible, reported as such.
    let err = d3_conditions(ModelName::D3Q15Ad, D3Case::Case1, 0.0, 0.5, Some(0.5), None)
        .unwrap_err();
    match err {
        TheoryError::Infeasible(msg) => assert!(msg.contains("-2.5"), "{msg}"),
        other => panic!("expected infeasible, got {other}"),
    }

    // alpha = -1/3 makes the case-1 denominator vanish.
    assert!(matches!(
        d3_conditions(ModelName::D3Q15Ad, D3Case::Case1, -1.0 / 3.0, 0.5, Some(0.5), None),
        Err(TheoryError::SingularDenominator(_))
    ));
}

#[test]
fn trt_case1_rows_are_consistent_with_the_conditions() {
    // Substituting the TRT sigma6(alpha, sigma1) into the case-1 sigma5
    // formula must give sigma5 = sigma6 (one even rate).
    for (name, alpha, sigma1) in [
        (ModelName::D3Q15Ad, -1.2, 0.4),
        (ModelName::D3Q15Ad, -0.5, 0.55),
        (ModelName::D3Q19Ad, -11.0, 0.45),
        (ModelName::D3Q19Ad, -5.0, 0.6),
    ] {
        let trt = match d3_trt_row(name, D3Case::Case1, alpha, sigma1) {
            Ok(t) => t,
            Err(TheoryError::Infeasible(_)) => continue,
            Err(e) => panic!("{e}"),
        };
        let cond =
            d3_conditions(name, D3Case::Case1, alpha, sigma1, Some(trt.sigma6), None).unwrap();
        assert!(
            (cond.sigma5 - trt.sigma6).abs() < 1e-12,
            "{name} alpha={alpha}: sigma5 {} vs sigma6 {}",
            cond.sigma5,
            trt.sigma6
        );
    }
}

#[test]
fn hyperdiffusivity_trt_point_is_exact() {
    for name in [ModelName::D3Q15Ad, ModelName::D3Q19Ad] {
        for (alpha, beta) in [(-1.0, 1.0), (-11.0, 1.0), (-4.0, 2.0)] {
            let (s11, s5) =
                hyperdiffusivity_null(name, alpha, beta, SQRT12_INV, SQRT3_INV).unwrap();
            assert!((s11 - SQRT12_INV).abs() < 1e-13, "{name} sigma11 = {s11}");
            assert!((s5 - SQRT3_INV).abs() < 1e-13, "{name} sigma5 = {s5}");
        }
    }
    // 12 sigma1 sigma6 = 1 is a pole of the sigma11 formulas.
    assert!(matches!(
        hyperdiffusivity_null(ModelName::D3Q19Ad, -11.0, 1.0, 0.5, 1.0 / 6.0),
        Err(TheoryError::SingularDenominator(_))
    ));
}

#[test]
fn tune_quartic_d2q9_ns() {
    let result = tune(ModelName::D2Q9Ns, Objective::Quartic, &map(&[])).unwrap();
    assert!((result.assignments["sigma4"] - 0.28867513459481287).abs() < 1e-15);
}

#[test]
fn tune_d2q13_isotropic_advection() {
    let result = tune(
        ModelName::D2Q13Ns,
        Objective::IsotropicAdvection(AnomalyRoute::RouteTwo),
        &map(&[("sigma4", 0.1)]),
    )
    .unwrap();
    assert!((result.assignments["sigma6"] - 5.0 / 6.0).abs() < 1e-15);
    assert!((result.assignments["sigma8"] - 5.0 / 6.0).abs() < 1e-15);
}

#[test]
fn tune_d2q9_ad_zero_anomaly_from_kappa() {
    // Route one with a requested diffusivity: symmetric solution sigma1 =
    // sigma3 = sigma4 = 3 kappa at alpha = -2.
    let result = tune(
        ModelName::D2Q9Ad,
        Objective::ZeroAnomaly(AnomalyRoute::RouteOne),
        &map(&[("alpha", -2.0), ("kappa", 0.1)]),
    )
    .unwrap();
    assert!((result.assignments["sigma1"] - 0.3).abs() < 1e-12);
    assert!((result.assignments["sigma3"] - 0.3).abs() < 1e-12);
    assert!((result.assignments["sigma4"] - 0.3).abs() < 1e-12);
    assert!(result.verified_residual <= 1e-8);
}

#[test]
fn tune_d2q9_ad_routes_and_roots() {
    // Fixed sigma3, sigma4: bisection reports the admissible sigma1 roots.
    let result = tune(
        ModelName::D2Q9Ad,
        Objective::ZeroAnomaly(AnomalyRoute::RouteOne),
        &map(&[("alpha", -2.0), ("sigma3", 0.7), ("sigma4", 0.3)]),
    )
    .unwrap();
    assert!(!result.roots.is_empty());
    let s1 = result.assignments["sigma1"];
    let a1 = anomaly_a1(-2.0, -1.0, s1, 0.7, 0.3).unwrap();
    assert!(a1.abs() < 1e-10, "root leaves A1 = {a1}");

    // Route two needs d1; sigma3 comes out of the A2 root.
    let result = tune(
        ModelName::D2Q9Ad,
        Objective::ZeroAnomaly(AnomalyRoute::RouteTwo),
        &map(&[("alpha", -2.0), ("sigma1", 0.45), ("d1", 0.6)]),
    )
    .unwrap();
    let s3 = result.assignments["sigma3"];
    let s4 = result.assignments["sigma4"];
    assert!((s4 - 1.0 / (12.0 * 0.45)).abs() < 1e-15);
    let a2 = anomaly_a2(-2.0, 0.6, 0.45, s3, s4).unwrap();
    assert!(a2.abs() < 1e-12);
    assert!(result.verified_residual <= 1e-8);
}

#[test]
fn tune_d2q9_ns_isotropy_reports_instability_at_small_viscosity() {
    // The source's warning: sigma3 = sigma4 with small shear viscosity is
    // unstable; tune must reject rather than silently relax.
    let err = tune(
        ModelName::D2Q9Ns,
        Objective::IsotropicAdvection(AnomalyRoute::RouteOne),
        &map(&[("nu0", 0.0035)]),
    )
    .unwrap_err();
    assert!(matches!(err, TheoryError::Infeasible(_)), "got {err}");

    // A comfortably viscous setting is fine.
    let result = tune(
        ModelName::D2Q9Ns,
        Objective::IsotropicAdvection(AnomalyRoute::RouteOne),
        &map(&[("sigma4", 0.5)]),
    )
    .unwrap();
    assert_eq!(result.assignments["sigma3"], 0.5);
    assert!((result.assignments["sigma6"] - 1.0 / 6.0).abs() < 1e-15);
}

#[test]
fn tune_d3_zero_anomaly_and_hyperdiffusivity() {
    let result = tune(
        ModelName::D3Q15Ad,
        Objective::ZeroAnomaly(AnomalyRoute::RouteTwo),
        &map(&[("alpha", -1.0), ("sigma1", 0.4), ("d1", -0.5)]),
    )
    .unwrap();
    assert!(result.verified_residual <= 1e-8);
    assert!((result.assignments["sigma6"] - 1.0 / 4.8).abs() < 1e-15);

    let result = tune(
        ModelName::D3Q19Ad,
        Objective::NullHyperdiffusivity,
        &map(&[("alpha", -8.0), ("beta", 0.7), ("sigma1", 0.28), ("sigma6", 0.5)]),
    )
    .unwrap();
    assert!(result.verified_residual <= 1e-8, "a4 = {}", result.verified_residual);
}

#[test]
fn tuning_condition_residuals() {
    let c = TuningCondition::zero_a1();
    let vals = map(&[("alpha", -2.0), ("sigma1", 0.3), ("sigma3", 0.3), ("sigma4", 0.3)]);
    assert!(c.residual(&vals).abs() < 1e-15);
    let vals = map(&[("alpha", -2.0), ("sigma1", 0.3), ("sigma3", 0.9), ("sigma4", 0.3)]);
    assert!(c.residual(&vals).abs() > 1e-3);

    let c = TuningCondition::sigma_product_twelfth("sigma1", "sigma4");
    let vals = map(&[("sigma1", 0.4), ("sigma4", 1.0 / 4.8)]);
    assert!(c.residual(&vals).abs() < 1e-15);

    let c = TuningCondition::quartic_sigma4();
    let vals = map(&[("sigma4", SQRT12_INV)]);
    assert!(c.residual(&vals).abs() < 1e-15);
}

#[test]
fn bisection_finds_multiple_roots() {
    let f = |x: f64| (x - 0.5) * (x - 2.0);
    let roots = solve_bisect(&f, 0.01, 10.0);
    assert_eq!(roots.len(), 2);
    assert!((roots[0] - 0.5).abs() < 1e-10);
    assert!((roots[1] - 2.0).abs() < 1e-10);
}

#[test]
fn d2q13_bulk_viscosity_and_sound_speed_match_acoustic_fits() {
    // Sound attenuation in 2D carries (nu0 + zeta0)/2; with cs from the
    // closed form this pins both transport formulas against the fits.
    use crate::dispersion::{
        track_hydrodynamic_modes, uniform_samples, Background, FitOptions, ModeKind,
    };
    let (alpha, c1) = (-15.0, -0.5);
    let (s3r, s4r) = (rate_from_sigma(0.5), rate_from_sigma(0.611));
    let model = build_model(
        ModelName::D2Q13Ns,
        map(&[("alpha", alpha), ("beta", 1.0), ("gamma", 1.0), ("c1", c1), ("q", -7.0 / 6.0)]),
        map(&[
            ("s3", s3r),
            ("s4", s4r),
            ("s6", 1.1),
            ("s8", 0.8),
            ("s10", 1.2),
            ("s11", 1.3),
            ("s12", 1.1),
        ]),
    )
    .unwrap();
    let t = predicted_transport(&model, 0.0).unwrap();
    let res = track_hydrodynamic_modes(
        &model,
        &Background::at_rest(),
        [1.0, 0.0, 0.0],
        &uniform_samples(0.15, 12),
        FitOptions::default(),
    )
    .unwrap();
    let plus = res.mode(ModeKind::AcousticPlus).unwrap();
    assert!(
        (plus.a[0] - t["cs"]).abs() <= 1e-9,
        "acoustic a1 {} vs cs {}",
        plus.a[0],
        t["cs"]
    );
    let gamma_acoustic = (t["nu0"] + t["zeta0"]) / 2.0;
    assert!(
        (plus.a[1] - gamma_acoustic).abs() <= 1e-6 * gamma_acoustic,
        "acoustic a2 {} vs (nu0 + zeta0)/2 = {}",
        plus.a[1],
        gamma_acoustic
    );
}
