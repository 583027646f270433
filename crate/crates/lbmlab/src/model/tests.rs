use super::*;
use crate::model::io::{read_model_text, write_model_text};

fn params_of(name: ModelName) -> BTreeMap<String, f64> {
    default_params(name)
}

fn any_model(name: ModelName) -> Model {
    build_model_uniform_rates(name, params_of(name), 1.0).unwrap()
}

#[test]
fn velocities_sum_to_zero_and_negate() {
    for name in ModelName::ALL {
        let m = any_model(name);
        let vs = &m.velocity_set;
        let mut sum = [0i32; 3];
        for c in &vs.velocities {
            for a in 0..3 {
                sum[a] += c[a];
            }
        }
        assert_eq!(sum, [0, 0, 0], "{name}");
        for (p, &pbar) in vs.opposite.iter().enumerate() {
            let c = vs.velocities[p];
            let cb = vs.velocities[pbar];
            assert_eq!([-c[0], -c[1], -c[2]], cb, "{name} opposite of {p}");
            assert_eq!(vs.opposite[pbar], p, "{name} involution at {p}");
        }
    }
}

#[test]
fn d2q13_velocities_match_table() {
    let m = any_model(ModelName::D2Q13Ns);
    let expect: [[i32; 2]; 13] = [
        [0, 0],
        [1, 0],
        [0, 1],
        [-1, 0],
        [0, -1],
        [1, 1],
        [-1, 1],
        [-1, -1],
        [1, -1],
        [2, 0],
        [0, 2],
        [-2, 0],
        [0, -2],
    ];
    for (p, e) in expect.iter().enumerate() {
        assert_eq!(m.velocity_set.velocities[p], [e[0], e[1], 0]);
    }
}

#[test]
fn rows_exactly_orthogonal_in_rational_arithmetic() {
    for name in ModelName::ALL {
        let m = any_model(name);
        let q = m.q();
        let mr = &m.basis.matrix_rational;
        for k in 0..q {
            for l in 0..q {
                let dot: Rat = (0..q).map(|p| mr[k][p] * mr[l][p]).sum();
                if k == l {
                    assert!(dot > Rat::from_integer(0), "{name} row {k} has zero norm");
                } else {
                    assert_eq!(dot, Rat::from_integer(0), "{name} rows {k},{l} not orthogonal");
                }
            }
        }
    }
}

#[test]
fn matrix_times_inverse_is_identity() {
    for name in ModelName::ALL {
        let m = any_model(name);
        let prod = m.basis.matrix.mul(&m.basis.inverse);
        let q = m.q();
        for i in 0..q {
            for j in 0..q {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (prod[(i, j)] - expect).abs() < 1e-12,
                    "{name} M*Minv at ({i},{j}) = {}",
                    prod[(i, j)]
                );
            }
        }
    }
}

#[test]
fn row_parity_matches_velocity_inversion() {
    for name in ModelName::ALL {
        let m = any_model(name);
        let q = m.q();
        for k in 0..q {
            let sign = m.basis.parity[k].sign();
            for p in 0..q {
                let pbar = m.velocity_set.opposite[p];
                assert_eq!(
                    m.basis.matrix_rational[k][pbar],
                    m.basis.matrix_rational[k][p] * Rat::from_integer(sign as i64),
                    "{name} row {k} velocity {p}"
                );
            }
        }
    }
}

#[test]
fn d2q9_energy_row_matches_polynomial_evaluation() {
    let m = any_model(ModelName::D2Q9Ns);
    let expect = [-4.0, -1.0, -1.0, -1.0, -1.0, 2.0, 2.0, 2.0, 2.0];
    for (p, e) in expect.iter().enumerate() {
        assert_eq!(m.basis.matrix[(3, p)], *e);
    }
}

const D3Q15_PRINTED: [[i64; 15]; 15] = [
    [1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1],
    [0, 1, -1, 0, 0, 0, 0, 1, -1, 1, -1, 1, -1, 1, -1],
    [0, 0, 0, 1, -1, 0, 0, 1, 1, -1, -1, 1, 1, -1, -1],
    [0, 0, 0, 0, 0, 1, -1, 1, 1, 1, 1, -1, -1, -1, -1],
    [-2, -1, -1, -1, -1, -1, -1, 1, 1, 1, 1, 1, 1, 1, 1],
    [0, 2, 2, -1, -1, -1, -1, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 1, 1, -1, -1, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 1, -1, -1, 1, 1, -1, -1, 1],
    [0, 0, 0, 0, 0, 0, 0, 1, 1, -1, -1, -1, -1, 1, 1],
    [0, 0, 0, 0, 0, 0, 0, 1, -1, 1, -1, -1, 1, -1, 1],
    [0, -4, 4, 0, 0, 0, 0, 1, -1, 1, -1, 1, -1, 1, -1],
    [0, 0, 0, -4, 4, 0, 0, 1, 1, -1, -1, 1, 1, -1, -1],
    [0, 0, 0, 0, 0, -4, 4, 1, 1, 1, 1, -1, -1, -1, -1],
    [16, -4, -4, -4, -4, -4, -4, 1, 1, 1, 1, 1, 1, 1, 1],
    [0, 0, 0, 0, 0, 0, 0, 1, -1, -1, 1, -1, 1, 1, -1],
];

const D3Q19_PRINTED: [[i64; 19]; 19] = [
    [1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1],
    [0, 1, -1, 0, 0, 0, 0, 1, -1, 1, -1, 0, 0, 0, 0, 1, 1, -1, -1],
    [0, 0, 0, 1, -1, 0, 0, 1, 1, -1, -1, 1, -1, 1, -1, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 1, -1, 0, 0, 0, 0, 1, 1, -1, -1, 1, -1, 1, -1],
    [-30, -11, -11, -11, -11, -11, -11, 8, 8, 8, 8, 8, 8, 8, 8, 8, 8, 8, 8],
    [0, 2, 2, -1, -1, -1, -1, 1, 1, 1, 1, -2, -2, -2, -2, 1, 1, 1, 1],
    [0, 0, 0, 1, 1, -1, -1, 1, 1, 1, 1, 0, 0, 0, 0, -1, -1, -1, -1],
    [0, 0, 0, 0, 0, 0, 0, 1, -1, -1, 1, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, -1, -1, 1, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, -1, -1, 1],
    [0, -4, 4, 0, 0, 0, 0, 1, -1, 1, -1, 0, 0, 0, 0, 1, 1, -1, -1],
    [0, 0, 0, -4, 4, 0, 0, 1, 1, -1, -1, 1, -1, 1, -1, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, -4, 4, 0, 0, 0, 0, 1, 1, -1, -1, 1, -1, 1, -1],
    [0, -4, -4, 2, 2, 2, 2, 1, 1, 1, 1, -2, -2, -2, -2, 1, 1, 1, 1],
    [0, 0, 0, -2, -2, 2, 2, 1, 1, 1, 1, 0, 0, 0, 0, -1, -1, -1, -1],
    [12, -4, -4, -4, -4, -4, -4, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1],
    [0, 0, 0, 0, 0, 0, 0, 1, -1, 1, -1, 0, 0, 0, 0, -1, -1, 1, 1],
    [0, 0, 0, 0, 0, 0, 0, -1, -1, 1, 1, 1, -1, 1, -1, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, -1, -1, 1, 1, 1, -1, 1, -1],
];

#[test]
fn generated_3d_matrices_equal_printed_integers() {
    let m15 = any_model(ModelName::D3Q15Ad);
    for k in 0..15 {
        for p in 0..15 {
            assert_eq!(
                m15.basis.matrix_rational[k][p],
                Rat::from_integer(D3Q15_PRINTED[k][p]),
                "D3Q15 ({k},{p})"
            );
        }
    }
    let m19 = any_model(ModelName::D3Q19Ad);
    for k in 0..19 {
        for p in 0..19 {
            assert_eq!(
                m19.basis.matrix_rational[k][p],
                Rat::from_integer(D3Q19_PRINTED[k][p]),
                "D3Q19 ({k},{p})"
            );
        }
    }
}

#[test]
fn d3q19_fifth_row_example() {
    let m = any_model(ModelName::D3Q19Ad);
    assert_eq!(m.basis.matrix[(4, 0)], -30.0);
    for p in 1..7 {
        assert_eq!(m.basis.matrix[(4, p)], -11.0);
    }
    for p in 7..19 {
        assert_eq!(m.basis.matrix[(4, p)], 8.0);
    }
}

#[test]
fn build_rejects_bad_inputs() {
    let err = ModelName::parse("D2Q7").unwrap_err();
    assert!(matches!(err, ModelError::UnknownModel(_)));

    let mut params = params_of(ModelName::D2Q9Ns);
    params.remove("alpha");
    let rates = trt_rates(ModelName::D2Q9Ns, 1.0, 1.0);
    let err = build_model(ModelName::D2Q9Ns, params, rates.clone()).unwrap_err();
    assert!(matches!(err, ModelError::MissingParameter(..)));

    let mut bad_rates = rates.clone();
    bad_rates.insert("s3".into(), 2.5);
    let err = build_model(ModelName::D2Q9Ns, params_of(ModelName::D2Q9Ns), bad_rates).unwrap_err();
    assert!(matches!(err, ModelError::RateOutOfRange { .. }));

    let mut missing = rates;
    missing.remove("s8");
    let err = build_model(ModelName::D2Q9Ns, params_of(ModelName::D2Q9Ns), missing).unwrap_err();
    assert!(matches!(err, ModelError::MissingRate(..)));
}

#[test]
fn moments_of_uniform_and_unit_distributions() {
    let m = any_model(ModelName::D2Q9Ns);
    let f = vec![1.0 / 9.0; 9];
    let mom = m.moments_from_f(&f).unwrap();
    assert!((mom[0] - 1.0).abs() < 1e-15);
    for k in 1..9 {
        assert!(mom[k].abs() < 1e-15, "moment {k} = {}", mom[k]);
    }

    // Unit mass on velocity (1,0): the moment vector is that column of M.
    let mut f = vec![0.0; 9];
    f[1] = 1.0;
    let mom = m.moments_from_f(&f).unwrap();
    assert_eq!(mom[1], 1.0); // jx
    assert_eq!(mom[2], 0.0); // jy
    assert_eq!(mom[4], 1.0); // xx
}

#[test]
fn moment_round_trip() {
    for name in ModelName::ALL {
        let m = any_model(name);
        let q = m.q();
        let f: Vec<f64> = (0..q).map(|p| 0.1 + 0.01 * p as f64 * (p as f64 - 3.0)).collect();
        let back = m.f_from_moments(&m.moments_from_f(&f).unwrap()).unwrap();
        for p in 0..q {
            assert!((back[p] - f[p]).abs() <= 1e-12 * f[p].abs().max(1.0), "{name} entry {p}");
        }
    }
}

#[test]
fn equilibrium_examples() {
    // D2Q9-NS at rest: E=alpha, stress and heat flux vanish, varpi=beta.
    let m = any_model(ModelName::D2Q9Ns);
    let eq = m.equilibrium_moments(&[1.0, 0.0, 0.0]).unwrap();
    assert_eq!(eq[3], m.param("alpha"));
    assert_eq!(eq[4], 0.0);
    assert_eq!(eq[5], 0.0);
    assert_eq!(eq[6], 0.0);
    assert_eq!(eq[7], 0.0);
    assert_eq!(eq[8], m.param("beta"));

    // D2Q13 heat-flux row with a small x momentum.
    let m13 = any_model(ModelName::D2Q13Ns);
    let c1 = m13.param("c1");
    let qp = m13.param("q");
    let eq = m13.equilibrium_moments(&[1.0, 0.1, 0.0]).unwrap();
    let expect = 0.1 * (c1 - (36.0 * qp - 35.0) / 77.0 * 0.01);
    assert!((eq[6] - expect).abs() < 1e-15);

    // Vanishing density is a domain error for the fluids.
    assert!(matches!(
        m.equilibrium_moments(&[0.0, 0.0, 0.0]),
        Err(ModelError::NonPositiveDensity(_))
    ));
}

#[test]
fn equilibrium_parity_under_velocity_flip() {
    // Flipping V (AD) or j (NS) must flip exactly the odd rows.
    for name in ModelName::ALL {
        let m = any_model(name);
        let (eq_plus, eq_minus) = if name.is_advection_diffusion() {
            let v = [0.11, 0.07, if m.dim() == 3 { 0.05 } else { 0.0 }];
            let mp = m.with_velocity(v);
            let mm = m.with_velocity([-v[0], -v[1], -v[2]]);
            (
                mp.equilibrium_moments(&[1.3]).unwrap(),
                mm.equilibrium_moments(&[1.3]).unwrap(),
            )
        } else {
            (
                m.equilibrium_moments(&[1.3, 0.11, 0.07]).unwrap(),
                m.equilibrium_moments(&[1.3, -0.11, -0.07]).unwrap(),
            )
        };
        for k in 0..m.q() {
            let sign = m.basis.parity[k].sign();
            assert!(
                (eq_minus[k] - sign * eq_plus[k]).abs() < 1e-13,
                "{name} row {k}: {} vs {}",
                eq_minus[k],
                eq_plus[k]
            );
        }
    }
}

#[test]
fn henon_conversion_round_trips() {
    // Bit-exact wherever s -> sigma is injective. Just above each power of
    // two in sigma, two adjacent rates share one sigma value and no
    // conversion can split them again; the samples below avoid those bands
    // and cover every rate and tuning value used in the artifact.
    for s in [0.11855, 0.25, 0.3, 0.5, 1.0, 1.2679491924311228, 1.5, 1.908, 1.99, 1.999] {
        assert_eq!(rate_from_sigma(sigma_from_rate(s)), s, "s = {s}");
    }
    // The sigma -> s -> sigma direction can land in gaps of the image where
    // the map expands; there it is correct to the last ulp or two.
    for sigma in [
        0.024,
        1.0 / 12.0f64.sqrt(),
        1.0 / 3.0f64.sqrt(),
        0.5,
        0.7137,
        3.4722,
        7.936507936507937,
    ] {
        let back = sigma_from_rate(rate_from_sigma(sigma));
        assert!((back - sigma).abs() <= 4.0 * f64::EPSILON * sigma, "sigma = {sigma}");
    }
    // Dense deterministic sweep over the injective band.
    let mut s = 0.401f64;
    while s < 1.999 {
        assert_eq!(rate_from_sigma(sigma_from_rate(s)), s, "sweep s = {s}");
        s += 1.0 / 1024.0 + 1.0 / 65536.0;
    }
}

#[test]
fn text_format_round_trips() {
    for name in ModelName::ALL {
        let mut rates = trt_rates(name, 1.25, 0.75);
        // Perturb one symbol so the map is not uniform.
        let first = rate_groups(name)[0].0;
        rates.insert(first.into(), 0.4);
        let m = build_model(name, params_of(name), rates).unwrap();
        let text = write_model_text(&m);
        let back = read_model_text(&text).unwrap();
        assert_eq!(back.name, m.name);
        assert_eq!(back.rates.s, m.rates.s, "{name} rates");
        assert_eq!(back.params, m.params, "{name} params");
        assert_eq!(write_model_text(&back), text, "{name} not byte-stable");
    }
}
