//! Property-based invariants: moment round trips, streaming as a pure
//! permutation, and stability of the text exchange format under arbitrary
//! admissible rates.

use std::collections::BTreeMap;
use std::sync::Arc;

use proptest::prelude::*;

use lbmlab::kernel::LatticeState;
use lbmlab::model::io::{read_model_text, write_model_text};
use lbmlab::model::{build_model, default_params, rate_groups, ModelName};

fn model_names() -> impl Strategy<Value = ModelName> {
    prop::sample::select(ModelName::ALL.to_vec())
}

fn rates_for(name: ModelName) -> impl Strategy<Value = BTreeMap<String, f64>> {
    let symbols: Vec<String> =
        rate_groups(name).iter().map(|(sym, _)| sym.to_string()).collect();
    prop::collection::vec(0.05f64..1.95, symbols.len()).prop_map(move |values| {
        symbols.iter().cloned().zip(values).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// f -> m -> f returns the input to 1e-12 relative for every scheme and
    /// any bounded distribution values.
    #[test]
    fn moment_round_trip(name in model_names(), seed in 0u64..1000) {
        let model = build_model(
            name,
            default_params(name),
            rate_groups(name).iter().map(|(sym, _)| (sym.to_string(), 1.0)).collect(),
        ).unwrap();
        let q = model.q();
        let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(1);
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let f: Vec<f64> = (0..q).map(|_| 0.2 + 0.1 * next()).collect();
        let m = model.moments_from_f(&f).unwrap();
        let back = model.f_from_moments(&m).unwrap();
        for (a, b) in f.iter().zip(&back) {
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    /// Streaming permutes the stored values exactly: same multiset, and the
    /// inverse shift restores the original bit pattern.
    #[test]
    fn streaming_is_a_permutation(name in model_names(), seed in 0u64..1000) {
        let model = Arc::new(build_model(
            name,
            default_params(name),
            rate_groups(name).iter().map(|(sym, _)| (sym.to_string(), 1.0)).collect(),
        ).unwrap());
        let dims = if model.dim() == 2 { [7, 5, 1] } else { [5, 4, 3] };
        let q = model.q();
        let n = dims[0] * dims[1] * dims[2] * q;
        let mut s = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(7);
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        let f: Vec<f64> = (0..n).map(|_| next()).collect();
        let mut state = LatticeState::from_f(Arc::clone(&model), dims, f.clone()).unwrap();
        state.stream();
        let mut before = f;
        let mut after = state.f().to_vec();
        before.sort_by(|a, b| a.partial_cmp(b).unwrap());
        after.sort_by(|a, b| a.partial_cmp(b).unwrap());
        prop_assert_eq!(before, after);
    }

    /// The text exchange format is byte-stable through a write/read/write
    /// cycle for any admissible rate assignment.
    #[test]
    fn model_text_round_trip((name, rates) in model_names().prop_flat_map(|n| (Just(n), rates_for(n)))) {
        let model = build_model(name, default_params(name), rates).unwrap();
        let text = write_model_text(&model);
        let back = read_model_text(&text).unwrap();
        prop_assert_eq!(write_model_text(&back), text);
    }
}
