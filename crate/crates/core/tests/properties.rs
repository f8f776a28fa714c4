//! Property tests for the precision statistics and the QRA engine.

use proptest::prelude::*;
use qra::io::{from_csv_str, from_json_str, to_csv_string, to_json_string};
use qra::{
    c4, cv_star_pipeline, default_condition_schema, run_qra_test, subgroup_assess, t_quantile,
    ConditionValue, Measurand, Measurement, ObjectRef, QraDataset,
};

fn sample(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1000.0, len)
}

fn label() -> impl Strategy<Value = ConditionValue> {
    prop_oneof![
        3 => "[a-c]".prop_map(ConditionValue::known),
        1 => Just(ConditionValue::Unknown),
    ]
}

fn dataset_strategy() -> impl Strategy<Value = QraDataset> {
    let row = (
        0usize..2,
        0usize..2,
        -50.0f64..500.0,
        prop::collection::vec(label(), 7),
        "([a-z]([a-z ]{0,6}[a-z])?)?",
    );
    prop::collection::vec(row, 1..25).prop_map(|rows| {
        let schema = default_condition_schema();
        let names: Vec<String> = schema.names().map(String::from).collect();
        // CSV cells are trimmed on read, so generated text carries no edge spaces.
        let measurements = rows
            .into_iter()
            .map(|(o, m, v, conds, source)| {
                let mut meas =
                    Measurement::new(format!("obj{o}"), format!("meas{m}"), v).with_source(source);
                for (name, c) in names.iter().zip(conds) {
                    meas = meas.with_condition(name.clone(), c);
                }
                meas
            })
            .collect();
        QraDataset {
            schema,
            objects: vec![
                ObjectRef::new("obj0").with_display_name("Object 0"),
                ObjectRef::new("obj1"),
            ],
            measurands: vec![
                Measurand::new("meas0").with_scale(-100.0, Some(1000.0)),
                Measurand::new("meas1")
                    .with_scale(-50.0, None)
                    .with_unit("points"),
            ],
            measurements,
        }
    })
}

fn tiny_dataset(values: &[f64], labels: &[&str]) -> QraDataset {
    let names: Vec<String> = default_condition_schema()
        .names()
        .map(String::from)
        .collect();
    let measurements = values
        .iter()
        .zip(labels)
        .map(|(v, l)| {
            names.iter().fold(Measurement::new("o", "m", *v), |m, n| {
                m.with_condition(n.clone(), ConditionValue::known(*l))
            })
        })
        .collect();
    QraDataset {
        schema: default_condition_schema(),
        objects: vec![ObjectRef::new("o")],
        measurands: vec![Measurand::new("m")],
        measurements,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn cv_star_is_scale_invariant(values in sample(2..=12), k in 1e-6f64..=100.0) {
        prop_assume!(values.iter().any(|v| *v != values[0]));
        let base = cv_star_pipeline(&values, 0.0).unwrap();
        let scaled: Vec<f64> = values.iter().map(|v| v * k).collect();
        let other = cv_star_pipeline(&scaled, 0.0).unwrap();
        let rel = (other.cv_star - base.cv_star).abs() / base.cv_star;
        prop_assert!(rel < 1e-9, "k={k}, {} vs {}", base.cv_star, other.cv_star);
    }

    #[test]
    fn ci_is_symmetric_and_s_star_dominates(values in sample(2..=30)) {
        let r = cv_star_pipeline(&values, 0.0).unwrap();
        let half = t_quantile(0.975, values.len() as u32 - 1).unwrap() * r.se_s_star;
        prop_assert_eq!(r.ci95.lo, r.s_star - half);
        prop_assert_eq!(r.ci95.hi, r.s_star + half);
        prop_assert!(r.s_star >= r.s);
        prop_assert!(r.cv_star >= r.cv);
        prop_assert!(r.cv_star >= 0.0);
        let factor = 1.0 + 1.0 / (4.0 * values.len() as f64);
        prop_assert!((r.cv_star - factor * r.cv).abs() <= 1e-12 * r.cv_star.max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn cv_star_zero_iff_constant(values in sample(2..=10), constant in any::<bool>()) {
        let values = if constant { vec![values[0]; values.len()] } else { values };
        let is_constant = values.iter().all(|v| *v == values[0]);
        let r = cv_star_pipeline(&values, 0.0).unwrap();
        prop_assert_eq!(r.cv_star == 0.0, is_constant);
    }

    #[test]
    fn permutation_does_not_change_precision(values in sample(2..=10), seed in any::<u64>()) {
        let mut shuffled = values.clone();
        // Deterministic rotation plus reversal driven by the seed.
        let len = shuffled.len();
        shuffled.rotate_left((seed as usize) % len);
        if seed % 2 == 0 {
            shuffled.reverse();
        }
        let a = cv_star_pipeline(&values, 0.0).unwrap();
        let b = cv_star_pipeline(&shuffled, 0.0).unwrap();
        prop_assert!((a.cv_star - b.cv_star).abs() <= 1e-9 * a.cv_star.max(1.0));
        prop_assert!((a.s_star - b.s_star).abs() <= 1e-9 * a.s_star.max(1.0));
    }

    #[test]
    fn empty_predicate_equals_full_test(ds in dataset_strategy()) {
        for (o, m, n) in ds.pairs() {
            let full = run_qra_test(&ds, &o, &m);
            let sub = subgroup_assess(&ds, &o, &m, &[]);
            match (full, sub) {
                (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
                (Err(a), Err(b)) => prop_assert_eq!(a.to_string(), b.to_string()),
                (a, b) => prop_assert!(false, "n={n}: {a:?} vs {b:?}"),
            }
        }
    }

    #[test]
    fn json_round_trip(ds in dataset_strategy()) {
        let back = from_json_str(&to_json_string(&ds)).unwrap();
        prop_assert_eq!(back, ds);
    }

    #[test]
    fn csv_round_trip(ds in dataset_strategy()) {
        let text = to_csv_string(&ds).unwrap();
        let back = from_csv_str(&text).unwrap();
        prop_assert_eq!(back, ds);
    }
}

#[test]
fn duplicated_row_keeps_identical_conditions_repeatable() {
    let ds = tiny_dataset(&[3.0, 3.5], &["x", "x"]);
    let report = run_qra_test(&ds, "o", "m").unwrap();
    assert_eq!(report.classification, qra::Classification::Repeatability);

    let ds = tiny_dataset(&[3.0, 3.5, 4.0], &["x", "x", "y"]);
    let report = run_qra_test(&ds, "o", "m").unwrap();
    assert_eq!(report.classification, qra::Classification::Reproducibility);
}

#[test]
fn c4_matches_exact_gamma_ratios() {
    // Γ(k) = (k-1)!, Γ(k + 1/2) = (2k)! √π / (4^k k!)
    fn ln_gamma_exact(twice: u64) -> f64 {
        let ln_fact = |n: u64| (1..=n).map(|i| (i as f64).ln()).sum::<f64>();
        if twice.is_multiple_of(2) {
            ln_fact(twice / 2 - 1)
        } else {
            let k = (twice - 1) / 2;
            ln_fact(2 * k) + 0.5 * std::f64::consts::PI.ln() - (k as f64) * 4f64.ln() - ln_fact(k)
        }
    }
    for n in 2..=30u64 {
        let exact =
            (2.0 / (n as f64 - 1.0)).sqrt() * (ln_gamma_exact(n) - ln_gamma_exact(n - 1)).exp();
        let got = c4(n as usize).unwrap();
        assert!((got - exact).abs() < 1e-12, "n={n}: {got} vs {exact}");
    }
    let monotone: Vec<f64> = (2..=30).map(|n| c4(n).unwrap()).collect();
    assert!(monotone.windows(2).all(|w| w[0] < w[1]));
    assert!(monotone.iter().all(|c| *c > 0.0 && *c < 1.0));
}
