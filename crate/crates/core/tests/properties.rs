use driftbar::baselines::{
    majority_baseline, random_restart_run, random_restart_trace, score, BaselineOptions,
    RestartPolicy,
};
use driftbar::diagnostics::{
    autocorrelation, independence_bar, label_distribution, persistence_accuracy, run_lengths,
    ColdStart,
};
use driftbar::eval::{prequential_eval, Classifier, NaiveBayes, PersistenceClassifier};
use driftbar::stream_io::{
    parse_arff_str, parse_csv_str, write_arff, ArffOptions, Attribute, CsvOptions, FeatureValue,
    Instance, Schema,
};
use driftbar::{Label, StreamDataset};
use proptest::prelude::*;

fn labels_strategy(max_k: usize, max_n: usize) -> impl Strategy<Value = (usize, Vec<Label>)> {
    (1..=max_k).prop_flat_map(move |k| {
        (
            Just(k),
            prop::collection::vec((0..k).prop_map(Label), 1..=max_n),
        )
    })
}

fn binary_labels(max_n: usize) -> impl Strategy<Value = Vec<Label>> {
    prop::collection::vec((0..2usize).prop_map(Label), 2..=max_n)
        .prop_filter("needs both classes", |v| v.contains(&Label(0)) && v.contains(&Label(1)))
}

/// Double loop straight from the definition of the sample ACF.
fn acf_brute_force(labels: &[Label], lag: usize) -> f64 {
    let x: Vec<f64> = labels.iter().map(|l| l.0 as f64).collect();
    let n = x.len();
    let mut mean = 0.0;
    for v in &x {
        mean += v;
    }
    mean /= n as f64;
    let mut num = 0.0;
    for t in 0..n - lag {
        num += (x[t] - mean) * (x[t + lag] - mean);
    }
    let mut den = 0.0;
    for v in &x {
        den += (v - mean) * (v - mean);
    }
    num / den
}

proptest! {
    #[test]
    fn persistence_equals_alternation_formula((k, labels) in labels_strategy(4, 200), cold in 0usize..4) {
        let cold = Label(cold % k);
        let n = labels.len();
        let mut alternations = 0;
        for i in 1..n {
            if labels[i] != labels[i - 1] {
                alternations += 1;
            }
        }
        let miss = usize::from(labels[0] != cold);
        let expected = 1.0 - (alternations + miss) as f64 / n as f64;
        let got = persistence_accuracy(&labels, ColdStart::Fixed(cold)).unwrap();
        prop_assert!((got - expected).abs() < 1e-12);
    }

    #[test]
    fn acf_matches_double_loop(labels in binary_labels(1000), lag_frac in 0.0f64..1.0) {
        let max_lag = ((labels.len() - 1) as f64 * lag_frac).max(1.0) as usize;
        let acf = autocorrelation(&labels, max_lag).unwrap();
        prop_assert_eq!(acf.values.len(), max_lag);
        for (i, &r) in acf.values.iter().enumerate() {
            prop_assert!((r - acf_brute_force(&labels, i + 1)).abs() < 1e-12);
            prop_assert!((-1.0 - 1e-9..=1.0 + 1e-9).contains(&r));
        }
    }

    #[test]
    fn acf_is_deterministic(labels in binary_labels(400)) {
        let a = autocorrelation(&labels, labels.len() - 1).unwrap();
        let b = autocorrelation(&labels, labels.len() - 1).unwrap();
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(&a.values), bits(&b.values));
    }

    #[test]
    fn independence_bar_at_least_one_over_k((k, labels) in labels_strategy(5, 100)) {
        let dist = label_distribution(&labels, k).unwrap();
        let total: f64 = dist.frequencies.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        let bar = independence_bar(&dist);
        let uniform = dist.counts.iter().all(|&c| c == dist.counts[0]);
        if uniform {
            prop_assert!((bar - 1.0 / k as f64).abs() < 1e-12);
        } else {
            prop_assert!(bar > 1.0 / k as f64);
        }
    }

    #[test]
    fn run_lengths_partition_stream((_, labels) in labels_strategy(3, 300)) {
        let r = run_lengths(&labels).unwrap();
        let n = labels.len();
        prop_assert!((r.overall.mean * r.overall.count as f64 - n as f64).abs() < 1e-9);
        prop_assert!(r.overall.max as f64 >= r.overall.mean);
        let per_class_total: f64 = r.per_class.iter().map(|c| c.mean * c.count as f64).sum();
        prop_assert!((per_class_total - n as f64).abs() < 1e-9);
    }

    #[test]
    fn restart_endpoints_are_identities((k, labels) in labels_strategy(3, 300), seed: u64, cold in 0usize..3) {
        let opts = BaselineOptions { cold_start: ColdStart::Fixed(Label(cold % k)), ..Default::default() };
        let one = random_restart_run(&labels, RestartPolicy::new(1.0, seed).unwrap(), opts).unwrap();
        prop_assert_eq!(one, persistence_accuracy(&labels, opts.cold_start).unwrap());
        let zero = random_restart_run(&labels, RestartPolicy::new(0.0, seed).unwrap(), opts).unwrap();
        prop_assert_eq!(zero, majority_baseline(&labels, opts).unwrap());
    }

    #[test]
    fn restart_is_deterministic_and_trace_scores((_, labels) in labels_strategy(3, 200), rho in 0.0f64..=1.0, seed: u64) {
        let p = RestartPolicy::new(rho, seed).unwrap();
        let opts = BaselineOptions::default();
        let a = random_restart_run(&labels, p, opts).unwrap();
        prop_assert_eq!(a.to_bits(), random_restart_run(&labels, p, opts).unwrap().to_bits());
        let trace = random_restart_trace(&labels, p, opts).unwrap();
        prop_assert_eq!(score(&labels, &trace).unwrap(), a);
    }

    #[test]
    fn persistence_classifier_matches_direct((_, labels) in labels_strategy(3, 200)) {
        let ds = label_dataset(&labels, 3);
        let report = prequential_eval(&mut PersistenceClassifier::new(Label(0)), &ds).unwrap();
        prop_assert_eq!(report.accuracy, persistence_accuracy(&labels, ColdStart::SchemaFirst).unwrap());
        let diag: usize = (0..3).map(|i| report.confusion.counts[i][i]).sum();
        prop_assert_eq!(diag as f64 / report.n as f64, report.accuracy);
        prop_assert_eq!(report.confusion.total(), report.n);
    }

    #[test]
    fn arff_round_trip(rows in prop::collection::vec((-1e6f64..1e6, 0usize..3, 0usize..2), 0..60)) {
        let schema = Schema::new(
            vec![
                Attribute::numeric("x"),
                Attribute::nominal("w", vec!["a".into(), "b c".into(), "d".into()]).unwrap(),
                Attribute::nominal("class", vec!["UP".into(), "DOWN".into()]).unwrap(),
            ],
            2,
        )
        .unwrap();
        let instances = rows
            .iter()
            .map(|&(x, w, c)| Instance {
                features: vec![FeatureValue::Numeric(x), FeatureValue::Nominal(w)],
                label: Label(c),
            })
            .collect();
        let ds = StreamDataset::new(schema, instances).unwrap();
        let mut buf = Vec::new();
        write_arff(&ds, "rt", &mut buf).unwrap();
        let back = parse_arff_str(std::str::from_utf8(&buf).unwrap(), &ArffOptions::default()).unwrap();
        prop_assert_eq!(back, ds);
    }

    #[test]
    fn csv_and_arff_agree(rows in prop::collection::vec((0u32..1000, 0usize..2), 1..40)) {
        // Class order by first occurrence in CSV must match the ARFF declaration.
        let names = ["UP", "DOWN"];
        let mut declared: Vec<&str> = Vec::new();
        for (_, c) in &rows {
            if !declared.contains(&names[*c]) {
                declared.push(names[*c]);
            }
        }
        let body: String = rows.iter().map(|(x, c)| format!("{x},{}\n", names[*c])).collect();
        let csv_text = format!("x,class\n{body}");
        let arff_text = format!(
            "@relation r\n@attribute x numeric\n@attribute class {{{}}}\n@data\n{body}",
            declared.join(",")
        );
        let from_csv = parse_csv_str(&csv_text, &CsvOptions::default()).unwrap();
        let from_arff = parse_arff_str(&arff_text, &ArffOptions::default()).unwrap();
        prop_assert_eq!(from_csv, from_arff);
    }

    #[test]
    fn naive_bayes_argmax_shift_invariant(
        data in prop::collection::vec((-5.0f64..5.0, 0usize..2), 1..50),
        probe in -5.0f64..5.0,
        shift in -100.0f64..100.0,
    ) {
        let ds = label_dataset(&data.iter().map(|d| Label(d.1)).collect::<Vec<_>>(), 2);
        let mut nb = NaiveBayes::new(ds.schema());
        for &(x, c) in &data {
            nb.update(&[FeatureValue::Numeric(x)], Label(c));
        }
        let f = [FeatureValue::Numeric(probe)];
        let shifted: Vec<f64> = nb.log_posteriors(&f).iter().map(|s| s + shift).collect();
        prop_assert_eq!(nb.decide(&shifted), nb.predict(&f));
    }
}

/// Label stream with one numeric feature, classes named c0..c{k-1}.
fn label_dataset(labels: &[Label], k: usize) -> StreamDataset {
    let schema = Schema::new(
        vec![
            Attribute::numeric("x"),
            Attribute::nominal("class", (0..k).map(|i| format!("c{i}")).collect()).unwrap(),
        ],
        1,
    )
    .unwrap();
    let instances = labels
        .iter()
        .enumerate()
        .map(|(t, &label)| Instance {
            features: vec![FeatureValue::Numeric(t as f64)],
            label,
        })
        .collect();
    StreamDataset::new(schema, instances).unwrap()
}
