use confboost_core::binning::*;
use proptest::prelude::*;

fn values() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-50.0f64..50.0, 2..60)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn kmeans_clusters_are_ordered_disjoint_intervals(v in values(), k in 1usize..6, seed in any::<u64>()) {
        let distinct = {
            let mut d = v.clone();
            d.sort_by(f64::total_cmp);
            d.dedup();
            d.len()
        };
        prop_assume!(distinct >= k);
        let km = kmeans_1d(&v, k, seed).unwrap();
        prop_assert_eq!(km.intervals.len(), k);
        for w in km.intervals.windows(2) {
            prop_assert!(w[0].1 < w[1].0);
        }
        for w in km.centroids.windows(2) {
            prop_assert!(w[0] < w[1]);
        }
        for (x, &c) in v.iter().zip(&km.labels) {
            prop_assert!(km.intervals[c].0 <= *x && *x <= km.intervals[c].1);
            prop_assert_eq!(km.assign(*x), c);
        }
    }

    #[test]
    fn every_row_lands_in_exactly_one_bin(raw in prop::collection::vec(prop::option::weighted(0.85, 0.0f64..8.0), 1..80)) {
        let spec = BinSpec::FixedWidth(FixedWidth { start: 1.0, width: 1.0, n_interior: 3, open_below: true, open_above: true, unit: "cm".into() });
        let b = spec.apply(&raw, 0).unwrap();
        let mut counts = vec![0usize; b.labels.len()];
        let mut na = 0;
        for a in &b.assignment {
            match a {
                Some(i) => counts[*i] += 1,
                None => na += 1,
            }
        }
        prop_assert_eq!(counts.iter().sum::<usize>() + na, raw.len());
        prop_assert_eq!(na, raw.iter().filter(|x| x.is_none()).count());
    }

    #[test]
    fn tsh_features_respect_shifts_and_scaling(
        pts in prop::collection::btree_map(0u32..5000, -3.0f64..3.0, 2..12),
        dt in -1000.0f64..1000.0,
        dy in -2.0f64..2.0,
        scale in 0.1f64..10.0,
    ) {
        let base: Vec<(f64, f64)> = pts.iter().map(|(&t, &y)| (t as f64, y)).collect();
        let s = TshSeries::from_log(base.clone()).unwrap();
        let mean = mean_tsh_score(&s);
        let rmssd = tsh_trmssd(&s).unwrap();
        let lo = base.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        let hi = base.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(lo - 1e-12 <= mean && mean <= hi + 1e-12);

        let shifted = TshSeries::from_log(base.iter().map(|&(t, y)| (t + dt, y + dy)).collect()).unwrap();
        prop_assert!((mean_tsh_score(&shifted) - (mean + dy)).abs() < 1e-9);
        prop_assert!((tsh_trmssd(&shifted).unwrap() - rmssd).abs() < 1e-9 * rmssd.max(1.0));

        let stretched = TshSeries::from_log(base.iter().map(|&(t, y)| (t * scale, y)).collect()).unwrap();
        prop_assert!((mean_tsh_score(&stretched) - mean).abs() < 1e-9);
        prop_assert!((tsh_trmssd(&stretched).unwrap() - rmssd / scale).abs() < 1e-9 * rmssd.max(1.0));
    }
}

#[test]
fn boundary_values_take_the_upper_category() {
    let bmi = BinSpec::Cutpoints(Cutpoints {
        boundaries: vec![18.5, 24.0, 28.0],
        labels: ["Underweight", "Normal weight", "Overweight", "Obese"].map(String::from).to_vec(),
    });
    let b = bmi.apply(&[Some(18.4), Some(18.5), Some(23.9), Some(24.0), Some(27.99), Some(28.0), None], 0).unwrap();
    assert_eq!(
        b.labels_per_value(),
        ["Underweight", "Normal weight", "Normal weight", "Overweight", "Overweight", "Obese", NA_LABEL]
    );

    let cm = BinSpec::FixedWidth(FixedWidth {
        start: 1.0,
        width: 1.0,
        n_interior: 3,
        open_below: true,
        open_above: true,
        unit: "cm".into(),
    });
    let b = cm.apply(&[Some(0.99), Some(1.0), Some(3.99), Some(4.0), Some(9.0)], 0).unwrap();
    assert_eq!(b.labels_per_value(), ["<1cm", "1-2cm", "3-4cm", "≥4cm", "≥4cm"]);
}

#[test]
fn kmeans_separates_two_obvious_groups_for_any_seed() {
    for seed in 0..200 {
        let km = kmeans_1d(&[0.0, 1.0, 10.0, 11.0], 2, seed).unwrap();
        assert_eq!(km.labels, [0, 0, 1, 1]);
    }
}

#[test]
fn tsh_fixture_values() {
    let s = TshSeries::from_log(vec![(0.0, 1.0), (1.0, 3.0), (3.0, 3.0)]).unwrap();
    assert!((mean_tsh_score(&s) - 8.0 / 3.0).abs() < 1e-12);
    assert!((tsh_trmssd(&s).unwrap() - 2f64.sqrt()).abs() < 1e-12);
    let flat = TshSeries::from_log(vec![(0.0, 0.7), (2.0, 0.7), (5.0, 0.7)]).unwrap();
    assert_eq!(tsh_trmssd(&flat), Some(0.0));
    assert!((mean_tsh_score(&flat) - 0.7).abs() < 1e-12);
    assert!((log_offset_transform(&[0.0]).unwrap()[0] - 1e-5f64.ln()).abs() < 1e-12);
}
