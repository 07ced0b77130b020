use confboost_core::analysis::*;
use confboost_core::synth::{random_store, RandomStoreSpec};
use confboost_core::*;
use proptest::prelude::*;

fn ratios() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..100.0, 1..40)
}

fn geometric_mean(v: &[f64]) -> f64 {
    let mut log_sum = 0.0;
    for x in v {
        log_sum += x.ln();
    }
    (log_sum / v.len() as f64).exp()
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn inverting_ratios_inverts_acb(v in ratios(), kappa in 0.0f64..0.6) {
        let a = acb_of_ratios(v.iter().copied(), kappa).unwrap();
        let b = acb_of_ratios(v.iter().map(|r| 1.0 / r), kappa).unwrap();
        prop_assert_eq!(a.n_kept, b.n_kept);
        match (a.value, b.value) {
            (Some(x), Some(y)) => prop_assert!(rel_close(x * y, 1.0, 1e-9)),
            (None, None) => {}
            other => prop_assert!(false, "one side undefined: {:?}", other),
        }
    }

    #[test]
    fn zero_kappa_is_plain_geometric_mean(v in ratios()) {
        let a = acb_of_ratios(v.iter().copied(), 0.0).unwrap();
        prop_assert_eq!(a.n_kept, v.len());
        prop_assert!(rel_close(a.value.unwrap(), geometric_mean(&v), 1e-12));
    }

    #[test]
    fn pic_is_a_fraction_and_swapping_complements_it(pairs in prop::collection::vec((0u8..=20, 0u8..=20), 1..50)) {
        let conf: Vec<(f64, f64)> = pairs.iter().map(|&(a, b)| (a as f64 / 20.0, b as f64 / 20.0)).collect();
        let p = pic_of_confidences(conf.iter().copied()).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        let ties = conf.iter().filter(|(a, b)| a == b).count() as f64 / conf.len() as f64;
        let q = pic_of_confidences(conf.iter().map(|&(a, b)| (b, a))).unwrap();
        prop_assert!((p + q + ties - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tiers_never_drop_when_metrics_rise(acb in 0.1f64..5.0, pic in 0.0f64..=1.0, da in 0.0f64..2.0, dp in 0.0f64..0.5) {
        let cfg = AnalysisConfig::default();
        let lower = classify(Some(acb), pic, &cfg);
        let higher = classify(Some(acb + da), (pic + dp).min(1.0), &cfg);
        prop_assert!(higher >= lower);
        prop_assert_eq!(classify(None, pic, &cfg), Tier::Unclassifiable);
    }

    #[test]
    fn ratios_match_counts_recomputed_from_the_store(n in 10usize..120, seed in any::<u64>()) {
        let store = random_store(&RandomStoreSpec { eligible_items: 6, missing_items: 1, transactions: n, prevalence: 0.4, seed });
        let cfg = MinerConfig::for_store(&store, 1, 0.0).unwrap();
        let rules = generate_rules(&mine_frequent(&store, &cfg).unwrap(), &cfg, true);
        let target = Itemset::new([cfg.target]);
        let conf = |a: &Itemset| store.count(&a.union(&target)).unwrap() as f64 / store.count(a).unwrap() as f64;
        for (item, pairs) in analysis::RuleIndex::new(&rules).all_pairs() {
            for p in pairs {
                prop_assert!(p.rule_with.antecedent.contains(item));
                prop_assert_eq!(p.rule_with.antecedent.without(item), p.rule_without.antecedent.clone());
                let expected = conf(&p.rule_with.antecedent) / conf(&p.rule_without.antecedent);
                prop_assert!(rel_close(p.cr, expected, 1e-12));
            }
        }
    }
}

#[test]
fn perfectly_associated_item_is_high_tier() {
    // Item 0 occurs exactly in the positive cases; items 1..4 are noise.
    let mut vocab: Vec<ItemMeta> = (0..5).map(|i| ItemMeta::new(format!("f{i}"), "x")).collect();
    vocab.push(ItemMeta::target("label", "no"));
    vocab.push(ItemMeta::target("label", "yes"));
    let tx: Vec<Itemset> = (0..64u32)
        .map(|t| {
            let pos = t % 4 == 0;
            let mut items: Vec<ItemId> = (1..5).filter(|b| t & (1 << b) != 0).map(ItemId).collect();
            if pos {
                items.push(ItemId(0));
            }
            items.push(ItemId(if pos { 6 } else { 5 }));
            Itemset::new(items)
        })
        .collect();
    let store = TransactionStore::new(vocab, tx).unwrap().with_positive_target(ItemId(6)).unwrap();
    let cfg = MinerConfig::for_store(&store, 1, 0.0).unwrap();
    let rules = generate_rules(&mine_frequent(&store, &cfg).unwrap(), &cfg, true);
    let metrics = analyze(&rules, &AnalysisConfig::default(), |i| i.0 < 5).unwrap();
    let m0 = metrics.iter().find(|m| m.item == ItemId(0)).unwrap();
    assert_eq!(m0.pic, 1.0);
    assert!(m0.cr_values.iter().all(|&c| c > 1.0));
    assert_eq!(m0.tier, Tier::High);
    assert!(metrics.iter().filter(|m| m.item != ItemId(0)).all(|m| m.tier < Tier::High));
}
