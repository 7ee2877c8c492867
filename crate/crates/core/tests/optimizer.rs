use std::sync::OnceLock;

use mandarin_cs::corpus::Corpus;
use mandarin_cs::inventory::{verify_vowel_allocation, VowelAllocation, VowelRules};
use mandarin_cs::lip::VowelClouds;
use mandarin_cs::optimize::{hill_climb, score, valid_swaps, SearchConfig};
use mandarin_cs::synth::{generate, SynthConfig, SynthOptions};
use proptest::prelude::*;

fn confusion_clouds() -> &'static VowelClouds {
    static CLOUDS: OnceLock<VowelClouds> = OnceLock::new();
    CLOUDS.get_or_init(|| {
        let opts = SynthOptions {
            seed: 7,
            ..SynthOptions::default()
        };
        VowelClouds::from_samples(&generate(&SynthConfig::confusion(), &Corpus::standard(), &opts).unwrap())
    })
}

#[test]
fn final_allocation_is_a_local_optimum() {
    let cfg = SearchConfig::with_seed(3);
    let r = hill_climb(
        confusion_clouds(),
        &VowelAllocation::final_allocation(),
        VowelRules::standard(),
        &cfg,
    )
    .unwrap();
    assert!(r.trace.is_empty(), "{:?}", r.swaps());
    assert_eq!(r.best, VowelAllocation::final_allocation());
}

#[test]
fn final_beats_preliminary() {
    let cfg = SearchConfig::with_seed(3).eval;
    let pre = score(confusion_clouds(), &VowelAllocation::preliminary(), &cfg).unwrap();
    let fin = score(confusion_clouds(), &VowelAllocation::final_allocation(), &cfg).unwrap();
    assert!(fin > pre + 1.0, "preliminary {pre}, final {fin}");
}

#[test]
fn search_is_reproducible() {
    let cfg = SearchConfig::with_seed(11);
    let start = VowelAllocation::preliminary();
    let a = hill_climb(confusion_clouds(), &start, VowelRules::standard(), &cfg).unwrap();
    let b = hill_climb(confusion_clouds(), &start, VowelRules::standard(), &cfg).unwrap();
    assert_eq!(a.best, b.best);
    assert_eq!(a.trace, b.trace);
}

fn scrambled_start() -> impl Strategy<Value = VowelAllocation> {
    prop::collection::vec(any::<prop::sample::Index>(), 0..4).prop_map(|picks| {
        let mut alloc = VowelAllocation::final_allocation();
        for pick in picks {
            let moves = valid_swaps(&alloc, VowelRules::standard());
            alloc = moves[pick.index(moves.len())].1.clone();
        }
        alloc
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn hill_climb_keeps_constraints_and_never_loses(start in scrambled_start(), seed in 0u64..1000) {
        let rules = VowelRules::standard();
        let mut cfg = SearchConfig::with_seed(seed);
        cfg.final_repetitions = cfg.eval.repetitions;
        let r = hill_climb(confusion_clouds(), &start, rules, &cfg).unwrap();
        prop_assert!(verify_vowel_allocation(&r.best, rules).is_empty());
        prop_assert!(r.trace.iter().all(|s| s.delta > 0.0));
        let before = score(confusion_clouds(), &start, &cfg.eval).unwrap();
        let after = score(confusion_clouds(), &r.best, &cfg.eval).unwrap();
        prop_assert!(after >= before, "{before} -> {after}");
    }
}
