use std::collections::HashSet;

use bhs_core::adversary::{enumerate_choices, Adversary, Strategy as Adv, StrategyAdversary};
use bhs_core::algo::{Algo, AlgorithmId};
use bhs_core::ring::{validate_presence, EdgeId, RoundPresence};
use bhs_core::sim::{default_comm, finished, setup, step};
use bhs_core::world::WorldState;
use proptest::prelude::*;

fn successor(algo: &Algo, w: &WorldState, choice: Option<EdgeId>) -> WorldState {
    let mut next = w.clone();
    step(algo, &mut next, choice.map_or(RoundPresence::ALL, RoundPresence::missing), &[]).unwrap();
    next
}

/// The successors reachable through the pruned choices are exactly those
/// reachable through all `n + 1` raw choices.
fn check_world(algo: &Algo, w: &WorldState) -> Result<(), TestCaseError> {
    let pruned = enumerate_choices(w);
    for c in &pruned {
        prop_assert!(validate_presence(&w.spec, &c.map_or(RoundPresence::ALL, RoundPresence::missing)).is_ok());
    }
    let raw: Vec<Option<EdgeId>> = std::iter::once(None).chain((0..w.spec.n).map(|e| Some(EdgeId(e)))).collect();
    let all: HashSet<WorldState> = raw.iter().map(|&c| successor(algo, w, c)).collect();
    let kept: HashSet<WorldState> = pruned.iter().map(|&c| successor(algo, w, c)).collect();
    prop_assert_eq!(kept.len(), all.len());
    prop_assert!(kept == all);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(200) })]

    #[test]
    fn pruned_choices_cover_every_successor(
        id in prop_oneof![Just(AlgorithmId::Cp), Just(AlgorithmId::Cdo), Just(AlgorithmId::Gl)],
        n in 4u32..=6, bh_pick in any::<u32>(), start_pick in any::<u32>(), p in 0.0..1.0f64, seed in any::<u64>(),
        rounds in 0u32..60,
    ) {
        let bh = bh_pick % n;
        let starts: Vec<u32> = if id.colocated() {
            vec![(bh + 1 + start_pick % (n - 1)) % n]
        } else {
            let mut safe: Vec<u32> = (0..n).filter(|&v| v != bh).collect();
            let k = start_pick as usize % safe.len();
            safe.rotate_left(k);
            safe.truncate(3);
            safe
        };
        let algo = Algo::new(id, n);
        let mut w = setup(&algo, bh, &starts, default_comm(&algo)).unwrap();
        let mut adv = StrategyAdversary::new(Adv::RandomSeeded { p, seed });
        check_world(&algo, &w)?;
        while w.round < rounds && !finished(&algo, &w) {
            let presence = adv.decide(&w).map_or(RoundPresence::ALL, RoundPresence::missing);
            step(&algo, &mut w, presence, &[]).unwrap();
            check_world(&algo, &w)?;
        }
    }
}
