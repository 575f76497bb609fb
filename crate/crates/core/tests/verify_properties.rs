//! Cross-checks between the certificate checker, envy-freeness and the oracles.

mod common;

use caei_core::discrete::prices_for_allocation_discrete;
use caei_core::exactmath::int;
use caei_core::model::{Allocation, CaeiSolution, Clearing, DiscreteInstance, PriceSystem};
use caei_core::verify::{is_envy_free, oracle_caei_search, oracle_max_satisfiable, verify_caei};
use proptest::prelude::*;
use rand::Rng;

/// A random clearing allocation: every copy goes to a uniformly chosen agent.
fn random_allocation(inst: &DiscreteInstance, seed: u64) -> Vec<Vec<u64>> {
    let mut rng = common::rng(seed);
    let mut counts = vec![vec![0u64; inst.num_items()]; inst.num_agents()];
    for (j, &q) in inst.quantities().iter().enumerate() {
        for _ in 0..q {
            counts[rng.gen_range(0..inst.num_agents())][j] += 1;
        }
    }
    counts
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn supported_allocations_are_envy_free(seed in any::<u64>(), n in 1usize..=4, m in 1usize..=4) {
        let inst = common::discrete(&mut common::rng(seed), n, m, 2);
        let counts = random_allocation(&inst, seed ^ 0x5eed);
        if let Ok(prices) = prices_for_allocation_discrete(&inst, &counts) {
            let sol = CaeiSolution::new(
                &inst,
                Allocation::Discrete(counts),
                PriceSystem::Vector(prices),
                true,
                Clearing::Full,
                "completion",
            )
            .unwrap();
            let report = verify_caei(&inst, &sol, &int(0), Clearing::Full).unwrap();
            prop_assert!(report.is_caei, "{:?}", report.violations);
            prop_assert!(is_envy_free(&inst, &sol.allocation).unwrap());
        }
    }

    #[test]
    fn caei_welfare_below_satisfiable_divisible(seed in any::<u64>(), n in 1usize..=5, m in 1usize..=3) {
        let inst = common::divisible(&mut common::rng(seed), n, m);
        let caei = oracle_caei_search(&inst).unwrap();
        prop_assert!(verify_caei(&inst, &caei, &int(0), Clearing::Full).unwrap().is_caei);
        prop_assert!(is_envy_free(&inst, &caei.allocation).unwrap());
        prop_assert!(caei.welfare <= oracle_max_satisfiable(&inst).unwrap().0);
    }

    #[test]
    fn caei_welfare_below_satisfiable_cake(seed in any::<u64>(), n in 1usize..=4) {
        let inst = common::general_cake(&mut common::rng(seed), n);
        let caei = oracle_caei_search(&inst).unwrap();
        prop_assert!(verify_caei(&inst, &caei, &int(0), Clearing::Full).unwrap().is_caei);
        prop_assert!(caei.welfare <= oracle_max_satisfiable(&inst).unwrap().0);
    }

    #[test]
    fn contiguous_distinct_cake_reaches_satisfiable(seed in any::<u64>(), n in 1usize..=5) {
        let inst = common::contiguous_cake(&mut common::rng(seed), n, true);
        let caei = oracle_caei_search(&inst).unwrap();
        let (best, witness) = oracle_max_satisfiable(&inst).unwrap();
        prop_assert_eq!(caei.welfare, best);
        prop_assert_eq!(witness.len(), best);
    }
}
