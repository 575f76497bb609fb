//! Randomized properties of the discrete-goods solvers.

mod common;

use caei_core::discrete::{
    caei_exists, max_welfare_relaxed_detailed, prices_for_allocation_discrete, solve_caei, solve_caei_traced,
    TraceStep,
};
use caei_core::exactmath::{int, Rational};
use caei_core::model::{Allocation, Clearing, DiscreteInstance, Grouping};
use caei_core::verify::{oracle_caei_search, verify_caei};
use caei_core::Error;
use num_traits::One;
use proptest::prelude::*;

fn instance(max_agents: usize, max_items: usize, qmax: u64) -> impl Strategy<Value = DiscreteInstance> {
    (any::<u64>(), 1..=max_agents, 1..=max_items)
        .prop_map(move |(seed, n, m)| common::discrete(&mut common::rng(seed), n, m, qmax))
}

fn typed(max_agents: usize) -> impl Strategy<Value = DiscreteInstance> {
    (any::<u64>(), 1..=max_agents, 1usize..=4, 1usize..=3).prop_map(|(seed, n, m, t)| {
        common::discrete_with_types(&mut common::rng(seed), n, m, 3, t.min(n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn no_caei_exactly_when_characterization_fails(inst in instance(6, 4, 3)) {
        match solve_caei(&inst) {
            Ok(sol) => {
                prop_assert!(caei_exists(&inst));
                prop_assert!(verify_caei(&inst, &sol, &int(0), Clearing::Full).unwrap().is_caei);
            }
            Err(Error::NoCaei) => prop_assert!(!caei_exists(&inst)),
            Err(e) => prop_assert!(false, "unexpected error {}", e),
        }
    }

    #[test]
    fn over_demand_structure(inst in instance(6, 4, 3)) {
        prop_assume!(caei_exists(&inst));
        let (sol, trace) = solve_caei_traced(&inst).unwrap();
        let prices = sol.prices.as_vector().unwrap();
        let Allocation::Discrete(counts) = &sol.allocation else { unreachable!() };
        let eps = Rational::one() / Rational::from_integer((1 + inst.total_copies()).into());
        for step in &trace {
            if let TraceStep::OverDemand { item, recipients } = step {
                prop_assert_eq!(&prices[*item], &Rational::one());
                // Anyone stopped by a unit-priced item wanted something else too.
                for &i in recipients {
                    if !inst.is_satisfied(i, &counts[i]) {
                        prop_assert!(inst.demand(i).len() > 1);
                    }
                }
            }
        }
        for (j, p) in prices.iter().enumerate() {
            prop_assert!(*p == Rational::one() || *p == eps, "item {} priced {}", j, p);
        }
        for i in 0..inst.num_agents() {
            if inst.demand(i).len() == 1 {
                prop_assert!(sol.served.contains(&i), "singleton agent {} unserved", i);
            }
            let spend: Rational = counts[i]
                .iter()
                .zip(prices)
                .map(|(&c, p)| p * Rational::from_integer(c.into()))
                .sum();
            prop_assert!(spend <= Rational::one());
        }
    }

    #[test]
    fn rounding_keeps_served_agents(inst in typed(6)) {
        let out = max_welfare_relaxed_detailed(&inst, Grouping::ByTypes).unwrap();
        prop_assert_eq!(&out.solution.served, &out.divisible.served);
        let report = verify_caei(&inst, &out.solution, &int(0), Clearing::Relaxed).unwrap();
        prop_assert!(report.is_caei, "{:?}", report.violations);
    }

    #[test]
    fn price_completion_supports_solver_output(inst in instance(5, 3, 2)) {
        prop_assume!(caei_exists(&inst));
        let sol = solve_caei(&inst).unwrap();
        let Allocation::Discrete(counts) = &sol.allocation else { unreachable!() };
        let prices = prices_for_allocation_discrete(&inst, counts).unwrap();
        for i in 0..inst.num_agents() {
            let cost: Rational = inst.demand(i).iter().map(|&j| prices[j].clone()).sum();
            if sol.served.contains(&i) {
                prop_assert!(cost <= int(1));
            } else {
                prop_assert!(cost > int(1));
            }
        }
    }

    #[test]
    fn oracle_finds_a_caei_whenever_one_exists(inst in instance(4, 3, 2)) {
        match oracle_caei_search(&inst) {
            Ok(best) => {
                prop_assert!(caei_exists(&inst));
                let sol = solve_caei(&inst).unwrap();
                prop_assert!(best.welfare >= sol.welfare);
                prop_assert!(verify_caei(&inst, &best, &int(0), Clearing::Full).unwrap().is_caei);
            }
            Err(Error::NoCaei) => prop_assert!(!caei_exists(&inst)),
            Err(e) => prop_assert!(false, "unexpected error {}", e),
        }
    }
}
