//! Randomized properties of the divisible-goods solvers.

mod common;

use caei_core::divisible::{
    allocation_for_prices, max_welfare_caei, prices_for_allocation, solve_eg, DEFAULT_EG_TOLERANCE,
};
use caei_core::exactmath::{from_f64, int, Rational};
use caei_core::model::{bundle_price, Allocation, Bundle, Clearing, DivisibleInstance, Grouping};
use caei_core::verify::{is_envy_free, oracle_max_satisfiable, verify_caei};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn instance() -> impl Strategy<Value = DivisibleInstance> {
    (any::<u64>(), 1usize..=5, 1usize..=3).prop_map(|(seed, n, m)| common::divisible(&mut common::rng(seed), n, m))
}

fn typed_instance() -> impl Strategy<Value = DivisibleInstance> {
    (any::<u64>(), 2usize..=6, 1usize..=3, 1usize..=2)
        .prop_map(|(seed, n, m, t)| common::divisible_with_types(&mut common::rng(seed), n, m, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn grouping_does_not_change_welfare(inst in typed_instance()) {
        let by_types = max_welfare_caei(&inst, Grouping::ByTypes).unwrap();
        let by_agents = max_welfare_caei(&inst, Grouping::ByAgents).unwrap();
        prop_assert_eq!(by_types.welfare, by_agents.welfare);
    }

    #[test]
    fn max_welfare_dominates_eg(inst in instance()) {
        let best = max_welfare_caei(&inst, Grouping::ByTypes).unwrap();
        let eg = solve_eg(&inst, DEFAULT_EG_TOLERANCE).unwrap();
        prop_assert!(best.welfare >= eg.welfare);
        prop_assert!(best.welfare <= oracle_max_satisfiable(&inst).unwrap().0);
    }

    #[test]
    fn eg_meets_tolerance(inst in instance()) {
        let tol = 1e-6;
        let sol = solve_eg(&inst, DEFAULT_EG_TOLERANCE).unwrap();
        prop_assert!(!sol.exact);
        let report = verify_caei(&inst, &sol, &from_f64(tol).unwrap(), Clearing::Full).unwrap();
        prop_assert!(report.is_caei, "{:?}", report.violations);
        let Allocation::Divisible(x) = &sol.allocation else { unreachable!() };
        for j in 0..inst.num_goods() {
            let total = x.iter().fold(Rational::zero(), |acc, row| acc + &row[j]);
            prop_assert!((total - Rational::one()).abs() <= from_f64(tol).unwrap());
        }
        prop_assert!(is_envy_free(&inst, &sol.allocation).unwrap());
    }

    #[test]
    fn exact_output_verifies_with_zero_tolerance(inst in instance()) {
        let sol = max_welfare_caei(&inst, Grouping::ByAgents).unwrap();
        let report = verify_caei(&inst, &sol, &int(0), Clearing::Full).unwrap();
        prop_assert!(report.is_caei, "{:?}", report.violations);
        for i in 0..inst.num_agents() {
            let cost = bundle_price(&sol.prices, Bundle::Divisible(inst.demand(i))).unwrap();
            if sol.served.contains(&i) {
                prop_assert!(cost <= int(1));
            } else {
                prop_assert!(cost > int(1));
            }
        }
    }

    #[test]
    fn completions_round_trip(inst in instance()) {
        let sol = max_welfare_caei(&inst, Grouping::ByTypes).unwrap();
        let Allocation::Divisible(x) = &sol.allocation else { unreachable!() };
        // The solver's own allocation is always supportable.
        let prices = prices_for_allocation(&inst, x).unwrap();
        let served: Vec<bool> = (0..inst.num_agents()).map(|i| inst.is_satisfied(i, &x[i])).collect();
        for i in 0..inst.num_agents() {
            let cost: Rational = inst.demand(i).iter().zip(&prices).map(|(v, p)| v * p).sum();
            let consistent = if served[i] { cost <= int(1) } else { cost > int(1) };
            prop_assert!(consistent, "agent {} demand costs {}", i, cost);
        }
        // Its price vector admits an allocation serving the same agents.
        let sol_prices = sol.prices.as_vector().unwrap();
        let y = allocation_for_prices(&inst, sol_prices).unwrap();
        for i in 0..inst.num_agents() {
            prop_assert_eq!(inst.is_satisfied(i, &y[i]), served[i]);
        }
    }
}
