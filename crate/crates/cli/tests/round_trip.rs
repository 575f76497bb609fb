//! serialize then deserialize is the identity on exact instances and solutions.

use caei_cli::files::{instance_json, parse_instance, parse_solution, solution_json};
use caei_cli::generate::{generate, GenSpec};
use caei_core::cake::{max_welfare_fixed_agents, solve_existence};
use caei_core::discrete::{max_welfare_relaxed, solve_caei};
use caei_core::divisible::{max_welfare_caei, solve_eg, DEFAULT_EG_TOLERANCE};
use caei_core::model::{CaeiSolution, Grouping, Instance, ModelKind};
use proptest::prelude::*;

fn model() -> impl Strategy<Value = ModelKind> {
    prop_oneof![Just(ModelKind::Divisible), Just(ModelKind::Cake), Just(ModelKind::Discrete)]
}

fn exact_solutions(instance: &Instance) -> Vec<CaeiSolution> {
    match instance {
        Instance::Divisible(inst) => vec![max_welfare_caei(inst, Grouping::ByTypes).unwrap()],
        Instance::Cake(inst) => vec![solve_existence(inst).unwrap(), max_welfare_fixed_agents(inst).unwrap()],
        Instance::Discrete(inst) => {
            let mut out = vec![max_welfare_relaxed(inst, Grouping::ByAgents).unwrap()];
            out.extend(solve_caei(inst).ok());
            out
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn instances_round_trip(model in model(), agents in 1usize..=5, goods in 1usize..=3, seed in any::<u64>(), contiguous in any::<bool>()) {
        let spec = GenSpec { model, agents, goods, seed, contiguous: contiguous && model == ModelKind::Cake, types: None };
        let inst = generate(&spec).unwrap();
        let text = instance_json(&inst);
        let back = parse_instance(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(instance_json(&back), text);
    }

    #[test]
    fn exact_solutions_round_trip(model in model(), agents in 1usize..=4, goods in 1usize..=3, seed in any::<u64>()) {
        let spec = GenSpec { model, agents, goods, seed, contiguous: false, types: None };
        let inst = generate(&spec).unwrap();
        for sol in exact_solutions(&inst) {
            let text = solution_json(&sol);
            let back = parse_solution(&text, &inst).unwrap();
            prop_assert_eq!(&back, &sol);
        }
    }

    #[test]
    fn inexact_solutions_keep_served_set(agents in 1usize..=5, goods in 1usize..=3, seed in any::<u64>()) {
        let spec = GenSpec { model: ModelKind::Divisible, agents, goods, seed, contiguous: false, types: None };
        let Instance::Divisible(inst) = generate(&spec).unwrap() else { unreachable!() };
        let sol = solve_eg(&inst, DEFAULT_EG_TOLERANCE).unwrap();
        let back = parse_solution(&solution_json(&sol), &Instance::Divisible(inst)).unwrap();
        prop_assert_eq!(back.served, sol.served);
        prop_assert!(!back.exact);
    }
}
