//! Envy-free allocations that no price system supports, one per model.

use std::collections::BTreeSet;

use crate::exactmath::{int, rat};
use crate::model::{Allocation, CakeInstance, DiscreteInstance, DivisibleInstance, Piece};

#[derive(Clone, Debug)]
pub struct Counterexample<I> {
    pub instance: I,
    pub allocation: Allocation,
}

/// Two agents wanting ⟨1/5, 1/5⟩ and ⟨4/5, 4/5⟩; each receives one whole good.
pub fn divisible_counterexample() -> Counterexample<DivisibleInstance> {
    Counterexample {
        instance: DivisibleInstance::new(vec![vec![rat(1, 5), rat(1, 5)], vec![rat(4, 5), rat(4, 5)]])
            .expect("valid fixture"),
        allocation: Allocation::Divisible(vec![vec![int(1), int(0)], vec![int(0), int(1)]]),
    }
}

/// Demands `[0, 2/5]` and `[2/5, 1]`, each agent holding half of both.
pub fn cake_counterexample() -> Counterexample<CakeInstance> {
    let iv = |a: i64, b: i64| Piece::interval(rat(a, 10), rat(b, 10));
    Counterexample {
        instance: CakeInstance::new(vec![iv(0, 4), iv(4, 10)]).expect("valid fixture"),
        allocation: Allocation::Cake(vec![iv(0, 2).union(&iv(4, 7)), iv(2, 4).union(&iv(7, 10))]),
    }
}

/// Four single-copy items, demands `{0, 1}` and `{2, 3}`, bundles `{0, 2}` and `{1, 3}`.
pub fn discrete_counterexample() -> Counterexample<DiscreteInstance> {
    let set = |items: [usize; 2]| items.into_iter().collect::<BTreeSet<_>>();
    Counterexample {
        instance: DiscreteInstance::new(vec![1; 4], vec![set([0, 1]), set([2, 3])])
            .expect("valid fixture"),
        allocation: Allocation::Discrete(vec![vec![1, 0, 1, 0], vec![0, 1, 0, 1]]),
    }
}
