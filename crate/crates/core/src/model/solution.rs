use std::collections::BTreeSet;

use super::piece::Piece;
use super::prices::PriceSystem;
use super::{single_minded_utility, InstanceRef, ModelKind};
use crate::error::{Error, Result};
use crate::exactmath::Rational;

/// A bundle for one agent, borrowed from an allocation or a demand.
#[derive(Clone, Copy, Debug)]
pub enum Bundle<'a> {
    /// Fraction of each good.
    Divisible(&'a [Rational]),
    Cake(&'a Piece),
    /// Number of copies of each item.
    Discrete(&'a [u64]),
}

impl Bundle<'_> {
    pub fn kind(&self) -> ModelKind {
        match self {
            Bundle::Divisible(_) => ModelKind::Divisible,
            Bundle::Cake(_) => ModelKind::Cake,
            Bundle::Discrete(_) => ModelKind::Discrete,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Allocation {
    Divisible(Vec<Vec<Rational>>),
    Cake(Vec<Piece>),
    Discrete(Vec<Vec<u64>>),
}

impl Allocation {
    pub fn kind(&self) -> ModelKind {
        match self {
            Allocation::Divisible(_) => ModelKind::Divisible,
            Allocation::Cake(_) => ModelKind::Cake,
            Allocation::Discrete(_) => ModelKind::Discrete,
        }
    }

    pub fn num_agents(&self) -> usize {
        match self {
            Allocation::Divisible(x) => x.len(),
            Allocation::Cake(x) => x.len(),
            Allocation::Discrete(x) => x.len(),
        }
    }

    pub fn bundle(&self, agent: usize) -> Bundle<'_> {
        match self {
            Allocation::Divisible(x) => Bundle::Divisible(&x[agent]),
            Allocation::Cake(x) => Bundle::Cake(&x[agent]),
            Allocation::Discrete(x) => Bundle::Discrete(&x[agent]),
        }
    }

    pub fn bundles(&self) -> impl Iterator<Item = Bundle<'_>> {
        (0..self.num_agents()).map(move |i| self.bundle(i))
    }
}

/// Whether every unit of every resource must be handed out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Clearing {
    #[default]
    Full,
    /// Resources may stay unsold; nothing may be over-allocated.
    Relaxed,
}

/// Enumeration unit for welfare maximization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Grouping {
    #[default]
    ByTypes,
    ByAgents,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaeiSolution {
    pub allocation: Allocation,
    pub prices: PriceSystem,
    /// Agents whose bundle contains their demand, ascending.
    pub served: BTreeSet<usize>,
    pub welfare: usize,
    /// False for solutions produced by floating-point iteration.
    pub exact: bool,
    pub clearing: Clearing,
    /// Which algorithm (and fallback path, if any) produced the solution.
    pub solver: String,
}

impl CaeiSolution {
    /// Assembles a solution, deriving the served set and welfare from the
    /// allocation.
    pub fn new<'a>(
        instance: impl Into<InstanceRef<'a>>,
        allocation: Allocation,
        prices: PriceSystem,
        exact: bool,
        clearing: Clearing,
        solver: impl Into<String>,
    ) -> Result<Self> {
        let instance = instance.into();
        if allocation.num_agents() != instance.num_agents() {
            return Err(Error::ModelMismatch(format!(
                "allocation has {} bundles for {} agents",
                allocation.num_agents(),
                instance.num_agents()
            )));
        }
        let mut served = BTreeSet::new();
        for i in 0..instance.num_agents() {
            if single_minded_utility(instance, i, allocation.bundle(i))? == 1 {
                served.insert(i);
            }
        }
        Ok(CaeiSolution {
            welfare: served.len(),
            allocation,
            prices,
            served,
            exact,
            clearing,
            solver: solver.into(),
        })
    }
}

/// Grouping of agents by identical demand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypePartition {
    /// Type index of each agent.
    pub agent_type: Vec<usize>,
    /// Agents of each type, ascending; types ordered by first appearance.
    pub members: Vec<Vec<usize>>,
}

impl TypePartition {
    pub fn num_types(&self) -> usize {
        self.members.len()
    }

    /// Lowest-index agent of the type, whose demand stands for the type.
    pub fn representative(&self, ty: usize) -> usize {
        self.members[ty][0]
    }
}
