use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use super::piece::{canonicalize_piece, Piece};
use crate::error::{invalid, Result};
use crate::exactmath::{Fraction, Rational};

/// Multiple divisible goods, one unit each. `demands[i][j]` is the fraction
/// of good `j` agent `i` needs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisibleInstance {
    demands: Vec<Vec<Rational>>,
    goods: usize,
}

impl DivisibleInstance {
    pub fn new(demands: Vec<Vec<Rational>>) -> Result<Self> {
        if demands.is_empty() {
            return Err(invalid("instance has no agents"));
        }
        let goods = demands[0].len();
        if goods == 0 {
            return Err(invalid("instance has no goods"));
        }
        for (i, row) in demands.iter().enumerate() {
            if row.len() != goods {
                return Err(invalid(format!(
                    "demands[{i}] has {} entries, expected {goods}",
                    row.len()
                )));
            }
            for (j, v) in row.iter().enumerate() {
                if v.is_negative() || v > &Rational::one() {
                    return Err(invalid(format!(
                        "demands[{i}][{j}] = {} is outside [0, 1]",
                        Fraction(v)
                    )));
                }
            }
            if row.iter().all(Zero::is_zero) {
                return Err(invalid(format!("demands[{i}] is all zero")));
            }
        }
        Ok(DivisibleInstance { demands, goods })
    }

    pub fn num_agents(&self) -> usize {
        self.demands.len()
    }

    pub fn num_goods(&self) -> usize {
        self.goods
    }

    pub fn demand(&self, agent: usize) -> &[Rational] {
        &self.demands[agent]
    }

    pub fn demands(&self) -> &[Vec<Rational>] {
        &self.demands
    }

    pub fn is_satisfied(&self, agent: usize, bundle: &[Rational]) -> bool {
        bundle.len() == self.goods && self.demands[agent].iter().zip(bundle).all(|(v, x)| x >= v)
    }
}

/// Cake cutting on `[0, 1]`; each agent demands a (possibly disconnected) piece.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CakeInstance {
    demands: Vec<Piece>,
}

impl CakeInstance {
    pub fn new(demands: Vec<Piece>) -> Result<Self> {
        if demands.is_empty() {
            return Err(invalid("instance has no agents"));
        }
        if let Some(i) = demands.iter().position(Piece::is_empty) {
            return Err(invalid(format!("demands[{i}] is empty")));
        }
        Ok(CakeInstance { demands })
    }

    /// Builds demands from raw interval lists. Each list must consist of
    /// nondegenerate intervals that overlap at most at endpoints.
    pub fn from_intervals(raw: Vec<Vec<(Rational, Rational)>>) -> Result<Self> {
        let mut demands = Vec::with_capacity(raw.len());
        for (i, list) in raw.iter().enumerate() {
            for (lo, hi) in list {
                if lo >= hi {
                    return Err(invalid(format!(
                        "demands[{i}] contains degenerate or reversed interval [{}, {}]",
                        Fraction(lo),
                        Fraction(hi)
                    )));
                }
            }
            let mut sorted = list.clone();
            sorted.sort();
            if sorted.windows(2).any(|w| w[1].0 < w[0].1) {
                return Err(invalid(format!("demands[{i}] has overlapping intervals")));
            }
            demands.push(
                canonicalize_piece(list).map_err(|e| invalid(format!("demands[{i}]: {e}")))?,
            );
        }
        Self::new(demands)
    }

    pub fn num_agents(&self) -> usize {
        self.demands.len()
    }

    pub fn demand(&self, agent: usize) -> &Piece {
        &self.demands[agent]
    }

    pub fn demands(&self) -> &[Piece] {
        &self.demands
    }

    pub fn is_contiguous(&self) -> bool {
        self.demands.iter().all(|d| d.intervals().len() == 1)
    }

    pub fn is_satisfied(&self, agent: usize, bundle: &Piece) -> bool {
        bundle.contains(&self.demands[agent])
    }
}

/// Discrete items, `quantities[j]` indivisible copies of item `j`; every
/// agent wants one copy of each item in its demand set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscreteInstance {
    quantities: Vec<u64>,
    demands: Vec<BTreeSet<usize>>,
    indicators: Vec<Vec<u64>>,
}

impl DiscreteInstance {
    pub fn new(quantities: Vec<u64>, demands: Vec<BTreeSet<usize>>) -> Result<Self> {
        if demands.is_empty() {
            return Err(invalid("instance has no agents"));
        }
        if quantities.is_empty() {
            return Err(invalid("instance has no items"));
        }
        if let Some(j) = quantities.iter().position(|&q| q == 0) {
            return Err(invalid(format!("quantities[{j}] must be at least 1")));
        }
        let m = quantities.len();
        for (i, d) in demands.iter().enumerate() {
            if d.is_empty() {
                return Err(invalid(format!("demands[{i}] is empty")));
            }
            if let Some(j) = d.iter().find(|&&j| j >= m) {
                return Err(invalid(format!("demands[{i}] names item {j}, but only {m} items exist")));
            }
        }
        if let Some(j) = (0..m).find(|j| demands.iter().all(|d| !d.contains(j))) {
            return Err(invalid(format!("item {j} is demanded by no agent")));
        }
        let indicators = demands
            .iter()
            .map(|d| (0..m).map(|j| d.contains(&j) as u64).collect())
            .collect();
        Ok(DiscreteInstance {
            quantities,
            demands,
            indicators,
        })
    }

    pub fn num_agents(&self) -> usize {
        self.demands.len()
    }

    pub fn num_items(&self) -> usize {
        self.quantities.len()
    }

    pub fn quantities(&self) -> &[u64] {
        &self.quantities
    }

    pub fn demand(&self, agent: usize) -> &BTreeSet<usize> {
        &self.demands[agent]
    }

    pub fn demands(&self) -> &[BTreeSet<usize>] {
        &self.demands
    }

    /// The demand set as a copy-count vector (one copy per demanded item).
    pub fn demand_counts(&self, agent: usize) -> &[u64] {
        &self.indicators[agent]
    }

    pub fn total_copies(&self) -> u64 {
        self.quantities.iter().sum()
    }

    pub fn is_satisfied(&self, agent: usize, counts: &[u64]) -> bool {
        counts.len() == self.quantities.len()
            && self.demands[agent].iter().all(|&j| counts[j] >= 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Divisible,
    Cake,
    Discrete,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Divisible => "divisible",
            ModelKind::Cake => "cake",
            ModelKind::Discrete => "discrete",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instance {
    Divisible(DivisibleInstance),
    Cake(CakeInstance),
    Discrete(DiscreteInstance),
}

impl Instance {
    pub fn as_ref(&self) -> InstanceRef<'_> {
        self.into()
    }
}

impl From<DivisibleInstance> for Instance {
    fn from(value: DivisibleInstance) -> Self {
        Instance::Divisible(value)
    }
}

impl From<CakeInstance> for Instance {
    fn from(value: CakeInstance) -> Self {
        Instance::Cake(value)
    }
}

impl From<DiscreteInstance> for Instance {
    fn from(value: DiscreteInstance) -> Self {
        Instance::Discrete(value)
    }
}

/// Borrowed view over any of the three instance kinds.
#[derive(Clone, Copy, Debug)]
pub enum InstanceRef<'a> {
    Divisible(&'a DivisibleInstance),
    Cake(&'a CakeInstance),
    Discrete(&'a DiscreteInstance),
}

impl<'a> From<&'a Instance> for InstanceRef<'a> {
    fn from(value: &'a Instance) -> Self {
        match value {
            Instance::Divisible(d) => InstanceRef::Divisible(d),
            Instance::Cake(c) => InstanceRef::Cake(c),
            Instance::Discrete(d) => InstanceRef::Discrete(d),
        }
    }
}

impl<'a> From<&'a DivisibleInstance> for InstanceRef<'a> {
    fn from(value: &'a DivisibleInstance) -> Self {
        InstanceRef::Divisible(value)
    }
}

impl<'a> From<&'a CakeInstance> for InstanceRef<'a> {
    fn from(value: &'a CakeInstance) -> Self {
        InstanceRef::Cake(value)
    }
}

impl<'a> From<&'a DiscreteInstance> for InstanceRef<'a> {
    fn from(value: &'a DiscreteInstance) -> Self {
        InstanceRef::Discrete(value)
    }
}

impl<'a> InstanceRef<'a> {
    pub fn kind(&self) -> ModelKind {
        match self {
            InstanceRef::Divisible(_) => ModelKind::Divisible,
            InstanceRef::Cake(_) => ModelKind::Cake,
            InstanceRef::Discrete(_) => ModelKind::Discrete,
        }
    }

    pub fn num_agents(&self) -> usize {
        match self {
            InstanceRef::Divisible(d) => d.num_agents(),
            InstanceRef::Cake(c) => c.num_agents(),
            InstanceRef::Discrete(d) => d.num_agents(),
        }
    }

    pub fn demand(&self, agent: usize) -> super::Bundle<'a> {
        match *self {
            InstanceRef::Divisible(d) => super::Bundle::Divisible(d.demand(agent)),
            InstanceRef::Cake(c) => super::Bundle::Cake(c.demand(agent)),
            InstanceRef::Discrete(d) => super::Bundle::Discrete(d.demand_counts(agent)),
        }
    }
}
