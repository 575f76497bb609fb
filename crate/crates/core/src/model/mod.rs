//! Instances, bundles, allocations and prices for the three resource models.

mod instance;
mod piece;
mod prices;
mod solution;

pub use instance::{CakeInstance, DiscreteInstance, DivisibleInstance, Instance, InstanceRef, ModelKind};
pub use piece::{canonicalize_piece, Interval, Piece};
pub use prices::{PriceCurve, PriceSystem};
pub use solution::{Allocation, Bundle, CaeiSolution, Clearing, Grouping, TypePartition};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactmath::Rational;

fn mismatch(what: &str, expected: usize, got: usize) -> Error {
    Error::ModelMismatch(format!("{what}: expected {expected} entries, got {got}"))
}

/// 1 iff the bundle contains the agent's whole demand, else 0.
pub fn single_minded_utility<'a>(
    instance: impl Into<InstanceRef<'a>>,
    agent: usize,
    bundle: Bundle<'_>,
) -> Result<u8> {
    let instance = instance.into();
    if agent >= instance.num_agents() {
        return Err(Error::InvalidInput(format!(
            "agent {agent} out of range for {} agents",
            instance.num_agents()
        )));
    }
    let happy = match (instance, bundle) {
        (InstanceRef::Divisible(inst), Bundle::Divisible(x)) => {
            if x.len() != inst.num_goods() {
                return Err(mismatch("divisible bundle", inst.num_goods(), x.len()));
            }
            inst.is_satisfied(agent, x)
        }
        (InstanceRef::Cake(inst), Bundle::Cake(piece)) => inst.is_satisfied(agent, piece),
        (InstanceRef::Discrete(inst), Bundle::Discrete(counts)) => {
            if counts.len() != inst.num_items() {
                return Err(mismatch("discrete bundle", inst.num_items(), counts.len()));
            }
            inst.is_satisfied(agent, counts)
        }
        (inst, b) => {
            return Err(Error::ModelMismatch(format!(
                "{} bundle for a {} instance",
                b.kind().name(),
                inst.kind().name()
            )))
        }
    };
    Ok(happy as u8)
}

/// Total price of a bundle.
pub fn bundle_price(prices: &PriceSystem, bundle: Bundle<'_>) -> Result<Rational> {
    match (prices, bundle) {
        (PriceSystem::Vector(p), Bundle::Divisible(x)) => {
            if p.len() != x.len() {
                return Err(mismatch("price vector", x.len(), p.len()));
            }
            Ok(p.iter()
                .zip(x)
                .filter(|(_, q)| !q.is_zero())
                .fold(Rational::zero(), |acc, (p, q)| acc + p * q))
        }
        (PriceSystem::Vector(p), Bundle::Discrete(counts)) => {
            if p.len() != counts.len() {
                return Err(mismatch("price vector", counts.len(), p.len()));
            }
            Ok(p.iter()
                .zip(counts)
                .filter(|(_, &c)| c > 0)
                .fold(Rational::zero(), |acc, (p, &c)| acc + p * Rational::from_integer(c.into())))
        }
        (PriceSystem::Curve(curve), Bundle::Cake(piece)) => Ok(curve.price_of(piece)),
        (PriceSystem::Curve(_), b) => Err(Error::ModelMismatch(format!(
            "price curve applied to a {} bundle",
            b.kind().name()
        ))),
        (PriceSystem::Vector(_), Bundle::Cake(_)) => Err(Error::ModelMismatch(
            "price vector applied to a cake piece".into(),
        )),
    }
}

/// Groups agents with identical demands; types are numbered by first appearance.
pub fn group_types<'a>(instance: impl Into<InstanceRef<'a>>) -> TypePartition {
    let instance = instance.into();
    let n = instance.num_agents();
    let same = |a: usize, b: usize| match instance {
        InstanceRef::Divisible(d) => d.demand(a) == d.demand(b),
        InstanceRef::Cake(c) => c.demand(a) == c.demand(b),
        InstanceRef::Discrete(d) => d.demand(a) == d.demand(b),
    };
    let mut agent_type = Vec::with_capacity(n);
    let mut members: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        match members.iter().position(|m| same(m[0], i)) {
            Some(t) => {
                members[t].push(i);
                agent_type.push(t);
            }
            None => {
                agent_type.push(members.len());
                members.push(vec![i]);
            }
        }
    }
    TypePartition {
        agent_type,
        members,
    }
}
