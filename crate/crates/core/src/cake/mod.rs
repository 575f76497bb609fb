//! Cake cutting on `[0, 1]` with single-minded agents.

mod greedy;
mod partition;

pub use greedy::{greedy_contiguous, greedy_contiguous_detailed, GreedyOutcome, ScheduledJob};
pub use partition::{refine_partition, Partition, SplitRule};

use std::collections::BTreeSet;

use num_traits::{One, Zero};

use crate::discrete::solve_caei;
use crate::divisible::{allocation_for_prices, max_welfare_caei, prices_for_allocation};
use crate::error::{Error, Result};
use crate::exactmath::Rational;
use crate::model::{
    Allocation, CaeiSolution, CakeInstance, Clearing, DiscreteInstance, DivisibleInstance, Grouping, Piece,
    PriceCurve, PriceSystem,
};
use partition::carve;

/// A CAEI for any cake instance.
///
/// Every demanded interval is cut at its midpoint, so each agent demands at
/// least two cells and no singleton demands arise; the cells then become
/// single-copy discrete items and the over-demand procedure always succeeds.
pub fn solve_existence(instance: &CakeInstance) -> Result<CaeiSolution> {
    let partition = refine_partition(instance, &[], SplitRule::Midpoints)?;
    let demanders = partition.demanders(instance);
    // Cells nobody demands stay out of the market: price 0, owned by agent 0.
    let items: Vec<usize> = (0..partition.num_cells()).filter(|&k| !demanders[k].is_empty()).collect();
    let demands: Vec<BTreeSet<usize>> = (0..instance.num_agents())
        .map(|i| {
            items
                .iter()
                .enumerate()
                .filter(|(_, &k)| demanders[k].contains(&i))
                .map(|(t, _)| t)
                .collect()
        })
        .collect();
    let discrete = DiscreteInstance::new(vec![1; items.len()], demands)?;
    let sol = solve_caei(&discrete).map_err(|e| {
        Error::Internal(format!("discrete reduction of a cake instance failed: {e}"))
    })?;
    let (Allocation::Discrete(counts), PriceSystem::Vector(item_prices)) = (&sol.allocation, &sol.prices) else {
        return Err(Error::Internal("discrete solver returned a foreign model".into()));
    };
    let mut cell_prices = vec![Rational::zero(); partition.num_cells()];
    let mut pieces = vec![Piece::empty(); instance.num_agents()];
    let mut owned = vec![false; partition.num_cells()];
    for (t, &k) in items.iter().enumerate() {
        cell_prices[k] = item_prices[t].clone();
        let owner = (0..counts.len())
            .find(|&i| counts[i][t] == 1)
            .ok_or_else(|| Error::Internal(format!("cell {k} left unassigned")))?;
        pieces[owner] = pieces[owner].union(&partition.cell_piece(k));
        owned[k] = true;
    }
    for k in (0..partition.num_cells()).filter(|&k| !owned[k]) {
        pieces[0] = pieces[0].union(&partition.cell_piece(k));
    }
    let curve = PriceCurve::from_cells(partition.breakpoints(), &cell_prices)?;
    CaeiSolution::new(
        instance,
        Allocation::Cake(pieces),
        PriceSystem::Curve(curve),
        true,
        Clearing::Full,
        "cake-existence",
    )
}

/// Cells of `partition` as divisible goods: agent `i` needs all of a cell
/// inside its demand and none of the others.
fn cell_goods(instance: &CakeInstance, partition: &Partition) -> Result<DivisibleInstance> {
    let demanders = partition.demanders(instance);
    DivisibleInstance::new(
        (0..instance.num_agents())
            .map(|i| {
                demanders
                    .iter()
                    .map(|d| if d.contains(&i) { Rational::one() } else { Rational::zero() })
                    .collect()
            })
            .collect(),
    )
}

fn cell_prices_to_curve(partition: &Partition, prices: &[Rational]) -> Result<PriceCurve> {
    PriceCurve::from_cells(partition.breakpoints(), prices)
}

/// Maximum-welfare CAEI by trying every agent subset, largest first, on the
/// partition refined by demander counts.
pub fn max_welfare_fixed_agents(instance: &CakeInstance) -> Result<CaeiSolution> {
    let partition = refine_partition(instance, &[], SplitRule::PerDemanderCount)?;
    let goods = cell_goods(instance, &partition)?;
    let sol = max_welfare_caei(&goods, Grouping::ByAgents)?;
    let (Allocation::Divisible(x), PriceSystem::Vector(prices)) = (&sol.allocation, &sol.prices) else {
        return Err(Error::Internal("divisible solver returned a foreign model".into()));
    };
    CaeiSolution::new(
        instance,
        Allocation::Cake(carve(&partition, x)),
        PriceSystem::Curve(cell_prices_to_curve(&partition, prices)?),
        true,
        Clearing::Full,
        "fixed-agents",
    )
}

fn check_cake_partition(instance: &CakeInstance, pieces: &[Piece]) -> Result<()> {
    if pieces.len() != instance.num_agents() {
        return Err(Error::InvalidInput(format!(
            "{} pieces for {} agents",
            pieces.len(),
            instance.num_agents()
        )));
    }
    for a in 0..pieces.len() {
        for b in a + 1..pieces.len() {
            if !pieces[a].interior_disjoint(&pieces[b]) {
                return Err(Error::InvalidInput(format!("pieces of agents {a} and {b} overlap")));
            }
        }
    }
    let union = pieces.iter().fold(Piece::empty(), |acc, p| acc.union(p));
    if union != Piece::full() {
        return Err(Error::InvalidInput("pieces do not cover the whole cake".into()));
    }
    Ok(())
}

/// Price curve supporting a fixed allocation, or `Infeasible`.
pub fn price_curve_for_allocation(instance: &CakeInstance, pieces: &[Piece]) -> Result<PriceCurve> {
    check_cake_partition(instance, pieces)?;
    let cuts: Vec<Rational> = pieces.iter().flat_map(|p| p.endpoints().cloned()).collect();
    let partition = refine_partition(instance, &cuts, SplitRule::None)?;
    let goods = cell_goods(instance, &partition)?;
    let x: Vec<Vec<Rational>> = pieces
        .iter()
        .map(|p| {
            (0..partition.num_cells())
                .map(|k| if p.contains(&partition.cell_piece(k)) { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect();
    let prices = prices_for_allocation(&goods, &x)?;
    cell_prices_to_curve(&partition, &prices)
}

/// Allocation in which every agent affording its demand under `curve`
/// receives it and nobody overspends, or `Infeasible`.
pub fn allocation_for_price_curve(instance: &CakeInstance, curve: &PriceCurve) -> Result<Vec<Piece>> {
    let partition = refine_partition(instance, curve.breakpoints(), SplitRule::None)?;
    let goods = cell_goods(instance, &partition)?;
    let prices: Vec<Rational> = (0..partition.num_cells())
        .map(|k| curve.price_of(&partition.cell_piece(k)))
        .collect();
    let x = allocation_for_prices(&goods, &prices)?;
    Ok(carve(&partition, &x))
}
