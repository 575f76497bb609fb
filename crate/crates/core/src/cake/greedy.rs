//! Welfare-maximizing CAEI for single-interval demands via interval scheduling.

use num_traits::{One, Zero};

use super::partition::{refine_partition, SplitRule};
use super::max_welfare_fixed_agents;
use crate::error::{Error, Result};
use crate::exactmath::Rational;
use crate::model::{Allocation, CaeiSolution, CakeInstance, Clearing, Interval, Piece, PriceCurve, PriceSystem};
use crate::verify::verify_caei;

/// A served agent in the greedy schedule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScheduledJob {
    pub agent: usize,
    pub start: Rational,
    pub finish: Rational,
    /// 1-based position in the schedule.
    pub order: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreedyOutcome {
    pub solution: CaeiSolution,
    pub schedule: Vec<ScheduledJob>,
    /// Groups of identical agents that were set aside, each unserved.
    pub identical_groups: Vec<Vec<usize>>,
    /// True when the priced construction failed verification and the
    /// exact fixed-agents search produced the solution instead.
    pub fell_back: bool,
}

/// Earliest-finish greedy with latest-start ties, priced so that every
/// skipped agent faces a demand price above 1.
pub fn greedy_contiguous(instance: &CakeInstance) -> Result<CaeiSolution> {
    greedy_contiguous_detailed(instance).map(|o| o.solution)
}

pub fn greedy_contiguous_detailed(instance: &CakeInstance) -> Result<GreedyOutcome> {
    if let Some(i) = (0..instance.num_agents()).find(|&i| instance.demand(i).intervals().len() != 1) {
        return Err(Error::InvalidInput(format!("demand of agent {i} is not a single interval")));
    }
    let n = instance.num_agents();
    let span = |i: usize| instance.demand(i).intervals()[0].clone();
    let cellmin = refine_partition(instance, &[], SplitRule::None)?.shortest_cell();
    let nr = |x: usize| Rational::from_integer(x.into());
    let eps = Rational::one() / nr(2 * n + 2);
    let sliver = &cellmin / nr(4);
    let unit = &cellmin / nr(4 * (n + 1));

    let mut pending: Vec<bool> = vec![true; n];
    let mut frontier = Rational::zero();
    let mut schedule: Vec<ScheduledJob> = Vec::new();
    let mut identical_groups: Vec<Vec<usize>> = Vec::new();
    let mut pieces = vec![Piece::empty(); n];
    let mut priced: Vec<(Interval, Rational)> = Vec::new();

    loop {
        let candidates: Vec<usize> = (0..n).filter(|&i| pending[i] && span(i).lo >= frontier).collect();
        let Some(&pick) = candidates
            .iter()
            .min_by(|&&a, &&b| span(a).hi.cmp(&span(b).hi).then(span(b).lo.cmp(&span(a).lo)))
        else {
            break;
        };
        let job = span(pick);
        let group: Vec<usize> = candidates.iter().copied().filter(|&i| span(i) == job).collect();
        if group.len() >= 2 {
            // Identical agents can never be separated by prices: consolation
            // pieces at the start of their interval, one unit price each.
            let end = &job.lo + &unit * nr(group.len());
            for (t, &i) in group.iter().enumerate() {
                let lo = &job.lo + &unit * nr(t);
                let iv = Interval::new(lo.clone(), &lo + &unit);
                pieces[i] = Piece::interval(iv.lo.clone(), iv.hi.clone());
                priced.push((iv, Rational::one()));
            }
            for &i in &candidates {
                if span(i).lo < end {
                    pending[i] = false;
                }
            }
            identical_groups.push(group);
            continue;
        }
        pending[pick] = false;
        let order = schedule.len() + 1;
        let k_eps = &eps * nr(order);
        priced.push((Interval::new(job.lo.clone(), &job.lo + &sliver), k_eps.clone()));
        priced.push((Interval::new(&job.hi - &sliver, job.hi.clone()), Rational::one() - k_eps));
        pieces[pick] = Piece::interval(job.lo.clone(), job.hi.clone());
        frontier = job.hi.clone();
        schedule.push(ScheduledJob {
            agent: pick,
            start: job.lo,
            finish: job.hi,
            order,
        });
    }

    // Remaining agents get a unit-priced piece from the leftmost free part of their demand.
    let mut taken = pieces.iter().fold(Piece::empty(), |acc, p| acc.union(p));
    for i in (0..n).filter(|&i| pending[i]) {
        let free = instance.demand(i).difference(&taken);
        if let Some(fragment) = free.intervals().first() {
            let hi = (&fragment.lo + &unit).min(fragment.hi.clone());
            let iv = Interval::new(fragment.lo.clone(), hi);
            pieces[i] = Piece::interval(iv.lo.clone(), iv.hi.clone());
            taken = taken.union(&pieces[i]);
            priced.push((iv, Rational::one()));
        }
    }
    pieces[0] = pieces[0].union(&Piece::full().difference(&taken));

    let curve = PriceCurve::from_priced_intervals(&priced);
    let solution = CaeiSolution::new(
        instance,
        Allocation::Cake(pieces),
        PriceSystem::Curve(curve),
        true,
        Clearing::Full,
        "greedy-contiguous",
    )?;
    if verify_caei(instance, &solution, &Rational::zero(), Clearing::Full)?.is_caei {
        return Ok(GreedyOutcome {
            solution,
            schedule,
            identical_groups,
            fell_back: false,
        });
    }
    let mut solution = max_welfare_fixed_agents(instance)?;
    solution.solver = "greedy-contiguous -> fixed-agents fallback".into();
    Ok(GreedyOutcome {
        solution,
        schedule,
        identical_groups,
        fell_back: true,
    })
}
