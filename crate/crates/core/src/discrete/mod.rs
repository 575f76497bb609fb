//! Multiple discrete goods: item `j` comes in `Q_j` indivisible copies.

use num_traits::{One, Signed, Zero};

use crate::divisible::max_welfare_with_clearing;
use crate::error::{Error, Result};
use crate::exactmath::{floor_to_u64, simplex_solve, LinearProgram, LowerBound, LpOutcome, Rational, Relation, VarId};
use crate::model::{
    Allocation, CaeiSolution, Clearing, DiscreteInstance, DivisibleInstance, Grouping, PriceSystem,
};
use crate::verify::verify_caei;

/// A CAEI exists iff no item has more singleton demanders than copies.
pub fn caei_exists(instance: &DiscreteInstance) -> bool {
    over_demanded_singleton(instance).is_none()
}

fn over_demanded_singleton(instance: &DiscreteInstance) -> Option<usize> {
    let mut singles = vec![0u64; instance.num_items()];
    for d in instance.demands() {
        if d.len() == 1 {
            singles[*d.iter().next().expect("nonempty")] += 1;
        }
    }
    singles
        .iter()
        .zip(instance.quantities())
        .position(|(s, q)| s > q)
}

/// One step of the over-demand procedure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceStep {
    /// Item priced 1; each recipient takes one copy and leaves the market.
    OverDemand { item: usize, recipients: Vec<usize> },
    /// Item priced at the small remainder price; `(agent, copies)` pairs.
    Remainder { item: usize, recipients: Vec<(usize, u64)> },
}

/// State of the procedure: active agents in processing order, the set of
/// items already priced at 1, and the remainder price.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverDemandState {
    pub active: Vec<usize>,
    pub allocated: Vec<bool>,
    pub epsilon: Rational,
}

impl OverDemandState {
    fn new(instance: &DiscreteInstance) -> Self {
        let mut active: Vec<usize> = (0..instance.num_agents()).collect();
        active.sort_by_key(|&i| (instance.demand(i).len(), i));
        OverDemandState {
            active,
            allocated: vec![false; instance.num_items()],
            epsilon: Rational::one() / Rational::from_integer((1 + instance.total_copies()).into()),
        }
    }

    fn demanders(&self, instance: &DiscreteInstance, item: usize) -> Vec<usize> {
        self.active
            .iter()
            .copied()
            .filter(|&i| instance.demand(i).contains(&item))
            .collect()
    }
}

/// CAEI by repeated over-demand rounds, or `NoCaei`.
pub fn solve_caei(instance: &DiscreteInstance) -> Result<CaeiSolution> {
    solve_caei_traced(instance).map(|(solution, _)| solution)
}

/// As [`solve_caei`], also returning the allocation steps in order.
pub fn solve_caei_traced(instance: &DiscreteInstance) -> Result<(CaeiSolution, Vec<TraceStep>)> {
    if !caei_exists(instance) {
        return Err(Error::NoCaei);
    }
    let (n, m) = (instance.num_agents(), instance.num_items());
    let q = instance.quantities();
    let mut state = OverDemandState::new(instance);
    let mut prices = vec![Rational::zero(); m];
    let mut counts = vec![vec![0u64; m]; n];
    let mut trace = Vec::new();

    // Over-demand rounds: lowest-index over-demanded item first.
    while let Some((item, demanders)) = (0..m)
        .filter(|&j| !state.allocated[j])
        .map(|j| (j, state.demanders(instance, j)))
        .find(|(j, d)| d.len() as u64 > q[*j])
    {
        let recipients: Vec<usize> = demanders[..q[item] as usize].to_vec();
        for &i in &recipients {
            counts[i][item] = 1;
        }
        prices[item] = Rational::one();
        state.allocated[item] = true;
        state.active.retain(|i| !recipients.contains(i));
        trace.push(TraceStep::OverDemand { item, recipients });
    }

    // Remainder: everything else at epsilon.
    let fallback = *state.active.last().unwrap_or(&(n - 1));
    for item in (0..m).filter(|&j| !state.allocated[j]) {
        prices[item] = state.epsilon.clone();
        let demanders = state.demanders(instance, item);
        for &i in &demanders {
            counts[i][item] = 1;
        }
        let last = *demanders.last().unwrap_or(&fallback);
        counts[last][item] += q[item] - demanders.len() as u64;
        let mut recipients: Vec<(usize, u64)> = demanders.iter().map(|&i| (i, counts[i][item])).collect();
        if demanders.is_empty() {
            recipients.push((last, counts[last][item]));
        }
        trace.push(TraceStep::Remainder { item, recipients });
    }

    let solution = CaeiSolution::new(
        instance,
        Allocation::Discrete(counts),
        PriceSystem::Vector(prices),
        true,
        Clearing::Full,
        "over-demand",
    )?;
    let report = verify_caei(instance, &solution, &Rational::zero(), Clearing::Full)?;
    if !report.is_caei {
        return Err(Error::Internal(format!(
            "over-demand solution failed verification: {:?}",
            report.violations
        )));
    }
    Ok((solution, trace))
}

/// Relaxed welfare maximization and the divisible solution it was rounded from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelaxedOutcome {
    pub solution: CaeiSolution,
    pub divisible: CaeiSolution,
}

/// Maximum-welfare CAEI when copies may remain unsold.
pub fn max_welfare_relaxed(instance: &DiscreteInstance, grouping: Grouping) -> Result<CaeiSolution> {
    max_welfare_relaxed_detailed(instance, grouping).map(|o| o.solution)
}

/// Solves the fractional version (agent `i` needs `1 / Q_j` of item `j`)
/// and rounds each share down to whole copies. Per-copy prices are the
/// per-unit prices divided by `Q_j`, so every demand costs the same in both
/// views.
pub fn max_welfare_relaxed_detailed(instance: &DiscreteInstance, grouping: Grouping) -> Result<RelaxedOutcome> {
    let (n, m) = (instance.num_agents(), instance.num_items());
    let q: Vec<Rational> = instance
        .quantities()
        .iter()
        .map(|&x| Rational::from_integer(x.into()))
        .collect();
    let fractional = DivisibleInstance::new(
        (0..n)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        if instance.demand(i).contains(&j) {
                            Rational::one() / &q[j]
                        } else {
                            Rational::zero()
                        }
                    })
                    .collect()
            })
            .collect(),
    )?;
    let divisible = max_welfare_with_clearing(&fractional, grouping, Clearing::Relaxed)?;
    let (Allocation::Divisible(x), PriceSystem::Vector(unit)) = (&divisible.allocation, &divisible.prices) else {
        return Err(Error::Internal("divisible solver returned a foreign model".into()));
    };
    let counts: Vec<Vec<u64>> = x
        .iter()
        .map(|row| {
            row.iter()
                .zip(&q)
                .map(|(share, qj)| floor_to_u64(&(share * qj)).expect("shares are nonnegative"))
                .collect()
        })
        .collect();
    let prices = unit.iter().zip(&q).map(|(p, qj)| p / qj).collect();
    let mut solution = CaeiSolution::new(
        instance,
        Allocation::Discrete(counts),
        PriceSystem::Vector(prices),
        true,
        Clearing::Relaxed,
        "",
    )?;
    solution.solver = format!("relaxed-{}", divisible.solver);
    Ok(RelaxedOutcome { solution, divisible })
}

/// Per-copy prices supporting a fixed clearing allocation, or `Infeasible`.
pub fn prices_for_allocation_discrete(instance: &DiscreteInstance, counts: &[Vec<u64>]) -> Result<Vec<Rational>> {
    let (n, m) = (instance.num_agents(), instance.num_items());
    if counts.len() != n || counts.iter().any(|row| row.len() != m) {
        return Err(Error::InvalidInput(format!("allocation must be {n} x {m}")));
    }
    for (j, &qj) in instance.quantities().iter().enumerate() {
        let total: u64 = counts.iter().map(|row| row[j]).sum();
        if total != qj {
            return Err(Error::InvalidInput(format!(
                "item {j} has {qj} copies but the allocation hands out {total}"
            )));
        }
    }
    let mut lp = LinearProgram::maximize();
    let p: Vec<VarId> = (0..m).map(|j| lp.add_var(format!("p{j}"))).collect();
    let eps = lp.add_var_with("eps", LowerBound::Zero, Some(Rational::one()));
    lp.set_objective(vec![(eps, Rational::one())]);
    for i in 0..n {
        let bundle: Vec<(VarId, Rational)> = (0..m)
            .filter(|&j| counts[i][j] > 0)
            .map(|j| (p[j], Rational::from_integer(counts[i][j].into())))
            .collect();
        if !bundle.is_empty() {
            lp.add_constraint(bundle, Relation::Le, Rational::one());
        }
        if !instance.is_satisfied(i, &counts[i]) {
            let mut demand: Vec<(VarId, Rational)> =
                instance.demand(i).iter().map(|&j| (p[j], Rational::one())).collect();
            demand.push((eps, -Rational::one()));
            lp.add_constraint(demand, Relation::Ge, Rational::one());
        }
    }
    match simplex_solve(&lp)? {
        LpOutcome::Optimal(sol) if sol.value(eps).is_positive() => {
            Ok(p.iter().map(|&v| sol.value(v).clone()).collect())
        }
        _ => Err(Error::Infeasible),
    }
}
