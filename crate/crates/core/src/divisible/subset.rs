use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactmath::{simplex_solve, LinearProgram, LowerBound, LpOutcome, Rational, Relation, VarId};
use crate::model::{
    group_types, Allocation, CaeiSolution, Clearing, DivisibleInstance, Grouping, PriceSystem,
};
use crate::verify::verify_caei;

/// Prices and allocation serving exactly `served`, or `Infeasible`.
///
/// Maximizes a strictness margin `eps ≤ 1` over prices `p`, money flows
/// `m[i][j]` and `eps`: served agents afford their demand and spend at least
/// `p_j v_ij` on each good, unserved agents face a demand price of at least
/// `1 + eps`, each good's flows sum to its price (at most its price under
/// relaxed clearing), and nobody spends more than 1. Feasible iff `eps > 0`.
/// Among solutions with the optimal margin, the total demand price of the
/// served agents is maximized.
pub fn subset_caei_lp(
    instance: &DivisibleInstance,
    served: &BTreeSet<usize>,
    clearing: Clearing,
) -> Result<CaeiSolution> {
    let n = instance.num_agents();
    let m = instance.num_goods();
    if let Some(&i) = served.iter().find(|&&i| i >= n) {
        return Err(Error::InvalidInput(format!("agent {i} out of range for {n} agents")));
    }
    let v = instance.demands();
    for j in 0..m {
        let load = served.iter().fold(Rational::zero(), |acc, &i| acc + &v[i][j]);
        if load > Rational::one() {
            return Err(Error::Infeasible);
        }
    }

    let mut lp = LinearProgram::maximize();
    let p: Vec<VarId> = (0..m).map(|j| lp.add_var(format!("p{j}"))).collect();
    let money: Vec<Vec<VarId>> = (0..n)
        .map(|i| (0..m).map(|j| lp.add_var(format!("m{i}_{j}"))).collect())
        .collect();
    let eps = lp.add_var_with("eps", LowerBound::Zero, Some(Rational::one()));
    lp.set_objective(vec![(eps, Rational::one())]);

    let demand_row = |i: usize| -> Vec<(VarId, Rational)> {
        (0..m)
            .filter(|&j| v[i][j].is_positive())
            .map(|j| (p[j], v[i][j].clone()))
            .collect()
    };
    for i in 0..n {
        if served.contains(&i) {
            lp.add_constraint(demand_row(i), Relation::Le, Rational::one());
            for j in (0..m).filter(|&j| v[i][j].is_positive()) {
                lp.add_constraint(
                    vec![(money[i][j], Rational::one()), (p[j], -v[i][j].clone())],
                    Relation::Ge,
                    Rational::zero(),
                );
            }
        } else {
            let mut row = demand_row(i);
            row.push((eps, -Rational::one()));
            lp.add_constraint(row, Relation::Ge, Rational::one());
        }
        lp.add_constraint(
            money[i].iter().map(|&x| (x, Rational::one())).collect(),
            Relation::Le,
            Rational::one(),
        );
    }
    let clearing_relation = match clearing {
        Clearing::Full => Relation::Eq,
        Clearing::Relaxed => Relation::Le,
    };
    for j in 0..m {
        let mut row: Vec<(VarId, Rational)> = (0..n).map(|i| (money[i][j], Rational::one())).collect();
        row.push((p[j], -Rational::one()));
        lp.add_constraint(row, clearing_relation, Rational::zero());
    }

    let LpOutcome::Optimal(first) = simplex_solve(&lp)? else {
        return Err(Error::Infeasible);
    };
    if !first.value(eps).is_positive() {
        return Err(Error::Infeasible);
    }
    // Keep the margin, then price the served demands as high as budgets allow.
    lp.add_constraint(vec![(eps, Rational::one())], Relation::Ge, first.value(eps).clone());
    lp.set_objective(served.iter().flat_map(|&i| demand_row(i)).collect());
    let LpOutcome::Optimal(sol) = simplex_solve(&lp)? else {
        return Err(Error::Internal("second LP phase lost feasibility".into()));
    };

    let prices: Vec<Rational> = p.iter().map(|&x| sol.value(x).clone()).collect();
    let mut x = vec![vec![Rational::zero(); m]; n];
    for j in 0..m {
        if prices[j].is_positive() {
            for i in 0..n {
                x[i][j] = sol.value(money[i][j]) / &prices[j];
            }
        } else {
            let mut rest = Rational::one();
            for &i in served {
                x[i][j] = v[i][j].clone();
                rest -= &v[i][j];
            }
            x[0][j] += rest;
        }
    }
    let solution = CaeiSolution::new(
        instance,
        Allocation::Divisible(x),
        PriceSystem::Vector(prices),
        true,
        clearing,
        "subset-lp",
    )?;
    let report = verify_caei(instance, &solution, &Rational::zero(), clearing)?;
    if !report.is_caei || &solution.served != served {
        return Err(Error::Internal(format!(
            "subset LP solution for {served:?} failed verification: {:?}",
            report.violations
        )));
    }
    Ok(solution)
}

/// Maximum-welfare CAEI with full clearing.
///
/// Candidate served sets are tried in decreasing size, ties in
/// lexicographic order; under [`Grouping::ByTypes`] only unions of whole
/// types are candidates, since identical agents always face the same price.
pub fn max_welfare_caei(instance: &DivisibleInstance, grouping: Grouping) -> Result<CaeiSolution> {
    max_welfare_with_clearing(instance, grouping, Clearing::Full)
}

pub(crate) fn max_welfare_with_clearing(
    instance: &DivisibleInstance,
    grouping: Grouping,
    clearing: Clearing,
) -> Result<CaeiSolution> {
    for served in candidate_sets(instance, grouping) {
        if dominated_outsider(instance, &served) {
            continue;
        }
        match subset_caei_lp(instance, &served, clearing) {
            Ok(mut solution) => {
                solution.solver = format!(
                    "max-welfare/{}",
                    match grouping {
                        Grouping::ByTypes => "types",
                        Grouping::ByAgents => "agents",
                    }
                );
                return Ok(solution);
            }
            Err(Error::Infeasible) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::NoCaei)
}

/// Served-set candidates, largest first, lexicographic within a size.
fn candidate_sets(instance: &DivisibleInstance, grouping: Grouping) -> Vec<BTreeSet<usize>> {
    let blocks: Vec<Vec<usize>> = match grouping {
        Grouping::ByAgents => (0..instance.num_agents()).map(|i| vec![i]).collect(),
        Grouping::ByTypes => group_types(instance).members,
    };
    let k = blocks.len();
    assert!(k < usize::BITS as usize, "too many blocks to enumerate");
    let mut sets: Vec<Vec<usize>> = (0..1usize << k)
        .map(|mask| {
            let mut s: Vec<usize> = (0..k)
                .filter(|b| mask >> b & 1 == 1)
                .flat_map(|b| blocks[b].iter().copied())
                .collect();
            s.sort_unstable();
            s
        })
        .collect();
    sets.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    sets.into_iter().map(|s| s.into_iter().collect()).collect()
}

/// An outsider whose demand is componentwise at most a served agent's demand
/// could afford it, so the set cannot be supported.
fn dominated_outsider(instance: &DivisibleInstance, served: &BTreeSet<usize>) -> bool {
    (0..instance.num_agents())
        .filter(|i| !served.contains(i))
        .any(|i| {
            served.iter().any(|&k| {
                instance
                    .demand(i)
                    .iter()
                    .zip(instance.demand(k))
                    .all(|(a, b)| a <= b)
            })
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{int, rat};

    fn example() -> DivisibleInstance {
        DivisibleInstance::new(vec![vec![rat(1, 2), rat(2, 5)], vec![int(0), rat(3, 5)]]).unwrap()
    }

    fn set(items: &[usize]) -> BTreeSet<usize> {
        items.iter().copied().collect()
    }

    #[test]
    fn serves_both_agents_of_two_good_example() {
        let sol = subset_caei_lp(&example(), &set(&[0, 1]), Clearing::Full).unwrap();
        assert_eq!(sol.welfare, 2);
        assert_eq!(sol.prices, PriceSystem::Vector(vec![rat(1, 3), rat(5, 3)]));
    }

    #[test]
    fn identical_agents_cannot_be_separated() {
        let inst = DivisibleInstance::new(vec![vec![rat(1, 2)]; 3]).unwrap();
        assert_eq!(subset_caei_lp(&inst, &set(&[0]), Clearing::Full), Err(Error::Infeasible));
        let none = subset_caei_lp(&inst, &set(&[]), Clearing::Full).unwrap();
        assert_eq!(none.welfare, 0);
        assert_eq!(none.prices, PriceSystem::Vector(vec![int(3)]));
        assert_eq!(
            none.allocation,
            Allocation::Divisible(vec![vec![rat(1, 3)]; 3])
        );
    }

    #[test]
    fn over_demanded_set_fails_precheck() {
        let inst = DivisibleInstance::new(vec![vec![rat(3, 4)], vec![rat(1, 2)]]).unwrap();
        assert_eq!(subset_caei_lp(&inst, &set(&[0, 1]), Clearing::Full), Err(Error::Infeasible));
    }

    #[test]
    fn max_welfare_examples() {
        assert_eq!(max_welfare_caei(&example(), Grouping::ByAgents).unwrap().welfare, 2);
        let triple = DivisibleInstance::new(vec![vec![rat(1, 2)]; 3]).unwrap();
        let sol = max_welfare_caei(&triple, Grouping::ByTypes).unwrap();
        assert_eq!(sol.welfare, 0);
        assert_eq!(sol.prices, PriceSystem::Vector(vec![int(3)]));
        let single = DivisibleInstance::new(vec![vec![rat(1, 5)]]).unwrap();
        assert_eq!(max_welfare_caei(&single, Grouping::ByAgents).unwrap().welfare, 1);
    }

    #[test]
    fn candidate_order() {
        let inst = DivisibleInstance::new(vec![vec![rat(1, 2)], vec![rat(1, 2)], vec![rat(1, 3)]]).unwrap();
        let by_types = candidate_sets(&inst, Grouping::ByTypes);
        assert_eq!(by_types, vec![set(&[0, 1, 2]), set(&[0, 1]), set(&[2]), set(&[])]);
        let by_agents = candidate_sets(&inst, Grouping::ByAgents);
        assert_eq!(by_agents.len(), 8);
        assert_eq!(by_agents[1], set(&[0, 1]));
        assert_eq!(by_agents[3], set(&[1, 2]));
    }
}
