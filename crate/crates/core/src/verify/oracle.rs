use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactmath::{simplex_solve, LinearProgram, LowerBound, LpOutcome, Rational, Relation, VarId};
use crate::model::{
    Allocation, CaeiSolution, CakeInstance, Clearing, DiscreteInstance, DivisibleInstance,
    InstanceRef, Piece, PriceCurve, PriceSystem,
};

pub const SATISFIABLE_ORACLE_MAX_AGENTS: usize = 20;
pub const DIVISIBLE_ORACLE_MAX_AGENTS: usize = 6;
pub const CAKE_ORACLE_MAX_AGENTS: usize = 6;
pub const DISCRETE_ORACLE_MAX_AGENTS: usize = 4;
pub const DISCRETE_ORACLE_MAX_ITEMS: usize = 3;
pub const DISCRETE_ORACLE_MAX_QUANTITY: u64 = 2;

/// All subsets of `0..n`, largest first, lexicographic within a size.
fn subsets_largest_first(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..=n).rev().flat_map(move |k| {
        let mut idx: Vec<usize> = (0..k).collect();
        let mut done = false;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            let out = idx.clone();
            // Advance to the next k-combination in lexicographic order.
            match (0..k).rev().find(|&t| idx[t] < n - k + t) {
                Some(t) => {
                    idx[t] += 1;
                    for u in t + 1..k {
                        idx[u] = idx[u - 1] + 1;
                    }
                }
                None => done = true,
            }
            Some(out)
        })
    })
}

/// Largest set of agents whose demands fit together, ignoring prices.
/// Returns the welfare and the lexicographically smallest witness.
pub fn oracle_max_satisfiable<'a>(instance: impl Into<InstanceRef<'a>>) -> Result<(usize, Vec<usize>)> {
    let instance = instance.into();
    let n = instance.num_agents();
    if n > SATISFIABLE_ORACLE_MAX_AGENTS {
        return Err(Error::GuardExceeded(format!(
            "{n} agents, at most {SATISFIABLE_ORACLE_MAX_AGENTS} supported"
        )));
    }
    let fits = |set: &[usize]| -> bool {
        match instance {
            InstanceRef::Divisible(d) => (0..d.num_goods()).all(|j| {
                set.iter().fold(Rational::zero(), |acc, &i| acc + &d.demand(i)[j]) <= Rational::one()
            }),
            InstanceRef::Cake(c) => set.iter().enumerate().all(|(a, &i)| {
                set[a + 1..]
                    .iter()
                    .all(|&k| c.demand(i).interior_disjoint(c.demand(k)))
            }),
            InstanceRef::Discrete(d) => d
                .quantities()
                .iter()
                .enumerate()
                .all(|(j, &q)| set.iter().filter(|&&i| d.demand(i).contains(&j)).count() as u64 <= q),
        }
    };
    let witness = subsets_largest_first(n)
        .find(|s| fits(s))
        .expect("the empty set always fits");
    Ok((witness.len(), witness))
}

/// Maximum-welfare CAEI by exhaustive search, or `NoCaei` when none exists.
pub fn oracle_caei_search<'a>(instance: impl Into<InstanceRef<'a>>) -> Result<CaeiSolution> {
    match instance.into() {
        InstanceRef::Divisible(d) => divisible_search(d),
        InstanceRef::Cake(c) => cake_search(c),
        InstanceRef::Discrete(d) => discrete_search(d),
    }
}

/// Equilibrium support for a fixed served set over goods with unit supply.
/// Returns prices and money flows `spend[i][j]`, or `None`.
fn support_for(demands: &[Vec<Rational>], served: &[bool]) -> Result<Option<(Vec<Rational>, Vec<Vec<Rational>>)>> {
    let n = demands.len();
    let m = demands[0].len();
    for j in 0..m {
        let load = (0..n)
            .filter(|&i| served[i])
            .fold(Rational::zero(), |acc, i| acc + &demands[i][j]);
        if load > Rational::one() {
            return Ok(None);
        }
    }
    let mut lp = LinearProgram::maximize();
    let price: Vec<VarId> = (0..m).map(|j| lp.add_var(format!("price{j}"))).collect();
    let spend: Vec<Vec<VarId>> = (0..n)
        .map(|i| (0..m).map(|j| lp.add_var(format!("spend{i}_{j}"))).collect())
        .collect();
    let margin = lp.add_var_with("margin", LowerBound::Zero, Some(Rational::one()));
    lp.set_objective(vec![(margin, Rational::one())]);
    for j in 0..m {
        let mut row: Vec<(VarId, Rational)> = (0..n).map(|i| (spend[i][j], Rational::one())).collect();
        row.push((price[j], -Rational::one()));
        lp.add_constraint(row, Relation::Eq, Rational::zero());
    }
    for i in 0..n {
        lp.add_constraint(
            spend[i].iter().map(|&v| (v, Rational::one())).collect(),
            Relation::Le,
            Rational::one(),
        );
        if served[i] {
            for j in (0..m).filter(|&j| demands[i][j].is_positive()) {
                lp.add_constraint(
                    vec![(spend[i][j], Rational::one()), (price[j], -demands[i][j].clone())],
                    Relation::Ge,
                    Rational::zero(),
                );
            }
        } else {
            let mut row: Vec<(VarId, Rational)> = (0..m)
                .filter(|&j| demands[i][j].is_positive())
                .map(|j| (price[j], demands[i][j].clone()))
                .collect();
            row.push((margin, -Rational::one()));
            lp.add_constraint(row, Relation::Ge, Rational::one());
        }
    }
    let LpOutcome::Optimal(sol) = simplex_solve(&lp)? else {
        return Ok(None);
    };
    if !sol.value(margin).is_positive() {
        return Ok(None);
    }
    let prices = price.iter().map(|&v| sol.value(v).clone()).collect();
    let flows = spend
        .iter()
        .map(|row| row.iter().map(|&v| sol.value(v).clone()).collect())
        .collect();
    Ok(Some((prices, flows)))
}

/// Shares of each unit good: bought goods split by money, free goods give
/// each served agent its demand and the rest to the last agent.
fn shares_from_flows(
    demands: &[Vec<Rational>],
    served: &[bool],
    prices: &[Rational],
    flows: &[Vec<Rational>],
) -> Vec<Vec<Rational>> {
    let n = demands.len();
    let mut x = vec![vec![Rational::zero(); prices.len()]; n];
    for (j, p) in prices.iter().enumerate() {
        if p.is_positive() {
            for i in 0..n {
                x[i][j] = &flows[i][j] / p;
            }
        } else {
            let mut rest = Rational::one();
            for i in (0..n).filter(|&i| served[i]) {
                x[i][j] = demands[i][j].clone();
                rest -= &demands[i][j];
            }
            x[n - 1][j] += rest;
        }
    }
    x
}

fn divisible_search(inst: &DivisibleInstance) -> Result<CaeiSolution> {
    let n = inst.num_agents();
    if n > DIVISIBLE_ORACLE_MAX_AGENTS {
        return Err(Error::GuardExceeded(format!(
            "{n} agents, at most {DIVISIBLE_ORACLE_MAX_AGENTS} supported"
        )));
    }
    for set in subsets_largest_first(n) {
        let served: Vec<bool> = (0..n).map(|i| set.contains(&i)).collect();
        if let Some((prices, flows)) = support_for(inst.demands(), &served)? {
            let x = shares_from_flows(inst.demands(), &served, &prices, &flows);
            return CaeiSolution::new(
                inst,
                Allocation::Divisible(x),
                PriceSystem::Vector(prices),
                true,
                Clearing::Full,
                "oracle",
            );
        }
    }
    Err(Error::NoCaei)
}

fn cake_search(inst: &CakeInstance) -> Result<CaeiSolution> {
    let n = inst.num_agents();
    if n > CAKE_ORACLE_MAX_AGENTS {
        return Err(Error::GuardExceeded(format!(
            "{n} agents, at most {CAKE_ORACLE_MAX_AGENTS} supported"
        )));
    }
    // Cells between consecutive demand endpoints; demand of a cell is all or nothing.
    let mut cuts: BTreeSet<Rational> = [Rational::zero(), Rational::one()].into_iter().collect();
    for d in inst.demands() {
        cuts.extend(d.endpoints().cloned());
    }
    let cuts: Vec<Rational> = cuts.into_iter().collect();
    let cells: Vec<Piece> = cuts
        .windows(2)
        .map(|w| Piece::interval(w[0].clone(), w[1].clone()))
        .collect();
    let demands: Vec<Vec<Rational>> = inst
        .demands()
        .iter()
        .map(|d| {
            cells
                .iter()
                .map(|c| if d.contains(c) { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect();
    for set in subsets_largest_first(n) {
        let served: Vec<bool> = (0..n).map(|i| set.contains(&i)).collect();
        let Some((prices, flows)) = support_for(&demands, &served)? else {
            continue;
        };
        let x = shares_from_flows(&demands, &served, &prices, &flows);
        let mut pieces = vec![Piece::empty(); n];
        for (j, w) in cuts.windows(2).enumerate() {
            let len = &w[1] - &w[0];
            let mut at = w[0].clone();
            for i in 0..n {
                if x[i][j].is_positive() {
                    let end = &at + &len * &x[i][j];
                    pieces[i] = pieces[i].union(&Piece::interval(at.clone(), end.clone()));
                    at = end;
                }
            }
        }
        let curve = PriceCurve::from_cells(&cuts, &prices)?;
        return CaeiSolution::new(
            inst,
            Allocation::Cake(pieces),
            PriceSystem::Curve(curve),
            true,
            Clearing::Full,
            "oracle",
        );
    }
    Err(Error::NoCaei)
}

/// Every way to hand out `q` identical copies among `n` agents.
fn compositions(q: u64, n: usize) -> Vec<Vec<u64>> {
    if n == 1 {
        return vec![vec![q]];
    }
    let mut out = Vec::new();
    for first in (0..=q).rev() {
        for mut rest in compositions(q - first, n - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn discrete_guard(inst: &DiscreteInstance) -> Result<()> {
    let max_q = inst.quantities().iter().copied().max().unwrap_or(0);
    if inst.num_agents() > DISCRETE_ORACLE_MAX_AGENTS
        || inst.num_items() > DISCRETE_ORACLE_MAX_ITEMS
        || max_q > DISCRETE_ORACLE_MAX_QUANTITY
    {
        return Err(Error::GuardExceeded(format!(
            "{} agents, {} items, up to {max_q} copies; at most {DISCRETE_ORACLE_MAX_AGENTS}, \
             {DISCRETE_ORACLE_MAX_ITEMS} and {DISCRETE_ORACLE_MAX_QUANTITY} supported",
            inst.num_agents(),
            inst.num_items()
        )));
    }
    Ok(())
}

/// All clearing allocations as `counts[i][j]`, with their served sets.
fn clearing_allocations(inst: &DiscreteInstance) -> Vec<(Vec<Vec<u64>>, Vec<bool>)> {
    let n = inst.num_agents();
    let per_item: Vec<Vec<Vec<u64>>> = inst.quantities().iter().map(|&q| compositions(q, n)).collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; per_item.len()];
    loop {
        let counts: Vec<Vec<u64>> = (0..n)
            .map(|i| (0..per_item.len()).map(|j| per_item[j][choice[j]][i]).collect())
            .collect();
        let served = (0..n).map(|i| inst.is_satisfied(i, &counts[i])).collect();
        out.push((counts, served));
        let Some(j) = (0..choice.len()).rev().find(|&j| choice[j] + 1 < per_item[j].len()) else {
            break;
        };
        choice[j] += 1;
        for c in &mut choice[j + 1..] {
            *c = 0;
        }
    }
    out
}

/// Per-copy prices supporting a discrete allocation, if any.
fn discrete_support(inst: &DiscreteInstance, counts: &[Vec<u64>], served: &[bool]) -> Result<Option<Vec<Rational>>> {
    let n = inst.num_agents();
    let m = inst.num_items();
    // An unserved agent seeing its demand in someone else's hands can never be priced out.
    for i in (0..n).filter(|&i| !served[i]) {
        if (0..n).any(|k| inst.is_satisfied(i, &counts[k])) {
            return Ok(None);
        }
    }
    let mut lp = LinearProgram::maximize();
    let price: Vec<VarId> = (0..m).map(|j| lp.add_var(format!("price{j}"))).collect();
    let margin = lp.add_var_with("margin", LowerBound::Zero, Some(Rational::one()));
    lp.set_objective(vec![(margin, Rational::one())]);
    for i in 0..n {
        let row: Vec<(VarId, Rational)> = (0..m)
            .filter(|&j| counts[i][j] > 0)
            .map(|j| (price[j], Rational::from_integer(counts[i][j].into())))
            .collect();
        if !row.is_empty() {
            lp.add_constraint(row, Relation::Le, Rational::one());
        }
        if !served[i] {
            let mut row: Vec<(VarId, Rational)> =
                inst.demand(i).iter().map(|&j| (price[j], Rational::one())).collect();
            row.push((margin, -Rational::one()));
            lp.add_constraint(row, Relation::Ge, Rational::one());
        }
    }
    let LpOutcome::Optimal(sol) = simplex_solve(&lp)? else {
        return Ok(None);
    };
    if !sol.value(margin).is_positive() {
        return Ok(None);
    }
    Ok(Some(price.iter().map(|&v| sol.value(v).clone()).collect()))
}

fn discrete_search(inst: &DiscreteInstance) -> Result<CaeiSolution> {
    discrete_guard(inst)?;
    let mut all = clearing_allocations(inst);
    // Stable sort keeps enumeration order within a welfare level.
    all.sort_by_key(|(_, served)| std::cmp::Reverse(served.iter().filter(|&&s| s).count()));
    for (counts, served) in all {
        if let Some(prices) = discrete_support(inst, &counts, &served)? {
            return CaeiSolution::new(
                inst,
                Allocation::Discrete(counts),
                PriceSystem::Vector(prices),
                true,
                Clearing::Full,
                "oracle",
            );
        }
    }
    Err(Error::NoCaei)
}

/// Whether any clearing allocation of a small discrete instance is price-supported.
pub fn oracle_discrete_caei_exists(inst: &DiscreteInstance) -> Result<bool> {
    discrete_guard(inst)?;
    for (counts, served) in clearing_allocations(inst) {
        if discrete_support(inst, &counts, &served)?.is_some() {
            return Ok(true);
        }
    }
    Ok(false)
}
