use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactmath::{simplex_solve, Fraction, LinearProgram, LowerBound, LpOutcome, Rational, Relation, VarId};
use crate::model::DivisibleInstance;

fn check_allocation(instance: &DivisibleInstance, x: &[Vec<Rational>]) -> Result<()> {
    let (n, m) = (instance.num_agents(), instance.num_goods());
    if x.len() != n || x.iter().any(|row| row.len() != m) {
        return Err(Error::InvalidInput(format!("allocation must be {n} x {m}")));
    }
    for j in 0..m {
        if let Some(i) = (0..n).find(|&i| x[i][j].is_negative()) {
            return Err(Error::InvalidInput(format!(
                "agent {i} holds a negative share {} of good {j}",
                Fraction(&x[i][j])
            )));
        }
        let total = x.iter().fold(Rational::zero(), |acc, row| acc + &row[j]);
        if !total.is_one() {
            return Err(Error::InvalidInput(format!(
                "good {j} is allocated {} times instead of exactly once",
                Fraction(&total)
            )));
        }
    }
    Ok(())
}

/// Prices supporting a fixed clearing allocation, or `Infeasible`.
///
/// Maximizes a margin `eps ≤ 1` subject to every agent affording its own
/// bundle and every unserved agent's demand costing at least `1 + eps`.
pub fn prices_for_allocation(instance: &DivisibleInstance, x: &[Vec<Rational>]) -> Result<Vec<Rational>> {
    check_allocation(instance, x)?;
    let (n, m) = (instance.num_agents(), instance.num_goods());
    let mut lp = LinearProgram::maximize();
    let p: Vec<VarId> = (0..m).map(|j| lp.add_var(format!("p{j}"))).collect();
    let eps = lp.add_var_with("eps", LowerBound::Zero, Some(Rational::one()));
    lp.set_objective(vec![(eps, Rational::one())]);
    let row = |values: &[Rational]| -> Vec<(VarId, Rational)> {
        (0..m)
            .filter(|&j| values[j].is_positive())
            .map(|j| (p[j], values[j].clone()))
            .collect()
    };
    for i in 0..n {
        lp.add_constraint(row(&x[i]), Relation::Le, Rational::one());
        if !instance.is_satisfied(i, &x[i]) {
            let mut demand = row(instance.demand(i));
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

/// A clearing allocation in which every agent that can afford its demand at
/// `prices` receives it and nobody overspends, or `Infeasible`.
pub fn allocation_for_prices(instance: &DivisibleInstance, prices: &[Rational]) -> Result<Vec<Vec<Rational>>> {
    let (n, m) = (instance.num_agents(), instance.num_goods());
    if prices.len() != m {
        return Err(Error::InvalidInput(format!("{} prices for {m} goods", prices.len())));
    }
    if prices.iter().any(Signed::is_negative) {
        return Err(Error::InvalidInput("negative price".into()));
    }
    let affords = |i: usize| {
        instance
            .demand(i)
            .iter()
            .zip(prices)
            .fold(Rational::zero(), |acc, (v, p)| acc + v * p)
            <= Rational::one()
    };
    let mut lp = LinearProgram::maximize();
    let x: Vec<Vec<VarId>> = (0..n)
        .map(|i| (0..m).map(|j| lp.add_var(format!("x{i}_{j}"))).collect())
        .collect();
    for j in 0..m {
        lp.add_constraint(
            (0..n).map(|i| (x[i][j], Rational::one())).collect(),
            Relation::Eq,
            Rational::one(),
        );
    }
    for i in 0..n {
        let spend: Vec<(VarId, Rational)> = (0..m)
            .filter(|&j| prices[j].is_positive())
            .map(|j| (x[i][j], prices[j].clone()))
            .collect();
        if !spend.is_empty() {
            lp.add_constraint(spend, Relation::Le, Rational::one());
        }
        if affords(i) {
            for j in (0..m).filter(|&j| instance.demand(i)[j].is_positive()) {
                lp.add_constraint(vec![(x[i][j], Rational::one())], Relation::Ge, instance.demand(i)[j].clone());
            }
        }
    }
    match simplex_solve(&lp)? {
        LpOutcome::Optimal(sol) => Ok(x
            .iter()
            .map(|row| row.iter().map(|&v| sol.value(v).clone()).collect())
            .collect()),
        _ => Err(Error::Infeasible),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{int, rat};

    fn example() -> DivisibleInstance {
        DivisibleInstance::new(vec![vec![rat(1, 2), rat(2, 5)], vec![int(0), rat(3, 5)]]).unwrap()
    }

    #[test]
    fn counterexample_allocation_has_no_prices() {
        let inst = DivisibleInstance::new(vec![vec![rat(1, 5), rat(1, 5)], vec![rat(4, 5), rat(4, 5)]]).unwrap();
        let x = vec![vec![int(1), int(0)], vec![int(0), int(1)]];
        assert_eq!(prices_for_allocation(&inst, &x), Err(Error::Infeasible));
    }

    #[test]
    fn serving_allocation_is_supported() {
        let x = vec![vec![int(1), rat(2, 5)], vec![int(0), rat(3, 5)]];
        let p = prices_for_allocation(&example(), &x).unwrap();
        assert!(p.iter().all(|v| !v.is_negative()));
        let single = DivisibleInstance::new(vec![vec![rat(1, 2)]]).unwrap();
        assert_eq!(prices_for_allocation(&single, &[vec![int(1)]]).unwrap(), vec![int(0)]);
    }

    #[test]
    fn malformed_allocation_rejected() {
        let x = vec![vec![int(1), rat(2, 5)], vec![int(0), rat(2, 5)]];
        assert!(matches!(prices_for_allocation(&example(), &x), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn allocation_at_given_prices() {
        let x = allocation_for_prices(&example(), &[rat(1, 3), rat(5, 3)]).unwrap();
        assert!(example().is_satisfied(0, &x[0]) && example().is_satisfied(1, &x[1]));
        let triple = DivisibleInstance::new(vec![vec![rat(1, 2)]; 3]).unwrap();
        assert_eq!(allocation_for_prices(&triple, &[int(1)]), Err(Error::Infeasible));
        let x = allocation_for_prices(&example(), &[int(0), int(0)]).unwrap();
        assert!(example().is_satisfied(0, &x[0]) && example().is_satisfied(1, &x[1]));
    }
}
