//! Certificate checking and brute-force ground truth.
//!
//! [`verify_caei`] checks the three equilibrium conditions (clearing,
//! budgets, optimal bundles) for a claimed solution. The oracles enumerate
//! exhaustively and share no code with the solvers beyond the model types
//! and the exact LP backend.

mod fixtures;
mod oracle;

pub use fixtures::{
    cake_counterexample, discrete_counterexample, divisible_counterexample, Counterexample,
};
pub use oracle::{
    oracle_caei_search, oracle_discrete_caei_exists, oracle_max_satisfiable, CAKE_ORACLE_MAX_AGENTS,
    DISCRETE_ORACLE_MAX_AGENTS, DISCRETE_ORACLE_MAX_ITEMS, DISCRETE_ORACLE_MAX_QUANTITY,
    DIVISIBLE_ORACLE_MAX_AGENTS, SATISFIABLE_ORACLE_MAX_AGENTS,
};

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactmath::{Fraction, Rational};
use crate::model::{
    bundle_price, single_minded_utility, Allocation, Bundle, CaeiSolution, Clearing, InstanceRef,
    Piece, PriceSystem,
};

/// What a violation refers to.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Subject {
    Agent(usize),
    /// Good, item, or (for cake) `None` for the cake as a whole.
    Resource(Option<usize>),
    AgentPair(usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Condition {
    /// A share is negative or exceeds the supply.
    InvalidShare,
    /// Part of a resource is not handed out under full clearing.
    Unallocated,
    /// More than the supply is handed out.
    OverAllocated,
    /// Two cake pieces overlap in positive length.
    Overlap,
    /// The agent's bundle costs more than its budget.
    Overspend,
    /// An unserved agent could afford its demand.
    AffordableDemand,
}

impl Condition {
    pub fn name(self) -> &'static str {
        match self {
            Condition::InvalidShare => "invalid_share",
            Condition::Unallocated => "unallocated",
            Condition::OverAllocated => "over_allocated",
            Condition::Overlap => "overlap",
            Condition::Overspend => "overspend",
            Condition::AffordableDemand => "affordable_demand",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub subject: Subject,
    pub condition: Condition,
    /// How far the condition is missed; zero when an affordable demand
    /// costs exactly the threshold.
    pub magnitude: Rational,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.subject {
            Subject::Agent(i) => write!(f, "agent {i}")?,
            Subject::Resource(Some(j)) => write!(f, "resource {j}")?,
            Subject::Resource(None) => write!(f, "cake")?,
            Subject::AgentPair(a, b) => write!(f, "agents {a} and {b}")?,
        }
        write!(f, ": {} by {}", self.condition.name(), Fraction(&self.magnitude))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaeiReport {
    pub partition_ok: bool,
    pub budgets_ok: bool,
    pub optimal_bundles_ok: bool,
    pub is_caei: bool,
    /// CAEI with every agent spending its whole budget.
    pub is_ceei: bool,
    pub violations: Vec<Violation>,
}

struct Checker<'t> {
    tolerance: &'t Rational,
    violations: Vec<Violation>,
}

impl Checker<'_> {
    /// Records a violation when `excess` is beyond the tolerance.
    fn exceeds(&mut self, subject: Subject, condition: Condition, excess: Rational) -> bool {
        if &excess > self.tolerance {
            self.violations.push(Violation {
                subject,
                condition,
                magnitude: excess,
            });
            true
        } else {
            false
        }
    }
}

/// Checks whether `solution` is a CAEI (and a CEEI) for `instance`.
///
/// Conditions are compared with the given absolute tolerance; pass zero for
/// exact solutions. Under [`Clearing::Relaxed`] resources may remain unsold.
/// The solution's served set and welfare must agree with its allocation.
pub fn verify_caei<'a>(
    instance: impl Into<InstanceRef<'a>>,
    solution: &CaeiSolution,
    tolerance: &Rational,
    clearing: Clearing,
) -> Result<CaeiReport> {
    let instance = instance.into();
    if tolerance.is_negative() {
        return Err(Error::InvalidInput("tolerance must be nonnegative".into()));
    }
    check_shapes(instance, &solution.allocation, &solution.prices)?;
    let n = instance.num_agents();
    let mut served = BTreeSet::new();
    for i in 0..n {
        if single_minded_utility(instance, i, solution.allocation.bundle(i))? == 1 {
            served.insert(i);
        }
    }
    if served != solution.served || solution.welfare != served.len() {
        return Err(Error::InvalidInput(format!(
            "solution claims served set {:?} (welfare {}) but its allocation serves {:?}",
            solution.served, solution.welfare, served
        )));
    }

    let mut checker = Checker {
        tolerance,
        violations: Vec::new(),
    };
    let partition_ok = check_partition(instance, &solution.allocation, clearing, &mut checker);

    let one = Rational::one();
    let mut budgets_ok = true;
    let mut all_spent = true;
    for i in 0..n {
        let spend = bundle_price(&solution.prices, solution.allocation.bundle(i))?;
        if checker.exceeds(Subject::Agent(i), Condition::Overspend, &spend - &one) {
            budgets_ok = false;
        }
        if (&spend - &one).abs() > *tolerance {
            all_spent = false;
        }
    }

    let mut optimal_bundles_ok = true;
    for i in (0..n).filter(|i| !served.contains(i)) {
        let cost = bundle_price(&solution.prices, instance.demand(i))?;
        // Need cost > 1 - tolerance; with zero tolerance this is strict.
        let shortfall = &one - tolerance - &cost;
        if !shortfall.is_negative() {
            checker.violations.push(Violation {
                subject: Subject::Agent(i),
                condition: Condition::AffordableDemand,
                magnitude: shortfall,
            });
            optimal_bundles_ok = false;
        }
    }

    let is_caei = partition_ok && budgets_ok && optimal_bundles_ok;
    Ok(CaeiReport {
        partition_ok,
        budgets_ok,
        optimal_bundles_ok,
        is_caei,
        is_ceei: is_caei && all_spent,
        violations: checker.violations,
    })
}

fn check_shapes(instance: InstanceRef<'_>, allocation: &Allocation, prices: &PriceSystem) -> Result<()> {
    let n = instance.num_agents();
    if allocation.kind() != instance.kind() {
        return Err(Error::ModelMismatch(format!(
            "{} allocation for a {} instance",
            allocation.kind().name(),
            instance.kind().name()
        )));
    }
    if allocation.num_agents() != n {
        return Err(Error::ModelMismatch(format!(
            "allocation has {} bundles for {n} agents",
            allocation.num_agents()
        )));
    }
    let resources = match instance {
        InstanceRef::Divisible(d) => Some(d.num_goods()),
        InstanceRef::Discrete(d) => Some(d.num_items()),
        InstanceRef::Cake(_) => None,
    };
    match (prices, resources) {
        (PriceSystem::Vector(p), Some(m)) => {
            if p.len() != m {
                return Err(Error::ModelMismatch(format!("{} prices for {m} resources", p.len())));
            }
            if p.iter().any(Signed::is_negative) {
                return Err(Error::InvalidInput("negative price".into()));
            }
        }
        (PriceSystem::Curve(_), None) => {}
        _ => {
            return Err(Error::ModelMismatch(format!(
                "price system does not fit a {} instance",
                instance.kind().name()
            )))
        }
    }
    for i in 0..n {
        let len = match allocation.bundle(i) {
            Bundle::Divisible(x) => x.len(),
            Bundle::Discrete(x) => x.len(),
            Bundle::Cake(_) => continue,
        };
        if Some(len) != resources {
            return Err(Error::ModelMismatch(format!(
                "bundle of agent {i} has {len} entries, expected {}",
                resources.unwrap_or(0)
            )));
        }
    }
    Ok(())
}

fn check_partition(
    instance: InstanceRef<'_>,
    allocation: &Allocation,
    clearing: Clearing,
    checker: &mut Checker<'_>,
) -> bool {
    let before = checker.violations.len();
    let settle = |checker: &mut Checker<'_>, subject: Subject, total: Rational, supply: Rational| {
        if total > supply {
            checker.exceeds(subject, Condition::OverAllocated, total - supply);
        } else if clearing == Clearing::Full {
            checker.exceeds(subject, Condition::Unallocated, supply - total);
        }
    };
    match (instance, allocation) {
        (InstanceRef::Divisible(inst), Allocation::Divisible(x)) => {
            for j in 0..inst.num_goods() {
                let mut total = Rational::zero();
                for (i, row) in x.iter().enumerate() {
                    if row[j].is_negative() {
                        checker.exceeds(Subject::Agent(i), Condition::InvalidShare, -row[j].clone());
                    }
                    total += &row[j];
                }
                settle(checker, Subject::Resource(Some(j)), total, Rational::one());
            }
        }
        (InstanceRef::Discrete(inst), Allocation::Discrete(x)) => {
            for (j, &q) in inst.quantities().iter().enumerate() {
                let total: u64 = x.iter().map(|row| row[j]).sum();
                settle(
                    checker,
                    Subject::Resource(Some(j)),
                    Rational::from_integer(total.into()),
                    Rational::from_integer(q.into()),
                );
            }
        }
        (InstanceRef::Cake(_), Allocation::Cake(pieces)) => {
            for a in 0..pieces.len() {
                for b in a + 1..pieces.len() {
                    let overlap = pieces[a].overlap_length(&pieces[b]);
                    checker.exceeds(Subject::AgentPair(a, b), Condition::Overlap, overlap);
                }
            }
            let union = pieces.iter().fold(Piece::empty(), |acc, p| acc.union(p));
            settle(checker, Subject::Resource(None), union.length(), Rational::one());
        }
        _ => unreachable!("shapes checked before"),
    }
    checker.violations.len() == before
}

/// True iff no unserved agent sees its demand inside another agent's bundle.
///
/// For 0/1 single-minded utilities this is exactly the definition: a served
/// agent already has the maximum utility, and an unserved agent prefers
/// bundle `x_k` precisely when `x_k` contains its demand.
pub fn is_envy_free<'a>(instance: impl Into<InstanceRef<'a>>, allocation: &Allocation) -> Result<bool> {
    let instance = instance.into();
    let n = instance.num_agents();
    if allocation.num_agents() != n || allocation.kind() != instance.kind() {
        return Err(Error::ModelMismatch("allocation does not fit the instance".into()));
    }
    for i in 0..n {
        if single_minded_utility(instance, i, allocation.bundle(i))? == 1 {
            continue;
        }
        for k in (0..n).filter(|&k| k != i) {
            if single_minded_utility(instance, i, allocation.bundle(k))? == 1 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{int, rat};
    use crate::model::{CakeInstance, DiscreteInstance, PriceCurve};

    fn set(items: &[usize]) -> BTreeSet<usize> {
        items.iter().copied().collect()
    }

    fn cake_example() -> CakeInstance {
        CakeInstance::from_intervals(vec![
            vec![(int(0), rat(1, 2))],
            vec![(rat(1, 2), int(1))],
            vec![(int(0), int(1))],
        ])
        .unwrap()
    }

    #[test]
    fn uniform_cake_price_is_caei_not_ceei() {
        let inst = cake_example();
        let sol = CaeiSolution::new(
            &inst,
            Allocation::Cake(vec![
                Piece::interval(int(0), rat(1, 2)),
                Piece::interval(rat(1, 2), int(1)),
                Piece::empty(),
            ]),
            PriceSystem::Curve(PriceCurve::uniform(int(2))),
            true,
            Clearing::Full,
            "test",
        )
        .unwrap();
        let report = verify_caei(&inst, &sol, &int(0), Clearing::Full).unwrap();
        assert!(report.is_caei, "{:?}", report.violations);
        assert!(!report.is_ceei);
    }

    #[test]
    fn half_price_discrete_example_is_caei() {
        let inst = DiscreteInstance::new(vec![1, 2, 1], vec![set(&[0, 1]), set(&[1, 2])]).unwrap();
        let sol = CaeiSolution::new(
            &inst,
            Allocation::Discrete(vec![vec![1, 1, 0], vec![0, 1, 1]]),
            PriceSystem::Vector(vec![rat(1, 2); 3]),
            true,
            Clearing::Full,
            "test",
        )
        .unwrap();
        let report = verify_caei(&inst, &sol, &int(0), Clearing::Full).unwrap();
        assert!(report.is_caei && report.is_ceei);
    }

    #[test]
    fn divisible_counterexample_fails_at_unit_prices() {
        let ce = divisible_counterexample();
        let sol = CaeiSolution::new(
            &ce.instance,
            ce.allocation.clone(),
            PriceSystem::Vector(vec![int(1), int(1)]),
            true,
            Clearing::Full,
            "test",
        )
        .unwrap();
        let report = verify_caei(&ce.instance, &sol, &int(0), Clearing::Full).unwrap();
        assert!(!report.is_caei);
        assert!(report.partition_ok && report.budgets_ok && !report.optimal_bundles_ok);
    }

    #[test]
    fn affordable_unserved_agent_and_overlap_reported() {
        let inst = cake_example();
        let sol = CaeiSolution::new(
            &inst,
            Allocation::Cake(vec![
                Piece::interval(int(0), rat(3, 4)),
                Piece::interval(rat(1, 2), int(1)),
                Piece::empty(),
            ]),
            PriceSystem::Curve(PriceCurve::uniform(int(1))),
            true,
            Clearing::Full,
            "test",
        )
        .unwrap();
        let report = verify_caei(&inst, &sol, &int(0), Clearing::Full).unwrap();
        assert!(!report.partition_ok && !report.optimal_bundles_ok);
        assert!(report
            .violations
            .iter()
            .any(|v| v.condition == Condition::Overlap && v.magnitude == rat(1, 4)));
        assert!(report
            .violations
            .iter()
            .any(|v| v.subject == Subject::Agent(2) && v.condition == Condition::AffordableDemand));
    }

    #[test]
    fn inconsistent_served_claim_rejected() {
        let inst = cake_example();
        let mut sol = CaeiSolution::new(
            &inst,
            Allocation::Cake(vec![Piece::full(), Piece::empty(), Piece::empty()]),
            PriceSystem::Curve(PriceCurve::uniform(int(2))),
            true,
            Clearing::Full,
            "test",
        )
        .unwrap();
        sol.welfare = 3;
        assert!(verify_caei(&inst, &sol, &int(0), Clearing::Full).is_err());
    }

    #[test]
    fn envy_free_matches_definition() {
        let inst = DiscreteInstance::new(vec![1, 1], vec![set(&[0]), set(&[0, 1])]).unwrap();
        // Agent 0 holds agent 1's whole demand while agent 1 is unserved.
        let envy = Allocation::Discrete(vec![vec![1, 1], vec![0, 0]]);
        assert!(!is_envy_free(&inst, &envy).unwrap());
        let fine = Allocation::Discrete(vec![vec![1, 0], vec![0, 1]]);
        assert!(is_envy_free(&inst, &fine).unwrap());
        let d = divisible_counterexample();
        assert!(is_envy_free(&d.instance, &d.allocation).unwrap());
        let c = cake_counterexample();
        assert!(is_envy_free(&c.instance, &c.allocation).unwrap());
        let k = discrete_counterexample();
        assert!(is_envy_free(&k.instance, &k.allocation).unwrap());
    }

    #[test]
    fn envy_reduction_agrees_with_pairwise_utilities() {
        // Definitional form: agent i envies k iff V_i(x_k) > V_i(x_i).
        let inst = DiscreteInstance::new(vec![2, 1, 1], vec![set(&[0]), set(&[0, 1]), set(&[1, 2])]).unwrap();
        let mut counts = vec![vec![0u64; 3]; 3];
        let mut ways = Vec::new();
        // Enumerate every clearing allocation of the four copies.
        fn rec(item: usize, left: u64, agent: usize, q: &[u64], cur: &mut Vec<Vec<u64>>, out: &mut Vec<Vec<Vec<u64>>>) {
            if item == q.len() {
                out.push(cur.clone());
                return;
            }
            if agent == cur.len() - 1 {
                cur[agent][item] = left;
                let next = if item + 1 < q.len() { q[item + 1] } else { 0 };
                rec(item + 1, next, 0, q, cur, out);
                cur[agent][item] = 0;
                return;
            }
            for c in 0..=left {
                cur[agent][item] = c;
                rec(item, left - c, agent + 1, q, cur, out);
            }
            cur[agent][item] = 0;
        }
        rec(0, 2, 0, &[2, 1, 1], &mut counts, &mut ways);
        assert_eq!(ways.len(), 6 * 3 * 3);
        for x in ways {
            let alloc = Allocation::Discrete(x);
            let util = |i: usize, k: usize| single_minded_utility(&inst, i, alloc.bundle(k)).unwrap();
            let definitional = (0..3).all(|i| (0..3).all(|k| util(i, k) <= util(i, i)));
            assert_eq!(is_envy_free(&inst, &alloc).unwrap(), definitional);
        }
    }
}
