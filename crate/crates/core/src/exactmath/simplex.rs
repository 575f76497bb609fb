//! Dense two-phase primal simplex over exact rationals.
//!
//! Pivoting follows Bland's rule (lowest-index entering column, lowest-index
//! basic variable among ratio-test ties), so the method terminates on
//! degenerate programs and always returns the same vertex for the same input.

use std::fmt;

use num_traits::{Signed, Zero};

use super::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    fn flipped(self) -> Self {
        match self {
            Relation::Le => Relation::Ge,
            Relation::Ge => Relation::Le,
            Relation::Eq => Relation::Eq,
        }
    }

    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LowerBound {
    Zero,
    Free,
}

#[derive(Clone, Debug)]
pub struct Variable {
    pub name: String,
    pub lower: LowerBound,
    pub upper: Option<Rational>,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<(VarId, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub sense: Sense,
    pub variables: Vec<Variable>,
    pub objective: Vec<(VarId, Rational)>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactMathError {
    #[error("variable {0} is referenced but not declared")]
    UndeclaredVariable(VarId),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpSolution {
    pub values: Vec<Rational>,
    pub objective: Rational,
}

impl LpSolution {
    pub fn value(&self, var: VarId) -> &Rational {
        &self.values[var.0]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(&self) -> Option<&LpSolution> {
        match self {
            LpOutcome::Optimal(sol) => Some(sol),
            _ => None,
        }
    }
}

impl LinearProgram {
    pub fn new(sense: Sense) -> Self {
        LinearProgram {
            sense,
            variables: Vec::new(),
            objective: Vec::new(),
            constraints: Vec::new(),
        }
    }

    pub fn maximize() -> Self {
        Self::new(Sense::Maximize)
    }

    pub fn minimize() -> Self {
        Self::new(Sense::Minimize)
    }

    /// Declares a variable with bounds `0 <= x < +inf`.
    pub fn add_var(&mut self, name: impl Into<String>) -> VarId {
        self.add_var_with(name, LowerBound::Zero, None)
    }

    pub fn add_var_with(
        &mut self,
        name: impl Into<String>,
        lower: LowerBound,
        upper: Option<Rational>,
    ) -> VarId {
        self.variables.push(Variable {
            name: name.into(),
            lower,
            upper,
        });
        VarId(self.variables.len() - 1)
    }

    pub fn set_objective(&mut self, terms: Vec<(VarId, Rational)>) {
        self.objective = terms;
    }

    pub fn add_constraint(&mut self, coeffs: Vec<(VarId, Rational)>, relation: Relation, rhs: Rational) {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn validate(&self) -> Result<(), ExactMathError> {
        let n = self.variables.len();
        let referenced = self
            .objective
            .iter()
            .chain(self.constraints.iter().flat_map(|c| c.coeffs.iter()));
        for (var, _) in referenced {
            if var.0 >= n {
                return Err(ExactMathError::UndeclaredVariable(*var));
            }
        }
        Ok(())
    }

    pub fn evaluate(terms: &[(VarId, Rational)], values: &[Rational]) -> Rational {
        terms
            .iter()
            .fold(Rational::zero(), |acc, (v, c)| acc + c * &values[v.0])
    }

    /// Exact check of every constraint and bound against `values`.
    pub fn is_feasible(&self, values: &[Rational]) -> bool {
        if values.len() != self.variables.len() {
            return false;
        }
        let bounds_ok = self.variables.iter().zip(values).all(|(var, x)| {
            (var.lower == LowerBound::Free || !x.is_negative())
                && var.upper.as_ref().is_none_or(|u| x <= u)
        });
        bounds_ok
            && self
                .constraints
                .iter()
                .all(|c| c.relation.holds(&Self::evaluate(&c.coeffs, values), &c.rhs))
    }
}

/// Solves `lp` exactly. Infeasible and unbounded programs are reported as
/// outcomes; only malformed programs produce an error.
pub fn simplex_solve(lp: &LinearProgram) -> Result<LpOutcome, ExactMathError> {
    lp.validate()?;
    let standard = StandardForm::build(lp);
    Ok(standard.solve(lp))
}

struct StandardForm {
    /// For each original variable: (positive part column, negative part column).
    columns: Vec<(usize, Option<usize>)>,
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    num_real: usize,
    num_total: usize,
    cost: Vec<Rational>,
}

impl StandardForm {
    fn build(lp: &LinearProgram) -> Self {
        let mut columns = Vec::with_capacity(lp.variables.len());
        let mut next = 0;
        for var in &lp.variables {
            let pos = next;
            next += 1;
            let neg = match var.lower {
                LowerBound::Zero => None,
                LowerBound::Free => {
                    next += 1;
                    Some(next - 1)
                }
            };
            columns.push((pos, neg));
        }
        let num_structural = next;

        // Dense structural rows, normalized to a nonnegative right-hand side.
        let mut raw: Vec<(Vec<Rational>, Relation, Rational)> = Vec::new();
        let mut push_row = |terms: &[(VarId, Rational)], relation: Relation, rhs: &Rational| {
            let mut row = vec![Rational::zero(); num_structural];
            for (var, coeff) in terms {
                let (pos, neg) = columns[var.0];
                row[pos] += coeff;
                if let Some(neg) = neg {
                    row[neg] -= coeff;
                }
            }
            if rhs.is_negative() {
                for c in row.iter_mut() {
                    *c = -&*c;
                }
                raw.push((row, relation.flipped(), -rhs));
            } else {
                raw.push((row, relation, rhs.clone()));
            }
        };
        for c in &lp.constraints {
            push_row(&c.coeffs, c.relation, &c.rhs);
        }
        for (i, var) in lp.variables.iter().enumerate() {
            if let Some(upper) = &var.upper {
                push_row(&[(VarId(i), Rational::from_integer(1.into()))], Relation::Le, upper);
            }
        }

        let slack_count = raw.iter().filter(|r| r.1 != Relation::Eq).count();
        let artificial_count = raw.iter().filter(|r| r.1 != Relation::Le).count();
        let num_real = num_structural + slack_count;
        let num_total = num_real + artificial_count;

        let one = Rational::from_integer(1.into());
        let mut rows = Vec::with_capacity(raw.len());
        let mut rhs = Vec::with_capacity(raw.len());
        let mut basis = Vec::with_capacity(raw.len());
        let mut slack = num_structural;
        let mut artificial = num_real;
        for (mut row, relation, b) in raw {
            row.resize(num_total, Rational::zero());
            match relation {
                Relation::Le => {
                    row[slack] = one.clone();
                    basis.push(slack);
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = -one.clone();
                    slack += 1;
                    row[artificial] = one.clone();
                    basis.push(artificial);
                    artificial += 1;
                }
                Relation::Eq => {
                    row[artificial] = one.clone();
                    basis.push(artificial);
                    artificial += 1;
                }
            }
            rows.push(row);
            rhs.push(b);
        }

        let mut cost = vec![Rational::zero(); num_structural];
        for (var, coeff) in &lp.objective {
            let c = match lp.sense {
                Sense::Maximize => coeff.clone(),
                Sense::Minimize => -coeff,
            };
            let (pos, neg) = columns[var.0];
            cost[pos] += &c;
            if let Some(neg) = neg {
                cost[neg] -= &c;
            }
        }

        StandardForm {
            columns,
            rows,
            rhs,
            basis,
            num_real,
            num_total,
            cost,
        }
    }

    fn solve(mut self, lp: &LinearProgram) -> LpOutcome {
        if self.num_total > self.num_real {
            let mut phase_one = vec![Rational::zero(); self.num_total];
            for c in phase_one.iter_mut().skip(self.num_real) {
                *c = Rational::from_integer((-1).into());
            }
            let mut tableau = Tableau::new(&mut self.rows, &mut self.rhs, &mut self.basis, &phase_one);
            // Phase one is bounded above by zero, so it always reaches an optimum.
            tableau.run(self.num_total);
            if tableau.value().is_negative() {
                return LpOutcome::Infeasible;
            }
            self.expel_artificials();
        }

        let mut cost = self.cost.clone();
        cost.resize(self.num_real, Rational::zero());
        let mut tableau = Tableau::new(&mut self.rows, &mut self.rhs, &mut self.basis, &cost);
        if !tableau.run(self.num_real) {
            return LpOutcome::Unbounded;
        }

        let mut primal = vec![Rational::zero(); self.num_real];
        for (r, &b) in self.basis.iter().enumerate() {
            primal[b] = self.rhs[r].clone();
        }
        let values: Vec<Rational> = self
            .columns
            .iter()
            .map(|&(pos, neg)| match neg {
                Some(neg) => &primal[pos] - &primal[neg],
                None => primal[pos].clone(),
            })
            .collect();
        let objective = LinearProgram::evaluate(&lp.objective, &values);
        debug_assert!(lp.is_feasible(&values));
        LpOutcome::Optimal(LpSolution { values, objective })
    }

    /// Pivots zero-valued artificial variables out of the basis, dropping rows
    /// that turn out to be redundant, then discards the artificial columns.
    fn expel_artificials(&mut self) {
        let mut r = 0;
        while r < self.rows.len() {
            if self.basis[r] >= self.num_real {
                match (0..self.num_real).find(|&j| !self.rows[r][j].is_zero()) {
                    Some(col) => {
                        let mut tableau =
                            Tableau::new(&mut self.rows, &mut self.rhs, &mut self.basis, &[]);
                        tableau.pivot(r, col);
                    }
                    None => {
                        self.rows.remove(r);
                        self.rhs.remove(r);
                        self.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
        for row in &mut self.rows {
            row.truncate(self.num_real);
        }
        self.num_total = self.num_real;
    }
}

struct Tableau<'a> {
    rows: &'a mut Vec<Vec<Rational>>,
    rhs: &'a mut Vec<Rational>,
    basis: &'a mut Vec<usize>,
    /// Reduced costs `c_j - c_B B^-1 A_j`.
    reduced: Vec<Rational>,
    /// Negated objective value.
    neg_value: Rational,
}

impl<'a> Tableau<'a> {
    fn new(
        rows: &'a mut Vec<Vec<Rational>>,
        rhs: &'a mut Vec<Rational>,
        basis: &'a mut Vec<usize>,
        cost: &[Rational],
    ) -> Self {
        let mut reduced: Vec<Rational> = cost.to_vec();
        let mut neg_value = Rational::zero();
        for (r, &b) in basis.iter().enumerate() {
            let cb = match cost.get(b) {
                Some(c) if !c.is_zero() => c,
                _ => continue,
            };
            for (j, a) in rows[r].iter().enumerate().take(reduced.len()) {
                if !a.is_zero() {
                    reduced[j] -= cb * a;
                }
            }
            neg_value -= cb * &rhs[r];
        }
        Tableau {
            rows,
            rhs,
            basis,
            reduced,
            neg_value,
        }
    }

    fn value(&self) -> Rational {
        -&self.neg_value
    }

    /// Iterates to optimality over columns `< limit`. Returns `false` when an
    /// improving column has no positive entry (unbounded direction).
    fn run(&mut self, limit: usize) -> bool {
        loop {
            let entering = (0..limit).find(|&j| self.reduced[j].is_positive());
            let Some(col) = entering else {
                return true;
            };
            let mut leaving: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[r] / a;
                let better = match &leaving {
                    None => true,
                    Some((best_r, best)) => {
                        ratio < *best || (ratio == *best && self.basis[r] < self.basis[*best_r])
                    }
                };
                if better {
                    leaving = Some((r, ratio));
                }
            }
            match leaving {
                Some((row, _)) => self.pivot(row, col),
                None => return false,
            }
        }
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let inv = self.rows[pr][pc].recip();
        let nonzero: Vec<usize> = {
            let row = &mut self.rows[pr];
            let mut nz = Vec::new();
            for (j, a) in row.iter_mut().enumerate() {
                if !a.is_zero() {
                    *a *= &inv;
                    nz.push(j);
                }
            }
            nz
        };
        self.rhs[pr] *= &inv;
        let pivot_row = self.rows[pr].clone();
        let pivot_rhs = self.rhs[pr].clone();
        for r in 0..self.rows.len() {
            if r == pr {
                continue;
            }
            let factor = self.rows[r][pc].clone();
            if factor.is_zero() {
                continue;
            }
            let row = &mut self.rows[r];
            for &j in &nonzero {
                row[j] -= &factor * &pivot_row[j];
            }
            self.rhs[r] -= &factor * &pivot_rhs;
        }
        if pc < self.reduced.len() {
            let factor = self.reduced[pc].clone();
            if !factor.is_zero() {
                for &j in &nonzero {
                    if j < self.reduced.len() {
                        self.reduced[j] -= &factor * &pivot_row[j];
                    }
                }
                self.neg_value -= &factor * &pivot_rhs;
            }
        }
        self.basis[pr] = pc;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{int, rat};

    #[test]
    fn single_cap() {
        let mut lp = LinearProgram::maximize();
        let x = lp.add_var("x");
        lp.set_objective(vec![(x, int(1))]);
        lp.add_constraint(vec![(x, int(1))], Relation::Le, int(1));
        let sol = simplex_solve(&lp).unwrap();
        let sol = sol.optimal().unwrap();
        assert_eq!(sol.value(x), &int(1));
        assert_eq!(sol.objective, int(1));
    }

    #[test]
    fn contradictory_bounds_are_infeasible() {
        let mut lp = LinearProgram::maximize();
        let x = lp.add_var("x");
        lp.set_objective(vec![(x, int(1))]);
        lp.add_constraint(vec![(x, int(1))], Relation::Le, int(1));
        lp.add_constraint(vec![(x, int(1))], Relation::Ge, int(2));
        assert_eq!(simplex_solve(&lp).unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn strict_slack_program() {
        // maximize eps s.t. p/2 >= 1 + eps, p <= 3
        let mut lp = LinearProgram::maximize();
        let p = lp.add_var("p");
        let eps = lp.add_var("eps");
        lp.set_objective(vec![(eps, int(1))]);
        lp.add_constraint(vec![(p, rat(1, 2)), (eps, int(-1))], Relation::Ge, int(1));
        lp.add_constraint(vec![(p, int(1))], Relation::Le, int(3));
        let out = simplex_solve(&lp).unwrap();
        let sol = out.optimal().unwrap();
        assert_eq!(sol.value(p), &int(3));
        assert_eq!(sol.value(eps), &rat(1, 2));
    }

    #[test]
    fn unbounded_direction() {
        let mut lp = LinearProgram::maximize();
        let x = lp.add_var("x");
        let y = lp.add_var("y");
        lp.set_objective(vec![(x, int(1))]);
        lp.add_constraint(vec![(x, int(1)), (y, int(-1))], Relation::Le, int(1));
        assert_eq!(simplex_solve(&lp).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn undeclared_variable_is_an_input_error() {
        let mut lp = LinearProgram::maximize();
        let x = lp.add_var("x");
        lp.set_objective(vec![(x, int(1))]);
        lp.add_constraint(vec![(VarId(3), int(1))], Relation::Le, int(1));
        assert_eq!(simplex_solve(&lp), Err(ExactMathError::UndeclaredVariable(VarId(3))));
    }

    #[test]
    fn free_variables_and_upper_bounds() {
        // minimize x s.t. x >= -5 with x free, y <= 2 as a bound
        let mut lp = LinearProgram::minimize();
        let x = lp.add_var_with("x", LowerBound::Free, None);
        let y = lp.add_var_with("y", LowerBound::Zero, Some(int(2)));
        lp.set_objective(vec![(x, int(1)), (y, int(-1))]);
        lp.add_constraint(vec![(x, int(1))], Relation::Ge, int(-5));
        let out = simplex_solve(&lp).unwrap();
        let sol = out.optimal().unwrap();
        assert_eq!(sol.value(x), &int(-5));
        assert_eq!(sol.value(y), &int(2));
        assert_eq!(sol.objective, int(-7));
    }

    #[test]
    fn redundant_equalities_are_dropped() {
        let mut lp = LinearProgram::maximize();
        let x = lp.add_var("x");
        let y = lp.add_var("y");
        lp.set_objective(vec![(x, int(1)), (y, int(2))]);
        lp.add_constraint(vec![(x, int(1)), (y, int(1))], Relation::Eq, int(1));
        lp.add_constraint(vec![(x, int(2)), (y, int(2))], Relation::Eq, int(2));
        let out = simplex_solve(&lp).unwrap();
        let sol = out.optimal().unwrap();
        assert_eq!(sol.objective, int(2));
        assert_eq!(sol.value(y), &int(1));
    }

    #[test]
    fn deterministic_on_degenerate_input() {
        let mut lp = LinearProgram::maximize();
        let vars: Vec<VarId> = (0..4).map(|i| lp.add_var(format!("x{i}"))).collect();
        lp.set_objective(vars.iter().map(|&v| (v, int(1))).collect());
        for w in vars.windows(2) {
            lp.add_constraint(vec![(w[0], int(1)), (w[1], int(1))], Relation::Le, int(1));
        }
        lp.add_constraint(vec![(vars[0], int(1)), (vars[3], int(1))], Relation::Le, int(1));
        let a = simplex_solve(&lp).unwrap();
        let b = simplex_solve(&lp).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.optimal().unwrap().objective, int(2));
    }
}
