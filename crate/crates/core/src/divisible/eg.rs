//! Fisher market with Leontief utilities, solved through its price-space dual.
//!
//! With unit budgets the equilibrium prices minimize
//! `f(p) = Σ_j p_j − Σ_i ln(p · v_i)` over `p ≥ 0`; utilities are then
//! `u_i = 1 / (p · v_i)` and agent `i` receives `u_i v_ij` of good `j`.
//! First-order conditions are exactly market clearing on priced goods and
//! no over-allocation of free goods.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactmath::{from_f64, to_f64, Rational};
use crate::model::{Allocation, CaeiSolution, Clearing, DivisibleInstance, PriceSystem};

pub const DEFAULT_EG_TOLERANCE: f64 = 1e-9;
pub const EG_ITERATION_CAP: usize = 1_000_000;

/// Converged state of the convex program.
#[derive(Clone, Debug, PartialEq)]
pub struct EgProgram {
    /// Leontief utility of each agent.
    pub utilities: Vec<f64>,
    /// Budgets, all 1.
    pub budgets: Vec<f64>,
    /// Supply multipliers, which are the equilibrium prices.
    pub duals: Vec<f64>,
    pub iterations: usize,
    /// Final projected-gradient residual.
    pub residual: f64,
}

struct Dual<'a> {
    v: &'a [Vec<f64>],
    m: usize,
}

impl Dual<'_> {
    fn spends(&self, p: &[f64]) -> Vec<f64> {
        self.v
            .iter()
            .map(|row| row.iter().zip(p).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn value(&self, p: &[f64]) -> f64 {
        let mut f: f64 = p.iter().sum();
        for s in self.spends(p) {
            if s <= 0.0 {
                return f64::INFINITY;
            }
            f -= s.ln();
        }
        f
    }

    fn gradient(&self, p: &[f64]) -> Vec<f64> {
        let spends = self.spends(p);
        let mut g = vec![1.0; self.m];
        for (row, s) in self.v.iter().zip(&spends) {
            for (gj, vij) in g.iter_mut().zip(row) {
                *gj -= vij / s;
            }
        }
        g
    }
}

fn kkt_residual(p: &[f64], g: &[f64]) -> f64 {
    p.iter()
        .zip(g)
        .map(|(pj, gj)| (pj - (pj - gj).max(0.0)).abs())
        .fold(0.0, f64::max)
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let k = b.len();
    for col in 0..k {
        let pivot = (col..k).max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in col + 1..k {
            let factor = a[r][col] / a[col][col];
            for c in col..k {
                a[r][c] -= factor * a[col][c];
            }
            b[r] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; k];
    for r in (0..k).rev() {
        let tail: f64 = (r + 1..k).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - tail) / a[r][r];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

impl Dual<'_> {
    /// Newton direction on goods that are not held at zero, scaled gradient
    /// on the rest.
    fn direction(&self, p: &[f64], g: &[f64], residual: f64) -> Vec<f64> {
        let spends = self.spends(p);
        let threshold = residual.min(1e-3);
        let free: Vec<usize> = (0..self.m).filter(|&j| !(p[j] <= threshold && g[j] > 0.0)).collect();
        let mut d: Vec<f64> = g.iter().map(|gj| -gj).collect();
        if free.is_empty() {
            return d;
        }
        let mut h = vec![vec![0.0; free.len()]; free.len()];
        for (row, s) in self.v.iter().zip(&spends) {
            for (a, &j) in free.iter().enumerate() {
                for (b, &k) in free.iter().enumerate() {
                    h[a][b] += row[j] * row[k] / (s * s);
                }
            }
        }
        // Light damping keeps the system solvable when demands are collinear.
        let trace: f64 = (0..free.len()).map(|a| h[a][a]).sum();
        for (a, hrow) in h.iter_mut().enumerate() {
            hrow[a] += 1e-12 * trace.max(1.0);
        }
        let rhs: Vec<f64> = free.iter().map(|&j| -g[j]).collect();
        if let Some(step) = solve_dense(h, rhs) {
            let descent: f64 = free.iter().zip(&step).map(|(&j, dj)| g[j] * dj).sum();
            if descent < 0.0 {
                for (&j, dj) in free.iter().zip(step) {
                    d[j] = dj;
                }
            }
        }
        d
    }
}

impl EgProgram {
    /// Projected Newton on the dual with Armijo backtracking along the
    /// projection arc, until the KKT residual drops below `tolerance / 10`.
    pub fn solve(instance: &DivisibleInstance, tolerance: f64) -> Result<EgProgram> {
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(Error::InvalidInput(format!("tolerance must be positive, got {tolerance}")));
        }
        let v: Vec<Vec<f64>> = instance
            .demands()
            .iter()
            .map(|row| row.iter().map(to_f64).collect())
            .collect();
        let n = v.len();
        let m = instance.num_goods();
        let dual = Dual { v: &v, m };
        let target = tolerance / 10.0;

        let mut p = vec![n as f64 / m as f64; m];
        let mut f = dual.value(&p);
        let mut g = dual.gradient(&p);
        let mut residual = kkt_residual(&p, &g);
        let mut iterations = 0;
        while residual >= target {
            if iterations >= EG_ITERATION_CAP {
                return Err(Error::NonConvergence { iterations, residual });
            }
            iterations += 1;
            let d = dual.direction(&p, &g, residual);
            let mut alpha = 1.0;
            let (next, f_next, g_next, r_next) = loop {
                let trial: Vec<f64> = p.iter().zip(&d).map(|(pj, dj)| (pj + alpha * dj).max(0.0)).collect();
                let f_trial = dual.value(&trial);
                let decrease: f64 = g.iter().zip(trial.iter().zip(&p)).map(|(gj, (t, q))| gj * (t - q)).sum();
                if f_trial.is_finite() {
                    let g_trial = dual.gradient(&trial);
                    let r_trial = kkt_residual(&trial, &g_trial);
                    // Near the optimum objective differences drop below rounding
                    // error; a halved residual is accepted as progress instead.
                    if f_trial <= f + 1e-4 * decrease || r_trial <= 0.5 * residual {
                        break (trial, f_trial, g_trial, r_trial);
                    }
                }
                alpha *= 0.5;
                if alpha < 1e-30 {
                    return Err(Error::NonConvergence { iterations, residual });
                }
            };
            p = next;
            f = f_next;
            g = g_next;
            residual = r_next;
        }
        let utilities = dual.spends(&p).iter().map(|s| 1.0 / s).collect();
        Ok(EgProgram {
            utilities,
            budgets: vec![1.0; n],
            duals: p,
            iterations,
            residual,
        })
    }
}

/// Equilibrium of the Leontief Fisher market as an approximate CAEI.
///
/// Agent `i` receives `u_i v_ij` of good `j`; whatever remains of a good
/// (within floating-point error for priced goods) goes to agent 0, and any
/// rounding excess is scaled away, so clearing holds exactly.
pub fn solve_eg(instance: &DivisibleInstance, tolerance: f64) -> Result<CaeiSolution> {
    let program = EgProgram::solve(instance, tolerance)?;
    let to_rat = |x: f64| from_f64(x).ok_or_else(|| Error::Internal(format!("non-finite value {x}")));
    let prices = program
        .duals
        .iter()
        .map(|&p| to_rat(p))
        .collect::<Result<Vec<_>>>()?;
    let (n, m) = (instance.num_agents(), instance.num_goods());
    let v = instance.demands();
    let mut utilities = program
        .utilities
        .iter()
        .map(|&u| to_rat(u))
        .collect::<Result<Vec<_>>>()?;
    // Agents within the tolerance of full utility are served outright, so
    // rounding never leaves a nearly served agent envying a slightly larger bundle.
    let fits = |set: &[usize]| {
        (0..m).all(|j| set.iter().fold(Rational::zero(), |acc, &i| acc + &v[i][j]) <= Rational::one())
    };
    let near = Rational::one() - to_rat(tolerance)?;
    let mut protected: Vec<usize> = (0..n).filter(|&i| utilities[i] >= near).collect();
    if !fits(&protected) {
        protected.retain(|&i| utilities[i] >= Rational::one());
    }
    if !fits(&protected) {
        protected.clear();
    }
    for &i in &protected {
        if utilities[i] < Rational::one() {
            utilities[i] = Rational::one();
        }
    }
    let mut x: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..m).map(|j| &utilities[i] * &v[i][j]).collect())
        .collect();
    for j in 0..m {
        let total = x.iter().fold(Rational::zero(), |acc, row| acc + &row[j]);
        if total <= Rational::one() {
            x[0][j] += Rational::one() - total;
            continue;
        }
        // Trim the excess from unprotected shares first, then from protected
        // agents' holdings beyond their demand.
        let mut excess = total - Rational::one();
        let loose: Vec<usize> = (0..n).filter(|i| !protected.contains(i)).collect();
        let surplus = |x: &Vec<Vec<Rational>>, i: usize| {
            if protected.contains(&i) {
                &x[i][j] - &v[i][j]
            } else {
                x[i][j].clone()
            }
        };
        for group in [loose, protected.clone()] {
            let available = group.iter().fold(Rational::zero(), |acc, &i| acc + surplus(&x, i));
            if excess.is_zero() || available.is_zero() {
                continue;
            }
            let cut = excess.clone().min(available.clone());
            for &i in &group {
                let share = surplus(&x, i) * &cut / &available;
                x[i][j] -= share;
            }
            excess -= cut;
        }
    }
    debug_assert!(prices.iter().all(|p| !p.is_negative()));
    CaeiSolution::new(
        instance,
        Allocation::Divisible(x),
        PriceSystem::Vector(prices),
        false,
        Clearing::Full,
        "eisenberg-gale",
    )
}
