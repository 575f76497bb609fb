//! Exact rational arithmetic and the linear-programming backend shared by
//! every LP-backed operation in the crate.

mod linsys;
mod rational;
mod simplex;

pub use linsys::solve_linear_system;
pub use rational::{
    floor_to_u64, format_decimal, format_rational, from_f64, int, parse_rational, rat, to_f64,
    Fraction, ParseRationalError, Rational,
};
pub use simplex::{
    simplex_solve, Constraint, ExactMathError, LinearProgram, LowerBound, LpOutcome, LpSolution,
    Relation, Sense, VarId, Variable,
};
