//! JSON encodings of instances, solutions and verification reports.
//!
//! Exact numbers are written as strings in `a/b` form (integers as plain
//! digits). Solutions produced by floating-point solvers carry
//! `"exact": false` and use decimal strings instead. Readers accept
//! fractions, decimals and JSON integers.

use std::collections::BTreeSet;
use std::fmt;

use caei_core::exactmath::{format_rational, parse_rational, Rational};
use caei_core::model::{
    canonicalize_piece, Allocation, CaeiSolution, CakeInstance, Clearing, DiscreteInstance, DivisibleInstance,
    Instance, InstanceRef, ModelKind, Piece, PriceCurve, PriceSystem,
};
use caei_core::verify::{CaeiReport, Subject};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

/// Fractional digits kept when writing inexact numbers.
const DECIMAL_DIGITS: usize = 18;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error("{0}")]
    Model(#[from] caei_core::Error),
}

fn field_error(field: impl Into<String>, message: impl fmt::Display) -> FileError {
    FileError::Field {
        field: field.into(),
        message: message.to_string(),
    }
}

/// A number as it appears in a file: a JSON integer or a string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Text(String),
}

impl Number {
    pub fn exact(value: &Rational) -> Number {
        Number::Text(format_rational(value))
    }

    /// Decimal rendering, rounded toward `+inf` when `up` and to nearest otherwise.
    pub fn decimal(value: &Rational, up: bool) -> Number {
        let scale = num_traits::pow(BigInt::from(10), DECIMAL_DIGITS);
        let scaled = value * Rational::from_integer(scale.clone());
        let digits = if up { scaled.ceil() } else { scaled.round() }.to_integer();
        let negative = digits.is_negative();
        let (whole, frac) = digits.abs().div_rem(&scale);
        let mut frac = format!("{frac:0>width$}", width = DECIMAL_DIGITS);
        while frac.ends_with('0') {
            frac.pop();
        }
        let sign = if negative { "-" } else { "" };
        Number::Text(if frac.is_empty() {
            format!("{sign}{whole}")
        } else {
            format!("{sign}{whole}.{frac}")
        })
    }

    pub fn parse(&self, field: &str) -> Result<Rational, FileError> {
        match self {
            Number::Int(v) => Ok(Rational::from_integer((*v).into())),
            Number::Text(s) => parse_rational(s).map_err(|e| field_error(field, e)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelTag {
    Divisible,
    Cake,
    Discrete,
}

impl From<ModelKind> for ModelTag {
    fn from(kind: ModelKind) -> Self {
        match kind {
            ModelKind::Divisible => ModelTag::Divisible,
            ModelKind::Cake => ModelTag::Cake,
            ModelKind::Discrete => ModelTag::Discrete,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClearingTag {
    #[default]
    Full,
    Relaxed,
}

impl From<Clearing> for ClearingTag {
    fn from(c: Clearing) -> Self {
        match c {
            Clearing::Full => ClearingTag::Full,
            Clearing::Relaxed => ClearingTag::Relaxed,
        }
    }
}

impl From<ClearingTag> for Clearing {
    fn from(c: ClearingTag) -> Self {
        match c {
            ClearingTag::Full => Clearing::Full,
            ClearingTag::Relaxed => Clearing::Relaxed,
        }
    }
}

/// An instance file. Cake demands are lists of `[lo, hi]` intervals;
/// discrete demands list 0-based item indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase", deny_unknown_fields)]
pub enum InstanceFile {
    Divisible {
        agents: usize,
        goods: usize,
        demands: Vec<Vec<Number>>,
    },
    Cake {
        agents: usize,
        demands: Vec<Vec<[Number; 2]>>,
    },
    Discrete {
        agents: usize,
        quantities: Vec<u64>,
        demands: Vec<Vec<usize>>,
    },
}

fn check_len(field: &str, found: usize, expected: usize) -> Result<(), FileError> {
    if found == expected {
        Ok(())
    } else {
        Err(field_error(field, format!("expected {expected} entries, found {found}")))
    }
}

fn pieces_to_file(pieces: &[Piece], render: impl Fn(&Rational) -> Number) -> Vec<Vec<[Number; 2]>> {
    pieces
        .iter()
        .map(|p| p.intervals().iter().map(|iv| [render(&iv.lo), render(&iv.hi)]).collect())
        .collect()
}

fn pieces_from_file(field: &str, raw: &[Vec<[Number; 2]>]) -> Result<Vec<Piece>, FileError> {
    raw.iter()
        .enumerate()
        .map(|(i, list)| {
            let mut intervals = Vec::with_capacity(list.len());
            for (k, [lo, hi]) in list.iter().enumerate() {
                let path = format!("{field}[{i}][{k}]");
                intervals.push((lo.parse(&path)?, hi.parse(&path)?));
            }
            canonicalize_piece(&intervals).map_err(|e| field_error(format!("{field}[{i}]"), e))
        })
        .collect()
}

fn rationals(field: &str, raw: &[Number]) -> Result<Vec<Rational>, FileError> {
    raw.iter()
        .enumerate()
        .map(|(j, x)| x.parse(&format!("{field}[{j}]")))
        .collect()
}

fn matrix(field: &str, raw: &[Vec<Number>]) -> Result<Vec<Vec<Rational>>, FileError> {
    raw.iter()
        .enumerate()
        .map(|(i, row)| rationals(&format!("{field}[{i}]"), row))
        .collect()
}

impl InstanceFile {
    pub fn from_instance(instance: &Instance) -> InstanceFile {
        match instance {
            Instance::Divisible(inst) => InstanceFile::Divisible {
                agents: inst.num_agents(),
                goods: inst.num_goods(),
                demands: inst
                    .demands()
                    .iter()
                    .map(|row| row.iter().map(Number::exact).collect())
                    .collect(),
            },
            Instance::Cake(inst) => InstanceFile::Cake {
                agents: inst.num_agents(),
                demands: pieces_to_file(inst.demands(), Number::exact),
            },
            Instance::Discrete(inst) => InstanceFile::Discrete {
                agents: inst.num_agents(),
                quantities: inst.quantities().to_vec(),
                demands: (0..inst.num_agents())
                    .map(|i| inst.demand(i).iter().copied().collect())
                    .collect(),
            },
        }
    }

    pub fn to_instance(&self) -> Result<Instance, FileError> {
        match self {
            InstanceFile::Divisible { agents, goods, demands } => {
                check_len("demands", demands.len(), *agents)?;
                for (i, row) in demands.iter().enumerate() {
                    check_len(&format!("demands[{i}]"), row.len(), *goods)?;
                }
                Ok(DivisibleInstance::new(matrix("demands", demands)?)?.into())
            }
            InstanceFile::Cake { agents, demands } => {
                check_len("demands", demands.len(), *agents)?;
                let mut raw = Vec::with_capacity(demands.len());
                for (i, list) in demands.iter().enumerate() {
                    let mut intervals = Vec::with_capacity(list.len());
                    for (k, [lo, hi]) in list.iter().enumerate() {
                        let path = format!("demands[{i}][{k}]");
                        intervals.push((lo.parse(&path)?, hi.parse(&path)?));
                    }
                    raw.push(intervals);
                }
                Ok(CakeInstance::from_intervals(raw)?.into())
            }
            InstanceFile::Discrete { agents, quantities, demands } => {
                check_len("demands", demands.len(), *agents)?;
                let mut sets = Vec::with_capacity(demands.len());
                for (i, list) in demands.iter().enumerate() {
                    let set: BTreeSet<usize> = list.iter().copied().collect();
                    if set.len() != list.len() {
                        return Err(field_error(format!("demands[{i}]"), "repeated item"));
                    }
                    sets.push(set);
                }
                Ok(DiscreteInstance::new(quantities.clone(), sets)?.into())
            }
        }
    }
}

/// A solution file. `prices` is a list for divisible and discrete goods and
/// `{"breakpoints": [...], "densities": [...]}` for cake; `allocation` holds
/// shares, interval lists or copy counts per agent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    pub model: ModelTag,
    pub exact: bool,
    pub solver: String,
    #[serde(default)]
    pub clearing: ClearingTag,
    pub welfare: usize,
    pub served: Vec<usize>,
    pub prices: Value,
    pub allocation: Value,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveFile {
    breakpoints: Vec<Number>,
    densities: Vec<Number>,
}

fn typed<T: DeserializeOwned>(field: &str, value: &Value) -> Result<T, FileError> {
    serde_json::from_value(value.clone()).map_err(|e| field_error(field, e))
}

fn to_value<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("file types serialize")
}

impl SolutionFile {
    pub fn from_solution(solution: &CaeiSolution) -> SolutionFile {
        let exact = solution.exact;
        let render = |x: &Rational| if exact { Number::exact(x) } else { Number::decimal(x, false) };
        // Inexact shares round up so that rounding never un-serves an agent.
        let render_share = |x: &Rational| if exact { Number::exact(x) } else { Number::decimal(x, true) };
        let prices = match &solution.prices {
            PriceSystem::Vector(p) => to_value(&p.iter().map(render).collect::<Vec<_>>()),
            PriceSystem::Curve(c) => to_value(&CurveFile {
                breakpoints: c.breakpoints().iter().map(render).collect(),
                densities: c.densities().iter().map(render).collect(),
            }),
        };
        let allocation = match &solution.allocation {
            Allocation::Divisible(x) => to_value(
                &x.iter()
                    .map(|row| row.iter().map(render_share).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            ),
            Allocation::Cake(pieces) => to_value(&pieces_to_file(pieces, render)),
            Allocation::Discrete(counts) => to_value(counts),
        };
        SolutionFile {
            model: solution.allocation.kind().into(),
            exact,
            solver: solution.solver.clone(),
            clearing: solution.clearing.into(),
            welfare: solution.welfare,
            served: solution.served.iter().copied().collect(),
            prices,
            allocation,
        }
    }

    /// Rebuilds the solution for `instance`. The recorded served set and
    /// welfare must agree with what the allocation actually achieves.
    pub fn to_solution(&self, instance: &Instance) -> Result<CaeiSolution, FileError> {
        let kind = InstanceRef::from(instance).kind();
        if self.model != kind.into() {
            return Err(field_error(
                "model",
                format!("solution is for a {:?} instance, not {}", self.model, kind.name()),
            ));
        }
        let (prices, allocation) = match self.model {
            ModelTag::Divisible | ModelTag::Discrete => {
                let p = rationals("prices", &typed::<Vec<Number>>("prices", &self.prices)?)?;
                let alloc = if self.model == ModelTag::Divisible {
                    Allocation::Divisible(matrix("allocation", &typed::<Vec<Vec<Number>>>("allocation", &self.allocation)?)?)
                } else {
                    Allocation::Discrete(typed("allocation", &self.allocation)?)
                };
                (PriceSystem::Vector(p), alloc)
            }
            ModelTag::Cake => {
                let curve: CurveFile = typed("prices", &self.prices)?;
                let curve = PriceCurve::new(
                    rationals("prices.breakpoints", &curve.breakpoints)?,
                    rationals("prices.densities", &curve.densities)?,
                )
                .map_err(|e| field_error("prices", e))?;
                let pieces = pieces_from_file("allocation", &typed::<Vec<Vec<[Number; 2]>>>("allocation", &self.allocation)?)?;
                (PriceSystem::Curve(curve), Allocation::Cake(pieces))
            }
        };
        let solution = CaeiSolution::new(
            instance,
            allocation,
            prices,
            self.exact,
            self.clearing.into(),
            self.solver.clone(),
        )
        .map_err(|e| field_error("allocation", e))?;
        let claimed: BTreeSet<usize> = self.served.iter().copied().collect();
        if claimed != solution.served || self.welfare != solution.welfare {
            return Err(field_error(
                "served",
                format!(
                    "file claims agents {:?} (welfare {}) but the allocation serves {:?}",
                    claimed, self.welfare, solution.served
                ),
            ));
        }
        Ok(solution)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SubjectFile {
    Agent { index: usize },
    Resource { index: Option<usize> },
    AgentPair { agents: [usize; 2] },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationFile {
    pub subject: SubjectFile,
    pub condition: String,
    pub magnitude: String,
}

/// Structured verification output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportFile {
    pub is_caei: bool,
    pub is_ceei: bool,
    pub partition_ok: bool,
    pub budgets_ok: bool,
    pub optimal_bundles_ok: bool,
    pub tolerance: String,
    pub clearing: ClearingTag,
    pub violations: Vec<ViolationFile>,
}

impl ReportFile {
    pub fn new(report: &CaeiReport, tolerance: &Rational, clearing: Clearing) -> ReportFile {
        ReportFile {
            is_caei: report.is_caei,
            is_ceei: report.is_ceei,
            partition_ok: report.partition_ok,
            budgets_ok: report.budgets_ok,
            optimal_bundles_ok: report.optimal_bundles_ok,
            tolerance: format_rational(tolerance),
            clearing: clearing.into(),
            violations: report
                .violations
                .iter()
                .map(|v| ViolationFile {
                    subject: match v.subject {
                        Subject::Agent(i) => SubjectFile::Agent { index: i },
                        Subject::Resource(j) => SubjectFile::Resource { index: j },
                        Subject::AgentPair(a, b) => SubjectFile::AgentPair { agents: [a, b] },
                    },
                    condition: v.condition.name().to_string(),
                    magnitude: format_rational(&v.magnitude),
                })
                .collect(),
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn render<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("file types serialize");
    text.push('\n');
    text
}

pub fn parse_instance(text: &str) -> Result<Instance, FileError> {
    serde_json::from_str::<InstanceFile>(text)?.to_instance()
}

pub fn parse_solution(text: &str, instance: &Instance) -> Result<CaeiSolution, FileError> {
    serde_json::from_str::<SolutionFile>(text)?.to_solution(instance)
}

pub fn instance_json(instance: &Instance) -> String {
    render(&InstanceFile::from_instance(instance))
}

pub fn solution_json(solution: &CaeiSolution) -> String {
    render(&SolutionFile::from_solution(solution))
}

#[cfg(test)]
mod tests {
    use super::*;
    use caei_core::exactmath::{int, rat};

    #[test]
    fn decimal_rounding() {
        assert_eq!(Number::decimal(&rat(1, 4), false), Number::Text("0.25".into()));
        assert_eq!(Number::decimal(&int(2), true), Number::Text("2".into()));
        assert_eq!(Number::decimal(&rat(1, 3), true), Number::Text("0.333333333333333334".into()));
        assert_eq!(Number::decimal(&rat(1, 3), false), Number::Text("0.333333333333333333".into()));
        assert_eq!(Number::decimal(&rat(-1, 2), false), Number::Text("-0.5".into()));
    }

    #[test]
    fn numbers_parse_from_either_form() {
        assert_eq!(Number::Int(3).parse("x").unwrap(), int(3));
        assert_eq!(Number::Text("2/6".into()).parse("x").unwrap(), rat(1, 3));
        let err = Number::Text("one".into()).parse("demands[0][1]").unwrap_err();
        assert!(err.to_string().contains("demands[0][1]"));
    }

    #[test]
    fn instance_diagnostics_name_fields() {
        let bad = r#"{"model": "divisible", "agents": 2, "goods": 2, "demands": [["1/2", "1/2"], ["1/2"]]}"#;
        let err = parse_instance(bad).unwrap_err().to_string();
        assert!(err.contains("demands[1]"), "{err}");
        let overlap = r#"{"model": "cake", "agents": 1, "demands": [[["0", "1/2"], ["1/4", "1"]]]}"#;
        assert!(parse_instance(overlap).unwrap_err().to_string().contains("overlap"));
        let syntax = "{\"model\": \"cake\",\n \"agents\": }";
        assert!(parse_instance(syntax).unwrap_err().to_string().contains("line 2"));
        let unknown = r#"{"model": "discrete", "agents": 1, "quantities": [1], "demands": [[0]], "extra": 1}"#;
        assert!(parse_instance(unknown).is_err());
    }
}
