//! Seeded random instances. The same settings always yield the same instance.

use std::collections::BTreeSet;

use caei_core::exactmath::Rational;
use caei_core::model::{CakeInstance, DiscreteInstance, DivisibleInstance, Instance, ModelKind, Piece};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Denominator of divisible demand entries.
const DIVISIBLE_GRID: i64 = 12;
/// Cake endpoints are multiples of `1 / CAKE_GRID`.
const CAKE_GRID: i64 = 24;
const MAX_COPIES: u64 = 3;
const ATTEMPTS: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenSpec {
    pub model: ModelKind,
    pub agents: usize,
    /// Goods (divisible), items (discrete), or the most intervals per demand (cake).
    pub goods: usize,
    pub seed: u64,
    /// Cake only: every demand is a single interval.
    pub contiguous: bool,
    /// Exactly this many distinct demands among the agents.
    pub types: Option<usize>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("invalid generator settings: {0}")]
    Invalid(String),
    #[error("could not draw a valid instance after {0} attempts")]
    Exhausted(usize),
}

pub fn generate(spec: &GenSpec) -> Result<Instance, GenError> {
    if spec.agents == 0 || spec.goods == 0 {
        return Err(GenError::Invalid("--agents and --goods must be at least 1".into()));
    }
    if spec.contiguous && spec.model != ModelKind::Cake {
        return Err(GenError::Invalid("--contiguous applies to cake instances only".into()));
    }
    if let Some(t) = spec.types {
        if t == 0 || t > spec.agents {
            return Err(GenError::Invalid(format!(
                "--types must lie between 1 and the number of agents ({}), got {t}",
                spec.agents
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    match spec.model {
        ModelKind::Divisible => {
            let demands = draw_demands(&mut rng, spec, |rng| divisible_row(rng, spec))?;
            DivisibleInstance::new(demands).map(Into::into).map_err(|e| GenError::Invalid(e.to_string()))
        }
        ModelKind::Cake => {
            let demands = draw_demands(&mut rng, spec, |rng| cake_piece(rng, spec))?;
            CakeInstance::new(demands).map(Into::into).map_err(|e| GenError::Invalid(e.to_string()))
        }
        ModelKind::Discrete => {
            if let Some(t) = spec.types {
                if (t as u128) >= (1u128 << spec.goods.min(100)) {
                    return Err(GenError::Invalid(format!(
                        "{} items allow fewer than {t} distinct demand sets",
                        spec.goods
                    )));
                }
            }
            for _ in 0..ATTEMPTS {
                let quantities: Vec<u64> = (0..spec.goods).map(|_| rng.gen_range(1..=MAX_COPIES)).collect();
                let demands = draw_demands(&mut rng, spec, |rng| item_set(rng, spec.goods))?;
                if let Ok(inst) = DiscreteInstance::new(quantities, demands) {
                    return Ok(inst.into());
                }
            }
            Err(GenError::Exhausted(ATTEMPTS))
        }
    }
}

/// One demand per agent; with `types`, exactly that many distinct demands,
/// each used at least once, in shuffled order.
fn draw_demands<T: Clone + PartialEq>(
    rng: &mut ChaCha8Rng,
    spec: &GenSpec,
    mut draw: impl FnMut(&mut ChaCha8Rng) -> T,
) -> Result<Vec<T>, GenError> {
    let Some(types) = spec.types else {
        return Ok((0..spec.agents).map(|_| draw(rng)).collect());
    };
    let mut order: Vec<T> = Vec::with_capacity(types);
    let mut attempts = 0;
    while order.len() < types {
        attempts += 1;
        if attempts > ATTEMPTS {
            return Err(GenError::Exhausted(ATTEMPTS));
        }
        let d = draw(rng);
        if !order.contains(&d) {
            order.push(d);
        }
    }
    let mut demands = order.clone();
    demands.extend((types..spec.agents).map(|_| order[rng.gen_range(0..types)].clone()));
    demands.shuffle(rng);
    Ok(demands)
}

/// Entries `k / 12`, about a third of them zero, with numerators capped so
/// that each good's expected total demand stays near one unit.
fn divisible_row(rng: &mut ChaCha8Rng, spec: &GenSpec) -> Vec<Rational> {
    let cap = (3 * DIVISIBLE_GRID / spec.agents as i64).clamp(1, DIVISIBLE_GRID);
    let mut row: Vec<i64> = (0..spec.goods)
        .map(|_| if rng.gen_bool(0.3) { 0 } else { rng.gen_range(1..=cap) })
        .collect();
    if row.iter().all(|&k| k == 0) {
        let j = rng.gen_range(0..spec.goods);
        row[j] = rng.gen_range(1..=cap);
    }
    row.into_iter().map(|k| Rational::new(k.into(), DIVISIBLE_GRID.into())).collect()
}

fn cake_piece(rng: &mut ChaCha8Rng, spec: &GenSpec) -> Piece {
    let parts = if spec.contiguous { 1 } else { rng.gen_range(1..=spec.goods) };
    let grid = Rational::from_integer(CAKE_GRID.into());
    (0..parts).fold(Piece::empty(), |piece, _| {
        let a = rng.gen_range(0..CAKE_GRID);
        let b = rng.gen_range(a + 1..=CAKE_GRID);
        piece.union(&Piece::interval(
            Rational::from_integer(a.into()) / &grid,
            Rational::from_integer(b.into()) / &grid,
        ))
    })
}

fn item_set(rng: &mut ChaCha8Rng, items: usize) -> BTreeSet<usize> {
    loop {
        let set: BTreeSet<usize> = (0..items).filter(|_| rng.gen_bool(0.5)).collect();
        if !set.is_empty() {
            return set;
        }
    }
}
