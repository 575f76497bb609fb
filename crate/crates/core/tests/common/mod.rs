//! Seeded instance generators and independent reference computations.
#![allow(dead_code)]

use std::collections::BTreeSet;

use caei_core::exactmath::{rat, Rational};
use caei_core::model::{CakeInstance, DiscreteInstance, DivisibleInstance, Piece};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Demands on a grid of twelfths, about a third of entries zero.
pub fn divisible(rng: &mut ChaCha8Rng, n: usize, m: usize) -> DivisibleInstance {
    let rows = (0..n)
        .map(|_| {
            let mut row: Vec<i64> = (0..m)
                .map(|_| if rng.gen_bool(0.35) { 0 } else { rng.gen_range(1..=12) })
                .collect();
            if row.iter().all(|&k| k == 0) {
                let j = rng.gen_range(0..m);
                row[j] = rng.gen_range(1..=12);
            }
            row.into_iter().map(|k| rat(k, 12)).collect()
        })
        .collect();
    DivisibleInstance::new(rows).unwrap()
}

/// Divisible instance with agents drawn from at most `types` distinct rows.
pub fn divisible_with_types(rng: &mut ChaCha8Rng, n: usize, m: usize, types: usize) -> DivisibleInstance {
    let base = divisible(rng, types, m);
    let rows = (0..n)
        .map(|_| base.demand(rng.gen_range(0..types)).to_vec())
        .collect();
    DivisibleInstance::new(rows).unwrap()
}

fn interval(rng: &mut ChaCha8Rng, grid: i64) -> (i64, i64) {
    let a = rng.gen_range(0..grid);
    let b = rng.gen_range(a + 1..=grid);
    (a, b)
}

/// Single-interval demands with endpoints on a grid.
pub fn contiguous_cake(rng: &mut ChaCha8Rng, n: usize, distinct: bool) -> CakeInstance {
    let grid = 12;
    let mut seen = BTreeSet::new();
    let mut demands = Vec::new();
    while demands.len() < n {
        let (a, b) = interval(rng, grid);
        if distinct && !seen.insert((a, b)) {
            continue;
        }
        demands.push(Piece::interval(rat(a, grid), rat(b, grid)));
    }
    CakeInstance::new(demands).unwrap()
}

/// Demands of one to three intervals each, possibly duplicated across agents.
pub fn general_cake(rng: &mut ChaCha8Rng, n: usize) -> CakeInstance {
    let grid = 12;
    let demands: Vec<Piece> = (0..n)
        .map(|_| {
            let parts = rng.gen_range(1..=3);
            let mut piece = Piece::empty();
            for _ in 0..parts {
                let (a, b) = interval(rng, grid);
                piece = piece.union(&Piece::interval(rat(a, grid), rat(b, grid)));
            }
            piece
        })
        .collect();
    let mut demands = demands;
    if n >= 2 && rng.gen_bool(0.25) {
        demands[1] = demands[0].clone();
    }
    CakeInstance::new(demands).unwrap()
}

/// Random demand sets over `m` items with up to `qmax` copies each; every
/// item is demanded by someone.
pub fn discrete(rng: &mut ChaCha8Rng, n: usize, m: usize, qmax: u64) -> DiscreteInstance {
    loop {
        let quantities: Vec<u64> = (0..m).map(|_| rng.gen_range(1..=qmax)).collect();
        let demands: Vec<BTreeSet<usize>> = (0..n)
            .map(|_| {
                let size = rng.gen_range(1..=m);
                let mut items: Vec<usize> = (0..m).collect();
                items.shuffle(rng);
                items.into_iter().take(size).collect()
            })
            .collect();
        if let Ok(inst) = DiscreteInstance::new(quantities, demands) {
            return inst;
        }
    }
}

/// Discrete instance with agents drawn from at most `types` demand sets.
pub fn discrete_with_types(rng: &mut ChaCha8Rng, n: usize, m: usize, qmax: u64, types: usize) -> DiscreteInstance {
    loop {
        let quantities: Vec<u64> = (0..m).map(|_| rng.gen_range(1..=qmax)).collect();
        let kinds: Vec<BTreeSet<usize>> = (0..types)
            .map(|_| {
                let size = rng.gen_range(1..=m);
                let mut items: Vec<usize> = (0..m).collect();
                items.shuffle(rng);
                items.into_iter().take(size).collect()
            })
            .collect();
        let demands = (0..n).map(|_| kinds[rng.gen_range(0..types)].clone()).collect();
        if let Ok(inst) = DiscreteInstance::new(quantities, demands) {
            return inst;
        }
    }
}

/// Maximum number of pairwise interior-disjoint intervals, by dynamic
/// programming over intervals sorted by finish time.
pub fn interval_scheduling_optimum(intervals: &[(Rational, Rational)]) -> usize {
    let mut sorted = intervals.to_vec();
    sorted.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
    // best[k] = optimum using the first k intervals.
    let mut best = vec![0usize; sorted.len() + 1];
    for k in 1..=sorted.len() {
        let (s, _) = &sorted[k - 1];
        let compatible = sorted[..k - 1].iter().rposition(|(_, f)| f <= s).map_or(0, |p| p + 1);
        best[k] = best[k - 1].max(best[compatible] + 1);
    }
    best[sorted.len()]
}

pub fn spans(instance: &CakeInstance) -> Vec<(Rational, Rational)> {
    instance
        .demands()
        .iter()
        .map(|d| (d.intervals()[0].lo.clone(), d.intervals()[0].hi.clone()))
        .collect()
}
