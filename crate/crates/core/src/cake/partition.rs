use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactmath::{Fraction, Rational};
use crate::model::{CakeInstance, Interval, Piece};

/// Breakpoints `0 = q_0 < q_1 < ... < q_K = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    breakpoints: Vec<Rational>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitRule {
    /// Also cut every demanded interval at its midpoint.
    Midpoints,
    /// Split each induced cell into as many equal cells as agents demand it.
    PerDemanderCount,
    None,
}

impl Partition {
    fn from_points(points: BTreeSet<Rational>) -> Self {
        let mut breakpoints: Vec<Rational> = points.into_iter().collect();
        if breakpoints.first() != Some(&Rational::zero()) {
            breakpoints.insert(0, Rational::zero());
        }
        if breakpoints.last() != Some(&Rational::one()) {
            breakpoints.push(Rational::one());
        }
        Partition { breakpoints }
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn num_cells(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn cell(&self, k: usize) -> Interval {
        Interval::new(self.breakpoints[k].clone(), self.breakpoints[k + 1].clone())
    }

    pub fn cells(&self) -> impl Iterator<Item = Interval> + '_ {
        (0..self.num_cells()).map(|k| self.cell(k))
    }

    pub fn cell_piece(&self, k: usize) -> Piece {
        Piece::interval(self.breakpoints[k].clone(), self.breakpoints[k + 1].clone())
    }

    pub fn shortest_cell(&self) -> Rational {
        self.cells().map(|c| c.length()).min().expect("at least one cell")
    }

    /// Agents whose demand contains each cell.
    pub fn demanders(&self, instance: &CakeInstance) -> Vec<Vec<usize>> {
        (0..self.num_cells())
            .map(|k| {
                let cell = self.cell_piece(k);
                (0..instance.num_agents())
                    .filter(|&i| instance.demand(i).contains(&cell))
                    .collect()
            })
            .collect()
    }
}

/// Partition induced by all demand endpoints and `extra_points`, refined by `rule`.
pub fn refine_partition(instance: &CakeInstance, extra_points: &[Rational], rule: SplitRule) -> Result<Partition> {
    if let Some(x) = extra_points
        .iter()
        .find(|x| x.is_negative() || *x > &Rational::one())
    {
        return Err(Error::InvalidInput(format!("point {} lies outside [0, 1]", Fraction(x))));
    }
    let mut points: BTreeSet<Rational> = extra_points.iter().cloned().collect();
    for d in instance.demands() {
        points.extend(d.endpoints().cloned());
        if rule == SplitRule::Midpoints {
            points.extend(d.intervals().iter().map(Interval::midpoint));
        }
    }
    let base = Partition::from_points(points);
    if rule != SplitRule::PerDemanderCount {
        return Ok(base);
    }
    let mut refined: BTreeSet<Rational> = base.breakpoints.iter().cloned().collect();
    for (k, demanders) in base.demanders(instance).iter().enumerate() {
        let cell = base.cell(k);
        let parts = demanders.len() as i64;
        for t in 1..parts {
            refined.insert(&cell.lo + cell.length() * Rational::new(t.into(), parts.into()));
        }
    }
    Ok(Partition::from_points(refined))
}

/// Realizes fractional cell shares as sub-intervals: each cell is carved
/// left to right in agent-index order.
pub(crate) fn carve(partition: &Partition, shares: &[Vec<Rational>]) -> Vec<Piece> {
    let mut pieces: Vec<Vec<Interval>> = vec![Vec::new(); shares.len()];
    for (k, cell) in partition.cells().enumerate() {
        let len = cell.length();
        let mut at = cell.lo.clone();
        for (i, row) in shares.iter().enumerate() {
            if row[k].is_positive() {
                let end = &at + &len * &row[k];
                pieces[i].push(Interval::new(at.clone(), end.clone()));
                at = end;
            }
        }
    }
    pieces
        .into_iter()
        .map(|ivs| ivs.into_iter().fold(Piece::empty(), |acc, iv| acc.union(&Piece::interval(iv.lo, iv.hi))))
        .collect()
}
