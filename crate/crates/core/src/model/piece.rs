use std::fmt;

use num_traits::{One, Zero};

use crate::error::{invalid, Result};
use crate::exactmath::{Fraction, Rational};

/// Closed interval `[lo, hi]` of the cake.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        Interval { lo, hi }
    }

    pub fn length(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(2.into())
    }

    /// Length of the common part of two intervals (zero when they only touch).
    pub fn overlap(&self, other: &Interval) -> Rational {
        let lo = (&self.lo).max(&other.lo);
        let hi = (&self.hi).min(&other.hi);
        if lo < hi {
            hi - lo
        } else {
            Rational::zero()
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", Fraction(&self.lo), Fraction(&self.hi))
    }
}

/// A union of intervals in canonical form: sorted, pairwise separated by a
/// gap of positive length, and with no zero-length members.
///
/// Two pieces that agree up to a null set have identical canonical forms,
/// so structural equality is equality up to measure zero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Piece {
    intervals: Vec<Interval>,
}

/// Sorts, merges touching or overlapping intervals, and drops degenerate
/// ones. Rejects `l > r` and endpoints outside `[0, 1]`.
pub fn canonicalize_piece(raw: &[(Rational, Rational)]) -> Result<Piece> {
    for (lo, hi) in raw {
        if lo > hi {
            return Err(invalid(format!(
                "interval [{}, {}] has its left endpoint after its right endpoint",
                Fraction(lo),
                Fraction(hi)
            )));
        }
        if lo < &Rational::zero() || hi > &Rational::one() {
            return Err(invalid(format!(
                "interval [{}, {}] leaves the cake [0, 1]",
                Fraction(lo),
                Fraction(hi)
            )));
        }
    }
    Ok(Piece::from_unsorted(
        raw.iter()
            .map(|(lo, hi)| Interval::new(lo.clone(), hi.clone()))
            .collect(),
    ))
}

impl Piece {
    pub fn empty() -> Self {
        Piece::default()
    }

    pub fn full() -> Self {
        Piece {
            intervals: vec![Interval::new(Rational::zero(), Rational::one())],
        }
    }

    /// Single interval; degenerate input yields the empty piece.
    pub fn interval(lo: Rational, hi: Rational) -> Self {
        Piece::from_unsorted(vec![Interval::new(lo, hi)])
    }

    pub(crate) fn from_unsorted(mut intervals: Vec<Interval>) -> Self {
        intervals.retain(|iv| iv.lo < iv.hi);
        intervals.sort();
        let mut merged: Vec<Interval> = Vec::with_capacity(intervals.len());
        for iv in intervals {
            match merged.last_mut() {
                Some(last) if iv.lo <= last.hi => {
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                    }
                }
                _ => merged.push(iv),
            }
        }
        Piece { intervals: merged }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn length(&self) -> Rational {
        self.intervals
            .iter()
            .fold(Rational::zero(), |acc, iv| acc + iv.length())
    }

    pub fn endpoints(&self) -> impl Iterator<Item = &Rational> {
        self.intervals.iter().flat_map(|iv| [&iv.lo, &iv.hi])
    }

    pub fn union(&self, other: &Piece) -> Piece {
        let mut all = self.intervals.clone();
        all.extend(other.intervals.iter().cloned());
        Piece::from_unsorted(all)
    }

    pub fn intersection(&self, other: &Piece) -> Piece {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.intervals.len() && j < other.intervals.len() {
            let a = &self.intervals[i];
            let b = &other.intervals[j];
            let lo = (&a.lo).max(&b.lo);
            let hi = (&a.hi).min(&b.hi);
            if lo < hi {
                out.push(Interval::new(lo.clone(), hi.clone()));
            }
            if a.hi < b.hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        Piece { intervals: out }
    }

    pub fn difference(&self, other: &Piece) -> Piece {
        let mut out = Vec::new();
        for a in &self.intervals {
            let mut cursor = a.lo.clone();
            for b in &other.intervals {
                if b.hi <= cursor || b.lo >= a.hi {
                    continue;
                }
                if b.lo > cursor {
                    out.push(Interval::new(cursor.clone(), b.lo.clone()));
                }
                cursor = (&b.hi).max(&cursor).clone();
                if cursor >= a.hi {
                    break;
                }
            }
            if cursor < a.hi {
                out.push(Interval::new(cursor, a.hi.clone()));
            }
        }
        Piece { intervals: out }
    }

    pub fn overlap_length(&self, other: &Piece) -> Rational {
        self.intersection(other).length()
    }

    /// `other ⊆ self` up to a null set.
    pub fn contains(&self, other: &Piece) -> bool {
        other.intervals.iter().all(|b| {
            self.intervals
                .iter()
                .any(|a| a.lo <= b.lo && b.hi <= a.hi)
        })
    }

    pub fn interior_disjoint(&self, other: &Piece) -> bool {
        self.intersection(other).is_empty()
    }
}

impl fmt::Display for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return f.write_str("∅");
        }
        for (k, iv) in self.intervals.iter().enumerate() {
            if k > 0 {
                f.write_str(" ∪ ")?;
            }
            write!(f, "{iv}")?;
        }
        Ok(())
    }
}
