use num_traits::{One, Signed, Zero};

use super::piece::{Interval, Piece};
use crate::error::{invalid, Result};
use crate::exactmath::{Fraction, Rational};

/// Piecewise-constant price density on `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PriceCurve {
    breakpoints: Vec<Rational>,
    densities: Vec<Rational>,
}

impl PriceCurve {
    /// `breakpoints` must run strictly upward from 0 to 1, with one
    /// nonnegative density per cell.
    pub fn new(breakpoints: Vec<Rational>, densities: Vec<Rational>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(invalid("a price curve needs at least the breakpoints 0 and 1"));
        }
        if !breakpoints[0].is_zero() || !breakpoints[breakpoints.len() - 1].is_one() {
            return Err(invalid("price curve breakpoints must start at 0 and end at 1"));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("price curve breakpoints must be strictly increasing"));
        }
        if densities.len() + 1 != breakpoints.len() {
            return Err(invalid(format!(
                "{} breakpoints need {} densities, got {}",
                breakpoints.len(),
                breakpoints.len() - 1,
                densities.len()
            )));
        }
        if let Some(d) = densities.iter().find(|d| d.is_negative()) {
            return Err(invalid(format!("negative price density {}", Fraction(d))));
        }
        Ok(PriceCurve {
            breakpoints,
            densities,
        })
    }

    pub fn uniform(density: Rational) -> Self {
        PriceCurve {
            breakpoints: vec![Rational::zero(), Rational::one()],
            densities: vec![density],
        }
    }

    pub fn zero() -> Self {
        Self::uniform(Rational::zero())
    }

    /// Curve that is zero everywhere except on the given pieces, each carrying
    /// a total price spread uniformly over its length. Pieces must be
    /// pairwise interior-disjoint and nondegenerate.
    pub fn from_priced_intervals(priced: &[(Interval, Rational)]) -> Self {
        let mut segments: Vec<(Rational, Rational, Rational)> = priced
            .iter()
            .filter(|(iv, _)| iv.lo < iv.hi)
            .map(|(iv, total)| (iv.lo.clone(), iv.hi.clone(), total / iv.length()))
            .collect();
        segments.sort();
        let mut breakpoints = vec![Rational::zero()];
        let mut densities = Vec::new();
        for (lo, hi, density) in segments {
            let last = breakpoints.last().expect("nonempty").clone();
            if lo > last {
                densities.push(Rational::zero());
                breakpoints.push(lo.clone());
            }
            densities.push(density);
            breakpoints.push(hi);
        }
        if breakpoints.last().expect("nonempty") < &Rational::one() {
            densities.push(Rational::zero());
            breakpoints.push(Rational::one());
        }
        PriceCurve {
            breakpoints,
            densities,
        }
    }

    /// Curve with the given constant density on each cell of a partition.
    pub fn from_cells(breakpoints: &[Rational], cell_prices: &[Rational]) -> Result<Self> {
        let densities = breakpoints
            .windows(2)
            .zip(cell_prices)
            .map(|(w, p)| p / (&w[1] - &w[0]))
            .collect();
        Self::new(breakpoints.to_vec(), densities)
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn densities(&self) -> &[Rational] {
        &self.densities
    }

    pub fn cells(&self) -> impl Iterator<Item = (Interval, &Rational)> {
        self.breakpoints
            .windows(2)
            .map(|w| Interval::new(w[0].clone(), w[1].clone()))
            .zip(self.densities.iter())
    }

    /// Integral of the density over `piece`.
    pub fn price_of(&self, piece: &Piece) -> Rational {
        let mut total = Rational::zero();
        for (cell, density) in self.cells() {
            if density.is_zero() {
                continue;
            }
            for iv in piece.intervals() {
                let overlap = cell.overlap(iv);
                if !overlap.is_zero() {
                    total += density * overlap;
                }
            }
        }
        total
    }
}

/// Prices for one of the three models.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PriceSystem {
    /// Per-unit (divisible) or per-copy (discrete) prices.
    Vector(Vec<Rational>),
    Curve(PriceCurve),
}

impl PriceSystem {
    pub fn as_vector(&self) -> Option<&[Rational]> {
        match self {
            PriceSystem::Vector(v) => Some(v),
            PriceSystem::Curve(_) => None,
        }
    }

    pub fn as_curve(&self) -> Option<&PriceCurve> {
        match self {
            PriceSystem::Curve(c) => Some(c),
            PriceSystem::Vector(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{int, rat};

    #[test]
    fn rejects_malformed_curves() {
        assert!(PriceCurve::new(vec![int(0), int(1)], vec![int(-1)]).is_err());
        assert!(PriceCurve::new(vec![int(0), rat(1, 2)], vec![int(1)]).is_err());
        assert!(PriceCurve::new(vec![int(0), rat(1, 2), rat(1, 2), int(1)], vec![int(1); 3]).is_err());
        assert!(PriceCurve::new(vec![int(0), int(1)], vec![]).is_err());
    }

    #[test]
    fn priced_intervals_fill_gaps_with_zero() {
        let curve = PriceCurve::from_priced_intervals(&[
            (Interval::new(rat(1, 2), rat(3, 4)), int(1)),
            (Interval::new(rat(1, 4), rat(1, 2)), rat(1, 2)),
        ]);
        assert_eq!(curve.breakpoints(), &[int(0), rat(1, 4), rat(1, 2), rat(3, 4), int(1)]);
        assert_eq!(curve.densities(), &[int(0), int(2), int(4), int(0)]);
        assert_eq!(curve.price_of(&Piece::full()), rat(3, 2));
        assert_eq!(curve.price_of(&Piece::interval(rat(3, 8), rat(5, 8))), rat(3, 4));
    }
}
