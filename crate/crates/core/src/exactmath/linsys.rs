use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{ExactMathError, Rational};

/// Solves `matrix · x = rhs` exactly.
///
/// Rows are scaled to integers and reduced with Bareiss' fraction-free
/// elimination; only back substitution touches fractions. Returns `Ok(None)`
/// for an inconsistent system. Free variables of an underdetermined system
/// are pinned to zero.
pub fn solve_linear_system(
    matrix: &[Vec<Rational>],
    rhs: &[Rational],
) -> Result<Option<Vec<Rational>>, ExactMathError> {
    if matrix.len() != rhs.len() {
        return Err(ExactMathError::DimensionMismatch(format!(
            "{} rows but {} right-hand side entries",
            matrix.len(),
            rhs.len()
        )));
    }
    let cols = matrix.first().map_or(0, Vec::len);
    if let Some((i, row)) = matrix.iter().enumerate().find(|(_, r)| r.len() != cols) {
        return Err(ExactMathError::DimensionMismatch(format!(
            "row {i} has {} entries, expected {cols}",
            row.len()
        )));
    }

    let mut aug: Vec<Vec<BigInt>> = matrix
        .iter()
        .zip(rhs)
        .map(|(row, b)| integer_row(row.iter().chain(std::iter::once(b))))
        .collect();
    let rows = aug.len();

    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !aug[i][c].is_zero()) else {
            continue;
        };
        aug.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..=cols {
                let num = &aug[r][c] * &aug[i][j] - &aug[i][c] * &aug[r][j];
                let (q, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss division must be exact");
                aug[i][j] = q;
            }
            aug[i][c] = BigInt::zero();
        }
        prev = aug[r][c].clone();
        pivots.push(c);
        r += 1;
    }

    if aug[r..].iter().any(|row| !row[cols].is_zero()) {
        return Ok(None);
    }

    let mut x = vec![Rational::zero(); cols];
    for (k, &c) in pivots.iter().enumerate().rev() {
        let mut acc = Rational::from_integer(aug[k][cols].clone());
        for j in c + 1..cols {
            if !aug[k][j].is_zero() {
                acc -= Rational::from_integer(aug[k][j].clone()) * &x[j];
            }
        }
        x[c] = acc / Rational::from_integer(aug[k][c].clone());
    }
    Ok(Some(x))
}

fn integer_row<'a>(values: impl Iterator<Item = &'a Rational> + Clone) -> Vec<BigInt> {
    let lcm = values
        .clone()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    values
        .map(|v| v.numer() * (&lcm / v.denom()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{int, rat};

    #[test]
    fn identity_returns_rhs() {
        let m = vec![vec![int(1), int(0)], vec![int(0), int(1)]];
        let b = vec![rat(3, 7), int(-2)];
        assert_eq!(solve_linear_system(&m, &b).unwrap(), Some(b.clone()));
    }

    #[test]
    fn inconsistent_rows() {
        let m = vec![vec![int(1), int(1)], vec![int(1), int(1)]];
        assert_eq!(solve_linear_system(&m, &[int(1), int(2)]).unwrap(), None);
    }

    #[test]
    fn diagonal_scaling() {
        let m = vec![vec![int(2), int(0)], vec![int(0), int(4)]];
        assert_eq!(
            solve_linear_system(&m, &[int(1), int(2)]).unwrap(),
            Some(vec![rat(1, 2), rat(1, 2)])
        );
    }

    #[test]
    fn underdetermined_pins_free_variables() {
        let m = vec![vec![int(1), int(1), int(0)]];
        assert_eq!(
            solve_linear_system(&m, &[int(5)]).unwrap(),
            Some(vec![int(5), int(0), int(0)])
        );
    }

    #[test]
    fn skipped_column_then_pivot() {
        let m = vec![
            vec![int(0), rat(1, 2), int(1)],
            vec![int(0), int(1), int(3)],
            vec![int(0), int(2), int(8)],
        ];
        // Consistent: y = 4, z = -1 gives 1, 1, 0.
        let b = vec![int(1), int(1), int(0)];
        let x = solve_linear_system(&m, &b).unwrap().unwrap();
        assert_eq!(x, vec![int(0), int(4), int(-1)]);
    }

    #[test]
    fn dimension_mismatch() {
        let m = vec![vec![int(1)], vec![int(1), int(2)]];
        assert!(solve_linear_system(&m, &[int(1), int(1)]).is_err());
        assert!(solve_linear_system(&[vec![int(1)]], &[]).is_err());
    }
}
