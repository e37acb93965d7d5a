//! Exact linear algebra over a field by fraction-free (Bareiss-style)
//! elimination: the update rule keeps every intermediate value inside
//! the subring generated by the entries and divides by the previous
//! pivot, which is exact. Only one inversion per pivot step is needed.

use crate::scalar::Field;
use crate::{Error, Result};

/// Rank of a dense matrix given as rows.
pub fn matrix_rank<F: Field>(mut m: Vec<Vec<F>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0usize;
    let mut prev = F::one();
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank][col].clone();
        let prev_inv = prev.inv().expect("previous pivot is nonzero");
        for r in rank + 1..rows {
            let head = m[r][col].clone();
            for c in col..cols {
                let v = m[r][c].mul(&pivot).sub(&head.mul(&m[rank][c]));
                m[r][c] = v.mul(&prev_inv);
            }
        }
        prev = pivot;
        rank += 1;
    }
    rank
}

/// Inverse of a square matrix given as rows; Err(SingularMatrix) when
/// the determinant vanishes.
pub fn invert_matrix<F: Field>(m: &[Vec<F>]) -> Result<Vec<Vec<F>>> {
    let n = m.len();
    if n == 0 || m.iter().any(|row| row.len() != n) {
        return Err(Error::DimMismatch("inverse requires a square matrix".into()));
    }
    let mut a: Vec<Vec<F>> = m.to_vec();
    let mut inv: Vec<Vec<F>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { F::one() } else { F::zero() }).collect())
        .collect();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Err(Error::SingularMatrix);
        };
        a.swap(col, p);
        inv.swap(col, p);
        let pivot_inv = a[col][col].inv()?;
        for c in 0..n {
            a[col][c] = a[col][c].mul(&pivot_inv);
            inv[col][c] = inv[col][c].mul(&pivot_inv);
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for c in 0..n {
                let va = a[r][c].sub(&factor.mul(&a[col][c]));
                a[r][c] = va;
                let vi = inv[r][c].sub(&factor.mul(&inv[col][c]));
                inv[r][c] = vi;
            }
        }
    }
    Ok(inv)
}

/// Solve a x = b for square a.
pub fn solve_linear<F: Field>(a: &[Vec<F>], b: &[F]) -> Result<Vec<F>> {
    let inv = invert_matrix(a)?;
    let n = b.len();
    let mut out = vec![F::zero(); n];
    for (i, row) in inv.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            out[i] = out[i].add(&v.mul(&b[j]));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{zeta, Cyclotomic};

    fn c(v: i64) -> Cyclotomic {
        Cyclotomic::from_int(v)
    }

    #[test]
    fn rank_of_small_matrices() {
        assert_eq!(matrix_rank::<Cyclotomic>(vec![]), 0);
        assert_eq!(matrix_rank(vec![vec![c(0), c(0)], vec![c(0), c(0)]]), 0);
        assert_eq!(matrix_rank(vec![vec![c(1), c(2)], vec![c(2), c(4)]]), 1);
        assert_eq!(matrix_rank(vec![vec![c(1), c(2)], vec![c(3), c(4)]]), 2);
        // wide matrix with a skipped column
        assert_eq!(
            matrix_rank(vec![vec![c(0), c(1), c(1)], vec![c(0), c(2), c(3)]]),
            2
        );
    }

    #[test]
    fn rank_over_a_genuine_cyclotomic_matrix() {
        let z = zeta(5);
        // rows (1, z), (z, z^2) are proportional
        let m = vec![vec![c(1), z.clone()], vec![z.clone(), z.mul(&z)]];
        assert_eq!(matrix_rank(m), 1);
        let m2 = vec![vec![c(1), z.clone()], vec![z.clone(), c(1)]];
        assert_eq!(matrix_rank(m2), 2);
    }

    #[test]
    fn inverse_round_trip() {
        let m = vec![vec![c(1), c(2)], vec![c(3), c(5)]];
        let inv = invert_matrix(&m).unwrap();
        // m * inv = identity
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = c(0);
                for k in 0..2 {
                    acc = acc.add(&m[i][k].mul(&inv[k][j]));
                }
                assert_eq!(acc, if i == j { c(1) } else { c(0) });
            }
        }
        let singular = vec![vec![c(1), c(2)], vec![c(2), c(4)]];
        assert!(matches!(invert_matrix(&singular), Err(Error::SingularMatrix)));
    }

    #[test]
    fn linear_solve() {
        let a = vec![vec![c(2), c(1)], vec![c(1), c(1)]];
        let b = vec![c(3), c(2)];
        let x = solve_linear(&a, &b).unwrap();
        assert_eq!(x, vec![c(1), c(1)]);
    }
}
