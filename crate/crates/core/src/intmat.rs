//! Integer matrix reductions over arbitrary-precision integers.
//!
//! Lattices are stored as row spans. Matrices are small (a handful of rows
//! per prime factor of a conductor), so clarity wins over speed here.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Matrix = Vec<Vec<BigInt>>;

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

pub fn from_u64_rows(rows: &[Vec<u64>]) -> Matrix {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

/// Smith normal form `U * A * V = S` of an `n x r` matrix. Only the column
/// transform `V` and its inverse are tracked.
#[derive(Debug, Clone)]
pub struct Smith {
    /// Diagonal of `S`, length `min(n, r)`, each dividing the next (zeros last).
    pub diagonal: Vec<BigInt>,
    pub v: Matrix,
    pub v_inv: Matrix,
}

fn swap_cols(m: &mut Matrix, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

/// `col_j -= q * col_t`
fn col_axpy(m: &mut Matrix, j: usize, t: usize, q: &BigInt) {
    for row in m.iter_mut() {
        let delta = &row[t] * q;
        row[j] -= delta;
    }
}

/// `row_i -= q * row_t`
fn row_axpy(m: &mut Matrix, i: usize, t: usize, q: &BigInt) {
    let (src, dst) = if i < t {
        let (lo, hi) = m.split_at_mut(t);
        (&hi[0], &mut lo[i])
    } else {
        let (lo, hi) = m.split_at_mut(i);
        (&lo[t], &mut hi[0])
    };
    for (d, s) in dst.iter_mut().zip(src.iter()) {
        *d -= s * q;
    }
}

pub fn smith(a: &Matrix, cols: usize) -> Smith {
    let mut m: Matrix = a.clone();
    let n = m.len();
    let r = cols;
    let mut v = identity(r);
    let mut v_inv = identity(r);
    let k = n.min(r);
    for t in 0..k {
        loop {
            // smallest nonzero entry of the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..r {
                    if !m[i][j].is_zero() && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { break };
            m.swap(t, bi);
            if bj != t {
                swap_cols(&mut m, t, bj);
                swap_cols(&mut v, t, bj);
                v_inv.swap(t, bj);
            }
            let mut clean = true;
            for i in t + 1..n {
                if m[i][t].is_zero() {
                    continue;
                }
                let q = m[i][t].div_floor(&m[t][t]);
                row_axpy(&mut m, i, t, &q);
                if !m[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..r {
                if m[t][j].is_zero() {
                    continue;
                }
                let q = m[t][j].div_floor(&m[t][t]);
                col_axpy(&mut m, j, t, &q);
                col_axpy(&mut v, j, t, &q);
                // inverse op on rows of V^{-1}: row_t += q * row_j
                let neg = -q;
                row_axpy(&mut v_inv, t, j, &neg);
                if !m[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility of the remaining block
            let pivot = m[t][t].clone();
            let bad = (t + 1..n).find(|&i| (t + 1..r).any(|j| !m[i][j].is_multiple_of(&pivot)));
            match bad {
                Some(i) => {
                    let minus_one = -BigInt::one();
                    row_axpy(&mut m, t, i, &minus_one);
                }
                None => break,
            }
        }
        if t < n && m[t][t].is_negative() {
            for x in m[t].iter_mut() {
                *x = -x.clone();
            }
        }
    }
    let diagonal = (0..k).map(|i| m[i][i].clone()).collect();
    Smith { diagonal, v, v_inv }
}

/// Row echelon form by unimodular row operations restricted to the first
/// `upto` columns. Returns the rank. Pivots are made positive and, when
/// `reduce` is set, entries above each pivot are reduced into `[0, pivot)`.
fn echelon(m: &mut Matrix, upto: usize, reduce: bool) -> usize {
    let n = m.len();
    let mut row = 0;
    let mut pivots = Vec::new();
    for col in 0..upto {
        if row >= n {
            break;
        }
        loop {
            let best = (row..n)
                .filter(|&i| !m[i][col].is_zero())
                .min_by(|&a, &b| m[a][col].abs().cmp(&m[b][col].abs()));
            let Some(bi) = best else { break };
            m.swap(row, bi);
            let mut done = true;
            for i in row + 1..n {
                if m[i][col].is_zero() {
                    continue;
                }
                let q = m[i][col].div_floor(&m[row][col]);
                row_axpy(m, i, row, &q);
                if !m[i][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if m[row][col].is_zero() {
            continue;
        }
        if m[row][col].is_negative() {
            for x in m[row].iter_mut() {
                *x = -x.clone();
            }
        }
        pivots.push((row, col));
        row += 1;
    }
    if reduce {
        for &(pr, pc) in &pivots {
            for i in 0..pr {
                let q = m[i][pc].div_floor(&m[pr][pc]);
                if !q.is_zero() {
                    row_axpy(m, i, pr, &q);
                }
            }
        }
    }
    row
}

/// Hermite normal form basis of the row lattice (zero rows dropped).
pub fn hermite(rows: &Matrix, cols: usize) -> Matrix {
    let mut m = rows.clone();
    let rank = echelon(&mut m, cols, true);
    m.truncate(rank);
    m
}

/// Basis of `{ x : x * B = 0 }` for an `n x s` matrix `B`.
pub fn left_kernel(b: &Matrix, s: usize) -> Matrix {
    let n = b.len();
    let mut aug: Matrix = b
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
            r
        })
        .collect();
    let rank = echelon(&mut aug, s, false);
    aug.into_iter().skip(rank).map(|r| r[s..].to_vec()).collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(BigInt::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn smith_known_example() {
        let a = m(&[&[-6, 111, -36, 6], &[5, -672, 210, 74], &[0, -255, 81, 24], &[-7, 255, -81, -10]]);
        let s = smith(&a, 4);
        let d: Vec<i64> = s.diagonal.iter().map(|x| x.try_into().unwrap()).collect();
        assert_eq!(d, vec![1, 3, 21, 0]);
        assert_eq!(mat_mul(&s.v, &s.v_inv), identity(4));
    }

    #[test]
    fn smith_transform_diagonalizes_row_space() {
        let a = m(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let s = smith(&a, 3);
        let d: Vec<i64> = s.diagonal.iter().map(|x| x.try_into().unwrap()).collect();
        assert_eq!(d, vec![2, 6, 12]);
        // every row of A*V is a combination of the diagonal rows
        let av = mat_mul(&a, &s.v);
        for row in &av {
            for (j, x) in row.iter().enumerate() {
                assert!(x.is_multiple_of(&s.diagonal[j]));
            }
        }
    }

    #[test]
    fn hermite_is_canonical() {
        let a = m(&[&[2, 0], &[0, 3], &[4, 3]]);
        let b = m(&[&[2, 3], &[0, 3]]);
        assert_eq!(hermite(&a, 2), hermite(&b, 2));
    }

    #[test]
    fn left_kernel_spans() {
        let b = m(&[&[1, 2], &[2, 4], &[3, 6]]);
        let k = left_kernel(&b, 2);
        assert_eq!(k.len(), 2);
        for row in &k {
            let prod = mat_mul(&vec![row.clone()], &b);
            assert!(prod[0].iter().all(|x| x.is_zero()));
        }
    }
}
