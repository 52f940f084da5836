//! Fraction-free (Bareiss) elimination over the integers.
//!
//! Every intermediate entry is a minor of the input, so the divisions in
//! the update `(a_kk * a_ij - a_ik * a_kj) / a_prev` are exact.

use num_bigint::BigInt;
use num_traits::{One, Zero};

pub type Matrix = Vec<Vec<BigInt>>;

fn eliminate_step(m: &mut Matrix, k: usize, prev: &BigInt) {
    let (top, bottom) = m.split_at_mut(k + 1);
    let pivot_row = &top[k];
    let pivot = &pivot_row[k];
    for row in bottom.iter_mut() {
        let factor = row[k].clone();
        if factor.is_zero() {
            // (pivot * a_ij) / prev
            for j in k + 1..row.len() {
                if !row[j].is_zero() {
                    row[j] = &row[j] * pivot / prev;
                }
            }
        } else {
            for j in k + 1..row.len() {
                row[j] = (pivot * &row[j] - &factor * &pivot_row[j]) / prev;
            }
        }
        row[k] = BigInt::zero();
    }
}

/// Exact determinant; the empty matrix has determinant 1.
pub fn determinant(a: &Matrix) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m = a.clone();
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(pivot) = (k..n).find(|&i| !m[i][k].is_zero()) else {
            return BigInt::zero();
        };
        if pivot != k {
            m.swap(pivot, k);
            negate = !negate;
        }
        eliminate_step(&mut m, k, &prev);
        prev = m[k][k].clone();
    }
    if negate {
        -prev
    } else {
        prev
    }
}

/// Leading principal minors `det(A[..k, ..k])` for `k = 1..=n`, computed
/// without pivoting. Stops early (the last entry is zero) when a minor
/// vanishes.
pub fn leading_minors(a: &Matrix) -> Vec<BigInt> {
    let n = a.len();
    let mut m = a.clone();
    let mut prev = BigInt::one();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        if m[k][k].is_zero() {
            out.push(BigInt::zero());
            break;
        }
        out.push(m[k][k].clone());
        eliminate_step(&mut m, k, &prev);
        prev = m[k][k].clone();
    }
    out
}

/// Solves `A X = B` for square non-singular `A`.
///
/// Returns `(d, Y)` with `d = ±det(A)` and `Y = d * A^-1 * B` an integer
/// matrix; `None` when `A` is singular.
pub fn solve(a: &Matrix, b: &Matrix) -> Option<(BigInt, Matrix)> {
    let n = a.len();
    let cols = b.first().map_or(0, Vec::len);
    if n == 0 {
        return Some((BigInt::one(), Vec::new()));
    }
    let mut m: Matrix = a
        .iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().chain(rb).cloned().collect())
        .collect();
    let mut prev = BigInt::one();
    for k in 0..n {
        let pivot = (k..n).find(|&i| !m[i][k].is_zero())?;
        m.swap(pivot, k);
        eliminate_step(&mut m, k, &prev);
        prev = m[k][k].clone();
    }
    let scale = prev;
    let mut y = vec![vec![BigInt::zero(); cols]; n];
    for c in 0..cols {
        for i in (0..n).rev() {
            let mut acc = &scale * &m[i][n + c];
            for j in i + 1..n {
                acc -= &m[i][j] * &y[j][c];
            }
            y[i][c] = acc / &m[i][i];
        }
    }
    Some((scale, y))
}
