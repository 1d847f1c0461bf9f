//! Hermite and Smith normal forms over the integers.

use crate::intlin::Matrix;
use crate::scalar::Scalar;

/// Row-style Hermite normal form: the returned matrix has the same row
/// lattice as `m`, is in row echelon form with positive pivots, entries above
/// each pivot reduced into `[0, pivot)`, and zero rows dropped.
pub fn hermite_rows<T: Scalar>(m: &Matrix<T>) -> Matrix<T> {
    let mut a = m.clone();
    let (rows, cols) = (a.rows(), a.cols());
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        // Euclid down the column until a single nonzero entry remains at row r.
        loop {
            let piv = (r..rows)
                .filter(|&i| !a[(i, c)].is_zero())
                .min_by(|&i, &j| a[(i, c)].abs().cmp(&a[(j, c)].abs()));
            let Some(piv) = piv else { break };
            a.swap_rows(r, piv);
            let mut done = true;
            for i in r + 1..rows {
                if a[(i, c)].is_zero() {
                    continue;
                }
                let q = a[(i, c)].div_floor(&a[(r, c)]);
                row_axpy(&mut a, i, r, &q);
                if !a[(i, c)].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if a[(r, c)].is_zero() {
            continue;
        }
        if a[(r, c)].is_negative() {
            for j in 0..cols {
                a[(r, j)] = -a[(r, j)].clone();
            }
        }
        for i in 0..r {
            let q = a[(i, c)].div_floor(&a[(r, c)]);
            if !q.is_zero() {
                row_axpy(&mut a, i, r, &q);
            }
        }
        r += 1;
    }
    let data: Vec<T> = (0..r).flat_map(|i| a.row(i).to_vec()).collect();
    Matrix::new(r, cols, data).expect("shape")
}

/// row[i] -= q * row[k]
fn row_axpy<T: Scalar>(a: &mut Matrix<T>, i: usize, k: usize, q: &T) {
    for j in 0..a.cols() {
        let v = a[(i, j)].clone() - q.clone() * a[(k, j)].clone();
        a[(i, j)] = v;
    }
}

/// Nonzero Smith invariant factors `d1 | d2 | ...`, all positive.
pub fn smith_invariants<T: Scalar>(m: &Matrix<T>) -> Vec<T> {
    let mut a = m.clone();
    let (rows, cols) = (a.rows(), a.cols());
    let mut out = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // Smallest nonzero entry in the remaining block becomes the pivot.
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[(i, j)].is_zero()
                    && best.is_none_or(|(bi, bj)| a[(i, j)].abs() < a[(bi, bj)].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap_rows(t, pi);
        a.swap_cols(t, pj);
        let mut clean = true;
        for i in t + 1..rows {
            if !a[(i, t)].is_zero() {
                let q = a[(i, t)].div_floor(&a[(t, t)]);
                row_axpy(&mut a, i, t, &q);
                clean &= a[(i, t)].is_zero();
            }
        }
        for j in t + 1..cols {
            if !a[(t, j)].is_zero() {
                let q = a[(t, j)].div_floor(&a[(t, t)]);
                for i in 0..rows {
                    let v = a[(i, j)].clone() - q.clone() * a[(i, t)].clone();
                    a[(i, j)] = v;
                }
                clean &= a[(t, j)].is_zero();
            }
        }
        if !clean {
            continue;
        }
        // Pivot must divide the rest of the block; otherwise fold a row in.
        let piv = a[(t, t)].clone();
        let bad = (t + 1..rows)
            .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
            .find(|&(i, j)| !a[(i, j)].is_multiple_of(&piv));
        if let Some((i, _)) = bad {
            for j in 0..cols {
                let v = a[(t, j)].clone() + a[(i, j)].clone();
                a[(t, j)] = v;
            }
            continue;
        }
        out.push(piv.abs());
        t += 1;
    }
    out
}
