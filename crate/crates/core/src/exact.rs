//! Small dense exact linear algebra over the rationals.

use crate::error::{Error, Result};
use crate::Rat;
use alloc::vec;
use alloc::vec::Vec;
use num_traits::Zero;

pub type Mat = Vec<Vec<Rat>>;

pub fn zeros(rows: usize, cols: usize) -> Mat {
    vec![vec![Rat::zero(); cols]; rows]
}

pub fn identity(n: usize) -> Mat {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = crate::rat_i(1);
    }
    m
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let (ra, ca) = (a.len(), a[0].len());
    let cb = b[0].len();
    let mut out = zeros(ra, cb);
    for i in 0..ra {
        for k in 0..ca {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..cb {
                if b[k][j].is_zero() {
                    continue;
                }
                let p = &a[i][k] * &b[k][j];
                out[i][j] = &out[i][j] + &p;
            }
        }
    }
    out
}

pub fn transpose(a: &Mat) -> Mat {
    let (r, c) = (a.len(), a[0].len());
    let mut out = zeros(c, r);
    for i in 0..r {
        for j in 0..c {
            out[j][i] = a[i][j].clone();
        }
    }
    out
}

/// Row-reduce in place; returns the pivot columns.
fn rref(m: &mut Mat) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = crate::rat_i(1) / m[r][c].clone();
        for j in c..cols {
            m[r][j] = &m[r][j] * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let p = &f * &m[r][j];
                    m[i][j] = &m[i][j] - &p;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

pub fn rank(a: &Mat) -> usize {
    let mut m = a.clone();
    rref(&mut m).len()
}

/// Solve `A X = B` with multiple right-hand sides, requiring an exact,
/// consistent and fully determined solution (rank = #cols of A).
pub fn solve_multi(a: &Mat, b: &Mat) -> Result<Mat> {
    let rows = a.len();
    let ca = a[0].len();
    let cb = b[0].len();
    let mut aug = zeros(rows, ca + cb);
    for i in 0..rows {
        aug[i][..ca].clone_from_slice(&a[i]);
        aug[i][ca..].clone_from_slice(&b[i]);
    }
    let pivots = rref(&mut aug);
    // any pivot beyond the A block means inconsistency
    if pivots.iter().any(|&p| p >= ca) {
        return Err(Error::ExactInconsistent);
    }
    if pivots.len() != ca {
        return Err(Error::RankDeficient { pivot: 0.0 });
    }
    let mut x = zeros(ca, cb);
    for (r, &p) in pivots.iter().enumerate() {
        for j in 0..cb {
            x[p][j] = aug[r][ca + j].clone();
        }
    }
    Ok(x)
}

/// Basis of the null space of `A` (columns of the returned matrix span it).
pub fn nullspace(a: &Mat) -> Mat {
    let mut m = a.clone();
    let cols = m[0].len();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = zeros(cols, free.len());
    for (k, &fc) in free.iter().enumerate() {
        basis[fc][k] = crate::rat_i(1);
        for (r, &pc) in pivots.iter().enumerate() {
            basis[pc][k] = -m[r][fc].clone();
        }
    }
    basis
}

pub fn inverse(a: &Mat) -> Result<Mat> {
    let n = a.len();
    solve_multi(a, &identity(n))
}
