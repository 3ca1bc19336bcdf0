//! Householder least-squares over jet coefficients.
//!
//! The Taylor channels ride along the value-level factorization, so the
//! solution of `A(r) x(r) = b(r)` carries correct derivatives in `r` whenever
//! the inputs do.

use crate::error::{Error, Result};
use crate::jet::Jet;
use alloc::vec;
use alloc::vec::Vec;

pub struct LstsqOut {
    pub x: Vec<Jet>,
    /// Euclidean norm of the least-squares residual (value channel).
    pub residual: f64,
    /// Smallest |R_kk| encountered (value channel), a rank diagnostic.
    pub min_pivot: f64,
}

/// Solve `min ‖A x − b‖` for an m×n system with m ≥ n and full column rank.
pub fn lstsq(a: &[Vec<Jet>], b: &[Jet], pivot_tol: f64) -> Result<LstsqOut> {
    let m = a.len();
    let n = if m > 0 { a[0].len() } else { 0 };
    debug_assert!(m >= n);
    let mut r: Vec<Vec<Jet>> = a.to_vec();
    let mut y: Vec<Jet> = b.to_vec();
    let mut min_pivot = f64::INFINITY;

    for k in 0..n {
        // Householder vector for column k, rows k..m.
        let mut sigma = Jet::ZERO;
        for i in k..m {
            sigma = sigma + r[i][k] * r[i][k];
        }
        let norm = sigma.sqrt();
        if norm.abs_val() <= pivot_tol {
            return Err(Error::RankDeficient { pivot: norm.abs_val() });
        }
        let alpha = if r[k][k].val() >= 0.0 { -norm } else { norm };
        let mut v: Vec<Jet> = vec![Jet::ZERO; m];
        v[k] = r[k][k] - alpha;
        for i in (k + 1)..m {
            v[i] = r[i][k];
        }
        let mut vtv = Jet::ZERO;
        for vi in v.iter().skip(k) {
            vtv = vtv + *vi * *vi;
        }
        if vtv.abs_val() > 0.0 {
            let two_over = Jet::constant(2.0) / vtv;
            for j in k..n {
                let mut dot = Jet::ZERO;
                for i in k..m {
                    dot = dot + v[i] * r[i][j];
                }
                let f = dot * two_over;
                for i in k..m {
                    r[i][j] = r[i][j] - f * v[i];
                }
            }
            let mut dot = Jet::ZERO;
            for i in k..m {
                dot = dot + v[i] * y[i];
            }
            let f = dot * two_over;
            for i in k..m {
                y[i] = y[i] - f * v[i];
            }
        }
        r[k][k] = alpha;
        let p = alpha.abs_val();
        if p < min_pivot {
            min_pivot = p;
        }
        if p <= pivot_tol {
            return Err(Error::RankDeficient { pivot: p });
        }
    }

    // Back substitution.
    let mut x = vec![Jet::ZERO; n];
    for k in (0..n).rev() {
        let mut s = y[k];
        for j in (k + 1)..n {
            s = s - r[k][j] * x[j];
        }
        x[k] = s / r[k][k];
    }

    let mut res = 0.0;
    for yi in y.iter().take(m).skip(n) {
        res += yi.val() * yi.val();
    }
    Ok(LstsqOut { x, residual: libm::sqrt(res), min_pivot })
}
