//! Exact solve of the (λ, μ) consistency system.

use super::poly::{resultant, uni_deflate, uni_eval, uni_gcd, uni_trim, UniPoly};
use crate::error::{Error, Result};
use crate::Rat;
use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// A polynomial in (λ, μ) as a map from exponent pairs to coefficients.
type LmPoly = BTreeMap<(u8, u8), Rat>;

fn lm_monomials(rows: &[LmPoly]) -> Vec<(u8, u8)> {
    let mut mons: Vec<(u8, u8)> = Vec::new();
    for r in rows {
        for k in r.keys() {
            if !mons.contains(k) {
                mons.push(*k);
            }
        }
    }
    mons.sort_unstable();
    mons
}

/// Reduce the constraint rows to an independent echelon set over the
/// monomial coordinates.
fn reduce_rows(rows: Vec<LmPoly>) -> Vec<LmPoly> {
    let mons = lm_monomials(&rows);
    let nc = mons.len();
    let mut echelon: Vec<Vec<Rat>> = Vec::new();
    for r in rows {
        let mut v: Vec<Rat> = mons
            .iter()
            .map(|k| r.get(k).cloned().unwrap_or_else(Rat::zero))
            .collect();
        for e in &echelon {
            let lead = e.iter().position(|c| !c.is_zero()).unwrap();
            if !v[lead].is_zero() {
                let f = v[lead].clone();
                for (vi, ei) in v.iter_mut().zip(e.iter()) {
                    let p = &f * ei;
                    *vi = &*vi - &p;
                }
            }
        }
        if let Some(lead) = v.iter().position(|c| !c.is_zero()) {
            let inv = crate::rat_i(1) / v[lead].clone();
            for c in v.iter_mut() {
                *c = &*c * &inv;
            }
            echelon.push(v);
            if echelon.len() == nc {
                break;
            }
        }
    }
    echelon
        .into_iter()
        .map(|v| {
            let mut m = LmPoly::new();
            for (c, k) in v.into_iter().zip(mons.iter()) {
                if !c.is_zero() {
                    m.insert(*k, c);
                }
            }
            m
        })
        .collect()
}

/// View an LmPoly as univariate in μ with UniPoly-in-λ coefficients.
fn as_mu_poly(p: &LmPoly) -> Vec<UniPoly> {
    let dmu = p.keys().map(|k| k.1).max().unwrap_or(0) as usize;
    let dl = p.keys().map(|k| k.0).max().unwrap_or(0) as usize;
    let mut out = vec![vec![Rat::zero(); dl + 1]; dmu + 1];
    for (&(le, me), c) in p {
        out[me as usize][le as usize] = c.clone();
    }
    for u in out.iter_mut() {
        uni_trim(u);
    }
    out
}

/// Substitute a rational λ, leaving a univariate polynomial in μ.
fn subst_lambda(p: &LmPoly, lambda: &Rat) -> UniPoly {
    let mut out: UniPoly = Vec::new();
    for (&(le, me), c) in p {
        let mut v = c.clone();
        for _ in 0..le {
            v = &v * lambda;
        }
        while out.len() <= me as usize {
            out.push(Rat::zero());
        }
        out[me as usize] = &out[me as usize] + &v;
    }
    uni_trim(&mut out);
    out
}

/// Resultant in μ of two (λ, μ)-polynomials: a univariate polynomial in λ
/// vanishing at every λ admitting a common root.
fn eliminate_mu(a: &LmPoly, b: &LmPoly) -> Option<UniPoly> {
    // build Sylvester-style resultant by treating μ as the main variable
    // with λ-polynomial coefficients; evaluate by interpolation: the degree
    // of the resultant is bounded by deg_λ(a)·deg_μ(b) + deg_λ(b)·deg_μ(a).
    let am = as_mu_poly(a);
    let bm = as_mu_poly(b);
    let da_l = am.iter().map(|u| u.len().saturating_sub(1)).max()?;
    let db_l = bm.iter().map(|u| u.len().saturating_sub(1)).max()?;
    let da_m = am.len().checked_sub(1)?;
    let db_m = bm.len().checked_sub(1)?;
    let bound = da_l * db_m + db_l * da_m;
    // sample at bound+1 integer λ values and interpolate exactly
    let mut xs: Vec<Rat> = Vec::with_capacity(bound + 1);
    let mut ys: Vec<Rat> = Vec::with_capacity(bound + 1);
    let mut x: i64 = 0;
    while xs.len() <= bound {
        let xr = crate::rat_i(x);
        let ua = subst_lambda(a, &xr);
        let ub = subst_lambda(b, &xr);
        // leading-coefficient drop at a sample point would change the
        // Sylvester dimension; skip such points
        if ua.len() == da_m + 1 && ub.len() == db_m + 1 {
            let r = resultant(&ua, &ub)?;
            xs.push(xr);
            ys.push(r);
        }
        x += 1;
        if x > 10_000 {
            return None;
        }
    }
    Some(lagrange_interpolate(&xs, &ys))
}

fn lagrange_interpolate(xs: &[Rat], ys: &[Rat]) -> UniPoly {
    let n = xs.len();
    let mut acc: UniPoly = Vec::new();
    for i in 0..n {
        // basis polynomial Π_{j≠i} (x − x_j)/(x_i − x_j)
        let mut num: UniPoly = vec![crate::rat_i(1)];
        let mut den = crate::rat_i(1);
        for j in 0..n {
            if j == i {
                continue;
            }
            num = super::poly::uni_mul(&num, &[-&xs[j], crate::rat_i(1)].to_vec());
            den = &den * &(&xs[i] - &xs[j]);
        }
        let f = &ys[i] / &den;
        while acc.len() < num.len() {
            acc.push(Rat::zero());
        }
        for (k, c) in num.iter().enumerate() {
            acc[k] = &acc[k] + &(c * &f);
        }
    }
    uni_trim(&mut acc);
    acc
}

/// Rational roots of a univariate polynomial with rational coefficients.
fn rational_roots(p: &UniPoly) -> Result<Vec<Rat>> {
    let mut q = p.clone();
    uni_trim(&mut q);
    let mut roots = Vec::new();
    loop {
        match q.len() {
            0 => return Err(Error::ExactInconsistent), // zero polynomial: not 0-dimensional
            1 => return Ok(roots),
            2 => {
                roots.push(-&q[0] / &q[1]);
                return Ok(roots);
            }
            3 => {
                // quadratic: rational roots iff the discriminant is a square
                let disc = &(&q[1] * &q[1]) - &(&crate::rat_i(4) * &(&q[2] * &q[0]));
                if disc.is_negative() {
                    return Ok(roots); // complex pair, no real solutions
                }
                let Some(s) = rat_sqrt(&disc) else {
                    return Err(Error::ExactInconsistent); // irrational real roots
                };
                let two_a = &crate::rat_i(2) * &q[2];
                roots.push(&(&-&q[1] + &s) / &two_a);
                if !s.is_zero() {
                    roots.push(&(&-&q[1] - &s) / &two_a);
                }
                return Ok(roots);
            }
            _ => {
                // peel off one rational root found by divisor search
                let Some(r) = find_one_rational_root(&q) else {
                    return Err(Error::ExactInconsistent);
                };
                roots.push(r.clone());
                q = uni_deflate(&q, &r);
                // drop repeated factors of the same root
                while !q.is_empty() && uni_eval(&q, &r).is_zero() {
                    q = uni_deflate(&q, &r);
                }
            }
        }
    }
}

/// Exact square root of a nonnegative rational, if it exists.
fn rat_sqrt(r: &Rat) -> Option<Rat> {
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(Rat::new(n, d))
    } else {
        None
    }
}

fn find_one_rational_root(p: &UniPoly) -> Option<Rat> {
    // clear denominators to an integer polynomial
    let mut den = BigInt::from(1);
    for c in p {
        let d = c.denom();
        let g = num_bigint_gcd(&den, d);
        den = &den * &(d / &g);
    }
    let ints: Vec<BigInt> = p.iter().map(|c| (c * Rat::from_integer(den.clone())).to_integer()).collect();
    let a0 = ints.first()?.abs();
    let an = ints.last()?.abs();
    if a0.is_zero() {
        return Some(Rat::zero());
    }
    let pd = small_divisors(&a0)?;
    let qd = small_divisors(&an)?;
    for num in &pd {
        for deno in &qd {
            for s in [1i64, -1] {
                let cand = Rat::new(num * BigInt::from(s), deno.clone());
                if uni_eval(p, &cand).is_zero() {
                    return Some(cand);
                }
            }
        }
    }
    None
}

fn num_bigint_gcd(a: &BigInt, b: &BigInt) -> BigInt {
    let (mut x, mut y) = (a.abs(), b.abs());
    while !y.is_zero() {
        let r = &x % &y;
        x = y;
        y = r;
    }
    x
}

fn small_divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    use num_traits::ToPrimitive;
    let v = n.to_u64()?;
    if v == 0 || v > 1_000_000_000 {
        return None;
    }
    let mut out = Vec::new();
    let mut i = 1u64;
    while i * i <= v {
        if v % i == 0 {
            out.push(BigInt::from(i));
            out.push(BigInt::from(v / i));
        }
        i += 1;
    }
    Some(out)
}

/// Common zero set of the d²-residual system in (λ, μ). Errors if the
/// variety is not a finite set of rational points.
pub fn solve_consistency() -> Result<Vec<(Rat, Rat)>> {
    let rows = super::residual_constraints()?;
    let rows = reduce_rows(rows);
    if rows.is_empty() {
        return Err(Error::ExactInconsistent); // every (λ,μ) closes: not 0-dim
    }
    // eliminate μ pairwise; gcd of the eliminants confines λ
    let mut g: UniPoly = Vec::new();
    for i in 0..rows.len() {
        for j in (i + 1)..rows.len() {
            if let Some(res) = eliminate_mu(&rows[i], &rows[j]) {
                if !res.is_empty() {
                    g = if g.is_empty() { res } else { uni_gcd(&g, &res) };
                }
            }
        }
        // rows univariate in λ constrain it directly
        if rows[i].keys().all(|k| k.1 == 0) {
            let u: UniPoly = {
                let mut v = Vec::new();
                for (&(le, _), c) in &rows[i] {
                    while v.len() <= le as usize {
                        v.push(Rat::zero());
                    }
                    v[le as usize] = c.clone();
                }
                v
            };
            g = if g.is_empty() { u } else { uni_gcd(&g, &u) };
        }
    }
    if g.len() <= 1 {
        return Err(Error::ExactInconsistent);
    }
    let mut out: Vec<(Rat, Rat)> = Vec::new();
    for lam in rational_roots(&g)? {
        // μ-values: common roots of all rows specialized at λ
        let mut gm: UniPoly = Vec::new();
        for r in &rows {
            let u = subst_lambda(r, &lam);
            if !u.is_empty() {
                gm = if gm.is_empty() { u } else { uni_gcd(&gm, &u) };
            }
        }
        if gm.is_empty() {
            return Err(Error::ExactInconsistent); // a full μ-line of solutions
        }
        for mu in rational_roots(&gm)? {
            // final verification against every constraint
            let ok = rows.iter().all(|r| uni_eval(&subst_lambda(r, &lam), &mu).is_zero());
            if ok && !out.contains(&(lam.clone(), mu.clone())) {
                out.push((lam.clone(), mu));
            }
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation_and_resultant_basics() {
        // (x−1)(x+2) and (x−1)(x−3): resultant zero; gcd is (x−1)
        let a: UniPoly = vec![crate::rat_i(-2), crate::rat_i(1), crate::rat_i(1)];
        let b: UniPoly = vec![crate::rat_i(3), crate::rat_i(-4), crate::rat_i(1)];
        assert!(resultant(&a, &b).unwrap().is_zero());
        let g = uni_gcd(&a, &b);
        assert_eq!(g, vec![crate::rat_i(-1), crate::rat_i(1)]);
        let roots = rational_roots(&a).unwrap();
        assert!(roots.contains(&crate::rat_i(1)) && roots.contains(&crate::rat_i(-2)));
    }

    #[test]
    fn consistency_solve_finds_exactly_the_two_pairs() {
        let sols = solve_consistency().unwrap();
        assert_eq!(
            sols,
            vec![
                (crate::rat(-1, 8), crate::rat_i(1)),
                (crate::rat(2, 5), crate::rat(-2, 25)),
            ]
        );
    }
}

