//! Sparse multivariate polynomials over ℚ in the 14 torsion coordinates
//! and the two ansatz parameters.

use crate::coeff::Coeff;
use crate::Rat;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use num_traits::Signed;

pub(crate) fn rat0() -> Rat {
    <Rat as Coeff>::zero()
}

/// Variable count: t₁..t₁₄ then λ, μ.
pub const NVARS: usize = 16;
/// Index of λ.
pub const LAM: usize = 14;
/// Index of μ.
pub const MU: usize = 15;

pub type Mono = [u8; NVARS];

#[derive(Clone, PartialEq, Debug)]
pub struct Poly {
    pub terms: BTreeMap<Mono, Rat>,
}

impl Poly {
    pub fn new() -> Poly {
        Poly { terms: BTreeMap::new() }
    }

    pub fn constant(c: Rat) -> Poly {
        let mut p = Poly::new();
        if !c.is_zero() {
            p.terms.insert([0; NVARS], c);
        }
        p
    }

    pub fn var(i: usize) -> Poly {
        let mut m = [0u8; NVARS];
        m[i] = 1;
        let mut p = Poly::new();
        p.terms.insert(m, crate::rat_i(1));
        p
    }

    fn accum(&mut self, m: Mono, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(old) => {
                let nv = &*old + &c;
                if nv.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *old = nv;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn scale_rat(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::new();
        }
        let mut out = Poly::new();
        for (m, v) in &self.terms {
            out.terms.insert(*m, v * c);
        }
        out
    }

    /// ∂/∂tₐ (or ∂/∂λ, ∂/∂μ for the parameter slots).
    pub fn d_var(&self, i: usize) -> Poly {
        let mut out = Poly::new();
        for (m, v) in &self.terms {
            if m[i] == 0 {
                continue;
            }
            let mut nm = *m;
            nm[i] -= 1;
            out.accum(nm, v * crate::rat_i(m[i] as i64));
        }
        out
    }

    /// Substitute exact values for λ and μ, leaving a polynomial in t.
    pub fn subst_params(&self, lambda: &Rat, mu: &Rat) -> Poly {
        let mut out = Poly::new();
        for (m, v) in &self.terms {
            let mut c = v.clone();
            for _ in 0..m[LAM] {
                c = &c * lambda;
            }
            for _ in 0..m[MU] {
                c = &c * mu;
            }
            let mut nm = *m;
            nm[LAM] = 0;
            nm[MU] = 0;
            out.accum(nm, c);
        }
        out
    }

    /// Full evaluation at a point.
    pub fn eval(&self, vals: &[Rat; NVARS]) -> Rat {
        let mut acc = rat0();
        for (m, v) in &self.terms {
            let mut c = v.clone();
            for (i, &e) in m.iter().enumerate() {
                for _ in 0..e {
                    c = &c * &vals[i];
                }
            }
            acc = &acc + &c;
        }
        acc
    }

    /// Sum of absolute values of the coefficients.
    pub fn norm1(&self) -> Rat {
        let mut acc = rat0();
        for v in self.terms.values() {
            acc = &acc + &v.abs();
        }
        acc
    }

    /// Split by the (λ-degree, μ-degree) pair: each entry maps the exponent
    /// pair to the pure-t cofactor polynomial.
    pub fn by_params(&self) -> BTreeMap<(u8, u8), Poly> {
        let mut out: BTreeMap<(u8, u8), Poly> = BTreeMap::new();
        for (m, v) in &self.terms {
            let key = (m[LAM], m[MU]);
            let mut nm = *m;
            nm[LAM] = 0;
            nm[MU] = 0;
            out.entry(key).or_insert_with(Poly::new).accum(nm, v.clone());
        }
        out
    }

    pub fn total_degree(&self) -> usize {
        self.terms
            .keys()
            .map(|m| m.iter().map(|&e| e as usize).sum())
            .max()
            .unwrap_or(0)
    }
}

impl Default for Poly {
    fn default() -> Self {
        Poly::new()
    }
}

impl Coeff for Poly {
    fn zero() -> Self {
        Poly::new()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (m, v) in &o.terms {
            out.accum(*m, v.clone());
        }
        out
    }
    fn sub(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (m, v) in &o.terms {
            out.accum(*m, -v);
        }
        out
    }
    fn mul(&self, o: &Self) -> Self {
        let mut out = Poly::new();
        for (ma, va) in &self.terms {
            for (mb, vb) in &o.terms {
                let mut m = *ma;
                for (i, e) in m.iter_mut().enumerate() {
                    *e += mb[i];
                }
                out.accum(m, va * vb);
            }
        }
        out
    }
    fn neg(&self) -> Self {
        let mut out = Poly::new();
        for (m, v) in &self.terms {
            out.terms.insert(*m, -v);
        }
        out
    }
    fn from_rat(r: &Rat) -> Self {
        Poly::constant(r.clone())
    }
}

/// Univariate polynomial over ℚ, coefficients low to high.
pub type UniPoly = Vec<Rat>;

pub fn uni_trim(p: &mut UniPoly) {
    while p.last().map(|c| c.is_zero()).unwrap_or(false) {
        p.pop();
    }
}

pub fn uni_deg(p: &UniPoly) -> Option<usize> {
    if p.is_empty() {
        None
    } else {
        Some(p.len() - 1)
    }
}

pub fn uni_mul(a: &UniPoly, b: &UniPoly) -> UniPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = alloc::vec![rat0(); a.len() + b.len() - 1];
    for (i, ca) in a.iter().enumerate() {
        for (j, cb) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(ca * cb);
        }
    }
    uni_trim(&mut out);
    out
}

/// Remainder of a by b (b nonzero).
pub fn uni_rem(a: &UniPoly, b: &UniPoly) -> UniPoly {
    let mut r = a.clone();
    uni_trim(&mut r);
    let db = b.len() - 1;
    let lead = b[db].clone();
    while r.len() > db {
        let dr = r.len() - 1;
        let f = &r[dr] / &lead;
        for i in 0..=db {
            let p = &f * &b[i];
            r[dr - db + i] = &r[dr - db + i] - &p;
        }
        uni_trim(&mut r);
        if r.len() > dr {
            break; // defensive; cannot happen
        }
    }
    r
}

/// Monic gcd.
pub fn uni_gcd(a: &UniPoly, b: &UniPoly) -> UniPoly {
    let mut x = a.clone();
    let mut y = b.clone();
    uni_trim(&mut x);
    uni_trim(&mut y);
    while !y.is_empty() {
        let r = uni_rem(&x, &y);
        x = y;
        y = r;
    }
    if let Some(lead) = x.last().cloned() {
        for c in x.iter_mut() {
            *c = &*c / &lead;
        }
    }
    x
}

pub fn uni_eval(p: &UniPoly, x: &Rat) -> Rat {
    let mut acc = rat0();
    for c in p.iter().rev() {
        acc = &(&acc * x) + c;
    }
    acc
}

/// Divide out a known root (exact).
pub fn uni_deflate(p: &UniPoly, root: &Rat) -> UniPoly {
    let n = p.len();
    let mut q = alloc::vec![rat0(); n - 1];
    let mut carry = rat0();
    for i in (0..n).rev() {
        let c = &p[i] + &(&carry * root);
        if i == 0 {
            debug_assert!(c.is_zero());
        } else {
            q[i - 1] = c.clone();
            carry = c;
        }
    }
    uni_trim(&mut q);
    q
}

/// Exact determinant by fraction-wise Gaussian elimination.
pub fn det(mut m: Vec<Vec<Rat>>) -> Rat {
    let n = m.len();
    let mut sign = crate::rat_i(1);
    let mut acc = crate::rat_i(1);
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return rat0();
        };
        if p != c {
            m.swap(p, c);
            sign = -sign;
        }
        let pivot = m[c][c].clone();
        acc = &acc * &pivot;
        for i in (c + 1)..n {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] / &pivot;
            for j in c..n {
                let s = &f * &m[c][j];
                m[i][j] = &m[i][j] - &s;
            }
        }
    }
    &sign * &acc
}

/// Resultant of two univariate polynomials via the Sylvester matrix.
/// Returns None if either argument is the zero polynomial.
pub fn resultant(a: &UniPoly, b: &UniPoly) -> Option<Rat> {
    let (da, db) = (uni_deg(a)?, uni_deg(b)?);
    if da == 0 && db == 0 {
        return Some(crate::rat_i(1));
    }
    let n = da + db;
    let mut m = alloc::vec![alloc::vec![rat0(); n]; n];
    for r in 0..db {
        for (k, c) in a.iter().enumerate() {
            m[r][r + da - k] = c.clone();
        }
    }
    for r in 0..da {
        for (k, c) in b.iter().enumerate() {
            m[db + r][r + db - k] = c.clone();
        }
    }
    Some(det(m))
}
