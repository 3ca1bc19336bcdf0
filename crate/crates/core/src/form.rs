//! Sparse exterior forms over a named anholonomic basis.

use crate::coeff::{Coeff, NumCoeff};
use crate::error::{Error, Result};
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

/// An ordered list of basis 1-form names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis {
    pub names: Vec<String>,
}

impl Basis {
    pub fn new(names: Vec<String>) -> Arc<Basis> {
        Arc::new(Basis { names })
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn index_of(&self, name: &str) -> Option<u8> {
        self.names.iter().position(|n| n == name).map(|i| i as u8)
    }
}

/// Standard orthonormal coframe basis `e1..e7`.
pub fn standard_basis() -> Arc<Basis> {
    use alloc::format;
    Basis::new((1..=7).map(|i| format!("e{i}")).collect())
}

/// A degree-p form with coefficients on strictly increasing multi-indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Form<C> {
    pub basis: Arc<Basis>,
    pub degree: usize,
    pub terms: BTreeMap<Vec<u8>, C>,
}

/// Sort a multi-index, returning the permutation sign, or None on repeats.
pub fn sort_index(idx: &[u8]) -> Option<(Vec<u8>, i64)> {
    let mut v: Vec<u8> = idx.to_vec();
    let mut sign = 1i64;
    // insertion sort, counting transpositions
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    for w in v.windows(2) {
        if w[0] == w[1] {
            return None;
        }
    }
    Some((v, sign))
}

impl<C: Coeff> Form<C> {
    pub fn zero(basis: Arc<Basis>, degree: usize) -> Form<C> {
        Form { basis, degree, terms: BTreeMap::new() }
    }

    pub fn scalar(basis: Arc<Basis>, c: C) -> Form<C> {
        let mut f = Form::zero(basis, 0);
        f.add_term(&[], c);
        f
    }

    pub fn one_form(basis: Arc<Basis>, idx: u8, c: C) -> Form<C> {
        let mut f = Form::zero(basis, 1);
        f.add_term(&[idx], c);
        f
    }

    /// Accumulate a term; the index is sorted and the sign folded in.
    pub fn add_term(&mut self, idx: &[u8], c: C) {
        debug_assert_eq!(idx.len(), self.degree);
        if c.is_zero() {
            return;
        }
        let Some((key, sign)) = sort_index(idx) else {
            return;
        };
        let c = if sign < 0 { c.neg() } else { c };
        match self.terms.get_mut(&key) {
            Some(old) => {
                let nv = old.add(&c);
                if nv.is_zero() {
                    self.terms.remove(&key);
                } else {
                    *old = nv;
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn coeff(&self, idx: &[u8]) -> C {
        match sort_index(idx) {
            Some((key, sign)) => match self.terms.get(&key) {
                Some(c) => {
                    if sign < 0 {
                        c.neg()
                    } else {
                        c.clone()
                    }
                }
                None => C::zero(),
            },
            None => C::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn check_basis(&self, o: &Form<C>) -> Result<()> {
        if self.basis.names != o.basis.names {
            return Err(Error::BasisMismatch);
        }
        Ok(())
    }

    pub fn add(&self, o: &Form<C>) -> Result<Form<C>> {
        self.check_basis(o)?;
        debug_assert_eq!(self.degree, o.degree);
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_term(k, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, o: &Form<C>) -> Result<Form<C>> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Form<C> {
        let mut out = Form::zero(self.basis.clone(), self.degree);
        for (k, c) in &self.terms {
            out.terms.insert(k.clone(), c.neg());
        }
        out
    }

    pub fn scale(&self, c: &C) -> Form<C> {
        let mut out = Form::zero(self.basis.clone(), self.degree);
        if c.is_zero() {
            return out;
        }
        for (k, v) in &self.terms {
            let nv = v.mul(c);
            if !nv.is_zero() {
                out.terms.insert(k.clone(), nv);
            }
        }
        out
    }

    pub fn wedge(&self, o: &Form<C>) -> Result<Form<C>> {
        self.check_basis(o)?;
        let degree = self.degree + o.degree;
        let mut out = Form::zero(self.basis.clone(), degree);
        if degree > self.basis.dim() {
            return Ok(out);
        }
        let mut idx = Vec::with_capacity(degree);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &o.terms {
                idx.clear();
                idx.extend_from_slice(ka);
                idx.extend_from_slice(kb);
                // sort before multiplying so dropped (repeated-index) terms
                // never pay for a coefficient product
                let Some((key, sign)) = sort_index(&idx) else {
                    continue;
                };
                let mut nv = ca.mul(cb);
                if sign < 0 {
                    nv = nv.neg();
                }
                match out.terms.get_mut(&key) {
                    Some(q) => {
                        let s = q.add(&nv);
                        if s.is_zero() {
                            out.terms.remove(&key);
                        } else {
                            *q = s;
                        }
                    }
                    None => {
                        if !nv.is_zero() {
                            out.terms.insert(key, nv);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Map coefficients, dropping zeros.
    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Form<D> {
        let mut out = Form::zero(self.basis.clone(), self.degree);
        for (k, c) in &self.terms {
            let d = f(c);
            if !d.is_zero() {
                out.terms.insert(k.clone(), d);
            }
        }
        out
    }
}

impl<C: NumCoeff> Form<C> {
    /// Sum of squared coefficient values over sorted multi-indices.
    pub fn norm_sq(&self) -> f64 {
        self.terms.values().map(|c| c.val() * c.val()).sum()
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.norm_sq())
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| {
            let a = libm::fabs(c.val());
            if a > m {
                a
            } else {
                m
            }
        })
    }
}

/// Hodge star for the Euclidean metric and positive orientation on a
/// 7-element orthonormal basis. An involution in dimension 7.
pub fn hodge_star<C: Coeff>(f: &Form<C>) -> Result<Form<C>> {
    let n = f.basis.dim();
    if n != 7 {
        return Err(Error::BasisSize { expected: 7, got: n });
    }
    let mut out = Form::zero(f.basis.clone(), 7 - f.degree);
    for (k, c) in &f.terms {
        let mut comp: Vec<u8> = (0..7u8).filter(|i| !k.contains(i)).collect();
        // sign of the permutation (k, comp) relative to (0..7)
        let mut full: Vec<u8> = k.clone();
        full.append(&mut comp.clone());
        let (_, sign) = sort_index(&full).expect("disjoint index sets");
        let c = if sign < 0 { c.neg() } else { c.clone() };
        comp.sort_unstable();
        out.add_term(&comp, c);
    }
    Ok(out)
}

/// Pointwise inner product of two forms of equal degree over an orthonormal
/// basis: the sum over sorted multi-indices of coefficient products.
pub fn inner<C: Coeff>(a: &Form<C>, b: &Form<C>) -> Result<C> {
    a.check_basis(b)?;
    let mut acc = C::zero();
    for (k, ca) in &a.terms {
        if let Some(cb) = b.terms.get(k) {
            acc = acc.add(&ca.mul(cb));
        }
    }
    Ok(acc)
}
