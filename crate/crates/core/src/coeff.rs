//! Coefficient rings the exterior-algebra kernel is generic over.

use crate::jet::Jet;
use crate::Rat;
use num_traits::{Signed, Zero};

/// Ring of coefficients for differential forms: doubles, jets, exact
/// rationals and (in the closure checker) multivariate polynomials.
pub trait Coeff: Clone + PartialEq {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Embed an exact rational (structure constants, ε entries).
    fn from_rat(r: &Rat) -> Self;
    fn from_int(n: i64) -> Self {
        Self::from_rat(&crate::rat_i(n))
    }
}

/// Coefficients with a numeric magnitude, for norms and tolerance checks.
pub trait NumCoeff: Coeff {
    fn val(&self) -> f64;
}

impl Coeff for f64 {
    fn zero() -> Self {
        0.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_rat(r: &Rat) -> Self {
        rat_to_f64(r)
    }
}

impl NumCoeff for f64 {
    fn val(&self) -> f64 {
        *self
    }
}

impl Coeff for Jet {
    fn zero() -> Self {
        Jet::ZERO
    }
    fn is_zero(&self) -> bool {
        *self == Jet::ZERO
    }
    fn add(&self, o: &Self) -> Self {
        *self + *o
    }
    fn sub(&self, o: &Self) -> Self {
        *self - *o
    }
    fn mul(&self, o: &Self) -> Self {
        *self * *o
    }
    fn neg(&self) -> Self {
        -*self
    }
    fn from_rat(r: &Rat) -> Self {
        Jet::constant(rat_to_f64(r))
    }
}

impl NumCoeff for Jet {
    fn val(&self) -> f64 {
        Jet::val(*self)
    }
}

impl Coeff for Rat {
    fn zero() -> Self {
        Zero::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }
}

/// Convert a big rational to a double.
pub fn rat_to_f64(r: &Rat) -> f64 {
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    let a = r.abs();
    let (n, d) = (a.numer(), a.denom());
    // Exact for the small fractions used throughout; falls back gracefully
    // for large ones.
    let nf = bigint_to_f64(n);
    let df = bigint_to_f64(d);
    sign * nf / df
}

fn bigint_to_f64(n: &num_bigint::BigInt) -> f64 {
    use num_traits::ToPrimitive;
    n.to_f64().unwrap_or(f64::INFINITY)
}
