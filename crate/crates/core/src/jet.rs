//! Order-3 truncated Taylor arithmetic in one real variable.
//!
//! A [`Jet`] carries a value and its first three derivatives with respect to
//! the radial parameter. Curvature needs two derivatives of the coframe
//! coefficients; carrying a third lets the exterior derivative be applied to
//! quantities that were themselves obtained by one differentiation (τ, ψ)
//! without losing the channels the later solves read.

use core::ops::{Add, Div, Mul, Neg, Sub};

/// Value and derivatives `(f, f', f'', f''')` at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet(pub [f64; 4]);

/// Binomial coefficients used by the Leibniz product rule.
const BINOM: [[f64; 4]; 4] = [
    [1.0, 0.0, 0.0, 0.0],
    [1.0, 1.0, 0.0, 0.0],
    [1.0, 2.0, 1.0, 0.0],
    [1.0, 3.0, 3.0, 1.0],
];

impl Jet {
    pub const ZERO: Jet = Jet([0.0; 4]);

    /// A constant (all derivatives zero).
    pub fn constant(v: f64) -> Jet {
        Jet([v, 0.0, 0.0, 0.0])
    }

    /// The identity function evaluated at `r`.
    pub fn var(r: f64) -> Jet {
        Jet([r, 1.0, 0.0, 0.0])
    }

    pub fn val(self) -> f64 {
        self.0[0]
    }

    pub fn d1(self) -> f64 {
        self.0[1]
    }

    pub fn d2(self) -> f64 {
        self.0[2]
    }

    /// Derivative as a jet. The top slot is no longer known and is poisoned
    /// with NaN so that an accidental read surfaces in tests.
    pub fn deriv(self) -> Jet {
        Jet([self.0[1], self.0[2], self.0[3], f64::NAN])
    }

    pub fn scale(self, c: f64) -> Jet {
        Jet([self.0[0] * c, self.0[1] * c, self.0[2] * c, self.0[3] * c])
    }

    /// Compose with an outer function given by its derivatives at `self.val()`.
    fn compose(self, g: [f64; 4]) -> Jet {
        let u = self.0;
        Jet([
            g[0],
            g[1] * u[1],
            g[2] * u[1] * u[1] + g[1] * u[2],
            g[3] * u[1] * u[1] * u[1] + 3.0 * g[2] * u[1] * u[2] + g[1] * u[3],
        ])
    }

    pub fn recip(self) -> Jet {
        let x = self.0[0];
        let ix = 1.0 / x;
        self.compose([ix, -ix * ix, 2.0 * ix * ix * ix, -6.0 * ix * ix * ix * ix])
    }

    pub fn exp(self) -> Jet {
        let e = libm::exp(self.0[0]);
        self.compose([e, e, e, e])
    }

    pub fn ln(self) -> Jet {
        let x = self.0[0];
        self.compose([libm::log(x), 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x)])
    }

    pub fn sinh(self) -> Jet {
        let s = libm::sinh(self.0[0]);
        let c = libm::cosh(self.0[0]);
        self.compose([s, c, s, c])
    }

    pub fn cosh(self) -> Jet {
        let s = libm::sinh(self.0[0]);
        let c = libm::cosh(self.0[0]);
        self.compose([c, s, c, s])
    }

    pub fn sqrt(self) -> Jet {
        self.powf(0.5)
    }

    /// Real power, requires a positive value.
    pub fn powf(self, p: f64) -> Jet {
        let x = self.0[0];
        let xp = libm::pow(x, p);
        self.compose([
            xp,
            p * xp / x,
            p * (p - 1.0) * xp / (x * x),
            p * (p - 1.0) * (p - 2.0) * xp / (x * x * x),
        ])
    }

    /// Integer power (any sign of base; negative exponents via `recip`).
    pub fn powi(self, mut n: i32) -> Jet {
        let mut base = self;
        if n < 0 {
            base = self.recip();
            n = -n;
        }
        let mut acc = Jet::constant(1.0);
        for _ in 0..n {
            acc = acc * base;
        }
        acc
    }

    pub fn abs_val(self) -> f64 {
        libm::fabs(self.0[0])
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet([
            self.0[0] + o.0[0],
            self.0[1] + o.0[1],
            self.0[2] + o.0[2],
            self.0[3] + o.0[3],
        ])
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet([
            self.0[0] - o.0[0],
            self.0[1] - o.0[1],
            self.0[2] - o.0[2],
            self.0[3] - o.0[3],
        ])
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet([-self.0[0], -self.0[1], -self.0[2], -self.0[3]])
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut out = [0.0; 4];
        for k in 0..4 {
            let mut s = 0.0;
            for j in 0..=k {
                s += BINOM[k][j] * self.0[j] * o.0[k - j];
            }
            out[k] = s;
        }
        Jet(out)
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}
