//! Truncated multivariate Taylor arithmetic.
//!
//! A [`Jet`] holds the Taylor coefficients of a function of up to three
//! variables about a base point, truncated at total degree three. Arithmetic
//! and elementary functions propagate the expansion exactly (up to roundoff),
//! so chart formulas pushed through jets yield exact partial derivatives.
//!
//! Coefficients are stored densely, indexed by multi-index in graded order:
//! `1; s, t, u; s², st, su, t², tu, u²; s³, ...`. Mixed shapes (different
//! variable counts or orders) are rejected by the `try_*` methods; the
//! operator impls panic on mismatch.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use thiserror::Error;

pub const MAX_VARS: usize = 3;
pub const MAX_ORDER: usize = 3;
const NCOEF: usize = 20;

/// Number of monomials of total degree `<= d` in three variables.
const COUNT_UP_TO: [usize; 4] = [1, 4, 10, 20];

const MONOMIALS: [[u8; 3]; NCOEF] = [
    [0, 0, 0],
    [1, 0, 0],
    [0, 1, 0],
    [0, 0, 1],
    [2, 0, 0],
    [1, 1, 0],
    [1, 0, 1],
    [0, 2, 0],
    [0, 1, 1],
    [0, 0, 2],
    [3, 0, 0],
    [2, 1, 0],
    [2, 0, 1],
    [1, 2, 0],
    [1, 1, 1],
    [1, 0, 2],
    [0, 3, 0],
    [0, 2, 1],
    [0, 1, 2],
    [0, 0, 3],
];

const NONE: u8 = u8::MAX;

const fn degree(m: [u8; 3]) -> usize {
    (m[0] + m[1] + m[2]) as usize
}

const fn build_index() -> [[[u8; 4]; 4]; 4] {
    let mut table = [[[NONE; 4]; 4]; 4];
    let mut i = 0;
    while i < NCOEF {
        let m = MONOMIALS[i];
        table[m[0] as usize][m[1] as usize][m[2] as usize] = i as u8;
        i += 1;
    }
    table
}

const INDEX: [[[u8; 4]; 4]; 4] = build_index();

const fn build_product() -> [[u8; NCOEF]; NCOEF] {
    let mut table = [[NONE; NCOEF]; NCOEF];
    let mut i = 0;
    while i < NCOEF {
        let mut j = 0;
        while j < NCOEF {
            let a = MONOMIALS[i];
            let b = MONOMIALS[j];
            let m = [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
            if degree(m) <= MAX_ORDER {
                table[i][j] = INDEX[m[0] as usize][m[1] as usize][m[2] as usize];
            }
            j += 1;
        }
        i += 1;
    }
    table
}

const PRODUCT: [[u8; NCOEF]; NCOEF] = build_product();

const fn build_degrees() -> [usize; NCOEF] {
    let mut out = [0; NCOEF];
    let mut i = 0;
    while i < NCOEF {
        out[i] = degree(MONOMIALS[i]);
        i += 1;
    }
    out
}

const DEGREES: [usize; NCOEF] = build_degrees();

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JetError {
    #[error(
        "jet shape mismatch: {nvars_a} vars / order {order_a} vs {nvars_b} vars / order {order_b}"
    )]
    ShapeMismatch {
        nvars_a: usize,
        order_a: usize,
        nvars_b: usize,
        order_b: usize,
    },
    #[error("division by a jet whose value part is zero")]
    DivisionByZeroValue,
    #[error("{op} is undefined at value {value}")]
    DomainError { op: &'static str, value: f64 },
    #[error("multi-index {index:?} is outside a jet with {nvars} vars and order {order}")]
    IndexOutOfOrder {
        index: Vec<usize>,
        nvars: usize,
        order: usize,
    },
    #[error("unsupported jet shape: {nvars} vars, order {order}")]
    UnsupportedShape { nvars: usize, order: usize },
}

/// Binary operation selector for [`Jet::arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JetOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Univariate function selector for [`Jet::apply`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum JetFn {
    Sin,
    Cos,
    Sinh,
    Cosh,
    Sqrt,
    PowInt(i32),
    Recip,
}

#[derive(Clone, Copy, PartialEq)]
pub struct Jet {
    nvars: u8,
    order: u8,
    coeffs: [f64; NCOEF],
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.len();
        f.debug_struct("Jet")
            .field("nvars", &self.nvars)
            .field("order", &self.order)
            .field("coeffs", &&self.coeffs[..n])
            .finish()
    }
}

impl Jet {
    fn check_shape(nvars: usize, order: usize) -> Result<(), JetError> {
        if nvars == 0 || nvars > MAX_VARS || order > MAX_ORDER {
            return Err(JetError::UnsupportedShape { nvars, order });
        }
        Ok(())
    }

    pub fn constant(value: f64, nvars: usize, order: usize) -> Self {
        Self::check_shape(nvars, order).expect("jet shape");
        let mut coeffs = [0.0; NCOEF];
        coeffs[0] = value;
        Self {
            nvars: nvars as u8,
            order: order as u8,
            coeffs,
        }
    }

    /// The coordinate function `x_var` expanded about `value`.
    pub fn variable(value: f64, var: usize, nvars: usize, order: usize) -> Self {
        assert!(var < nvars, "variable index {var} >= nvars {nvars}");
        let mut j = Self::constant(value, nvars, order);
        if order >= 1 {
            j.coeffs[1 + var] = 1.0;
        }
        j
    }

    /// Builds a jet from Taylor coefficients given as `(multi_index, coefficient)` pairs.
    pub fn from_taylor(
        nvars: usize,
        order: usize,
        terms: &[(&[usize], f64)],
    ) -> Result<Self, JetError> {
        Self::check_shape(nvars, order)?;
        let mut j = Self::constant(0.0, nvars, order);
        for (idx, c) in terms {
            let k = j.slot(idx)?;
            j.coeffs[k] = *c;
        }
        Ok(j)
    }

    pub fn nvars(&self) -> usize {
        self.nvars as usize
    }

    pub fn order(&self) -> usize {
        self.order as usize
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    fn len(&self) -> usize {
        COUNT_UP_TO[self.order as usize]
    }

    fn same_shape(&self, other: &Jet) -> Result<(), JetError> {
        if self.nvars != other.nvars || self.order != other.order {
            return Err(JetError::ShapeMismatch {
                nvars_a: self.nvars(),
                order_a: self.order(),
                nvars_b: other.nvars(),
                order_b: other.order(),
            });
        }
        Ok(())
    }

    fn slot(&self, index: &[usize]) -> Result<usize, JetError> {
        let bad = || JetError::IndexOutOfOrder {
            index: index.to_vec(),
            nvars: self.nvars(),
            order: self.order(),
        };
        if index.len() > self.nvars() {
            return Err(bad());
        }
        let mut m = [0usize; 3];
        m[..index.len()].copy_from_slice(index);
        if m.iter().sum::<usize>() > self.order() {
            return Err(bad());
        }
        Ok(INDEX[m[0]][m[1]][m[2]] as usize)
    }

    /// Raw Taylor coefficient of the monomial with the given exponents.
    pub fn taylor_coeff(&self, index: &[usize]) -> Result<f64, JetError> {
        Ok(self.coeffs[self.slot(index)?])
    }

    /// Partial derivative for the given multi-index (Taylor coefficient times
    /// the multi-index factorial).
    pub fn extract(&self, index: &[usize]) -> Result<f64, JetError> {
        let c = self.coeffs[self.slot(index)?];
        let fact: f64 = index.iter().map(|&k| factorial(k)).product();
        Ok(c * fact)
    }

    /// First partial derivatives at the base point.
    pub fn gradient(&self) -> [f64; 3] {
        let mut g = [0.0; 3];
        if self.order >= 1 {
            g[..self.nvars()].copy_from_slice(&self.coeffs[1..1 + self.nvars()]);
        }
        g
    }

    /// The jet of `∂f/∂x_var`, one order lower.
    pub fn derivative(&self, var: usize) -> Jet {
        assert!(var < self.nvars(), "derivative variable out of range");
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        let order = self.order() - 1;
        let mut out = Jet::constant(0.0, self.nvars(), order);
        for k in 0..COUNT_UP_TO[order] {
            let mut m = MONOMIALS[k];
            let mult = (m[var] + 1) as f64;
            m[var] += 1;
            let src = INDEX[m[0] as usize][m[1] as usize][m[2] as usize] as usize;
            out.coeffs[k] = mult * self.coeffs[src];
        }
        out
    }

    /// Drops all terms of degree above `order`.
    pub fn truncate(&self, order: usize) -> Jet {
        assert!(
            order <= self.order(),
            "cannot raise jet order by truncation"
        );
        let mut out = Jet::constant(0.0, self.nvars(), order);
        let n = COUNT_UP_TO[order];
        out.coeffs[..n].copy_from_slice(&self.coeffs[..n]);
        out
    }

    /// A constant jet of the same shape.
    pub fn lift(&self, value: f64) -> Jet {
        Jet::constant(value, self.nvars(), self.order())
    }

    pub fn scale(&self, k: f64) -> Jet {
        let mut out = *self;
        for c in out.coeffs.iter_mut() {
            *c *= k;
        }
        out
    }

    fn mul_unchecked(&self, other: &Jet) -> Jet {
        let order = self.order();
        let mut out = self.lift(0.0);
        for i in 0..COUNT_UP_TO[order] {
            let a = self.coeffs[i];
            if a == 0.0 {
                continue;
            }
            let rest = order - DEGREES[i];
            for j in 0..COUNT_UP_TO[rest] {
                out.coeffs[PRODUCT[i][j] as usize] += a * other.coeffs[j];
            }
        }
        out
    }

    pub fn try_add(&self, other: &Jet) -> Result<Jet, JetError> {
        self.same_shape(other)?;
        let mut out = *self;
        for k in 0..self.len() {
            out.coeffs[k] += other.coeffs[k];
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Jet) -> Result<Jet, JetError> {
        self.same_shape(other)?;
        let mut out = *self;
        for k in 0..self.len() {
            out.coeffs[k] -= other.coeffs[k];
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Jet) -> Result<Jet, JetError> {
        self.same_shape(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub fn try_div(&self, other: &Jet) -> Result<Jet, JetError> {
        self.same_shape(other)?;
        if other.value() == 0.0 {
            return Err(JetError::DivisionByZeroValue);
        }
        Ok(self.mul_unchecked(&other.recip()?))
    }

    pub fn arith(&self, other: &Jet, op: JetOp) -> Result<Jet, JetError> {
        match op {
            JetOp::Add => self.try_add(other),
            JetOp::Sub => self.try_sub(other),
            JetOp::Mul => self.try_mul(other),
            JetOp::Div => self.try_div(other),
        }
    }

    /// Composes a univariate function with this jet, given the function's
    /// value and first three derivatives at `self.value()`.
    pub fn compose(&self, derivs: [f64; 4]) -> Jet {
        let delta = {
            let mut d = *self;
            d.coeffs[0] = 0.0;
            d
        };
        // Horner in delta; delta has no constant term so truncation is exact.
        let mut acc = self.lift(derivs[3] / 6.0);
        for k in (0..3).rev() {
            acc = acc.mul_unchecked(&delta);
            acc.coeffs[0] += derivs[k] / factorial(k);
        }
        acc
    }

    pub fn apply(&self, f: JetFn) -> Result<Jet, JetError> {
        let x = self.value();
        let d = match f {
            JetFn::Sin => {
                let (s, c) = x.sin_cos();
                [s, c, -s, -c]
            }
            JetFn::Cos => {
                let (s, c) = x.sin_cos();
                [c, -s, -c, s]
            }
            JetFn::Sinh => {
                let (s, c) = (x.sinh(), x.cosh());
                [s, c, s, c]
            }
            JetFn::Cosh => {
                let (s, c) = (x.sinh(), x.cosh());
                [c, s, c, s]
            }
            JetFn::Sqrt => {
                if x <= 0.0 || !x.is_finite() {
                    return Err(JetError::DomainError {
                        op: "sqrt",
                        value: x,
                    });
                }
                let r = x.sqrt();
                [r, 0.5 / r, -0.25 / (r * x), 0.375 / (r * x * x)]
            }
            JetFn::Recip => {
                if x == 0.0 || !x.is_finite() {
                    return Err(JetError::DomainError {
                        op: "recip",
                        value: x,
                    });
                }
                let r = 1.0 / x;
                [r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r]
            }
            JetFn::PowInt(n) => {
                if n < 0 && x == 0.0 {
                    return Err(JetError::DomainError {
                        op: "powi",
                        value: x,
                    });
                }
                let nf = n as f64;
                [
                    x.powi(n),
                    nf * x.powi(n - 1),
                    nf * (nf - 1.0) * x.powi(n - 2),
                    nf * (nf - 1.0) * (nf - 2.0) * x.powi(n - 3),
                ]
            }
        };
        Ok(self.compose(d))
    }

    pub fn sin(&self) -> Jet {
        self.apply(JetFn::Sin).expect("sin is total")
    }

    pub fn cos(&self) -> Jet {
        self.apply(JetFn::Cos).expect("cos is total")
    }

    pub fn sinh(&self) -> Jet {
        self.apply(JetFn::Sinh).expect("sinh is total")
    }

    pub fn cosh(&self) -> Jet {
        self.apply(JetFn::Cosh).expect("cosh is total")
    }

    pub fn sqrt(&self) -> Result<Jet, JetError> {
        self.apply(JetFn::Sqrt)
    }

    pub fn recip(&self) -> Result<Jet, JetError> {
        self.apply(JetFn::Recip)
    }

    pub fn powi(&self, n: i32) -> Result<Jet, JetError> {
        // Positive integer powers by repeated products keep exact zeros.
        if n >= 0 {
            let mut acc = self.lift(1.0);
            for _ in 0..n {
                acc = acc.mul_unchecked(self);
            }
            Ok(acc)
        } else {
            self.apply(JetFn::PowInt(n))
        }
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        self.try_add(&rhs).expect("jet add")
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        *self = self.try_add(&rhs).expect("jet add");
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        self.try_sub(&rhs).expect("jet sub")
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        self.try_mul(&rhs).expect("jet mul")
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        self.try_div(&rhs).expect("jet div")
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.coeffs[0] += rhs;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: f64) -> Jet {
        self.coeffs[0] -= rhs;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        rhs.scale(self)
    }
}

impl Add<Jet> for f64 {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        rhs + self
    }
}

impl Sub<Jet> for f64 {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        (-rhs) + self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s1(order: usize) -> Jet {
        Jet::variable(0.0, 0, 1, order)
    }

    #[test]
    fn product_of_binomials() {
        let s = s1(2);
        let p = (1.0 + s) * (1.0 - s);
        assert_eq!(p.taylor_coeff(&[0]).unwrap(), 1.0);
        assert_eq!(p.taylor_coeff(&[1]).unwrap(), 0.0);
        assert_eq!(p.taylor_coeff(&[2]).unwrap(), -1.0);
    }

    #[test]
    fn constant_quotient() {
        let q = Jet::constant(5.0, 1, 2)
            .try_div(&Jet::constant(2.0, 1, 2))
            .unwrap();
        assert_eq!(q.value(), 2.5);
        assert_eq!(q.gradient(), [0.0; 3]);
    }

    #[test]
    fn mixed_monomial() {
        let s = Jet::variable(0.0, 0, 2, 2);
        let t = Jet::variable(0.0, 1, 2, 2);
        let p = s * t;
        for idx in [[0, 0], [1, 0], [0, 1], [2, 0], [0, 2]] {
            assert_eq!(p.taylor_coeff(&idx).unwrap(), 0.0);
        }
        assert_eq!(p.taylor_coeff(&[1, 1]).unwrap(), 1.0);
        assert_eq!(p.extract(&[1, 1]).unwrap(), 1.0);
    }

    #[test]
    fn sine_maclaurin() {
        let j = s1(3).sin();
        let got: Vec<f64> = (0..4).map(|k| j.taylor_coeff(&[k]).unwrap()).collect();
        assert_eq!(got[0], 0.0);
        assert_eq!(got[1], 1.0);
        assert_eq!(got[2], 0.0);
        assert!((got[3] + 1.0 / 6.0).abs() < 1e-16);
        assert_eq!(j.extract(&[3]).unwrap(), -1.0);
    }

    #[test]
    fn cosh_of_zero_constant() {
        let j = Jet::constant(0.0, 2, 3).cosh();
        assert_eq!(j, Jet::constant(1.0, 2, 3));
    }

    #[test]
    fn sqrt_binomial_series() {
        let j = (4.0 + 4.0 * s1(2)).sqrt().unwrap();
        assert!((j.taylor_coeff(&[0]).unwrap() - 2.0).abs() < 1e-15);
        assert!((j.taylor_coeff(&[1]).unwrap() - 1.0).abs() < 1e-15);
        assert!((j.taylor_coeff(&[2]).unwrap() + 0.25).abs() < 1e-15);
    }

    #[test]
    fn extract_square() {
        let s = s1(2);
        assert_eq!((s * s).extract(&[2]).unwrap(), 2.0);
    }

    #[test]
    fn errors() {
        let a = Jet::constant(1.0, 1, 2);
        let b = Jet::constant(1.0, 2, 2);
        assert!(matches!(a.try_add(&b), Err(JetError::ShapeMismatch { .. })));
        assert!(matches!(
            a.try_mul(&Jet::constant(1.0, 1, 3)),
            Err(JetError::ShapeMismatch { .. })
        ));
        assert_eq!(
            a.try_div(&Jet::constant(0.0, 1, 2)),
            Err(JetError::DivisionByZeroValue)
        );
        assert!(matches!(
            Jet::constant(-1.0, 1, 2).sqrt(),
            Err(JetError::DomainError { op: "sqrt", .. })
        ));
        assert!(matches!(
            Jet::constant(0.0, 1, 2).recip(),
            Err(JetError::DomainError { op: "recip", .. })
        ));
        assert!(matches!(
            a.extract(&[3]),
            Err(JetError::IndexOutOfOrder { .. })
        ));
        assert!(matches!(
            a.extract(&[0, 1]),
            Err(JetError::IndexOutOfOrder { .. })
        ));
    }

    #[test]
    fn derivative_and_truncate() {
        // f = s^2 t + 3u at (0,0,0)
        let s = Jet::variable(0.0, 0, 3, 3);
        let t = Jet::variable(0.0, 1, 3, 3);
        let u = Jet::variable(0.0, 2, 3, 3);
        let f = s * s * t + 3.0 * u;
        let ds = f.derivative(0);
        assert_eq!(ds.order(), 2);
        assert_eq!(ds.extract(&[1, 1, 0]).unwrap(), 2.0);
        let du = f.derivative(2);
        assert_eq!(du.value(), 3.0);
        assert_eq!(f.truncate(1).gradient(), [0.0, 0.0, 3.0]);
    }

    #[test]
    fn negative_power() {
        let s = Jet::variable(2.0, 0, 1, 3);
        let p = s.powi(-2).unwrap();
        // d/ds s^-2 = -2 s^-3 = -0.25 at s=2
        assert!((p.extract(&[1]).unwrap() + 0.25).abs() < 1e-15);
        assert!((p.extract(&[2]).unwrap() - 6.0 / 16.0).abs() < 1e-15);
    }
}
