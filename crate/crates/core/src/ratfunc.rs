//! A deliberately small exact symbolic layer.
//!
//! Polynomials live over a fixed set of indeterminates: `Q` (the prime),
//! `X` (the prime power `q^k`, so `q^(k+1)` is `Q*X`), `N` (`n^2`), `R` (the
//! lower bound rho) and `S` (a free symbol for `sigma(n^2)`). Coefficients
//! are exact rationals. Rational functions are never reduced; equality is
//! decided by cross-multiplying and checking for the zero polynomial.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::arith::Ratio;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Q,
    X,
    N,
    R,
    S,
}

impl Var {
    pub const ALL: [Var; 5] = [Var::Q, Var::X, Var::N, Var::R, Var::S];

    fn index(self) -> usize {
        self as usize
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Var::Q => "Q",
            Var::X => "X",
            Var::N => "N",
            Var::R => "R",
            Var::S => "S",
        }
    }
}

const NVARS: usize = Var::ALL.len();

type Exponents = [u32; NVARS];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RatFuncError {
    #[error("denominator is the zero polynomial")]
    ZeroDenominator,
    #[error("division by a rational function whose numerator is zero")]
    DivisionByZero,
    #[error("no value assigned to variable {}", .0.symbol())]
    MissingVariable(Var),
    #[error("denominator vanishes at the evaluation point")]
    Pole,
    #[error("unknown identity tag `{0}`")]
    UnknownTag(String),
}

/// Assignment of exact values to variables for [`Poly::eval`].
pub type Assignment = BTreeMap<Var, Ratio>;

/// Sparse polynomial: exponent vector to nonzero coefficient.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    terms: BTreeMap<Exponents, Ratio>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Ratio::one())
    }

    pub fn constant(c: Ratio) -> Self {
        let mut p = Poly::zero();
        p.add_term([0; NVARS], c);
        p
    }

    pub fn int(c: i64) -> Self {
        Poly::constant(Ratio::from_integer(c.into()))
    }

    pub fn var(v: Var) -> Self {
        let mut e = [0; NVARS];
        e[v.index()] = 1;
        let mut p = Poly::zero();
        p.add_term(e, Ratio::one());
        p
    }

    /// Single term `coeff * prod(var^exp)`.
    pub fn monomial(coeff: Ratio, powers: &[(Var, u32)]) -> Self {
        let mut e = [0; NVARS];
        for &(v, k) in powers {
            e[v.index()] += k;
        }
        let mut p = Poly::zero();
        p.add_term(e, coeff);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32; NVARS], &Ratio)> {
        self.terms.iter()
    }

    /// Highest exponent of `v` across all terms.
    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|e| e[v.index()]).max().unwrap_or(0)
    }

    pub fn variables(&self) -> Vec<Var> {
        Var::ALL
            .into_iter()
            .filter(|v| self.terms.keys().any(|e| e[v.index()] > 0))
            .collect()
    }

    fn add_term(&mut self, e: Exponents, c: Ratio) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(Ratio::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn scale(&self, c: &Ratio) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(e, k)| (*e, k * c)).collect(),
        }
    }

    pub fn pow(&self, mut k: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }

    /// Formal partial derivative.
    pub fn partial(&self, v: Var) -> Poly {
        let i = v.index();
        let mut out = Poly::zero();
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = *e;
            e2[i] -= 1;
            out.add_term(e2, c * Ratio::from_integer(e[i].into()));
        }
        out
    }

    pub fn eval(&self, at: &Assignment) -> Result<Ratio, RatFuncError> {
        // sum over the common denominator lcm(coeff dens) * prod den_v^maxdeg_v
        // in integers, reducing once at the end
        let mut maxdeg = [0u32; NVARS];
        let mut coeff_lcm = BigInt::one();
        for (e, c) in &self.terms {
            for (m, &k) in maxdeg.iter_mut().zip(e) {
                *m = (*m).max(k);
            }
            coeff_lcm = coeff_lcm.lcm(c.denom());
        }
        let mut nums: Vec<Vec<BigInt>> = Vec::with_capacity(NVARS);
        let mut dens: Vec<Vec<BigInt>> = Vec::with_capacity(NVARS);
        let mut den_total = coeff_lcm.clone();
        for v in Var::ALL {
            let d = maxdeg[v.index()] as usize;
            let (pn, pd) = if d == 0 {
                (vec![BigInt::one()], vec![BigInt::one()])
            } else {
                let x = at.get(&v).ok_or(RatFuncError::MissingVariable(v))?;
                (powers(x.numer(), d), powers(x.denom(), d))
            };
            den_total *= &pd[d];
            nums.push(pn);
            dens.push(pd);
        }
        let mut total = BigInt::zero();
        for (e, c) in &self.terms {
            let mut term = c.numer() * (&coeff_lcm / c.denom());
            for v in Var::ALL {
                let i = v.index();
                let k = e[i] as usize;
                if maxdeg[i] == 0 {
                    continue;
                }
                term *= &nums[i][k];
                term *= &dens[i][maxdeg[i] as usize - k];
            }
            total += term;
        }
        Ok(Ratio::new(total, den_total))
    }
}

fn powers(x: &BigInt, d: usize) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(d + 1);
    out.push(BigInt::one());
    for i in 0..d {
        let next = &out[i] * x;
        out.push(next);
    }
    out
}

impl From<i64> for Poly {
    fn from(c: i64) -> Self {
        Poly::int(c)
    }
}

impl From<Var> for Poly {
    fn from(v: Var) -> Self {
        Poly::var(v)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let mut e = *ea;
                for (x, y) in e.iter_mut().zip(eb) {
                    *x += y;
                }
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        // highest-degree terms first
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let vars: Vec<String> = Var::ALL
                .iter()
                .filter(|v| e[v.index()] > 0)
                .map(|v| match e[v.index()] {
                    1 => v.symbol().to_string(),
                    k => format!("{}^{}", v.symbol(), k),
                })
                .collect();
            let coeff = if mag.is_integer() {
                mag.to_string()
            } else {
                format!("({mag})")
            };
            match (vars.is_empty(), mag.is_one()) {
                (true, _) => f.write_str(&coeff)?,
                (false, true) => f.write_str(&vars.join("*"))?,
                (false, false) => write!(f, "{}*{}", coeff, vars.join("*"))?,
            }
        }
        Ok(())
    }
}

/// Formal quotient of two polynomials with a nonzero denominator.
#[derive(Clone, Debug)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<Self, RatFuncError> {
        if den.is_zero() {
            return Err(RatFuncError::ZeroDenominator);
        }
        Ok(RatFunc { num, den })
    }

    /// Quotient of two nonzero-denominator polynomials.
    ///
    /// # Panics
    ///
    /// When `den` is the zero polynomial. Use [`RatFunc::new`] for
    /// untrusted input.
    pub fn frac(num: impl Into<Poly>, den: impl Into<Poly>) -> Self {
        RatFunc::new(num.into(), den.into()).expect("zero denominator")
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// `self.num * other.den - other.num * self.den`; zero iff equal.
    pub fn cross_residual(&self, other: &RatFunc) -> Poly {
        &(&self.num * &other.den) - &(&other.num * &self.den)
    }

    pub fn try_div(&self, rhs: &RatFunc) -> Result<RatFunc, RatFuncError> {
        if rhs.num.is_zero() {
            return Err(RatFuncError::DivisionByZero);
        }
        RatFunc::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }

    pub fn recip(&self) -> Result<RatFunc, RatFuncError> {
        RatFunc::from(Poly::one()).try_div(self)
    }

    pub fn pow(&self, k: u32) -> RatFunc {
        RatFunc {
            num: self.num.pow(k),
            den: self.den.pow(k),
        }
    }

    /// Quotient rule: `(n' d - n d') / d^2`.
    pub fn partial(&self, v: Var) -> RatFunc {
        let n = &(&self.num.partial(v) * &self.den) - &(&self.num * &self.den.partial(v));
        RatFunc {
            num: n,
            den: &self.den * &self.den,
        }
    }

    pub fn eval(&self, at: &Assignment) -> Result<Ratio, RatFuncError> {
        let d = self.den.eval(at)?;
        if d.is_zero() {
            return Err(RatFuncError::Pole);
        }
        Ok(self.num.eval(at)? / d)
    }

    /// Evaluation in `f64`, for smoke checks against finite differences.
    pub fn eval_f64(&self, at: &[(Var, f64)]) -> f64 {
        let ev = |p: &Poly| -> f64 {
            p.terms
                .iter()
                .map(|(e, c)| {
                    let mut t = ratio_to_f64(c);
                    for &(v, x) in at {
                        t *= x.powi(e[v.index()] as i32);
                    }
                    t
                })
                .sum()
        };
        ev(&self.num) / ev(&self.den)
    }
}

fn ratio_to_f64(r: &Ratio) -> f64 {
    use num_traits::ToPrimitive;
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

impl PartialEq for RatFunc {
    fn eq(&self, other: &RatFunc) -> bool {
        self.cross_residual(other).is_zero()
    }
}

impl From<Poly> for RatFunc {
    fn from(p: Poly) -> Self {
        RatFunc { num: p, den: Poly::one() }
    }
}

impl From<i64> for RatFunc {
    fn from(c: i64) -> Self {
        Poly::int(c).into()
    }
}

impl From<Var> for RatFunc {
    fn from(v: Var) -> Self {
        Poly::var(v).into()
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        if self.den == rhs.den {
            return RatFunc { num: &self.num + &rhs.num, den: self.den.clone() };
        }
        RatFunc {
            num: &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            den: &self.den * &rhs.den,
        }
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self + &(-rhs)
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        RatFunc {
            num: &self.num * &rhs.num,
            den: &self.den * &rhs.den,
        }
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }
}

macro_rules! forward_owned_rf {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for RatFunc {
            type Output = RatFunc;
            fn $m(self, rhs: RatFunc) -> RatFunc {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned_rf!(Add add, Sub sub, Mul mul);

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        -&self
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

pub use crate::identities::{identity, verify_identity, Identity, IdentityTag};

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Poly {
        Poly::var(Var::Q)
    }

    fn x() -> Poly {
        Poly::var(Var::X)
    }

    fn c(v: i64) -> Poly {
        Poly::int(v)
    }

    fn r(a: i64, b: i64) -> Ratio {
        Ratio::new(a.into(), b.into())
    }

    #[test]
    fn ring_examples() {
        assert_eq!(&(&q() + &c(1)) + &(&q() - &c(1)), q().scale(&r(2, 1)));
        assert_eq!(&(&q() - &c(1)) * &(&q() + &c(1)), &q().pow(2) - &c(1));
        let p = &q().pow(3) + &x();
        assert!((&p + &(-&p)).is_zero());
        assert!(Poly::int(0).is_zero());
    }

    #[test]
    fn equality_by_cross_multiplication() {
        let a = RatFunc::frac(&q().pow(2) - &c(1), &q() - &c(1));
        let b = RatFunc::frac(&q() + &c(1), 1);
        assert_eq!(a, b);
        assert_ne!(RatFunc::frac(1, q()), RatFunc::frac(1, &q() + &c(1)));
    }

    #[test]
    fn field_operations() {
        let a = RatFunc::frac(&q() + &c(2), &q() - &c(3));
        assert_eq!(&a + &RatFunc::from(0), a);
        let prod = &RatFunc::frac(1, q()) * &RatFunc::frac(q(), 1);
        assert_eq!(prod, RatFunc::from(1));
        assert_eq!(a.try_div(&a).unwrap(), RatFunc::from(1));
        assert_eq!(a.try_div(&RatFunc::from(0)).unwrap_err(), RatFuncError::DivisionByZero);
        assert_eq!(
            RatFunc::new(c(1), Poly::zero()).unwrap_err(),
            RatFuncError::ZeroDenominator
        );
    }

    #[test]
    fn partial_derivatives() {
        let x2 = RatFunc::from(x().pow(2));
        assert_eq!(x2.partial(Var::X), RatFunc::from(x().scale(&r(2, 1))));
        let inv = RatFunc::frac(1, x());
        assert_eq!(inv.partial(Var::X), RatFunc::frac(-1, x().pow(2)));
        // other variables are constants
        assert!(RatFunc::from(q()).partial(Var::X).is_zero());
    }

    #[test]
    fn evaluation() {
        let mut at = Assignment::new();
        at.insert(Var::Q, r(5, 1));
        let f = RatFunc::frac(&q() + &c(1), q());
        assert_eq!(f.eval(&at).unwrap(), r(6, 5));

        at.insert(Var::Q, r(1, 1));
        let pole = RatFunc::frac(1, &q() - &c(1));
        assert_eq!(pole.eval(&at).unwrap_err(), RatFuncError::Pole);

        let needs_x = RatFunc::from(x());
        assert_eq!(needs_x.eval(&at).unwrap_err(), RatFuncError::MissingVariable(Var::X));
    }

    #[test]
    fn theorem_one_expression_at_q5_k1() {
        // (X-1)(QX-2X+1) / (X(Q-1)(QX-1)) at Q = X = 5 is 4*16/(5*4*24)
        let qx = &q() * &x();
        let num = &(&x() - &c(1)) * &(&(&qx - &x().scale(&r(2, 1))) + &c(1));
        let den = &(&x() * &(&q() - &c(1))) * &(&qx - &c(1));
        let f = RatFunc::frac(num, den);
        let at: Assignment = [(Var::Q, r(5, 1)), (Var::X, r(5, 1))].into_iter().collect();
        assert_eq!(f.eval(&at).unwrap(), r(2, 15));
    }

    #[test]
    fn display() {
        let p = &(&q().pow(2).scale(&r(3, 1)) - &(&q() * &x())) + &c(-2);
        assert_eq!(p.to_string(), "3*Q^2 - Q*X - 2");
        assert_eq!(Poly::zero().to_string(), "0");
        assert_eq!(q().scale(&r(1, 2)).to_string(), "(1/2)*Q");
    }
}
