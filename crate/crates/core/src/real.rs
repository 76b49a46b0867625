//! Fixed-point binary reals for the logarithms the exponent solver needs.
//!
//! A [`Real`] is `mantissa / 2^WORK_BITS`, so every value is an exact dyadic
//! rational and can be handed back to the exact layer through
//! [`Real::to_ratio`]. Logarithms use `ln y = 2 atanh((y-1)/(y+1))` after
//! reducing `y` into `[2/3, 4/3]`; exponentials reduce modulo `ln 2` and sum
//! the Taylor series.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::Ratio;

/// Fractional bits carried by every [`Real`]; about 96 decimal digits.
pub const WORK_BITS: u32 = 320;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Real {
    mantissa: BigInt,
}

impl Real {
    pub fn zero() -> Self {
        Real { mantissa: BigInt::zero() }
    }

    pub fn one() -> Self {
        Real { mantissa: BigInt::one() << WORK_BITS }
    }

    /// Nearest representable value to `r`.
    pub fn from_ratio(r: &Ratio) -> Self {
        Real { mantissa: round_div(&(r.numer() << WORK_BITS), r.denom()) }
    }

    pub fn from_int(v: i64) -> Self {
        Real { mantissa: BigInt::from(v) << WORK_BITS }
    }

    /// The exact dyadic rational this value stores.
    pub fn to_ratio(&self) -> Ratio {
        Ratio::new(self.mantissa.clone(), BigInt::one() << WORK_BITS)
    }

    pub fn floor(&self) -> BigInt {
        self.mantissa.div_floor(&(BigInt::one() << WORK_BITS))
    }

    pub fn to_f64(&self) -> f64 {
        let r = self.to_ratio();
        r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
    }

    pub fn abs(&self) -> Self {
        Real { mantissa: self.mantissa.abs() }
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    /// Decimal rendering to `digits` significant digits, round-half-even on
    /// the stored dyadic value.
    pub fn to_significant(&self, digits: usize) -> String {
        significant_digits(&self.to_ratio(), digits)
    }

    /// Natural logarithm of a positive rational. `None` for `x <= 0`.
    pub fn ln(x: &Ratio) -> Option<Self> {
        if !x.is_positive() {
            return None;
        }
        // y = x / 2^e lands in (1/2, 2), then nudge into [2/3, 4/3]
        let mut e = x.numer().bits() as i64 - x.denom().bits() as i64;
        let mut y = scale_pow2(x, -e);
        let two_thirds = Ratio::new(2.into(), 3.into());
        let four_thirds = Ratio::new(4.into(), 3.into());
        if y > four_thirds {
            y /= Ratio::from_integer(2.into());
            e += 1;
        } else if y < two_thirds {
            y *= Ratio::from_integer(2.into());
            e -= 1;
        }
        let t = (&y - Ratio::one()) / (&y + Ratio::one());
        let ln_y = atanh_fixed(&t) << 1;
        Some(Real { mantissa: ln_y + ln2_fixed() * e })
    }

    /// `ln(x) / ln(base)`.
    pub fn log(x: &Ratio, base: &Ratio) -> Option<Self> {
        let lb = Real::ln(base)?;
        if lb.mantissa.is_zero() {
            return None;
        }
        Some(Real::ln(x)? / lb)
    }

    pub fn exp(&self) -> Self {
        let ln2 = ln2_fixed();
        let m = round_div(&self.mantissa, &ln2);
        let s = &self.mantissa - &ln2 * &m;
        // |s| <= ln2/2, so the series terms shrink by at least 1/3 each step
        let one = BigInt::one() << WORK_BITS;
        let mut sum = one.clone();
        let mut term = one;
        let mut k = 1u32;
        loop {
            term = shr_trunc(&term * &s, WORK_BITS) / k;
            if term.is_zero() {
                break;
            }
            sum += &term;
            k += 1;
        }
        let m = m.to_i64().expect("exponent out of range");
        let mantissa = if m >= 0 { sum << m as u64 } else { sum >> (-m) as u64 };
        Real { mantissa }
    }

    /// `base^self` for a positive rational base.
    pub fn pow_of(base: &Ratio, exponent: &Real) -> Option<Self> {
        Some((Real::ln(base)? * exponent.clone()).exp())
    }
}

fn scale_pow2(x: &Ratio, e: i64) -> Ratio {
    if e >= 0 {
        Ratio::new(x.numer() << e as u64, x.denom().clone())
    } else {
        Ratio::new(x.numer().clone(), x.denom() << (-e) as u64)
    }
}

/// `a / b` rounded to nearest, ties toward +infinity. `b` must be positive.
fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(b);
    let twice: BigInt = r << 1;
    if twice < *b {
        q
    } else {
        q + 1
    }
}

/// Shift toward zero; `>>` on a negative BigInt floors and would leave
/// series terms stuck at -1.
fn shr_trunc(x: BigInt, bits: u32) -> BigInt {
    if x.is_negative() {
        -((-x) >> bits)
    } else {
        x >> bits
    }
}

/// `atanh(t) * 2^WORK_BITS` for |t| well below one.
fn atanh_fixed(t: &Ratio) -> BigInt {
    let guard = 32;
    let w = WORK_BITS + guard;
    let t_fp = round_div(&(t.numer() << w), t.denom());
    let t2 = (&t_fp * &t_fp) >> w;
    let mut sum = BigInt::zero();
    let mut power = t_fp;
    let mut k = 1u32;
    while !power.is_zero() {
        sum += &power / k;
        power = shr_trunc(&power * &t2, w);
        k += 2;
    }
    sum >> guard
}

fn ln2_fixed() -> BigInt {
    atanh_fixed(&Ratio::new(1.into(), 3.into())) << 1
}

impl Add for Real {
    type Output = Real;
    fn add(self, rhs: Real) -> Real {
        Real { mantissa: self.mantissa + rhs.mantissa }
    }
}

impl Sub for Real {
    type Output = Real;
    fn sub(self, rhs: Real) -> Real {
        Real { mantissa: self.mantissa - rhs.mantissa }
    }
}

impl Mul for Real {
    type Output = Real;
    fn mul(self, rhs: Real) -> Real {
        Real { mantissa: (self.mantissa * rhs.mantissa) >> WORK_BITS }
    }
}

impl Div for Real {
    type Output = Real;
    fn div(self, rhs: Real) -> Real {
        Real { mantissa: (self.mantissa << WORK_BITS) / rhs.mantissa }
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real { mantissa: -self.mantissa }
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_significant(f.precision().unwrap_or(50)))
    }
}

/// Positional decimal rendering of `r` to `digits` significant digits,
/// rounding half to even. `digits` of zero is treated as one.
pub fn significant_digits(r: &Ratio, digits: usize) -> String {
    let digits = digits.max(1);
    if r.is_zero() {
        return "0".to_string();
    }
    let neg = r.is_negative();
    let a = r.abs();
    let ten = BigInt::from(10);

    // 10^e <= a < 10^(e+1)
    let mut e: i64 = a.numer().to_string().len() as i64 - a.denom().to_string().len() as i64;
    let pow10 = |k: i64| -> Ratio {
        if k >= 0 {
            Ratio::from_integer(num_traits::pow(ten.clone(), k as usize))
        } else {
            Ratio::new(BigInt::one(), num_traits::pow(ten.clone(), (-k) as usize))
        }
    };
    while a < pow10(e) {
        e -= 1;
    }
    while a >= pow10(e + 1) {
        e += 1;
    }

    let scaled = &a * pow10(digits as i64 - 1 - e);
    let mut m = round_half_even(&scaled);
    if m == num_traits::pow(ten.clone(), digits) {
        m /= &ten;
        e += 1;
    }

    let s = m.to_string();
    // value = m * 10^(e - digits + 1)
    let point = e + 1; // digits before the decimal point
    let body = if point <= 0 {
        format!("0.{}{}", "0".repeat((-point) as usize), s)
    } else if point as usize >= s.len() {
        format!("{}{}", s, "0".repeat(point as usize - s.len()))
    } else {
        let (int, frac) = s.split_at(point as usize);
        format!("{int}.{frac}")
    };
    let sign = if neg && m.sign() != Sign::NoSign { "-" } else { "" };
    format!("{sign}{body}")
}

fn round_half_even(x: &Ratio) -> BigInt {
    let fl = x.floor().to_integer();
    let frac = x - Ratio::from_integer(fl.clone());
    let half = Ratio::new(1.into(), 2.into());
    match frac.cmp(&half) {
        Ordering::Less => fl,
        Ordering::Greater => fl + 1,
        Ordering::Equal => {
            if fl.is_even() {
                fl
            } else {
                fl + 1
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64, b: i64) -> Ratio {
        Ratio::new(a.into(), b.into())
    }

    // rounded values from an independent arbitrary-precision library
    const LN2: &str = "0.6931471805599453094172321214581765680755001343602552541";
    const LN5: &str = "1.609437912434100374600759333226187639525601354268517722";
    const LOG5_73_MINUS_1: &str = "1.6658123360966042630274808669902745238209378561882";

    #[test]
    fn known_logarithms() {
        assert_eq!(Real::ln(&r(2, 1)).unwrap().to_significant(55), LN2);
        assert_eq!(Real::ln(&r(5, 1)).unwrap().to_significant(55), LN5);
        let k = Real::log(&r(73, 1), &r(5, 1)).unwrap() - Real::one();
        assert_eq!(k.to_significant(50), LOG5_73_MINUS_1);
    }

    #[test]
    fn ln_of_small_and_large_values() {
        let x = r(1, 1_000_000_007);
        let y = r(1_000_000_007, 1);
        let sum = Real::ln(&x).unwrap() + Real::ln(&y).unwrap();
        assert!(sum.abs().to_f64() < 1e-90);
        assert!(Real::ln(&r(0, 1)).is_none());
        assert!(Real::ln(&r(-3, 1)).is_none());
        assert_eq!(Real::ln(&r(1, 1)).unwrap(), Real::zero());
    }

    #[test]
    fn exp_inverts_ln() {
        for (a, b) in [(73, 1), (1, 7), (18036018, 3375), (3, 2)] {
            let x = r(a, b);
            let back = Real::ln(&x).unwrap().exp().to_ratio();
            let rel = ((&back - &x) / &x).abs();
            assert!(rel < r(1, 10).pow(80), "{a}/{b}");
        }
    }

    #[test]
    fn floor_and_f64() {
        assert_eq!(Real::from_ratio(&r(7, 2)).floor(), BigInt::from(3));
        assert_eq!(Real::from_ratio(&r(-7, 2)).floor(), BigInt::from(-4));
        assert!((Real::from_ratio(&r(1, 3)).to_f64() - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn significant_digit_rendering() {
        assert_eq!(significant_digits(&r(57, 20), 3), "2.85");
        assert_eq!(significant_digits(&r(43, 15), 5), "2.8667");
        assert_eq!(significant_digits(&r(1, 8), 2), "0.12"); // 0.125, ties to even
        assert_eq!(significant_digits(&r(3, 8), 2), "0.38"); // 0.375
        assert_eq!(significant_digits(&r(25, 1), 1), "20"); // 2.5e1 -> 2e1
        assert_eq!(significant_digits(&r(35, 1), 1), "40");
        assert_eq!(significant_digits(&r(999, 1), 2), "1000");
        assert_eq!(significant_digits(&r(-2, 3), 4), "-0.6667");
        assert_eq!(significant_digits(&r(1, 1000), 3), "0.00100");
        assert_eq!(significant_digits(&r(0, 1), 5), "0");
    }
}
