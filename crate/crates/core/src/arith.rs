//! Divisor-sum arithmetic on arbitrary-precision naturals.
//!
//! Everything here is exact. [`sigma`] works through [`factorize`] and the
//! prime-power closed form, while [`sigma_oracle`] enumerates divisors
//! directly so the two can be cross-checked.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision nonnegative integer.
pub type Natural = BigUint;

/// Exact rational, always held in lowest terms with a positive denominator.
pub type Ratio = BigRational;

/// Trial division runs over every candidate below this bound before the
/// cofactor is handed to Miller-Rabin and Pollard rho.
const TRIAL_LIMIT: u64 = 1_000_000;

/// Upper bound accepted by [`sigma_oracle`].
pub const ORACLE_LIMIT: u64 = 1 << 40;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("argument must be a positive integer, got 0")]
    Zero,
    #[error("{0} is too large for divisor enumeration (limit {ORACLE_LIMIT})")]
    TooLargeForOracle(Natural),
}

/// Canonical prime factorization: primes strictly increasing, exponents >= 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Factorization {
    factors: Vec<(Natural, u32)>,
}

impl Factorization {
    pub fn factors(&self) -> &[(Natural, u32)] {
        &self.factors
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// The integer this factorization represents.
    pub fn value(&self) -> Natural {
        self.factors
            .iter()
            .fold(Natural::one(), |acc, (p, e)| acc * p.pow(*e))
    }

    /// Exponent of `p` in the factorization, zero when absent.
    pub fn exponent_of(&self, p: &Natural) -> u32 {
        self.factors
            .iter()
            .find(|(q, _)| q == p)
            .map_or(0, |(_, e)| *e)
    }

    fn push(&mut self, p: Natural, e: u32) {
        match self.factors.iter_mut().find(|(q, _)| *q == p) {
            Some((_, old)) => *old += e,
            None => self.factors.push((p, e)),
        }
    }

    fn normalize(&mut self) {
        self.factors.sort_by(|a, b| a.0.cmp(&b.0));
    }
}

/// Factor `x` into primes.
///
/// `factorize(1)` is the empty factorization.
pub fn factorize(x: &Natural) -> Result<Factorization, ArithError> {
    if x.is_zero() {
        return Err(ArithError::Zero);
    }
    let mut out = Factorization { factors: Vec::new() };
    let mut rem = x.clone();

    let strip = |rem: &mut Natural, d: u64, out: &mut Factorization| {
        let mut e = 0;
        while small_rem(rem, d) == 0 {
            *rem /= d;
            e += 1;
        }
        if e > 0 {
            out.push(Natural::from(d), e);
        }
    };

    strip(&mut rem, 2, &mut out);
    strip(&mut rem, 3, &mut out);
    // 6k +- 1 wheel
    let mut d = 5u64;
    while d <= TRIAL_LIMIT {
        if let Some(r) = rem.to_u64() {
            if d.saturating_mul(d) > r {
                break;
            }
        }
        strip(&mut rem, d, &mut out);
        strip(&mut rem, d + 2, &mut out);
        d += 6;
    }

    if !rem.is_one() {
        let trial_sq = Natural::from(TRIAL_LIMIT) * TRIAL_LIMIT;
        if rem < trial_sq {
            // no factor below sqrt(rem) survived trial division
            out.push(rem, 1);
        } else {
            split_large(rem, &mut out);
        }
    }
    out.normalize();
    Ok(out)
}

/// `x mod d` straight off the limbs, without allocating.
fn small_rem(x: &Natural, d: u64) -> u64 {
    let d = d as u128;
    x.iter_u64_digits()
        .rev()
        .fold(0u128, |r, limb| ((r << 64) | limb as u128) % d) as u64
}

fn split_large(n: Natural, out: &mut Factorization) {
    if n.is_one() {
        return;
    }
    if is_probable_prime(&n) {
        out.push(n, 1);
        return;
    }
    if let Some(r) = perfect_power_root(&n) {
        let (root, k) = r;
        let mut sub = Factorization { factors: Vec::new() };
        split_large(root, &mut sub);
        for (p, e) in sub.factors {
            out.push(p, e * k);
        }
        return;
    }
    let d = pollard_brent(&n);
    let other = &n / &d;
    split_large(d, out);
    split_large(other, out);
}

fn perfect_power_root(n: &Natural) -> Option<(Natural, u32)> {
    let bits = n.bits() as u32;
    for k in 2..=bits {
        let r = n.nth_root(k);
        if r <= Natural::one() {
            break;
        }
        if r.pow(k) == *n {
            return Some((r, k));
        }
    }
    None
}

/// Brent's variant of Pollard rho. `n` must be odd, composite and not a
/// perfect power.
fn pollard_brent(n: &Natural) -> Natural {
    let one = Natural::one();
    let mut c = Natural::one();
    loop {
        let f = |x: &Natural| (x * x + &c) % n;
        let mut y = Natural::from(2u32);
        let mut r: u64 = 1;
        let mut q = Natural::one();
        let mut g = Natural::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        let m = 128u64;
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..m.min(r - k) {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                g = q.gcd(n);
                k += m;
            }
            r *= 2;
        }
        if g == *n {
            // backtrack one step at a time
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if g > one {
                    break;
                }
            }
        }
        if g != *n {
            return g;
        }
        c += 1u32;
    }
}

/// Miller-Rabin with the first twenty prime bases. Deterministic for
/// n < 3.3 * 10^24; beyond that the error probability is below 4^-20.
pub fn is_probable_prime(n: &Natural) -> bool {
    const BASES: [u32; 20] = [
        2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
    ];
    let two = Natural::from(2u32);
    if *n < two {
        return false;
    }
    for &b in &BASES {
        let b = Natural::from(b);
        if *n == b {
            return true;
        }
        if (n % &b).is_zero() {
            return false;
        }
    }
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for &b in &BASES {
        let mut x = Natural::from(b).modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primality by factorization for values inside the trial range, otherwise
/// Miller-Rabin.
pub fn is_prime(n: &Natural) -> bool {
    match n.to_u64() {
        Some(v) if v < 2 => false,
        Some(v) if v <= TRIAL_LIMIT * TRIAL_LIMIT => {
            let f = factorize(n).expect("nonzero");
            f.factors.len() == 1 && f.factors[0].1 == 1
        }
        _ => is_probable_prime(n),
    }
}

/// `1 + p + ... + p^a`, i.e. `(p^(a+1) - 1)/(p - 1)` for `p >= 2`.
pub fn geometric_sum(p: &Natural, a: u32) -> Natural {
    let mut acc = Natural::one();
    let mut term = Natural::one();
    for _ in 0..a {
        term *= p;
        acc += &term;
    }
    acc
}

/// Sum of divisors, computed multiplicatively from the factorization.
pub fn sigma(x: &Natural) -> Result<Natural, ArithError> {
    Ok(sigma_of(&factorize(x)?))
}

pub fn sigma_of(f: &Factorization) -> Natural {
    f.factors
        .iter()
        .fold(Natural::one(), |acc, (p, e)| acc * geometric_sum(p, *e))
}

/// Sum of divisors by direct enumeration of divisor pairs `(d, x/d)`.
///
/// Shares no code with [`sigma`]; it exists to check it.
pub fn sigma_oracle(x: &Natural) -> Result<Natural, ArithError> {
    if x.is_zero() {
        return Err(ArithError::Zero);
    }
    let v = match x.to_u64() {
        Some(v) if v <= ORACLE_LIMIT => v,
        _ => return Err(ArithError::TooLargeForOracle(x.clone())),
    };
    let mut total: u128 = 0;
    let mut d: u64 = 1;
    while d * d <= v {
        if v % d == 0 {
            total += d as u128;
            let e = v / d;
            if e != d {
                total += e as u128;
            }
        }
        d += 1;
    }
    Ok(Natural::from(total))
}

/// `D(x) = 2x - sigma(x)`; negative for abundant `x`.
pub fn deficiency(x: &Natural) -> Result<BigInt, ArithError> {
    let s = sigma(x)?;
    Ok(BigInt::from(x.clone()) * 2 - BigInt::from(s))
}

/// Aliquot sum `s(x) = sigma(x) - x`.
pub fn aliquot(x: &Natural) -> Result<Natural, ArithError> {
    Ok(sigma(x)? - x)
}

/// Abundancy index `I(x) = sigma(x)/x` in lowest terms.
pub fn abundancy(x: &Natural) -> Result<Ratio, ArithError> {
    let s = sigma(x)?;
    Ok(Ratio::new(s.into(), x.clone().into()))
}

pub fn is_perfect(x: &Natural) -> Result<bool, ArithError> {
    Ok(sigma(x)? == x * 2u32)
}

/// Square root of `x` when it is a perfect square.
pub fn exact_sqrt(x: &Natural) -> Option<Natural> {
    let r = x.sqrt();
    (&r * &r == *x).then_some(r)
}

pub fn gcd(a: &Natural, b: &Natural) -> Natural {
    a.gcd(b)
}

/// Integer `a` as a ratio.
pub fn ratio_from(a: &Natural) -> Ratio {
    Ratio::from_integer(a.clone().into())
}

/// Renders a ratio as `num/den`, always with an explicit denominator.
pub fn fraction_string(r: &Ratio) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `a`, `-a` or `a/b` into a ratio.
pub fn parse_ratio(s: &str) -> Option<Ratio> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Ratio::new(n, d))
}
