//! Exact evaluation of the bounds on `I(q^k) + I(n^2)` for a number of the
//! Euler form `q^k n^2`.
//!
//! Every quantity is a [`Ratio`] computed from concrete `(q, k, n, rho)`.
//! The only inexact values are the real exponents returned by [`solve_k`],
//! and no decision in this module depends on them: brackets and the
//! `K < log_q(2n^2/rho)` check are settled in exact arithmetic.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::arith::{self, geometric_sum, ratio_from, ArithError, Natural, Ratio};
use crate::real::Real;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{pseudo} does not divide {m}")]
    PseudoPrimeNotFactor { m: Natural, pseudo: Natural },
    #[error("cofactor {0} is not a perfect square")]
    NotSquare(Natural),
}

/// Euler-form admissibility of `(q, k, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EulerFlags {
    pub q_prime: bool,
    pub q_1mod4: bool,
    pub k_1mod4: bool,
    pub n_odd: bool,
    pub coprime_qn: bool,
}

impl EulerFlags {
    pub fn all(&self) -> bool {
        self.q_prime && self.q_1mod4 && self.k_1mod4 && self.n_odd && self.coprime_qn
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerTriple {
    pub q: Natural,
    pub k: u32,
    pub n: Natural,
    pub valid: EulerFlags,
}

/// Checks the shape constraints on a candidate `q^k n^2`. Invalid triples
/// are reported through the flags rather than rejected.
pub fn validate_euler(q: &Natural, k: u32, n: &Natural) -> EulerTriple {
    let valid = EulerFlags {
        q_prime: arith::is_prime(q),
        q_1mod4: (q % 4u32) == Natural::one(),
        k_1mod4: k % 4 == 1,
        n_odd: n.is_odd(),
        coprime_qn: q.gcd(n).is_one(),
    };
    EulerTriple { q: q.clone(), k, n: n.clone(), valid }
}

fn rq(q: &Natural) -> Ratio {
    ratio_from(q)
}

fn int(v: i64) -> Ratio {
    Ratio::from_integer(v.into())
}

/// The three printed forms of the lower bound `L(q)`:
/// `2(q-1)/q + q/(q-1)`, `(3q^2-4q+2)/(q(q-1))` and `3 - (q-2)/(q(q-1))`.
pub fn l_bound_forms(q: &Natural) -> [Ratio; 3] {
    let q = rq(q);
    let q1 = &q - int(1);
    [
        int(2) * &q1 / &q + &q / &q1,
        (int(3) * &q * &q - int(4) * &q + int(2)) / (&q * &q1),
        int(3) - (&q - int(2)) / (&q * &q1),
    ]
}

/// The three printed forms of the upper bound `U(q)`.
pub fn u_bound_forms(q: &Natural) -> [Ratio; 3] {
    let q = rq(q);
    let qp = &q + int(1);
    [
        int(2) * &q / &qp + &qp / &q,
        (int(3) * &q * &q + int(2) * &q + int(1)) / (&q * &qp),
        int(3) - (&q - int(1)) / (&q * &qp),
    ]
}

/// Lower bound `L(q) = 2(q-1)/q + q/(q-1)`, the limit of `g` as `k` grows.
pub fn l_bound(q: &Natural) -> Ratio {
    let [l, _, _] = l_bound_forms(q);
    l
}

/// Upper bound `U(q) = 2q/(q+1) + (q+1)/q`, attained by `g` at `k = 1`.
pub fn u_bound(q: &Natural) -> Ratio {
    let [u, _, _] = u_bound_forms(q);
    u
}

/// `I(q^k) = sigma(q^k)/q^k` for prime `q`.
pub fn abundancy_prime_power(q: &Natural, k: u32) -> Ratio {
    Ratio::new(geometric_sum(q, k).into(), q.pow(k).into())
}

/// `g(k) = I(q^k) + I(n^2)`, where perfection forces `I(n^2) = 2/I(q^k)`.
pub fn g_of_k(q: &Natural, k: u32) -> Ratio {
    let i = abundancy_prime_power(q, k);
    let two_over = int(2) / &i;
    i + two_over
}

/// `f(k) = 3 - g(k)` in closed form,
/// `(q^k-1)(q^(k+1)-2q^k+1) / (q^k (q-1)(q^(k+1)-1))`.
pub fn f_of_k(q: &Natural, k: u32) -> Ratio {
    let qr = rq(q);
    let x = rq(&q.pow(k));
    let qx = &qr * &x;
    let num = (&x - int(1)) * (&qx - int(2) * &x + int(1));
    let den = &x * (&qr - int(1)) * (&qx - int(1));
    num / den
}

/// Numerator of `f'(k)/ln q` after clearing the positive denominator:
/// `(q-4)q^(2k+1) + 2q^(k+1) + 2q^(2k) - 1`.
pub fn f_prime_numerator(q: &Natural, k: u32) -> BigInt {
    let q = BigInt::from(q.clone());
    let x = q.pow(k);
    (&q - 4) * &q * &x * &x + 2 * &q * &x + 2 * &x * &x - 1
}

/// `g` extended to real exponents:
/// `(q^(K+1)-1)/(q^K (q-1)) + 2 q^K (q-1)/(q^(K+1)-1)`.
pub fn g_real(q: &Natural, exponent: &Real) -> Option<Real> {
    let qr = rq(q);
    let x = Real::pow_of(&qr, exponent)?;
    let qreal = Real::from_ratio(&qr);
    let q1 = Real::from_ratio(&(&qr - int(1)));
    let qx1 = qreal * x.clone() - Real::one();
    let first = qx1.clone() / (x.clone() * q1.clone());
    let second = Real::from_int(2) * x * q1 / qx1;
    Some(first + second)
}

/// `D(q^k) = (q^(k+1) - 2q^k + 1)/(q - 1)`.
pub fn deficiency_prime_power(q: &Natural, k: u32) -> Ratio {
    let qr = rq(q);
    let x = rq(&q.pow(k));
    (&qr * &x - int(2) * &x + int(1)) / (qr - int(1))
}

/// `D(n^2) = 2n^2 (q^k - 1)/(q^(k+1) - 1)`, the value perfection forces.
pub fn deficiency_square_forced(q: &Natural, k: u32, n: &Natural) -> Ratio {
    let qr = rq(q);
    let x = rq(&q.pow(k));
    let n2 = rq(&(n * n));
    int(2) * n2 * (&x - int(1)) / (qr * &x - int(1))
}

/// `2n^2 (q^k-1)(q^(k+1)-2q^k+1) / ((q-1)(q^(k+1)-1))`, the common value
/// of `D(q^k) D(n^2)` and `2 s(q^k) s(n^2)` for an odd perfect `q^k n^2`.
pub fn common_value(q: &Natural, k: u32, n: &Natural) -> Ratio {
    let qr = rq(q);
    let x = rq(&q.pow(k));
    let n2 = rq(&(n * n));
    let qx = &qr * &x;
    let num = int(2) * n2 * (&x - int(1)) * (&qx - int(2) * &x + int(1));
    let den = (qr - int(1)) * (qx - int(1));
    num / den
}

/// The interval `(3 - (q-1)/q^2, 3 - (q-2)/((q-1)(q+1)))` produced by
/// bounding `D(q^k) D(n^2)` directly. It strictly contains `[L(q), U(q)]`.
pub fn deficiency_product_interval(q: &Natural) -> (Ratio, Ratio) {
    let q = rq(q);
    let lo = int(3) - (&q - int(1)) / (&q * &q);
    let hi = int(3) - (&q - int(2)) / ((&q - int(1)) * (&q + int(1)));
    (lo, hi)
}

/// `1 <= rho < 2n^2/(q+1)`.
pub fn rho_admissible(q: &Natural, n: &Natural, rho: &Ratio) -> bool {
    let window = rq(&(n * n * 2u32)) / rq(&(q + 1u32));
    *rho >= int(1) && *rho < window
}

/// An improved lower bound together with the admissibility of its `rho`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImprovedBound {
    pub value: Ratio,
    pub admissible: bool,
}

fn lin(q: &Ratio, n2: &Ratio, rho: &Ratio) -> Ratio {
    int(2) * q * n2 - int(2) * n2 + rho
}

/// `l_rho(q, n) = 2qn^2/(2qn^2 - 2n^2 + rho) + (2qn^2 - 2n^2 + rho)/(qn^2)`.
///
/// The value is returned even when `rho` lies outside its admissible window.
pub fn l_rho(q: &Natural, n: &Natural, rho: &Ratio) -> ImprovedBound {
    let qr = rq(q);
    let n2 = rq(&(n * n));
    let d = lin(&qr, &n2, rho);
    let qn2 = &qr * &n2;
    let value = int(2) * &qn2 / &d + d / qn2;
    ImprovedBound { value, admissible: rho_admissible(q, n, rho) }
}

pub fn l1(q: &Natural, n: &Natural) -> ImprovedBound {
    l_rho(q, n, &int(1))
}

/// `L(q) - rho q/((q-1)(2qn^2-2n^2+rho)) + rho/(qn^2)`; equal to [`l_rho`].
pub fn l_rho_partial_fractions(q: &Natural, n: &Natural, rho: &Ratio) -> Ratio {
    let qr = rq(q);
    let n2 = rq(&(n * n));
    let head = l_bound(q);
    let d = lin(&qr, &n2, rho);
    head - rho * &qr / ((&qr - int(1)) * d) + rho / (&qr * &n2)
}

/// `rho (qn^2(q-4) + rho(q-1) + 2n^2) / (qn^2 (q-1)(2n^2(q-1) + rho))`, the
/// amount by which `l_rho` exceeds `L(q)`.
pub fn l_rho_excess(q: &Natural, n: &Natural, rho: &Ratio) -> Ratio {
    let qr = rq(q);
    let n2 = rq(&(n * n));
    let q1 = &qr - int(1);
    let num = rho * (&qr * &n2 * (&qr - int(4)) + rho * &q1 + int(2) * &n2);
    let den = &qr * &n2 * &q1 * (int(2) * &n2 * &q1 + rho);
    num / den
}

/// `((q-3)n^2 + rho)(2n^2 - rho(q+1)) / (n^2 q (q+1)(2n^2(q-1) + rho))`,
/// the gap `U(q) - l_rho`.
pub fn u_minus_l_rho_factored(q: &Natural, n: &Natural, rho: &Ratio) -> Ratio {
    let qr = rq(q);
    let n2 = rq(&(n * n));
    let a = (&qr - int(3)) * &n2 + rho;
    let b = int(2) * &n2 - rho * (&qr + int(1));
    let den = &n2 * &qr * (&qr + int(1)) * (int(2) * &n2 * (&qr - int(1)) + rho);
    a * b / den
}

/// Everything evaluated at one `(q, k, n, rho)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundReport {
    pub l: Ratio,
    pub u: Ratio,
    pub g_k: Ratio,
    pub f_k: Ratio,
    pub l1: Ratio,
    pub l_rho: Ratio,
    pub inequalities: BTreeMap<String, bool>,
}

pub fn bound_report(q: &Natural, k: u32, n: &Natural, rho: &Ratio) -> BoundReport {
    let l = l_bound(q);
    let u = u_bound(q);
    let g_k = g_of_k(q, k);
    let f_k = f_of_k(q, k);
    let l1 = l1(q, n).value;
    let lr = l_rho(q, n, rho).value;
    let mut ineq = BTreeMap::new();
    ineq.insert("L<U".to_string(), l < u);
    ineq.insert("L<g".to_string(), l < g_k);
    ineq.insert("g<=U".to_string(), g_k <= u);
    ineq.insert("f+g=3".to_string(), &f_k + &g_k == int(3));
    ineq.insert("L<l1".to_string(), l < l1);
    ineq.insert("l1<U".to_string(), l1 < u);
    ineq.insert("L<l_rho".to_string(), l < lr);
    ineq.insert("l_rho<U".to_string(), lr < u);
    ineq.insert("l1<=l_rho".to_string(), l1 <= lr);
    BoundReport { l, u, g_k, f_k, l1, l_rho: lr, inequalities: ineq }
}

/// Crossover exponent where `g` meets `l_rho`, i.e. the real `K` with
/// `(q^(K+1) - 1)/(q - 1) = 2n^2/rho`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KSolve {
    pub q: Natural,
    pub n: Natural,
    pub rho: Ratio,
    /// `2n^2 (q-1)/rho + 1`, which equals `q^(K+1)`.
    pub target: Ratio,
    pub k: Real,
    /// Largest integer `k` with `q^(k+1) <= target`.
    pub k_max: i64,
    /// `log_q 2 + 2 log_q n - log_q rho`.
    pub bound_rhs: Real,
    /// `K < bound_rhs`, decided exactly as `target < 2 q n^2 / rho`.
    pub bound_holds: bool,
    pub admissible: bool,
}

impl KSolve {
    /// `q^e` as an exact ratio (negative `e` allowed).
    fn q_pow(&self, e: i64) -> Ratio {
        let q = rq(&self.q);
        if e >= 0 {
            num_traits::pow(q, e as usize)
        } else {
            int(1) / num_traits::pow(q, (-e) as usize)
        }
    }

    /// `q^(k_max+1) <= target < q^(k_max+2)`, checked exactly.
    pub fn bracket_holds(&self) -> bool {
        self.q_pow(self.k_max + 1) <= self.target && self.target < self.q_pow(self.k_max + 2)
    }

    /// `floor(K)`. When the target is an exact power of `q`, `K` is an integer
    /// and the fixed-point value may sit just below it, so that case is
    /// settled exactly.
    pub fn floor_k(&self) -> i64 {
        if self.q_pow(self.k_max + 1) == self.target {
            self.k_max
        } else {
            floor_i64(&self.k)
        }
    }

    /// `(q^(K+1) - 1)/(q - 1)` evaluated from the high-precision `K`; it
    /// should reproduce `2n^2/rho`.
    pub fn back_substitute(&self) -> Real {
        let qr = rq(&self.q);
        let k1 = self.k.clone() + Real::one();
        let p = Real::pow_of(&qr, &k1).expect("q > 1");
        (p - Real::one()) / Real::from_ratio(&(qr - int(1)))
    }

    /// `2n^2 / rho`.
    pub fn two_n2_over_rho(&self) -> Ratio {
        rq(&(&self.n * &self.n * 2u32)) / &self.rho
    }
}

pub fn solve_k(q: &Natural, n: &Natural, rho: &Ratio) -> Result<KSolve, BoundsError> {
    if *q < Natural::from(2u32) {
        return Err(BoundsError::InvalidParameter(format!("q = {q} must be at least 2")));
    }
    if n.is_zero() {
        return Err(BoundsError::InvalidParameter("n must be positive".into()));
    }
    if !rho.is_positive() {
        return Err(BoundsError::InvalidParameter(format!("rho = {rho} must be positive")));
    }
    let qr = rq(q);
    let two_n2 = rq(&(n * n * 2u32));
    let target = &two_n2 * (&qr - int(1)) / rho + int(1);

    // exact bracketing: largest e >= 0 with q^e <= target (target > 1)
    let mut e: i64 = 0;
    let mut pow = qr.clone();
    while pow <= target {
        pow *= &qr;
        e += 1;
    }
    let k_max = e - 1;

    let k = Real::log(&target, &qr).expect("target, q > 1") - Real::one();
    let bound_rhs = Real::log(&(&two_n2 / rho), &qr).expect("positive");
    let bound_holds = target < &qr * &two_n2 / rho;

    Ok(KSolve {
        q: q.clone(),
        n: n.clone(),
        rho: rho.clone(),
        target,
        k,
        k_max,
        bound_rhs,
        bound_holds,
        admissible: rho_admissible(q, n, rho),
    })
}

/// The five quantities that coincide for an odd perfect `q^k n^2`, computed
/// for a number where `q` is only treated as prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpoofReport {
    pub m: Natural,
    pub q: Natural,
    pub k: u32,
    pub n: Natural,
    pub n_squared: Natural,
    /// `1 + q + ... + q^k`, the divisor sum `q^k` would have if `q` were prime.
    pub sigma_q_pretend: Natural,
    pub sigma_n_squared: Natural,
    /// `sigma(n^2)/q^k`, `2n^2/sigma(q^k)`, `gcd(n^2, sigma(n^2))`,
    /// `D(n^2)/s(q^k)`, `2 s(n^2)/D(q^k)`, in that order.
    pub members: [(&'static str, Ratio); 5],
    /// `q sigma(n^2) - 2(q-1) n^2`.
    pub gcd_formula: BigInt,
    /// `sigma(q^k) sigma(n^2) == 2m` with the pretend `sigma(q^k)`.
    pub pseudo_perfect: bool,
}

impl SpoofReport {
    pub fn pairwise_equal(&self) -> Vec<(usize, usize, bool)> {
        let mut out = Vec::new();
        for i in 0..5 {
            for j in i + 1..5 {
                out.push((i, j, self.members[i].1 == self.members[j].1));
            }
        }
        out
    }

    pub fn chain_holds(&self) -> bool {
        self.members.iter().all(|(_, v)| *v == self.members[0].1)
    }

    pub fn gcd_formula_matches(&self) -> bool {
        Ratio::from_integer(self.gcd_formula.clone()) == self.members[2].1
    }
}

pub const DESCARTES_FACTORS: [(u64, u32); 5] = [(3, 2), (7, 2), (11, 2), (13, 2), (22021, 1)];
pub const DESCARTES_PSEUDO_PRIME: u64 = 22021;

/// `3^2 7^2 11^2 13^2 22021`.
pub fn descartes_number() -> Natural {
    DESCARTES_FACTORS
        .iter()
        .fold(Natural::one(), |acc, &(p, e)| acc * Natural::from(p).pow(e))
}

/// Spoof check from an explicit list of (possibly pseudo-prime) factors.
pub fn spoof_check_factors(
    factors: &[(Natural, u32)],
    pseudo_prime: &Natural,
) -> Result<SpoofReport, BoundsError> {
    let m = factors.iter().fold(Natural::one(), |acc, (p, e)| acc * p.pow(*e));
    if !factors.iter().any(|(p, _)| p == pseudo_prime) {
        return Err(BoundsError::PseudoPrimeNotFactor { m, pseudo: pseudo_prime.clone() });
    }
    spoof_check(&m, pseudo_prime)
}

/// Splits `m = q^k n^2` with `q` the designated pseudo-prime and evaluates
/// the five-member chain and the gcd formula, using the prime-power divisor
/// sum for `q^k` and the genuine divisor sum for `n^2`.
pub fn spoof_check(m: &Natural, pseudo_prime: &Natural) -> Result<SpoofReport, BoundsError> {
    if m.is_zero() {
        return Err(ArithError::Zero.into());
    }
    if *pseudo_prime < Natural::from(2u32) {
        return Err(BoundsError::InvalidParameter(format!(
            "pseudo-prime {pseudo_prime} must be at least 2"
        )));
    }
    let q = pseudo_prime;
    let mut rest = m.clone();
    let mut k = 0u32;
    while (&rest % q).is_zero() {
        rest /= q;
        k += 1;
    }
    if k == 0 {
        return Err(BoundsError::PseudoPrimeNotFactor { m: m.clone(), pseudo: q.clone() });
    }
    let n = arith::exact_sqrt(&rest).ok_or_else(|| BoundsError::NotSquare(rest.clone()))?;
    let n2 = rest;

    let qk = q.pow(k);
    let sigma_q = geometric_sum(q, k);
    let sigma_n2 = arith::sigma(&n2)?;
    let to_int = |v: &Natural| BigInt::from(v.clone());
    let s_q = to_int(&sigma_q) - to_int(&qk);
    let d_q = 2 * to_int(&qk) - to_int(&sigma_q);
    let s_n2 = to_int(&sigma_n2) - to_int(&n2);
    let d_n2 = 2 * to_int(&n2) - to_int(&sigma_n2);
    let ratio = |a: BigInt, b: BigInt| -> Ratio {
        if b.is_zero() {
            // only reachable for q^k with D(q^k) = 0, i.e. never for q >= 2
            Ratio::from_integer(BigInt::zero())
        } else {
            Ratio::new(a, b)
        }
    };

    let members = [
        ("sigma(n^2)/q^k", ratio(to_int(&sigma_n2), to_int(&qk))),
        ("2n^2/sigma(q^k)", ratio(2 * to_int(&n2), to_int(&sigma_q))),
        ("gcd(n^2, sigma(n^2))", ratio(to_int(&n2.gcd(&sigma_n2)), BigInt::one())),
        ("D(n^2)/s(q^k)", ratio(d_n2, s_q)),
        ("2s(n^2)/D(q^k)", ratio(2 * s_n2, d_q)),
    ];
    let gcd_formula = to_int(q) * to_int(&sigma_n2) - 2 * (to_int(q) - 1) * to_int(&n2);
    let pseudo_perfect = &sigma_q * &sigma_n2 == m * 2u32;

    Ok(SpoofReport {
        m: m.clone(),
        q: q.clone(),
        k,
        n,
        n_squared: n2,
        sigma_q_pretend: sigma_q,
        sigma_n_squared: sigma_n2,
        members,
        gcd_formula,
        pseudo_perfect,
    })
}

/// `floor(K)` as an `i64`, for comparing against [`KSolve::k_max`].
pub fn floor_i64(r: &Real) -> i64 {
    r.floor().to_i64().expect("exponent fits in i64")
}
