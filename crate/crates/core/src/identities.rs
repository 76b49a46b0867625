//! Built-in rational-function identities.
//!
//! Each [`IdentityTag`] names one identity relating the divisor-sum
//! quantities of a number `q^k n^2` with special prime `q`. An identity is a
//! set of chains; every expression in a chain must equal the chain's first
//! expression as a rational function.

use std::fmt;
use std::str::FromStr;

use crate::ratfunc::{Poly, RatFunc, RatFuncError, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IdentityTag {
    LClosedForm,
    UClosedForm,
    DeficiencyOfPrimePower,
    CommonValue,
    ThreeMinusSum,
    GPartialFractions,
    FDerivative,
    GcdIdentityAlgebra,
    L1PartialFractions,
    L1PositivityNumerator,
    G1MinusL1,
    LRhoPartialFractions,
    LRhoPositivity,
    G1MinusLRho,
}

impl IdentityTag {
    pub const ALL: [IdentityTag; 14] = [
        IdentityTag::LClosedForm,
        IdentityTag::UClosedForm,
        IdentityTag::DeficiencyOfPrimePower,
        IdentityTag::CommonValue,
        IdentityTag::ThreeMinusSum,
        IdentityTag::GPartialFractions,
        IdentityTag::FDerivative,
        IdentityTag::GcdIdentityAlgebra,
        IdentityTag::L1PartialFractions,
        IdentityTag::L1PositivityNumerator,
        IdentityTag::G1MinusL1,
        IdentityTag::LRhoPartialFractions,
        IdentityTag::LRhoPositivity,
        IdentityTag::G1MinusLRho,
    ];

    /// Single-letter label `a` through `n`.
    pub fn letter(self) -> char {
        (b'a' + self as u8) as char
    }

    pub fn name(self) -> &'static str {
        match self {
            IdentityTag::LClosedForm => "L-closed-form",
            IdentityTag::UClosedForm => "U-closed-form",
            IdentityTag::DeficiencyOfPrimePower => "D-of-prime-power",
            IdentityTag::CommonValue => "common-value",
            IdentityTag::ThreeMinusSum => "three-minus-sum",
            IdentityTag::GPartialFractions => "g-partial-fractions",
            IdentityTag::FDerivative => "f-derivative",
            IdentityTag::GcdIdentityAlgebra => "gcd-identity-algebra",
            IdentityTag::L1PartialFractions => "l1-partial-fractions",
            IdentityTag::L1PositivityNumerator => "l1-positivity-numerator",
            IdentityTag::G1MinusL1 => "g1-minus-l1",
            IdentityTag::LRhoPartialFractions => "lrho-partial-fractions",
            IdentityTag::LRhoPositivity => "lrho-positivity",
            IdentityTag::G1MinusLRho => "g1-minus-lrho",
        }
    }
}

impl fmt::Display for IdentityTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) {}", self.letter(), self.name())
    }
}

impl FromStr for IdentityTag {
    type Err = RatFuncError;

    /// Accepts the letter (`"f"`), the name (`"g-partial-fractions"`) or the
    /// displayed form (`"(f) g-partial-fractions"`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        IdentityTag::ALL
            .into_iter()
            .find(|t| {
                s.len() == 1 && s.starts_with(t.letter())
                    || s.eq_ignore_ascii_case(t.name())
                    || s == t.to_string()
            })
            .ok_or_else(|| RatFuncError::UnknownTag(s.to_string()))
    }
}

#[derive(Clone, Debug)]
pub struct Identity {
    pub tag: IdentityTag,
    pub chains: Vec<Vec<RatFunc>>,
}

impl Identity {
    /// Cross-multiplied residuals of every chain member against the chain head.
    pub fn residuals(&self) -> Vec<Poly> {
        self.chains
            .iter()
            .flat_map(|chain| chain[1..].iter().map(|e| chain[0].cross_residual(e)))
            .collect()
    }

    pub fn holds(&self) -> bool {
        self.residuals().iter().all(Poly::is_zero)
    }

    /// Variables appearing anywhere in the identity.
    pub fn variables(&self) -> Vec<Var> {
        let mut vs: Vec<Var> = self
            .chains
            .iter()
            .flatten()
            .flat_map(|e| {
                let mut v = e.num().variables();
                v.extend(e.den().variables());
                v
            })
            .collect();
        vs.sort();
        vs.dedup();
        vs
    }
}

pub fn verify_identity(tag: IdentityTag) -> bool {
    identity(tag).holds()
}

// shorthands for building the catalog
fn v(x: Var) -> Poly {
    Poly::var(x)
}
fn c(k: i64) -> Poly {
    Poly::int(k)
}
fn add(a: &Poly, b: &Poly) -> Poly {
    a + b
}
fn sub(a: &Poly, b: &Poly) -> Poly {
    a - b
}
fn mul(ps: &[&Poly]) -> Poly {
    ps.iter().fold(Poly::one(), |acc, p| &acc * *p)
}
fn frac(n: Poly, d: Poly) -> RatFunc {
    RatFunc::frac(n, d)
}
fn rsum(fs: &[RatFunc]) -> RatFunc {
    fs.iter().fold(RatFunc::from(0), |acc, f| &acc + f)
}

struct Sym {
    q: Poly,
    x: Poly,
    n: Poly,
    r: Poly,
    s: Poly,
}

impl Sym {
    fn new() -> Self {
        Sym {
            q: v(Var::Q),
            x: v(Var::X),
            n: v(Var::N),
            r: v(Var::R),
            s: v(Var::S),
        }
    }

    fn q_minus_1(&self) -> Poly {
        sub(&self.q, &c(1))
    }

    fn q_plus_1(&self) -> Poly {
        add(&self.q, &c(1))
    }

    /// `q^(k+1) - 1`
    fn qx_minus_1(&self) -> Poly {
        sub(&mul(&[&self.q, &self.x]), &c(1))
    }

    /// `q^(k+1) - 2 q^k + 1`
    fn qx_2x_1(&self) -> Poly {
        add(&sub(&mul(&[&self.q, &self.x]), &mul(&[&c(2), &self.x])), &c(1))
    }

    /// `sigma(q^k) = (q^(k+1) - 1)/(q - 1)`
    fn sigma_q(&self) -> RatFunc {
        frac(self.qx_minus_1(), self.q_minus_1())
    }

    /// `I(q^k)`
    fn abund_q(&self) -> RatFunc {
        frac(self.qx_minus_1(), mul(&[&self.x, &self.q_minus_1()]))
    }

    /// `I(n^2) = 2 / I(q^k)`
    fn abund_n(&self) -> RatFunc {
        frac(mul(&[&c(2), &self.x, &self.q_minus_1()]), self.qx_minus_1())
    }

    /// `3 - (I(q^k) + I(n^2))` in closed form
    fn f_closed(&self) -> RatFunc {
        frac(
            mul(&[&sub(&self.x, &c(1)), &self.qx_2x_1()]),
            mul(&[&self.x, &self.q_minus_1(), &self.qx_minus_1()]),
        )
    }

    fn l_closed(&self) -> RatFunc {
        let num = add(&sub(&mul(&[&c(3), &self.q, &self.q]), &mul(&[&c(4), &self.q])), &c(2));
        frac(num, mul(&[&self.q, &self.q_minus_1()]))
    }

    fn u_closed(&self) -> RatFunc {
        let num = add(&add(&mul(&[&c(3), &self.q, &self.q]), &mul(&[&c(2), &self.q])), &c(1));
        frac(num, mul(&[&self.q, &self.q_plus_1()]))
    }

    /// `2qN - 2N + rho`, which also equals `2N(q-1) + rho`
    fn lin(&self, rho: &Poly) -> Poly {
        add(&sub(&mul(&[&c(2), &self.q, &self.n]), &mul(&[&c(2), &self.n])), rho)
    }

    /// `2qN/(2qN - 2N + rho) + (2qN - 2N + rho)/(qN)`
    fn l_two_term(&self, rho: &Poly) -> RatFunc {
        let qn = mul(&[&self.q, &self.n]);
        &frac(mul(&[&c(2), &qn]), self.lin(rho)) + &frac(self.lin(rho), qn)
    }

    /// `L(q) - rho q/((q-1)(2qN - 2N + rho)) + rho/(qN)`
    fn l_partial(&self, rho: &Poly) -> RatFunc {
        rsum(&[
            self.l_closed(),
            frac(-mul(&[rho, &self.q]), mul(&[&self.q_minus_1(), &self.lin(rho)])),
            frac(rho.clone(), mul(&[&self.q, &self.n])),
        ])
    }

    /// `2/y + y` with `y = 2(q-1)/q + rho/(qN)`
    fn l_construction(&self, rho: &Poly) -> RatFunc {
        let y = &frac(mul(&[&c(2), &self.q_minus_1()]), self.q.clone())
            + &frac(rho.clone(), mul(&[&self.q, &self.n]));
        &RatFunc::from(2).try_div(&y).expect("y is nonzero") + &y
    }

    /// `((q-3)N + rho)(2N - rho(q+1)) / (N q (q+1) (2N(q-1) + rho))`
    fn g1_minus_l_factored(&self, rho: &Poly) -> RatFunc {
        let a = add(&mul(&[&sub(&self.q, &c(3)), &self.n]), rho);
        let b = sub(&mul(&[&c(2), &self.n]), &mul(&[rho, &self.q_plus_1()]));
        let two_n_q1 = add(&mul(&[&c(2), &self.n, &self.q_minus_1()]), rho);
        frac(mul(&[&a, &b]), mul(&[&self.n, &self.q, &self.q_plus_1(), &two_n_q1]))
    }

    /// `rho (qN(q-4) + rho(q-1) + 2N) / (qN(q-1)(2N(q-1) + rho))`
    fn positivity_form(&self, rho: &Poly) -> RatFunc {
        let qn = mul(&[&self.q, &self.n]);
        let inner = add(
            &add(&mul(&[&qn, &sub(&self.q, &c(4))]), &mul(&[rho, &self.q_minus_1()])),
            &mul(&[&c(2), &self.n]),
        );
        let two_n_q1 = add(&mul(&[&c(2), &self.n, &self.q_minus_1()]), rho);
        frac(mul(&[rho, &inner]), mul(&[&qn, &self.q_minus_1(), &two_n_q1]))
    }

    /// `-rho q/((q-1)(2qN - 2N + rho)) + rho/(qN)`
    fn positivity_sum(&self, rho: &Poly) -> RatFunc {
        &frac(-mul(&[rho, &self.q]), mul(&[&self.q_minus_1(), &self.lin(rho)]))
            + &frac(rho.clone(), mul(&[&self.q, &self.n]))
    }
}

/// Both sides of the named identity.
pub fn identity(tag: IdentityTag) -> Identity {
    let z = Sym::new();
    let (q, x, n, s) = (&z.q, &z.x, &z.n, &z.s);
    let one = c(1);

    let chains: Vec<Vec<RatFunc>> = match tag {
        IdentityTag::LClosedForm => vec![vec![
            &frac(mul(&[&c(2), &z.q_minus_1()]), q.clone()) + &frac(q.clone(), z.q_minus_1()),
            z.l_closed(),
            &RatFunc::from(3) - &frac(sub(q, &c(2)), mul(&[q, &z.q_minus_1()])),
        ]],
        IdentityTag::UClosedForm => vec![vec![
            &frac(mul(&[&c(2), q]), z.q_plus_1()) + &frac(z.q_plus_1(), q.clone()),
            z.u_closed(),
            &RatFunc::from(3) - &frac(z.q_minus_1(), mul(&[q, &z.q_plus_1()])),
        ]],
        IdentityTag::DeficiencyOfPrimePower => vec![vec![
            &RatFunc::from(mul(&[&c(2), x])) - &z.sigma_q(),
            frac(z.qx_2x_1(), z.q_minus_1()),
        ]],
        IdentityTag::CommonValue => {
            let d_q = frac(z.qx_2x_1(), z.q_minus_1());
            let d_n = frac(mul(&[&c(2), n, &sub(x, &one)]), z.qx_minus_1());
            // s(q^k) and s(n^2) with sigma(n^2) = 2 q^k n^2 / sigma(q^k)
            let s_q = &z.sigma_q() - &RatFunc::from(x.clone());
            let sigma_n = RatFunc::from(mul(&[&c(2), x, n])).try_div(&z.sigma_q()).unwrap();
            let s_n = &sigma_n - &RatFunc::from(n.clone());
            vec![vec![
                &d_q * &d_n,
                &(&RatFunc::from(2) * &s_q) * &s_n,
                frac(
                    mul(&[&c(2), n, &sub(x, &one), &z.qx_2x_1()]),
                    mul(&[&z.q_minus_1(), &z.qx_minus_1()]),
                ),
            ]]
        }
        IdentityTag::ThreeMinusSum => {
            let sum = &z.abund_q() + &z.abund_n();
            let prod = &(&z.abund_q() - &RatFunc::from(1)) * &(&z.abund_n() - &RatFunc::from(1));
            vec![vec![
                sum,
                &RatFunc::from(3) - &z.f_closed(),
                &RatFunc::from(3) - &prod,
            ]]
        }
        IdentityTag::GPartialFractions => {
            let qq = mul(&[q, q]);
            let xx = mul(&[x, x]);
            // 3q^{2k+2} - 4q^{2k+1} + 2q^{2k} - 2q^{k+1} + 1
            let expanded = rsum(&[
                RatFunc::from(mul(&[&c(3), &qq, &xx])),
                RatFunc::from(mul(&[&c(-4), q, &xx])),
                RatFunc::from(mul(&[&c(2), &xx])),
                RatFunc::from(mul(&[&c(-2), q, x])),
                RatFunc::from(1),
            ]);
            vec![vec![
                &z.abund_q() + &z.abund_n(),
                &expanded * &frac(one.clone(), mul(&[x, &z.q_minus_1(), &z.qx_minus_1()])),
                rsum(&[
                    z.l_closed(),
                    frac(mul(&[&c(2), &z.q_minus_1()]), mul(&[q, &z.qx_minus_1()])),
                    frac(c(-1), mul(&[x, &z.q_minus_1()])),
                ]),
            ]]
        }
        IdentityTag::FDerivative => {
            let xr = RatFunc::from(x.clone());
            let qx = mul(&[q, x]);
            // (q-4) q^{2k+1} + 2 q^{k+1} + 2 q^{2k} - 1
            let numer = rsum(&[
                RatFunc::from(mul(&[&sub(q, &c(4)), &qx, x])),
                RatFunc::from(mul(&[&c(2), &qx])),
                RatFunc::from(mul(&[&c(2), x, x])),
                RatFunc::from(-1),
            ]);
            let denom = mul(&[x, &z.q_minus_1(), &z.qx_minus_1(), &z.qx_minus_1()]);
            let g = &z.abund_q() + &z.abund_n();
            vec![vec![
                &xr * &z.f_closed().partial(Var::X),
                &numer * &frac(one.clone(), denom),
                -(&xr * &g.partial(Var::X)),
            ]]
        }
        IdentityTag::GcdIdentityAlgebra => {
            // A/B = C/D with A = sigma(n^2), B = q^k, C = (q-1) D(n^2),
            // D = q^k - 1, where D(n^2) = 2n^2 - sigma(n^2)
            let a = s.clone();
            let b = x.clone();
            let cc = mul(&[&z.q_minus_1(), &sub(&mul(&[&c(2), n]), s)]);
            let d = sub(x, &one);
            vec![
                vec![
                    RatFunc::from(sub(s, &cc)),
                    RatFunc::from(sub(&mul(&[q, s]), &mul(&[&c(2), &z.q_minus_1(), n]))),
                ],
                // A(B - D) - B(A - C) = BC - AD, so A/B = (A - C)/(B - D) when AD = BC
                vec![
                    RatFunc::from(sub(&mul(&[&a, &sub(&b, &d)]), &mul(&[&b, &sub(&a, &cc)]))),
                    RatFunc::from(sub(&mul(&[&b, &cc]), &mul(&[&a, &d]))),
                ],
                vec![RatFunc::from(sub(&b, &d)), RatFunc::from(1)],
            ]
        }
        IdentityTag::L1PartialFractions => vec![vec![
            z.l_two_term(&one),
            z.l_partial(&one),
            z.l_construction(&one),
        ]],
        IdentityTag::L1PositivityNumerator => {
            let qn = mul(&[q, n]);
            let inner = rsum(&[
                RatFunc::from(mul(&[&qn, &sub(q, &c(4))])),
                RatFunc::from(q.clone()),
                RatFunc::from(mul(&[&c(2), n])),
                RatFunc::from(-1),
            ]);
            let two_n_q1 = add(&mul(&[&c(2), n, &z.q_minus_1()]), &one);
            vec![vec![
                z.positivity_sum(&one),
                &inner * &frac(one.clone(), mul(&[&qn, &z.q_minus_1(), &two_n_q1])),
            ]]
        }
        IdentityTag::G1MinusL1 => {
            let a = add(&mul(&[&sub(q, &c(3)), n]), &one);
            let b = sub(&sub(&mul(&[&c(2), n]), q), &one);
            let two_n_q1 = add(&mul(&[&c(2), n, &z.q_minus_1()]), &one);
            vec![vec![
                &z.u_closed() - &z.l_partial(&one),
                frac(mul(&[&a, &b]), mul(&[n, q, &z.q_plus_1(), &two_n_q1])),
            ]]
        }
        IdentityTag::LRhoPartialFractions => vec![vec![
            z.l_two_term(&z.r),
            z.l_partial(&z.r),
            z.l_construction(&z.r),
        ]],
        IdentityTag::LRhoPositivity => {
            vec![vec![z.positivity_sum(&z.r), z.positivity_form(&z.r)]]
        }
        IdentityTag::G1MinusLRho => vec![vec![
            &z.u_closed() - &z.l_partial(&z.r),
            z.g1_minus_l_factored(&z.r),
        ]],
    };
    Identity { tag, chains }
}
