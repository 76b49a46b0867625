//! Exact arithmetic for bounds on `I(q^k) + I(n^2)`, where `q^k n^2` has the
//! shape an odd perfect number must have.
//!
//! ```
//! use abundancy::arith::Natural;
//! use abundancy::bounds::{l1, l_bound, u_bound};
//!
//! let (q, n) = (Natural::from(5u32), Natural::from(3u32));
//! assert_eq!(l_bound(&q).to_string(), "57/20");
//! assert_eq!(u_bound(&q).to_string(), "43/15");
//! assert_eq!(l1(&q, &n).value.to_string(), "9379/3285");
//! ```
//!
//! The guide in `book/` walks through each module; its code blocks run as
//! doctests of this crate.

pub mod arith;
pub mod bounds;
pub mod harness;
mod identities;
pub mod ratfunc;
pub mod real;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/arithmetic.md")]
    mod arithmetic {}
    #[doc = include_str!("../../../book/src/symbolic.md")]
    mod symbolic {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    mod bounds {}
    #[doc = include_str!("../../../book/src/exponent.md")]
    mod exponent {}
    #[doc = include_str!("../../../book/src/spoof.md")]
    mod spoof {}
    #[doc = include_str!("../../../book/src/scanning.md")]
    mod scanning {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
