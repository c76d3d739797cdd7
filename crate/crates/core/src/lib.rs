//! Executable asymptotic gauges.
//!
//! Nets `ε ↦ ℝ` are closed-form expression trees ([`netlang::Expr`]). On top of
//! them sit index sets and the eventual quantifier ([`index`]), asymptotic
//! gauges and their morphisms ([`gauge`]), Colombeau-type algebra
//! representatives ([`cgf`]), mollifier embeddings of distributions
//! ([`embed`]) and generalized linear ODEs ([`ode`]).
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bigfloat;
pub mod cgf;
pub mod embed;
pub mod gauge;
pub mod index;
pub mod netlang;
pub mod ode;
pub mod quad;
pub mod verdict;
pub mod wide;

/// Exact rationals used for constants and exponents throughout.
pub type Q = num_rational::BigRational;
