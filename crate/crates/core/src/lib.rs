//! Arithmetic of quadratic fields and quaternion algebras over them, with the
//! counting and volume computations built on top.
//!
//! - [`quadfields`]: fundamental discriminants and prime splitting.
//! - [`relquad`]: relative quadratic extensions `k(sqrt(x + sqrt(delta)))`.
//! - [`fieldforge`]: construction of `n` such extensions with certificates.
//! - [`primeforge`]: primes in progressions and with prescribed symbols.
//! - [`quatalg`]: quaternion algebras by ramification sets.
//! - [`census`]: prime densities and squarefree counts.
//! - [`geodesics`]: traces, lengths and units.
//! - [`volumes`]: covolumes, coareas and scaling functions.
//! - [`parse`]: argument parsers.

pub mod arith;
pub mod census;
pub mod error;
pub mod fieldforge;
pub mod geodesics;
pub mod parse;
pub mod primeforge;
pub mod quadfields;
pub mod quatalg;
pub mod relquad;
pub mod volumes;

pub use error::{Error, Result};
