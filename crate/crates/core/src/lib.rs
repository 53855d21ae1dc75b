//! Exact-arithmetic toolkit for stratified Lie algebras.
//!
//! Computes strata-preserving derivation algebras, finite Tanaka
//! prolongations, modification subalgebras (graphs of linear maps into the
//! nonnegative part) and explicit polynomial contact maps between a
//! modification group and its stratified group. All core computations run
//! over exact rationals or Gaussian rationals; the only floating-point path
//! is the coset projection for matrix charts with transcendental entries.

pub mod catalog;
pub mod classify;
pub mod contact;
pub mod descr;
pub mod error;
pub mod lie;
pub mod linalg;
pub mod matmodel;
pub mod modification;
pub mod poly;
pub mod prolong;
pub mod random;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Scalar, ScalarDomain};
