//! Coded computing over prime fields for gradient-type functions
//! `f(X_1, ..., X_K) = g(X_1) + ... + g(X_K)`.
//!
//! [`harmonic`] implements Harmonic Coding, which needs `K(deg g - 1) + 2`
//! workers and one random key while keeping every single worker's share
//! independent of the dataset. [`baselines`] holds the Shamir-sharing and
//! Lagrange Coded Computing schemes it is compared against, plus the
//! two-worker scheme for `deg g = char F`. All schemes implement
//! [`scheme::CodingScheme`] and are built by name through
//! [`scheme::SchemeRegistry`]. [`sim`] runs validity trials and the
//! exhaustive privacy audit.

pub mod baselines;
pub mod error;
pub mod field;
pub mod files;
pub mod harmonic;
pub mod interp;
pub mod poly;
pub mod scheme;
pub mod sim;

#[cfg(any(test, feature = "fault-injection"))]
pub mod faults;

pub use error::{Error, Result};
pub use field::{FieldConfig, FieldElement, FieldRng, FieldVector};
pub use poly::{Dataset, PolyMap};
pub use scheme::{CodingScheme, SchemeParams, SchemeRegistry};
