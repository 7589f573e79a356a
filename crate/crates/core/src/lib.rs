//! Matrix-domain sequence spaces on finite truncations.
//!
//! The crate models infinite sequences and infinite (mostly triangular)
//! matrices lazily, evaluates the A-transform, the domains `X(Ω)`, `X(Γ)` and
//! their norms, and characterizes matrix classes `(X : Y)` through the
//! classical condition tables. Every membership or condition check is
//! answered with a three-valued [`Verdict`] because a finite prefix cannot
//! decide a limit.
//!
//! Indices are 1-based everywhere. Scalars are `f64` by default; the
//! [`num_rational::BigRational`] instantiation gives exact inversion and
//! identity checks.

pub mod cli;
pub mod conditions;
pub mod domains;
pub mod duality;
pub mod error;
pub mod limit;
pub mod matrix;
pub mod oracle;
pub mod par;
pub mod report;
pub mod scalar;
pub mod seq;
pub mod space;

pub use error::{Error, Result};
pub use space::{ClassicalSpace, SpaceId, Verdict};
