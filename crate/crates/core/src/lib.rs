//! Exact arithmetic for Ramanujan, Cohen and generalized Anderson-Apostol sums,
//! together with closed-form evaluators for their weighted averages and a
//! verification harness that checks every closed form against brute force.
//!
//! Layout:
//! - [`arith`]: integer foundations (factorization, divisors, Mobius, totients,
//!   lcm, the generalized gcd `(j, k^a)_a`), with process-wide memo caches.
//! - [`exact`]: exact rational special values (Bernoulli numbers/polynomials,
//!   binomials, power-sum closed forms) and controlled real-valued functions
//!   (log-factorial, log-Gamma, Stirling brackets).
//! - [`value`]: the rational-or-real value domain shared by all evaluators.
//! - [`func`]: composable arithmetic functions with declared multiplicativity
//!   classes, plus the compact text grammar used by the CLI.
//! - [`sums`]: the sum families c_k(j), c_k^(a)(j), s_{f,g}(k,j) and
//!   s^(a)_{f,g,h}(k,j), with double-precision exponential cross-forms.
//! - [`averages`]: direct and closed-form evaluators for the weighted averages
//!   U^(a)_omega over divisor tuples, convolution representations, and the
//!   E / S_r family.
//! - [`verify`]: identity suites over pinned parameter grids with
//!   machine-readable reports.

pub mod arith;
pub mod averages;
pub mod error;
pub mod exact;
pub mod func;
pub mod sums;
pub mod value;
pub mod verify;

pub use error::{Error, Result};
pub use value::Value;
