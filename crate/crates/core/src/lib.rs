//! Gaussian Mersenne norms and their representations as `x^2 + d*y^2`.
//!
//! * [`arith`]: modular powers, Jacobi symbols, square roots mod p, primality.
//! * [`gm`]: `G_p` by closed formula and by Gaussian-integer oracle, residue
//!   predictions, exponent scans.
//! * [`repr`]: Cornacchia's descent with a brute-force oracle.
//! * [`quadclass`]: reduced forms, composition, class-group structure.
//! * [`verifier`]: per-exponent audits and the batch suite.

pub mod arith;
pub mod error;
pub mod gm;
pub mod quadclass;
pub mod repr;
pub mod serde_decimal;
pub mod verifier;

pub use error::{Error, Result};
