//! Exact arithmetic engine for symbolic powers of fat-point ideals in
//! projective space.

pub mod cache;
pub mod error;
pub mod forms;
pub mod gcd;
pub mod ideal;
pub mod invariants;
pub mod linalg;
pub mod par;
pub mod scalar;
pub mod schemes;
pub mod spec_format;
pub mod verifier;

pub use error::{Error, Result};
