//! Competitive allocation from equal incomes (CAEI) for single-minded agents.
//!
//! Three resource models are supported: multiple divisible goods, cake
//! cutting on `[0, 1]`, and multiple discrete goods with several copies per
//! item. Every exact path runs on rational arithmetic and an exact simplex
//! backend; the [`verify`] module certifies outputs and provides brute-force
//! oracles.

pub mod cake;
pub mod discrete;
pub mod divisible;
pub mod exactmath;
pub mod model;
pub mod verify;

mod error;

pub use error::{Error, Result};
pub use exactmath::Rational;
