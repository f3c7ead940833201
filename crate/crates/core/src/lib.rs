pub mod axioms;
pub mod cli;
pub mod concavity;
pub mod error;
pub mod forward;
pub mod io;
pub mod lp;
pub mod model;
pub mod piecewise;
pub mod recovery;
pub mod revealed;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Float, NumericMode, Rational, Scalar};

#[cfg(test)]
mod fixtures;
