//! Class groups of quadratic fields and the classification of imaginary
//! bi- and triquadratic fields whose class groups have exponent 3 or 5.

pub mod arith;
pub mod bqf;
pub mod cli;
pub mod error;
pub mod families;
pub mod froehlich;
pub mod multiquad;
pub mod sieve;

pub use error::{Error, Result};
