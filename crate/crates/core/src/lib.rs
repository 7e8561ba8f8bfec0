pub mod cli;
pub mod coeff;
pub mod diffpoly;
pub mod error;
pub mod kernels;
pub mod prolong;
pub mod weil;

pub use error::{Error, Result};
