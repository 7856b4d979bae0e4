//! Recognition of Hilbert class polynomials and recovery of CM discriminants.

pub mod arith;
pub mod cli;
pub mod ecfp;
pub mod endring;
pub mod error;
pub mod ffpoly;
mod fixed;
pub mod hcp;
pub mod identify;
pub mod modpoly;
pub mod polyio;
pub mod quadforms;
pub mod realroots;
pub mod zpoly;

pub use error::{Error, Result};
