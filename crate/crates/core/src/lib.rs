//! m-bonacci numeration, Rauzy fractals and the discrepancy of beta-adic
//! van der Corput and Halton sequences.

pub mod cli;
pub mod discrepancy;
pub mod error;
pub mod export;
pub mod numeration;
pub mod rauzy;
pub mod report;
pub mod rotation;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use numeration::{Expansion, MBonacciSystem};
