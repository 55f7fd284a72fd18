//! Simulator and verification suite for a quantum heat engine driven by
//! collective superabsorption on a Dicke ladder.

pub mod cli;
pub mod dynamics;
pub mod engine;
pub mod error;
pub mod ladder;
pub mod linalg;
pub mod oracle;
pub mod tfmodel;
pub mod tradeoff;
pub mod units;

pub use error::{Error, Result};
