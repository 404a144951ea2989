//! Circuit-QED toolkit for non-Gaussian tripartite entanglement: circuit
//! parameter derivation, rotating-wave reduction, truncated Fock-space
//! dynamics and entanglement witnesses.

pub mod circuit;
pub mod dynamics;
pub mod error;
pub mod hilbert;
pub mod rwa;
pub mod scenario;
pub mod witness;

pub use error::{Error, Result};
