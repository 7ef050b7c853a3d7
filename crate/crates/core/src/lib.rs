//! Qutrit annealing for three-way clustering, from the ideal model down to
//! selective pulse sequences.

pub mod anneal;
pub mod clustering;
pub mod compiler;
pub mod error;
pub mod experiment;
pub mod sequencer;
pub mod spin;
pub mod simulator;
pub mod tensor;

pub use error::{Error, Result};
pub use tensor::c64;
