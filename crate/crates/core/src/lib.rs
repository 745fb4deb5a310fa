//! Secret-encoded IQP challenges for verifying remote quantum samplers.
//!
//! The verifier hides one or more secret strings `s` in an IQP circuit, sends
//! the circuit to the prover and compares the sample average of
//! `(-1)^(s . x)` with the exact correlation `<Z_s>`, computed classically by
//! the backends in [`evaluators`].

pub mod bitlin;
pub mod error;
pub mod evaluators;
pub mod experiments;
pub mod keygen;
pub mod model;
pub mod par;
pub mod protocol;
pub mod rng;

pub use error::{Error, Result};
