//! Verifier/prover exchange: wire codec, judgment, prover strategies and the
//! TCP transport.

mod judge;
mod net;
mod prover;
mod secrecy;
pub mod wire;

pub use judge::{acceptance_threshold, judge, SecretVerdict, Threshold, VerdictReport};
pub use net::{
    new_session_id, request, verify_remote, ClientConfig, ProverServer, ServerConfig, ServerHandle, Transcript,
    VerifierSession,
};
pub use prover::{prover_honest, prover_leak, prover_uniform, ProverKind};
pub use secrecy::scan_for_leaks;
pub use wire::{ChallengeMsg, ErrorCode, SamplesMsg, WireError, WireMessage};
