//! Prover strategies: honest simulation, uniform guessing, and a cheat that
//! knows one secret.

use rand::Rng;

use crate::bitlin::BitVector;
use crate::evaluators::{OutputSampler, STATEVECTOR_CAP};
use crate::model::SecretKey;

use super::wire::{ChallengeMsg, ErrorCode, SamplesMsg, WireError};

#[derive(Clone, Debug, PartialEq)]
pub enum ProverKind {
    Honest,
    Uniform,
    /// Knows one secret and its expected value, and matches only that bias.
    Leak(SecretKey),
}

impl ProverKind {
    pub fn name(&self) -> &'static str {
        match self {
            ProverKind::Honest => "honest",
            ProverKind::Uniform => "uniform",
            ProverKind::Leak(_) => "leak",
        }
    }

    pub fn respond<R: Rng + ?Sized>(&self, challenge: &ChallengeMsg, rng: &mut R) -> Result<SamplesMsg, WireError> {
        match self {
            ProverKind::Honest => prover_honest(challenge, rng),
            ProverKind::Uniform => prover_uniform(challenge, rng),
            ProverKind::Leak(key) => prover_leak(challenge, key, rng),
        }
    }
}

/// Samples the challenge circuit exactly, standing in for quantum hardware.
pub fn prover_honest<R: Rng + ?Sized>(challenge: &ChallengeMsg, rng: &mut R) -> Result<SamplesMsg, WireError> {
    let program = challenge.to_program()?;
    if program.n() > STATEVECTOR_CAP {
        return Err(WireError::new(
            ErrorCode::Capacity,
            format!("n = {} exceeds simulator cap {STATEVECTOR_CAP}", program.n()),
        ));
    }
    let sampler = OutputSampler::new(&program).map_err(|e| WireError::new(ErrorCode::Capacity, e.to_string()))?;
    let bits: Vec<BitVector> = (0..challenge.t).map(|_| sampler.sample(rng)).collect();
    Ok(SamplesMsg::from_bits(challenge.session.clone(), &bits))
}

/// Uniformly random strings, ignoring the circuit.
pub fn prover_uniform<R: Rng + ?Sized>(challenge: &ChallengeMsg, rng: &mut R) -> Result<SamplesMsg, WireError> {
    challenge.to_program()?;
    let bits: Vec<BitVector> = (0..challenge.t).map(|_| BitVector::random(challenge.n, rng)).collect();
    Ok(SamplesMsg::from_bits(challenge.session.clone(), &bits))
}

/// Emits strings orthogonal to the leaked secret with probability
/// `(1 + expected) / 2`, uniform otherwise within each parity class.
pub fn prover_leak<R: Rng + ?Sized>(
    challenge: &ChallengeMsg,
    leaked: &SecretKey,
    rng: &mut R,
) -> Result<SamplesMsg, WireError> {
    challenge.to_program()?;
    if leaked.len() != 1 {
        return Err(WireError::new(
            ErrorCode::Unsupported,
            format!("bias matching supports exactly one leaked secret, got {}", leaked.len()),
        ));
    }
    let (s, expected) = leaked.iter().next().expect("one secret");
    if s.len() != challenge.n {
        return Err(WireError::new(ErrorCode::BadDimension, "leaked secret does not match n"));
    }
    let p_orth = (1.0 + expected) / 2.0;
    let pivot = s.first_one();
    let bits: Vec<BitVector> = (0..challenge.t)
        .map(|_| {
            let want_odd = !rng.random_bool(p_orth.clamp(0.0, 1.0));
            let mut x = BitVector::random(challenge.n, rng);
            if let Some(j) = pivot {
                if x.dot_unchecked(s) != want_odd {
                    x.flip(j);
                }
            }
            x
        })
        .collect();
    Ok(SamplesMsg::from_bits(challenge.session.clone(), &bits))
}
