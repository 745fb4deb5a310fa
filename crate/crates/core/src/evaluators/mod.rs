//! Correlation-function backends.
//!
//! Five independent routes to `<Z_s>`: exact statevector, the diagonal
//! (phase-sum) form both exhaustively and by Monte Carlo, the column-space
//! closed form for uniform angles, and an exact stabilizer amplitude for
//! angles that are multiples of pi/8.

mod clifford;
mod diagonal;
mod sampling;
mod statevector;
mod subspace;

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

pub use clifford::{correlation_clifford, ExactScalar, PhasePolynomial};
pub use diagonal::{correlation_diagonal, hoeffding_epsilon, mc_sample_count, DiagonalMode};
pub use sampling::{sample_outputs, OutputSampler};
pub use statevector::{all_correlations, correlation_statevector, output_distribution, DistributionTable};
pub use subspace::correlation_subspace;

/// Largest qubit count for the exhaustive (`2^n`-sized) backends.
pub const STATEVECTOR_CAP: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Backend {
    Statevector,
    DiagonalExact,
    DiagonalMc,
    Subspace,
    Clifford,
}

impl Backend {
    pub fn as_str(&self) -> &'static str {
        match self {
            Backend::Statevector => "statevector",
            Backend::DiagonalExact => "diagonal_exact",
            Backend::DiagonalMc => "diagonal_mc",
            Backend::Subspace => "subspace",
            Backend::Clifford => "clifford",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Ok(match s {
            "statevector" => Backend::Statevector,
            "diagonal_exact" | "diagonal" => Backend::DiagonalExact,
            "diagonal_mc" | "mc" => Backend::DiagonalMc,
            "subspace" => Backend::Subspace,
            "clifford" => Backend::Clifford,
            other => return Err(Error::Argument(format!("unknown backend {other:?}"))),
        })
    }
}

/// A computed `<Z_s>` with provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationResult {
    pub value: f64,
    pub backend: Backend,
    /// Additive error bound; zero for exact backends.
    pub error_bound: f64,
    /// Clifford backend only: `|value| = 2^(-g/2)`, `None` when the value is 0.
    pub g: Option<u32>,
    /// Monte-Carlo backend only.
    pub samples_used: Option<u64>,
}

impl CorrelationResult {
    pub(crate) fn exact(value: f64, backend: Backend) -> Self {
        Self { value, backend, error_bound: 0.0, g: None, samples_used: None }
    }
}

pub(crate) fn check_cap(n: usize) -> Result<(), Error> {
    if n > STATEVECTOR_CAP {
        return Err(Error::Capacity { what: "qubit count", got: n, cap: STATEVECTOR_CAP });
    }
    Ok(())
}
