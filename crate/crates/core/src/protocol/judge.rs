use log::warn;

use crate::bitlin::BitVector;
use crate::error::{Error, Result};
use crate::model::SecretKey;

/// Per-secret outcome of a verification.
#[derive(Clone, Debug, PartialEq)]
pub struct SecretVerdict {
    pub index: usize,
    pub expected: f64,
    pub observed: f64,
    pub deviation: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerdictReport {
    pub records: Vec<SecretVerdict>,
    /// True iff every secret passed.
    pub accept: bool,
    pub t: usize,
    pub epsilon_acc: f64,
}

/// Compares the sample averages of `(-1)^(s . x)` with the expected
/// correlations, reusing one sample set for all secrets.
pub fn judge(key: &SecretKey, samples: &[BitVector], epsilon_acc: f64) -> Result<VerdictReport> {
    if samples.is_empty() {
        return Err(Error::Argument("cannot judge an empty sample set".into()));
    }
    if let Some(x) = samples.iter().find(|x| x.len() != key.n()) {
        return Err(Error::Dimension(format!("sample {x} does not have length {}", key.n())));
    }
    let t = samples.len();
    let records: Vec<SecretVerdict> = key
        .iter()
        .enumerate()
        .map(|(index, (s, expected))| {
            let odd = samples.iter().filter(|x| x.dot_unchecked(s)).count();
            let observed = (t as f64 - 2.0 * odd as f64) / t as f64;
            let deviation = (observed - expected).abs();
            SecretVerdict { index, expected, observed, deviation, pass: deviation <= epsilon_acc }
        })
        .collect();
    let accept = records.iter().all(|r| r.pass);
    Ok(VerdictReport { records, accept, t, epsilon_acc })
}

/// Acceptance tolerance plus any discrimination warnings.
#[derive(Clone, Debug, PartialEq)]
pub struct Threshold {
    pub epsilon: f64,
    pub warnings: Vec<String>,
}

/// `epsilon_acc = sqrt(2 ln(2K/delta) / T)`: an honest prover fails any of the
/// `K` checks with probability at most `delta` (Hoeffding plus a union bound).
///
/// Secrets with `|expected| < 2 epsilon_acc` cannot reliably separate an honest
/// prover from a uniform one; each such secret produces a warning.
pub fn acceptance_threshold(key: &SecretKey, delta: f64, t: u64) -> Result<Threshold> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Argument(format!("delta must lie in (0, 1), got {delta}")));
    }
    if t == 0 {
        return Err(Error::Argument("t must be at least 1".into()));
    }
    let k = key.len() as f64;
    let epsilon = (2.0 * (2.0 * k / delta).ln() / t as f64).sqrt();
    let warnings: Vec<String> = key
        .expected()
        .iter()
        .enumerate()
        .filter(|(_, e)| e.abs() < 2.0 * epsilon)
        .map(|(i, e)| {
            format!("secret {i}: |expected| = {:.4} < 2 * epsilon_acc = {:.4}; no power against a uniform prover", e.abs(), 2.0 * epsilon)
        })
        .collect();
    for w in &warnings {
        warn!("{w}");
    }
    Ok(Threshold { epsilon, warnings })
}
