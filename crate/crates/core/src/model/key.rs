use std::collections::HashSet;

use crate::bitlin::BitVector;
use crate::error::{Error, Result};

/// The verifier's private material: secret strings and the correlation value
/// expected for each. Never leaves the verifier.
#[derive(Clone, Debug, PartialEq)]
pub struct SecretKey {
    n: usize,
    secrets: Vec<BitVector>,
    expected: Vec<f64>,
    notes: Vec<String>,
}

impl SecretKey {
    pub fn new(n: usize, secrets: Vec<BitVector>, expected: Vec<f64>) -> Result<Self> {
        if secrets.is_empty() {
            return Err(Error::Validation("a key needs at least one secret".into()));
        }
        if secrets.len() != expected.len() {
            return Err(Error::Validation(format!(
                "{} secrets but {} expected values",
                secrets.len(),
                expected.len()
            )));
        }
        if let Some(s) = secrets.iter().find(|s| s.len() != n) {
            return Err(Error::Validation(format!("secret {s} does not have length {n}")));
        }
        if let Some(v) = expected.iter().find(|v| !(v.is_finite() && (-1.0..=1.0).contains(*v))) {
            return Err(Error::Validation(format!("expected value {v} outside [-1, 1]")));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = secrets.iter().find(|s| !seen.insert(*s)) {
            return Err(Error::Validation(format!("duplicate secret {dup}")));
        }
        Ok(Self { n, secrets, expected, notes: Vec::new() })
    }

    pub fn single(secret: BitVector, expected: f64) -> Result<Self> {
        Self::new(secret.len(), vec![secret], vec![expected])
    }

    pub fn with_notes(mut self, notes: Vec<String>) -> Self {
        self.notes = notes;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.secrets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.secrets.is_empty()
    }

    pub fn secrets(&self) -> &[BitVector] {
        &self.secrets
    }

    pub fn expected(&self) -> &[f64] {
        &self.expected
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BitVector, f64)> {
        self.secrets.iter().zip(self.expected.iter().copied())
    }

    /// Key restricted to a subset of its secrets.
    pub fn subset(&self, indices: &[usize]) -> Result<SecretKey> {
        Self::new(
            self.n,
            indices.iter().map(|&i| self.secrets[i].clone()).collect(),
            indices.iter().map(|&i| self.expected[i]).collect(),
        )
    }
}
