use num_complex::Complex64;

use crate::bitlin::{walsh_hadamard_in_place, BitVector};
use crate::error::{Error, Result};
use crate::model::IqpProgram;
use crate::par;

use super::{check_cap, Backend, CorrelationResult};

/// Output probabilities `p(x)` indexed by `x` (bit `j` of the index = qubit `j + 1`).
#[derive(Clone, Debug, PartialEq)]
pub struct DistributionTable {
    pub n: usize,
    pub probs: Vec<f64>,
}

impl DistributionTable {
    pub fn prob(&self, x: &BitVector) -> f64 {
        self.probs[x.to_index() as usize]
    }

    /// `sum_x p(x) (-1)^(s . x)`.
    pub fn correlation(&self, s: &BitVector) -> Result<f64> {
        if s.len() != self.n {
            return Err(Error::Dimension(format!("secret of length {} for {} qubits", s.len(), self.n)));
        }
        let mask = s.to_index() as usize;
        Ok(self
            .probs
            .iter()
            .enumerate()
            .map(|(x, p)| if (x & mask).count_ones().is_multiple_of(2) { *p } else { -*p })
            .sum())
    }

    /// `sum_x p(x)^2`.
    pub fn collision_probability(&self) -> f64 {
        self.probs.iter().map(|p| p * p).sum()
    }
}

/// Phase `phi(y) = sum_p theta_p (-1)^(p . y)` of the diagonalized circuit.
pub(crate) fn phase_at(masks: &[u64], thetas: &[f64], y: u64) -> f64 {
    masks
        .iter()
        .zip(thetas)
        .map(|(m, t)| if (m & y).count_ones().is_multiple_of(2) { *t } else { -*t })
        .sum()
}

/// Exact output distribution of `U_IQP |0^n>`.
///
/// In the Hadamard-rotated frame the circuit is diagonal, so the amplitudes
/// are one Walsh-Hadamard pass over `exp(i phi(y))`, scaled by `2^-n`.
pub fn output_distribution(program: &IqpProgram) -> Result<DistributionTable> {
    let n = program.n();
    check_cap(n)?;
    let masks = program.row_masks();
    let thetas: Vec<f64> = program.angles().iter().map(|a| a.radians()).collect();
    let size = 1usize << n;
    let mut amps = vec![Complex64::new(0.0, 0.0); size];
    par::fill_indexed(&mut amps, |y| Complex64::from_polar(1.0, phase_at(&masks, &thetas, y as u64)));
    walsh_hadamard_in_place(&mut amps)?;
    let scale = 1.0 / size as f64;
    let mut probs = vec![0.0; size];
    par::fill_indexed(&mut probs, |x| (amps[x] * scale).norm_sqr());
    Ok(DistributionTable { n, probs })
}

pub fn correlation_statevector(program: &IqpProgram, s: &BitVector) -> Result<CorrelationResult> {
    if s.len() != program.n() {
        return Err(Error::Dimension(format!(
            "secret of length {} for program on {} qubits",
            s.len(),
            program.n()
        )));
    }
    let dist = output_distribution(program)?;
    Ok(CorrelationResult::exact(dist.correlation(s)?, Backend::Statevector))
}

/// `<Z_s>` for every `s` at once: the Walsh-Hadamard transform of `p`.
pub fn all_correlations(program: &IqpProgram) -> Result<Vec<f64>> {
    let mut probs = output_distribution(program)?.probs;
    walsh_hadamard_in_place(&mut probs)?;
    Ok(probs)
}
