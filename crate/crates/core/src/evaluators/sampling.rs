use rand::Rng;

use crate::bitlin::BitVector;
use crate::error::{Error, Result};
use crate::model::IqpProgram;

use super::output_distribution;

/// Inverse-CDF sampler over the exact output distribution.
#[derive(Clone, Debug)]
pub struct OutputSampler {
    n: usize,
    cumulative: Vec<f64>,
}

impl OutputSampler {
    pub fn new(program: &IqpProgram) -> Result<Self> {
        let dist = output_distribution(program)?;
        let cumulative = dist
            .probs
            .iter()
            .scan(0.0, |acc, p| {
                *acc += p;
                Some(*acc)
            })
            .collect();
        Ok(Self { n: dist.n, cumulative })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let total = *self.cumulative.last().expect("table is never empty");
        let u = rng.random::<f64>() * total;
        let i = self.cumulative.partition_point(|&c| c <= u);
        i.min(self.cumulative.len() - 1) as u64
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BitVector {
        BitVector::from_index(self.n, self.sample_index(rng))
    }
}

/// `count` i.i.d. output strings of the program.
pub fn sample_outputs<R: Rng + ?Sized>(program: &IqpProgram, count: usize, rng: &mut R) -> Result<Vec<BitVector>> {
    if count == 0 {
        return Err(Error::Argument("sample count must be at least 1".into()));
    }
    let sampler = OutputSampler::new(program)?;
    Ok((0..count).map(|_| sampler.sample(rng)).collect())
}
