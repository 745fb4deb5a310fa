use crate::bitlin::BitVector;
use crate::error::{Error, Result};
use crate::model::IqpProgram;
use crate::{par, rng};

use super::{check_cap, Backend, CorrelationResult};

const EXACT_CHUNK: usize = 1 << 12;
const MC_CHUNK: u64 = 1 << 10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DiagonalMode {
    /// Average over all `2^n` basis strings.
    Exact,
    /// Average over `samples` uniform strings; the reported error bound holds
    /// with probability `1 - delta`.
    MonteCarlo { samples: u64, delta: f64, seed: u64 },
}

fn check_eps_delta(epsilon: f64, delta: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::Argument(format!("epsilon must lie in (0, 1], got {epsilon}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Argument(format!("delta must lie in (0, 1), got {delta}")));
    }
    Ok(())
}

/// Hoeffding sample count for `[-1, 1]`-bounded terms:
/// `T = ceil(2 ln(2/delta) / epsilon^2)`.
pub fn mc_sample_count(epsilon: f64, delta: f64) -> Result<u64> {
    check_eps_delta(epsilon, delta)?;
    Ok((2.0 * (2.0 / delta).ln() / (epsilon * epsilon)).ceil() as u64)
}

/// Additive error guaranteed with probability `1 - delta` after `samples` draws.
pub fn hoeffding_epsilon(samples: u64, delta: f64) -> Result<f64> {
    if samples == 0 {
        return Err(Error::Argument("need at least one sample".into()));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Argument(format!("delta must lie in (0, 1), got {delta}")));
    }
    Ok((2.0 * (2.0 / delta).ln() / samples as f64).sqrt())
}

/// Real part of `<y| (U_M^z)^2 |y>`: `cos(sum_p 2 theta_p (-1)^(p . y))` over main rows.
fn term(rows: &[BitVector], doubled: &[f64], y: &BitVector) -> f64 {
    rows.iter()
        .zip(doubled)
        .map(|(p, t)| if p.dot_unchecked(y) { -*t } else { *t })
        .sum::<f64>()
        .cos()
}

fn term_masked(masks: &[u64], doubled: &[f64], y: u64) -> f64 {
    super::statevector::phase_at(masks, doubled, y).cos()
}

/// `<Z_s>` from the diagonal form: the mean of `term(y)` over the main part.
/// Redundant rows never enter.
pub fn correlation_diagonal(program: &IqpProgram, s: &BitVector, mode: DiagonalMode) -> Result<CorrelationResult> {
    let main = program.main_part(s)?;
    let n = program.n();
    let doubled: Vec<f64> = main.angles().iter().map(|a| 2.0 * a.radians()).collect();
    match mode {
        DiagonalMode::Exact => {
            check_cap(n)?;
            if main.m() == 0 {
                return Ok(CorrelationResult::exact(1.0, Backend::DiagonalExact));
            }
            let masks = main.row_masks();
            let size = 1usize << n;
            let chunks = size.div_ceil(EXACT_CHUNK);
            let partial = par::map_indexed(chunks, |c| {
                let lo = c * EXACT_CHUNK;
                let hi = (lo + EXACT_CHUNK).min(size);
                (lo..hi).map(|y| term_masked(&masks, &doubled, y as u64)).sum::<f64>()
            });
            let value = partial.iter().sum::<f64>() / size as f64;
            Ok(CorrelationResult::exact(value, Backend::DiagonalExact))
        }
        DiagonalMode::MonteCarlo { samples, delta, seed } => {
            let error_bound = hoeffding_epsilon(samples, delta)?;
            let rows = main.chi().rows().to_vec();
            let chunks = samples.div_ceil(MC_CHUNK);
            let partial = par::map_indexed(chunks as usize, |c| {
                let c = c as u64;
                let mut r = rng::stream(seed, c);
                let count = MC_CHUNK.min(samples - c * MC_CHUNK);
                (0..count)
                    .map(|_| term(&rows, &doubled, &BitVector::random(n, &mut r)))
                    .sum::<f64>()
            });
            let value = partial.iter().sum::<f64>() / samples as f64;
            Ok(CorrelationResult {
                value,
                backend: Backend::DiagonalMc,
                error_bound,
                g: None,
                samples_used: Some(samples),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Angle;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    #[test]
    fn sample_count_examples() {
        assert_eq!(mc_sample_count(0.05, 0.05).unwrap(), 2952);
        assert_eq!(mc_sample_count(1.0, 0.5).unwrap(), 3);
        let a = mc_sample_count(0.1, 0.1).unwrap() as f64;
        let b = mc_sample_count(0.05, 0.1).unwrap() as f64;
        assert!((b / a - 4.0).abs() < 4.0 / a + 1e-12);
        assert!(mc_sample_count(0.0, 0.1).is_err());
        assert!(mc_sample_count(0.1, 1.0).is_err());
        assert!(mc_sample_count(1.5, 0.1).is_err());
    }

    #[test]
    fn empty_main_part_is_one() {
        let p = IqpProgram::from_strs(4, &["1100", "0101"], Angle::pi_over_8(1)).unwrap();
        let r = correlation_diagonal(&p, &bv("0010"), DiagonalMode::Exact).unwrap();
        assert_eq!(r.value, 1.0);
        let r = correlation_diagonal(&p, &bv("0000"), DiagonalMode::Exact).unwrap();
        assert_eq!(r.value, 1.0);
    }

    #[test]
    fn single_main_row_gives_cos_two_theta() {
        let theta = Angle::new(1, 5).unwrap();
        let p = IqpProgram::from_strs(3, &["110", "011"], theta).unwrap();
        // s = 100: only row 0 is main
        let r = correlation_diagonal(&p, &bv("100"), DiagonalMode::Exact).unwrap();
        assert!((r.value - (2.0 * theta.radians()).cos()).abs() < 1e-12);
    }

    #[test]
    fn two_row_exact_matches_half() {
        let p = IqpProgram::from_strs(4, &["1100", "0101"], Angle::pi_over_8(1)).unwrap();
        let r = correlation_diagonal(&p, &bv("0100"), DiagonalMode::Exact).unwrap();
        assert!((r.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn monte_carlo_is_seeded_and_bounded() {
        let p = IqpProgram::from_strs(4, &["1100", "0101"], Angle::pi_over_8(1)).unwrap();
        let mode = DiagonalMode::MonteCarlo { samples: 5000, delta: 0.01, seed: 9 };
        let a = correlation_diagonal(&p, &bv("0100"), mode).unwrap();
        let b = correlation_diagonal(&p, &bv("0100"), mode).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.samples_used, Some(5000));
        assert!((a.value - 0.5).abs() <= a.error_bound);
    }
}
