use crate::bitlin::{span_weight_histogram, BitMatrix, BitVector, SPAN_CAP};
use crate::error::{Error, Result};
use crate::model::IqpProgram;

use super::{Backend, CorrelationResult};

/// Closed form for a main part with one shared angle `theta`:
/// `<Z_s> = 2^-d sum_{c in C_M} cos(2 theta (q - 2|c|))`, where `C_M` is the
/// column space of the `q x n` main-part matrix and `d` its dimension.
///
/// The sum is taken over the weight histogram of `C_M`, so the result depends
/// only on the subspace and not on which basis was used to enumerate it.
pub fn correlation_subspace(program: &IqpProgram, s: &BitVector) -> Result<CorrelationResult> {
    let main = program.main_part(s)?;
    let q = main.m();
    if q == 0 {
        return Ok(CorrelationResult::exact(1.0, Backend::Subspace));
    }
    let theta = main.common_angle().ok_or_else(|| {
        Error::Precondition("subspace backend needs identical angles on the main part".into())
    })?;
    let value = column_space_sum(main.chi(), theta.radians())?;
    Ok(CorrelationResult::exact(value, Backend::Subspace))
}

/// `2^-d sum_{c in col(m)} cos(2 theta (q - 2|c|))` for a `q`-row matrix.
pub(crate) fn column_space_sum(m: &BitMatrix, theta: f64) -> Result<f64> {
    let q = m.nrows();
    let basis = m.column_space_basis();
    let d = basis.len();
    if d > SPAN_CAP {
        return Err(Error::Capacity { what: "main-part column space dimension", got: d, cap: SPAN_CAP });
    }
    let hist = span_weight_histogram(&basis, q)?;
    let two_theta = 2.0 * theta;
    let total: f64 = hist
        .iter()
        .enumerate()
        .filter(|(_, &count)| count > 0)
        .map(|(w, &count)| count as f64 * (two_theta * (q as f64 - 2.0 * w as f64)).cos())
        .sum();
    Ok(total / (1u64 << d) as f64)
}
