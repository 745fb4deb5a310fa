use crate::error::{Error, Result};

use super::vector::BitVector;

/// Largest basis size accepted by [`enumerate_span`].
pub const SPAN_CAP: usize = 26;

/// Iterator over every element of a GF(2) span in Gray-code order,
/// starting with the zero vector.
#[derive(Clone, Debug)]
pub struct SpanIter<'a> {
    basis: &'a [BitVector],
    current: BitVector,
    step: u64,
    total: u64,
}

impl Iterator for SpanIter<'_> {
    type Item = BitVector;

    fn next(&mut self) -> Option<BitVector> {
        if self.step >= self.total {
            return None;
        }
        if self.step > 0 {
            let k = self.step.trailing_zeros() as usize;
            self.current.xor_unchecked(&self.basis[k]);
        }
        self.step += 1;
        Some(self.current.clone())
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.total - self.step) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for SpanIter<'_> {}

/// Enumerates all `2^d` combinations of `basis`. `len` is the ambient
/// dimension, needed when the basis is empty.
///
/// Each element is produced exactly once provided the basis is linearly
/// independent.
pub fn enumerate_span(basis: &[BitVector], len: usize) -> Result<SpanIter<'_>> {
    if basis.len() > SPAN_CAP {
        return Err(Error::Capacity { what: "span dimension", got: basis.len(), cap: SPAN_CAP });
    }
    if let Some(b) = basis.iter().find(|b| b.len() != len) {
        return Err(Error::Dimension(format!(
            "basis vector of length {} in span of ambient length {len}",
            b.len()
        )));
    }
    Ok(SpanIter { basis, current: BitVector::zeros(len), step: 0, total: 1u64 << basis.len() })
}

/// Histogram of Hamming weights over the span: `out[w]` counts elements of
/// weight `w`. Walks the Gray code tracking only the weight.
pub fn span_weight_histogram(basis: &[BitVector], len: usize) -> Result<Vec<u64>> {
    // validates cap and lengths
    let iter = enumerate_span(basis, len)?;
    let mut hist = vec![0u64; len + 1];
    let mut current = BitVector::zeros(len);
    hist[0] += 1;
    for step in 1..iter.total {
        let k = step.trailing_zeros() as usize;
        current.xor_unchecked(&basis[k]);
        hist[current.weight()] += 1;
    }
    Ok(hist)
}
