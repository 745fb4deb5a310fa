//! Bit-packed GF(2) linear algebra and the Walsh-Hadamard transform.

mod matrix;
mod span;
mod vector;
mod walsh;

pub use matrix::{BitMatrix, XorBasis};
pub use span::{enumerate_span, span_weight_histogram, SpanIter, SPAN_CAP};
pub use vector::BitVector;
pub use walsh::{walsh_hadamard, walsh_hadamard_in_place};

use crate::error::Result;

/// GF(2) inner product of two equal-length vectors.
pub fn dot(u: &BitVector, v: &BitVector) -> Result<bool> {
    u.dot(v)
}
