use std::ops::{Add, Sub};

use crate::error::{Error, Result};
use crate::par;

/// In-place unnormalized Walsh-Hadamard transform:
/// `data[s] <- sum_x data[x] * (-1)^(popcount(s & x))`.
///
/// Applying it twice multiplies every entry by `data.len()`.
pub fn walsh_hadamard_in_place<T>(data: &mut [T]) -> Result<()>
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Send + Sync,
{
    let len = data.len();
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::Dimension(format!(
            "Walsh-Hadamard length {len} is not a power of two"
        )));
    }
    let mut half = 1;
    while half < len {
        let block = 2 * half;
        if len / block >= 2 {
            par::for_each_chunk_mut(data, block, |blk| butterfly(blk, half));
        } else {
            // single block: split the halves instead
            let (lo, hi) = data.split_at_mut(half);
            par::zip_mut(lo, hi, |a, b| {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            });
        }
        half = block;
    }
    Ok(())
}

#[inline]
fn butterfly<T>(blk: &mut [T], half: usize)
where
    T: Copy + Add<Output = T> + Sub<Output = T>,
{
    let (lo, hi) = blk.split_at_mut(half);
    for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
        let (x, y) = (*a, *b);
        *a = x + y;
        *b = x - y;
    }
}

/// Walsh-Hadamard transform of a real array, returning a new array.
pub fn walsh_hadamard(f: &[f64]) -> Result<Vec<f64>> {
    let mut out = f.to_vec();
    walsh_hadamard_in_place(&mut out)?;
    Ok(out)
}
