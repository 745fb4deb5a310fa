//! Data-parallel helpers. With the `parallel` feature these dispatch to rayon,
//! otherwise they run sequentially. Results never depend on the thread count:
//! every parallel map is indexed, and reductions happen on collected vectors.

/// Below this many elements the sequential path is always taken.
#[cfg_attr(not(feature = "parallel"), allow(dead_code))]
pub(crate) const MIN_PARALLEL_LEN: usize = 1 << 12;

/// `(0..count).map(f).collect()`, parallel when enabled.
pub fn map_indexed<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..count).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count).map(f).collect()
    }
}

/// Fills `out[i] = f(i)`.
pub fn fill_indexed<T, F>(out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if out.len() >= MIN_PARALLEL_LEN {
        use rayon::prelude::*;
        out.par_iter_mut().enumerate().for_each(|(i, v)| *v = f(i));
        return;
    }
    for (i, v) in out.iter_mut().enumerate() {
        *v = f(i);
    }
}

/// Applies `f` to each consecutive chunk of `chunk` elements.
pub(crate) fn for_each_chunk_mut<T, F>(data: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(&mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if data.len() >= MIN_PARALLEL_LEN && data.len() / chunk >= 2 {
        use rayon::prelude::*;
        data.par_chunks_mut(chunk).for_each(f);
        return;
    }
    data.chunks_mut(chunk).for_each(f);
}

/// Applies `f` pairwise to two equal-length slices.
pub(crate) fn zip_mut<T, F>(a: &mut [T], b: &mut [T], f: F)
where
    T: Send,
    F: Fn(&mut T, &mut T) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if a.len() >= MIN_PARALLEL_LEN {
        use rayon::prelude::*;
        a.par_iter_mut().zip(b.par_iter_mut()).for_each(|(x, y)| f(x, y));
        return;
    }
    a.iter_mut().zip(b.iter_mut()).for_each(|(x, y)| f(x, y));
}
