//! Data-parallel helpers. With the `parallel` feature the work is spread over
//! the rayon pool; without it everything runs on the calling thread.

/// Below this many entry updates a pivot step stays sequential.
pub const ROW_PARALLEL_THRESHOLD: usize = 1 << 16;

#[cfg(feature = "parallel")]
pub fn for_each_row<T, F>(rows: &mut [T], work: usize, f: F)
where
    T: Send,
    F: Fn(&mut T) + Send + Sync,
{
    use rayon::prelude::*;
    if work >= ROW_PARALLEL_THRESHOLD && rayon::current_num_threads() > 1 {
        rows.par_iter_mut().for_each(f);
    } else {
        rows.iter_mut().for_each(f);
    }
}

#[cfg(not(feature = "parallel"))]
pub fn for_each_row<T, F>(rows: &mut [T], _work: usize, f: F)
where
    T: Send,
    F: Fn(&mut T) + Send + Sync,
{
    rows.iter_mut().for_each(f);
}

/// Order-preserving map over independent items.
#[cfg(feature = "parallel")]
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Send + Sync,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Send + Sync,
{
    items.iter().map(f).collect()
}
