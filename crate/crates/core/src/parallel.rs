//! Batch execution of independent runs.
//!
//! Each run owns all of its state, so a batch is an embarrassingly parallel
//! map. With the `parallel` feature the map goes through rayon; without it,
//! or through the `_sequential` variants, it is a plain loop. Output order
//! always follows input order.

use crate::sim::{run_paired, PairedRun, SimConfig, SimError};

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_sequential(items, f)
    }
}

pub fn map_sequential<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

pub fn run_paired_batch(configs: &[SimConfig], a1: f64, a2: f64) -> Vec<Result<PairedRun, SimError>> {
    map(configs, |c| run_paired(c, a1, a2))
}

pub fn run_paired_batch_sequential(configs: &[SimConfig], a1: f64, a2: f64) -> Vec<Result<PairedRun, SimError>> {
    map_sequential(configs, |c| run_paired(c, a1, a2))
}
