//! Hyperparameter grids and the deterministic parallel task pool.

use rayon::prelude::*;
use scnn_core::{Result, ScnnError};

/// Inclusive-endpoint equispaced grid with exactly `n` points.
pub fn equispaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 1 && hi >= lo);
    if n == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (n - 1) as f64;
    let mut grid: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
    grid[0] = lo;
    grid[n - 1] = hi;
    grid
}

/// Parses "lo:hi:n" into an equispaced grid.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || ScnnError::InvalidParam(format!("grid '{spec}' is not of the form lo:hi:n"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].parse().map_err(|_| bad())?;
    let n: usize = parts[2].parse().map_err(|_| bad())?;
    if n == 0 || hi < lo || !lo.is_finite() || !hi.is_finite() {
        return Err(bad());
    }
    Ok(equispaced(lo, hi, n))
}

pub fn parse_f64_list(spec: &str) -> Result<Vec<f64>> {
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| ScnnError::InvalidParam(format!("'{s}' in '{spec}' is not a number")))
        })
        .collect()
}

pub fn parse_usize_list(spec: &str) -> Result<Vec<usize>> {
    spec.split(',')
        .map(|s| {
            s.trim().parse::<usize>().map_err(|_| {
                ScnnError::InvalidParam(format!("'{s}' in '{spec}' is not an integer"))
            })
        })
        .collect()
}

/// Runs one closure per item on a bounded pool (0 = rayon default size).
/// Results come back in item order regardless of scheduling, and each task
/// receives its index for per-task seed derivation.
pub fn run_tasks<T, R, F>(threads: usize, items: &[T], task: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(usize, &T) -> R + Sync,
{
    let mut builder = rayon::ThreadPoolBuilder::new();
    if threads > 0 {
        builder = builder.num_threads(threads);
    }
    let pool = builder.build().expect("thread pool");
    pool.install(|| {
        items
            .par_iter()
            .enumerate()
            .map(|(i, t)| task(i, t))
            .collect()
    })
}
