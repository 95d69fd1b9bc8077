//! Composite Simpson quadrature on uniform grids.

use crate::error::{Error, Result};

/// Uniform grid of `n` points spanning `[a, b]`.
pub fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    let h = (b - a) / (n - 1) as f64;
    (0..n).map(|i| a + i as f64 * h).collect()
}

fn check_odd(n: usize) -> Result<()> {
    if n < 3 || n % 2 == 0 {
        return Err(Error::BadGrid(format!(
            "composite Simpson needs an odd point count >= 3, got {n}"
        )));
    }
    Ok(())
}

/// Composite Simpson rule over values tabulated on a uniform grid with step `h`.
pub fn simpson(values: &[f64], h: f64) -> Result<f64> {
    check_odd(values.len())?;
    let last = values.len() - 1;
    let mut acc = values[0] + values[last];
    for (i, v) in values.iter().enumerate().take(last).skip(1) {
        acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    Ok(acc * h / 3.0)
}

/// Simpson value plus its Richardson extrapolation against the
/// half-resolution subgrid. Needs `(n - 1)` divisible by 4.
pub fn simpson_with_richardson(values: &[f64], h: f64) -> Result<(f64, f64)> {
    let n = values.len();
    check_odd(n)?;
    if (n - 1) % 4 != 0 {
        return Err(Error::BadGrid(format!(
            "Richardson extrapolation needs (n - 1) divisible by 4, got {n}"
        )));
    }
    let fine = simpson(values, h)?;
    let coarse_vals: Vec<f64> = values.iter().step_by(2).copied().collect();
    let coarse = simpson(&coarse_vals, 2.0 * h)?;
    Ok((fine, fine + (fine - coarse) / 15.0))
}

/// Integrate a callable over `[a, b]` by composite Simpson on `n` points.
pub fn simpson_fn(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> Result<f64> {
    check_odd(n)?;
    let h = (b - a) / (n - 1) as f64;
    let values: Vec<f64> = (0..n).map(|i| f(a + i as f64 * h)).collect();
    simpson(&values, h)
}

/// Smallest m >= max(n, 5) with (m - 1) divisible by 4.
pub fn richardson_size(n: usize) -> usize {
    let mut m = n.max(5);
    while (m - 1) % 4 != 0 {
        m += 1;
    }
    m
}
