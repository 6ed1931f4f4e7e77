use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Periodic Hann window: `w[k] = 0.5 - 0.5 cos(2πk/n)`.
pub fn hann_window(n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::EmptyInput("window length must be at least 1"));
    }
    let step = 2.0 * PI / n as f64;
    Ok((0..n).map(|k| 0.5 - 0.5 * (step * k as f64).cos()).collect())
}
