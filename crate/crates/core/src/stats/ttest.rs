use super::special::student_t_two_sided_tail;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTest {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (n − 1 denominator).
    pub sd: f64,
    pub t: f64,
    pub df: usize,
    /// Two-sided.
    pub p: f64,
}

/// One-sample t-test of zero mean on paired differences.
pub fn paired_t_test(d: &[f64]) -> Result<TTest> {
    let n = d.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!("t-test needs at least 2 values, got {n}")));
    }
    if d.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("t-test input contains non-finite values".into()));
    }
    let nf = n as f64;
    let mean = d.iter().sum::<f64>() / nf;
    let ss: f64 = d.iter().map(|v| (v - mean) * (v - mean)).sum();
    let sd = (ss / (nf - 1.0)).sqrt();
    if sd == 0.0 {
        return Err(Error::Degenerate("differences have zero variance".into()));
    }
    let t = mean / (sd / nf.sqrt());
    let df = n - 1;
    let p = student_t_two_sided_tail(t, df as f64);
    Ok(TTest { n, mean, sd, t, df, p })
}
