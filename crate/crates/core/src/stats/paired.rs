use std::fmt::Write as _;

use super::shapiro::{shapiro_wilk, ShapiroWilk};
use super::special::inverse_normal_cdf;
use super::ttest::{paired_t_test, TTest};
use crate::error::{Error, Result};

/// Matched scores for the same cells under two conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSample {
    labels: Vec<String>,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl PairedSample {
    pub const MIN_LEN: usize = 3;

    pub fn new(labels: Vec<String>, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() || labels.len() != a.len() {
            return Err(Error::Shape(format!(
                "paired sample needs equal lengths, got {} labels, {} and {} values",
                labels.len(),
                a.len(),
                b.len()
            )));
        }
        if a.len() < Self::MIN_LEN {
            return Err(Error::InsufficientData(format!(
                "paired sample needs at least {} pairs, got {}",
                Self::MIN_LEN,
                a.len()
            )));
        }
        if a.iter().chain(&b).any(|v| !v.is_finite()) {
            return Err(Error::Domain("paired sample contains non-finite values".into()));
        }
        Ok(Self { labels, a, b })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn swapped(&self) -> Self {
        Self {
            labels: self.labels.clone(),
            a: self.b.clone(),
            b: self.a.clone(),
        }
    }
}

/// `a_i − b_i` in label order.
pub fn paired_differences(sample: &PairedSample) -> Vec<f64> {
    sample.a.iter().zip(&sample.b).map(|(a, b)| a - b).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QqPoint {
    pub theoretical: f64,
    pub observed: f64,
}

/// Sorted values against normal quantiles at Blom positions
/// `(i − 0.375) / (n + 0.25)`.
pub fn qq_data(d: &[f64]) -> Result<Vec<QqPoint>> {
    let n = d.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!("Q-Q data needs at least 2 values, got {n}")));
    }
    let mut sorted = d.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted
        .into_iter()
        .enumerate()
        .map(|(i, observed)| QqPoint {
            theoretical: inverse_normal_cdf((i as f64 + 1.0 - 0.375) / (n as f64 + 0.25)),
            observed,
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairedTestResult {
    pub n: usize,
    pub mean_diff: f64,
    pub sd_diff: f64,
    pub t_statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
    pub shapiro_w: f64,
    pub shapiro_p: f64,
    pub qq: Vec<QqPoint>,
}

impl PairedTestResult {
    /// `key = value` document; `header` lines are written first.
    pub fn to_text(&self, header: &[(String, String)]) -> String {
        let mut out = String::from("# specmel paired comparison v1\n");
        for (k, v) in header {
            let _ = writeln!(out, "{k} = {v}");
        }
        let _ = writeln!(out, "n = {}", self.n);
        let _ = writeln!(out, "mean_diff = {}", self.mean_diff);
        let _ = writeln!(out, "sd_diff = {}", self.sd_diff);
        let _ = writeln!(out, "t = {}", self.t_statistic);
        let _ = writeln!(out, "df = {}", self.degrees_of_freedom);
        let _ = writeln!(out, "p = {}", self.p_value);
        let _ = writeln!(out, "shapiro_w = {}", self.shapiro_w);
        let _ = writeln!(out, "shapiro_p = {}", self.shapiro_p);
        out
    }

    pub fn qq_csv(&self) -> String {
        let mut out = String::from("theoretical,observed\n");
        for q in &self.qq {
            let _ = writeln!(out, "{},{}", q.theoretical, q.observed);
        }
        out
    }
}

/// Differences → Shapiro–Wilk → paired t-test → Q-Q coordinates.
pub fn paired_comparison(sample: &PairedSample) -> Result<PairedTestResult> {
    let d = paired_differences(sample);
    let ShapiroWilk { w, p: shapiro_p } = shapiro_wilk(&d)?;
    let TTest { n, mean, sd, t, df, p } = paired_t_test(&d)?;
    Ok(PairedTestResult {
        n,
        mean_diff: mean,
        sd_diff: sd,
        t_statistic: t,
        degrees_of_freedom: df,
        p_value: p,
        shapiro_w: w,
        shapiro_p,
        qq: qq_data(&d)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(a: Vec<f64>, b: Vec<f64>) -> PairedSample {
        let labels = (0..a.len()).map(|i| format!("c{i}")).collect();
        PairedSample::new(labels, a, b).unwrap()
    }

    #[test]
    fn differences() {
        let s = sample(vec![0.5, 0.7, 0.1], vec![0.6, 0.6, 0.1]);
        let d = paired_differences(&s);
        assert!((d[0] + 0.1).abs() < 1e-15 && (d[1] - 0.1).abs() < 1e-15 && d[2] == 0.0);
        let back: Vec<f64> = paired_differences(&s.swapped()).iter().map(|v| -v).collect();
        assert_eq!(back, d);
        let same = sample(vec![0.2; 3], vec![0.2; 3]);
        assert!(paired_differences(&same).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sample_validation() {
        assert!(PairedSample::new(vec!["a".into(); 2], vec![1.0; 2], vec![1.0; 2]).is_err());
        assert!(PairedSample::new(vec!["a".into(); 3], vec![1.0; 3], vec![1.0; 2]).is_err());
        assert!(PairedSample::new(vec!["a".into(); 3], vec![1.0, f64::NAN, 0.0], vec![1.0; 3]).is_err());
    }

    #[test]
    fn qq_two_points() {
        let q = qq_data(&[3.0, -1.0]).unwrap();
        let z = inverse_normal_cdf(0.625 / 2.25);
        assert!((q[0].theoretical - z).abs() < 1e-15);
        assert!((q[1].theoretical + z).abs() < 1e-12);
        assert!((z + 0.589_455_797_849_778_3).abs() < 1e-9);
        assert_eq!((q[0].observed, q[1].observed), (-1.0, 3.0));
        assert!(qq_data(&[1.0]).is_err());
    }

    #[test]
    fn qq_odd_median_is_zero() {
        let d = [0.4, -0.2, 0.1, 0.9, -0.7];
        let q = qq_data(&d).unwrap();
        assert_eq!(q[2].theoretical, 0.0);
        assert_eq!(q, qq_data(&d).unwrap());
    }

    #[test]
    fn comparison_document() {
        let s = sample(vec![0.61, 0.55, 0.72, 0.48, 0.66], vec![0.64, 0.60, 0.71, 0.55, 0.69]);
        let r = paired_comparison(&s).unwrap();
        assert_eq!(r.n, 5);
        assert_eq!(r.degrees_of_freedom, 4);
        assert!(r.t_statistic < 0.0);
        let text = r.to_text(&[("seed".into(), "7".into())]);
        assert!(text.contains("seed = 7\n"));
        assert!(text.contains("df = 4\n"));
        assert_eq!(r.qq_csv().lines().count(), 6);
    }
}
