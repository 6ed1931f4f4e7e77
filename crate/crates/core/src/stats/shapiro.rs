//! Shapiro–Wilk W test with Royston's (1995) coefficient and p-value
//! approximations.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use super::special::{inverse_normal_cdf, normal_sf};
use crate::error::{Error, Result};

pub const SHAPIRO_MIN_N: usize = 3;
pub const SHAPIRO_MAX_N: usize = 5000;

const C1: [f64; 6] = [0.0, 0.221_157, -0.147_981, -2.071_190, 4.434_685, -2.706_056];
const C2: [f64; 6] = [0.0, 0.042_981, -0.293_762, -1.752_461, 5.682_633, -3.582_633];
const C3: [f64; 4] = [0.5440, -0.399_78, 0.025_054, -0.000_671_4];
const C4: [f64; 4] = [1.3822, -0.778_57, 0.062_767, -0.002_032_2];
const C5: [f64; 4] = [-1.5861, -0.310_82, -0.083_751, 0.003_891_5];
const C6: [f64; 3] = [-0.4803, -0.082_676, 0.003_030_2];
const G: [f64; 2] = [-2.273, 0.459];

/// Smallest p reported when `log(1 - W)` is beyond the small-sample bound.
const P_FLOOR: f64 = 1e-19;

fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapiroWilk {
    pub w: f64,
    pub p: f64,
}

/// Lower-half coefficients `a_1..a_{n/2}` (positive, largest first). The
/// full antisymmetric vector has `-a_i` on `x_(i)` and `+a_i` on `x_(n+1-i)`.
fn coefficients(n: usize) -> Vec<f64> {
    let half = n / 2;
    if n == 3 {
        return vec![FRAC_1_SQRT_2];
    }
    let an = n as f64;
    // expected normal order statistics (Blom positions), lower half: negative
    let m: Vec<f64> = (1..=half)
        .map(|i| inverse_normal_cdf((i as f64 - 0.375) / (an + 0.25)))
        .collect();
    let summ2 = 2.0 * m.iter().map(|v| v * v).sum::<f64>();
    let ssumm2 = summ2.sqrt();
    let rsn = 1.0 / an.sqrt();
    let a1 = poly(&C1, rsn) - m[0] / ssumm2;

    let mut a = vec![0.0; half];
    let (first_plain, fac) = if n > 5 {
        let a2 = -m[1] / ssumm2 + poly(&C2, rsn);
        let fac = ((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1])
            / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2))
            .sqrt();
        a[1] = a2;
        (2, fac)
    } else {
        let fac = ((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1)).sqrt();
        (1, fac)
    };
    a[0] = a1;
    for i in first_plain..half {
        a[i] = -m[i] / fac;
    }
    a
}

pub fn shapiro_wilk(data: &[f64]) -> Result<ShapiroWilk> {
    let n = data.len();
    if !(SHAPIRO_MIN_N..=SHAPIRO_MAX_N).contains(&n) {
        return Err(Error::Range {
            n,
            min: SHAPIRO_MIN_N,
            max: SHAPIRO_MAX_N,
        });
    }
    if data.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("Shapiro–Wilk input contains non-finite values".into()));
    }
    let mut x = data.to_vec();
    x.sort_by(f64::total_cmp);
    let range = x[n - 1] - x[0];
    if !(range > 0.0) {
        return Err(Error::Degenerate("all values are identical".into()));
    }

    let a = coefficients(n);
    // scale by the range for conditioning; W is scale free
    let mean = x.iter().sum::<f64>() / n as f64;
    let ss: f64 = x.iter().map(|v| ((v - mean) / range).powi(2)).sum();
    let num: f64 = a
        .iter()
        .enumerate()
        .map(|(i, ai)| ai * (x[n - 1 - i] - x[i]) / range)
        .sum();
    let w = (num * num / ss).min(1.0);

    if n == 3 {
        if w < 0.75 {
            return Ok(ShapiroWilk { w: 0.75, p: 0.0 });
        }
        let p = (1.0 - 6.0 / PI * w.sqrt().acos()).max(0.0);
        return Ok(ShapiroWilk { w, p });
    }

    let y = (1.0 - w).ln();
    let an = n as f64;
    let p = if n <= 11 {
        let gamma = poly(&G, an);
        if y >= gamma {
            P_FLOOR
        } else {
            let y = -(gamma - y).ln();
            let m = poly(&C3, an);
            let s = poly(&C4, an).exp();
            normal_sf((y - m) / s)
        }
    } else {
        let ln_n = an.ln();
        let m = poly(&C5, ln_n);
        let s = poly(&C6, ln_n).exp();
        normal_sf((y - m) / s)
    };
    Ok(ShapiroWilk { w, p })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients_have_unit_norm() {
        for n in [4usize, 5, 6, 11, 12, 50, 501] {
            let a = coefficients(n);
            let norm: f64 = 2.0 * a.iter().map(|v| v * v).sum::<f64>();
            assert!((norm - 1.0).abs() < 1e-12, "n = {n}: {norm}");
            assert!(a.windows(2).all(|w| w[0] > w[1]));
        }
    }

    #[test]
    fn range_and_degenerate() {
        assert!(matches!(shapiro_wilk(&[1.0, 2.0]), Err(Error::Range { .. })));
        assert!(matches!(shapiro_wilk(&vec![0.0; 5001]), Err(Error::Range { .. })));
        assert!(matches!(shapiro_wilk(&[4.0; 10]), Err(Error::Degenerate(_))));
    }

    #[test]
    fn three_points() {
        // equally spaced points are perfectly "normal" for n = 3
        let r = shapiro_wilk(&[1.0, 2.0, 3.0]).unwrap();
        assert!((r.w - 1.0).abs() < 1e-12);
        assert!((r.p - 1.0).abs() < 1e-6);
    }

    #[test]
    fn affine_invariance() {
        let d = [0.3, -1.2, 0.8, 2.2, -0.4, 0.05, 1.1, -2.0, 0.6];
        let base = shapiro_wilk(&d).unwrap();
        for (alpha, beta) in [(2.5, -3.0), (1e-3, 100.0), (40.0, 0.0)] {
            let moved: Vec<f64> = d.iter().map(|v| alpha * v + beta).collect();
            let r = shapiro_wilk(&moved).unwrap();
            assert!((r.w - base.w).abs() < 1e-10);
        }
    }
}
