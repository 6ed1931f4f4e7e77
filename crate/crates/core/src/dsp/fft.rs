//! Iterative in-place radix-2 FFT.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub const ZERO: Complex = Complex { re: 0.0, im: 0.0 };

    pub fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn from_polar(r: f64, theta: f64) -> Self {
        Self::new(r * theta.cos(), r * theta.sin())
    }
}

impl Add for Complex {
    type Output = Complex;
    fn add(self, o: Complex) -> Complex {
        Complex::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for Complex {
    type Output = Complex;
    fn sub(self, o: Complex) -> Complex {
        Complex::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for Complex {
    type Output = Complex;
    fn mul(self, o: Complex) -> Complex {
        Complex::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }
}

/// Forward DFT `X[k] = Σ x[n] e^{-2πi kn/N}` computed in place.
/// The length must be a power of two.
pub fn fft_in_place(buf: &mut [Complex]) -> Result<()> {
    let n = buf.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::Domain(format!("FFT length {n} is not a power of two")));
    }
    let bits = n.trailing_zeros();
    if bits > 0 {
        for i in 0..n {
            let j = i.reverse_bits() >> (usize::BITS - bits);
            if j > i {
                buf.swap(i, j);
            }
        }
    }

    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let twiddles: Vec<Complex> = (0..half)
            .map(|k| Complex::from_polar(1.0, -2.0 * PI * k as f64 / len as f64))
            .collect();
        for start in (0..n).step_by(len) {
            for (k, &w) in twiddles.iter().enumerate() {
                let a = buf[start + k];
                let b = buf[start + k + half] * w;
                buf[start + k] = a + b;
                buf[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }
    Ok(())
}

/// FFT of a real signal.
pub fn fft_real(signal: &[f64]) -> Result<Vec<Complex>> {
    let mut buf: Vec<Complex> = signal.iter().map(|&x| Complex::new(x, 0.0)).collect();
    fft_in_place(&mut buf)?;
    Ok(buf)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn impulse_is_flat() {
        let mut x = vec![Complex::ZERO; 8];
        x[0] = Complex::new(1.0, 0.0);
        fft_in_place(&mut x).unwrap();
        assert!(x.iter().all(|c| (c.re - 1.0).abs() < 1e-15 && c.im.abs() < 1e-15));
    }

    #[test]
    fn length_one_and_two() {
        let mut one = vec![Complex::new(3.0, -1.0)];
        fft_in_place(&mut one).unwrap();
        assert_eq!(one[0], Complex::new(3.0, -1.0));
        let two = fft_real(&[1.0, 2.0]).unwrap();
        assert_eq!(two, vec![Complex::new(3.0, 0.0), Complex::new(-1.0, 0.0)]);
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(fft_real(&[0.0; 6]).is_err());
        assert!(fft_real(&[]).is_err());
    }

    #[test]
    fn cosine_lands_in_its_bin() {
        let n = 16;
        let x: Vec<f64> = (0..n)
            .map(|i| (2.0 * PI * 3.0 * i as f64 / n as f64).cos())
            .collect();
        let spec = fft_real(&x).unwrap();
        for (k, c) in spec.iter().enumerate() {
            let want = if k == 3 || k == n - 3 { 8.0 } else { 0.0 };
            assert!((c.norm_sqr().sqrt() - want).abs() < 1e-12, "bin {k}");
        }
    }
}
