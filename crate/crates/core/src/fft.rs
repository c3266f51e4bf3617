//! Iterative radix-2 complex FFT with a precomputed twiddle table.
//!
//! Grid sizes in this crate are powers of two by construction, so a plain
//! Cooley-Tukey transform is all that is needed; keeping it in-crate keeps
//! the core `no_std` and the results bit-deterministic.

use alloc::vec::Vec;
use num_complex::Complex64;

/// Transform plan for a fixed power-of-two size.
#[derive(Debug, Clone)]
pub struct Fft {
    n: usize,
    /// Forward twiddles e^(−2πi j/n) for j in 0..n/2.
    twiddles: Vec<Complex64>,
}

impl Fft {
    /// Panics if `n` is not a power of two ≥ 2.
    pub fn new(n: usize) -> Self {
        assert!(n.is_power_of_two() && n >= 2, "FFT size must be a power of two");
        let mut twiddles = Vec::with_capacity(n / 2);
        for j in 0..n / 2 {
            let ang = -core::f64::consts::TAU * j as f64 / n as f64;
            twiddles.push(Complex64::new(libm::cos(ang), libm::sin(ang)));
        }
        Self { n, twiddles }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn permute(&self, data: &mut [Complex64]) {
        let n = self.n;
        let mut j = 0usize;
        for i in 0..n {
            if i < j {
                data.swap(i, j);
            }
            let mut mask = n >> 1;
            while mask > 0 && j & mask != 0 {
                j ^= mask;
                mask >>= 1;
            }
            j |= mask;
        }
    }

    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        assert_eq!(data.len(), self.n);
        self.permute(data);
        let mut len = 2usize;
        while len <= self.n {
            let half = len / 2;
            let step = self.n / len;
            let mut start = 0;
            while start < self.n {
                for j in 0..half {
                    let mut w = self.twiddles[j * step];
                    if inverse {
                        w = w.conj();
                    }
                    let a = data[start + j];
                    let b = data[start + j + half] * w;
                    data[start + j] = a + b;
                    data[start + j + half] = a - b;
                }
                start += len;
            }
            len <<= 1;
        }
        if inverse {
            let scale = 1.0 / self.n as f64;
            for v in data.iter_mut() {
                *v *= scale;
            }
        }
    }

    /// In-place forward DFT: `X_j = Σ_m x_m e^(−2πi jm/n)`.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, false);
    }

    /// In-place inverse DFT (with the 1/n factor).
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, true);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn direct_dft(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|j| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (m, v) in x.iter().enumerate() {
                    let ang = -core::f64::consts::TAU * (j * m) as f64 / n as f64;
                    acc += v * Complex64::new(libm::cos(ang), libm::sin(ang));
                }
                acc
            })
            .collect()
    }

    #[test]
    fn impulse_is_flat() {
        let fft = Fft::new(16);
        let mut d = vec![Complex64::new(0.0, 0.0); 16];
        d[0] = Complex64::new(1.0, 0.0);
        fft.forward(&mut d);
        for v in d {
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn matches_direct_dft() {
        let fft = Fft::new(32);
        let mut d: Vec<Complex64> = (0..32)
            .map(|i| {
                let x = i as f64;
                Complex64::new(libm::sin(0.7 * x) + 0.2 * x, libm::cos(1.3 * x))
            })
            .collect();
        let want = direct_dft(&d);
        fft.forward(&mut d);
        for (a, b) in d.iter().zip(want.iter()) {
            assert!((a - b).norm() < 1e-11);
        }
    }

    #[test]
    fn roundtrip_and_parseval() {
        let fft = Fft::new(1024);
        let orig: Vec<Complex64> = (0..1024)
            .map(|i| Complex64::new(libm::sin(i as f64 * 0.01), libm::cos(i as f64 * 0.02)))
            .collect();
        let mut d = orig.clone();
        fft.forward(&mut d);
        let sum_x: f64 = orig.iter().map(|v| v.norm_sqr()).sum();
        let sum_k: f64 = d.iter().map(|v| v.norm_sqr()).sum();
        assert!((sum_k / 1024.0 - sum_x).abs() < 1e-9 * sum_x);
        fft.inverse(&mut d);
        for (a, b) in d.iter().zip(orig.iter()) {
            assert!((a - b).norm() < 1e-13);
        }
    }
}
