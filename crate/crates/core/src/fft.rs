//! Radix-2 complex FFT and its separable extension to 2-D and 3-D arrays.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

/// Precomputed twiddles and bit-reversal table for one power-of-two length.
#[derive(Debug, Clone)]
pub struct Fft {
    len: usize,
    twiddles: Vec<Complex64>,
    reversed: Vec<u32>,
}

impl Fft {
    /// Plans a transform of length `len`, which must be a power of two.
    pub fn new(len: usize) -> Self {
        assert!(len.is_power_of_two(), "FFT length must be a power of two");
        let bits = len.trailing_zeros();
        let twiddles = (0..len / 2)
            .map(|k| {
                let angle = -2.0 * PI * k as f64 / len as f64;
                Complex64::new(libm::cos(angle), libm::sin(angle))
            })
            .collect();
        let reversed = (0..len as u32)
            .map(|i| {
                if bits == 0 {
                    0
                } else {
                    i.reverse_bits() >> (32 - bits)
                }
            })
            .collect();
        Self {
            len,
            twiddles,
            reversed,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Unnormalized in-place transform. `inverse` flips the exponent sign.
    pub fn process(&self, buf: &mut [Complex64], inverse: bool) {
        let n = self.len;
        debug_assert_eq!(buf.len(), n);
        for i in 0..n {
            let j = self.reversed[i] as usize;
            if i < j {
                buf.swap(i, j);
            }
        }
        let mut half = 1;
        while half < n {
            let stride = n / (2 * half);
            for start in (0..n).step_by(2 * half) {
                for k in 0..half {
                    let w = self.twiddles[k * stride];
                    let w = if inverse { w.conj() } else { w };
                    let a = buf[start + k];
                    let b = buf[start + k + half] * w;
                    buf[start + k] = a + b;
                    buf[start + k + half] = a - b;
                }
            }
            half *= 2;
        }
    }
}

/// Separable transform over a row-major `n^dim` array.
#[derive(Debug, Clone)]
pub struct FftNd {
    dim: usize,
    plan: Fft,
}

impl FftNd {
    pub fn new(dim: usize, points_per_axis: usize) -> Self {
        Self {
            dim,
            plan: Fft::new(points_per_axis),
        }
    }

    pub fn process(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.plan.len();
        debug_assert_eq!(data.len(), n.pow(self.dim as u32));
        // Last axis is contiguous.
        for line in data.chunks_exact_mut(n) {
            self.plan.process(line, inverse);
        }
        if self.dim == 1 {
            return;
        }
        let mut scratch = vec![Complex64::new(0.0, 0.0); n];
        for axis in 0..self.dim - 1 {
            let stride = n.pow((self.dim - 1 - axis) as u32);
            let block = stride * n;
            for base in (0..data.len()).step_by(block) {
                for offset in 0..stride {
                    let origin = base + offset;
                    for (i, s) in scratch.iter_mut().enumerate() {
                        *s = data[origin + i * stride];
                    }
                    self.plan.process(&mut scratch, inverse);
                    for (i, s) in scratch.iter().enumerate() {
                        data[origin + i * stride] = *s;
                    }
                }
            }
        }
    }
}
