//! Physical and Fourier representations of fields on a periodic box.
//!
//! The forward transform carries the quadrature weight `(L/N)^n` and the phase
//! of the centred lattice, so coefficients approximate the continuum integral
//! `∫ f(x) e^{-iξ·x} dx` over the box. The inverse is `L^{-n} Σ_ξ F(ξ) e^{iξ·x}`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::FftNd;
use crate::grid::GridSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl RealField {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.len() {
            return Err(Error::SizeMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            values: vec![0.0; grid.len()],
            grid,
        }
    }

    /// Samples `f` at every lattice point.
    pub fn from_fn(grid: GridSpec, f: impl Fn([f64; 3]) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        Self { grid, values }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub grid: GridSpec,
    pub coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(grid: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        grid.validate()?;
        if coeffs.len() != grid.len() {
            return Err(Error::SizeMismatch {
                expected: grid.len(),
                found: coeffs.len(),
            });
        }
        Ok(Self { grid, coeffs })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
            grid,
        }
    }

    /// Flat index holding the wavevector `-ξ` of the entry at `flat`.
    pub fn mirror_index(&self, flat: usize) -> usize {
        let n = self.grid.points_per_axis;
        let idx = self.grid.unflatten(flat);
        let mut out = 0;
        for &i in idx.iter().take(self.grid.dim) {
            out = out * n + (n - i) % n;
        }
        out
    }

    /// Largest violation of `F(-ξ) = conj F(ξ)` relative to the largest coefficient.
    pub fn conjugate_asymmetry(&self) -> f64 {
        let scale = self.coeffs.iter().fold(0.0, |m: f64, c| m.max(c.norm()));
        if scale == 0.0 {
            return 0.0;
        }
        (0..self.coeffs.len())
            .map(|i| (self.coeffs[i] - self.coeffs[self.mirror_index(i)].conj()).norm())
            .fold(0.0, f64::max)
            / scale
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// Reusable transform engine for one grid.
#[derive(Debug, Clone)]
pub struct SpectralTransform {
    grid: GridSpec,
    fft: FftNd,
    weight: f64,
}

impl SpectralTransform {
    pub fn new(grid: GridSpec) -> Result<Self> {
        grid.validate()?;
        Ok(Self {
            fft: FftNd::new(grid.dim, grid.points_per_axis),
            weight: grid.cell_volume(),
            grid,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Forward transform of real samples into `out`.
    pub fn forward_into(&self, values: &[f64], out: &mut Vec<Complex64>) -> Result<()> {
        self.check_len(values.len())?;
        out.clear();
        out.extend(values.iter().map(|&v| Complex64::new(v, 0.0)));
        self.fft.process(out, false);
        let w = self.weight;
        apply_lattice_phase(&self.grid, out, w);
        Ok(())
    }

    /// Inverse transform into real samples; any imaginary residue is dropped.
    pub fn inverse_into(
        &self,
        coeffs: &[Complex64],
        scratch: &mut Vec<Complex64>,
        out: &mut Vec<f64>,
    ) -> Result<()> {
        self.check_len(coeffs.len())?;
        scratch.clear();
        scratch.extend_from_slice(coeffs);
        apply_lattice_phase(&self.grid, scratch, 1.0 / self.grid.volume());
        self.fft.process(scratch, true);
        out.clear();
        out.extend(scratch.iter().map(|c| c.re));
        Ok(())
    }

    pub fn forward(&self, f: &RealField) -> Result<SpectralField> {
        if f.grid != self.grid {
            return Err(Error::InvalidGrid("field grid differs from transform grid"));
        }
        let mut coeffs = Vec::with_capacity(f.values.len());
        self.forward_into(&f.values, &mut coeffs)?;
        Ok(SpectralField {
            grid: self.grid,
            coeffs,
        })
    }

    pub fn inverse(&self, f: &SpectralField) -> Result<RealField> {
        if f.grid != self.grid {
            return Err(Error::InvalidGrid("field grid differs from transform grid"));
        }
        let mut scratch = Vec::with_capacity(f.coeffs.len());
        let mut values = Vec::with_capacity(f.coeffs.len());
        self.inverse_into(&f.coeffs, &mut scratch, &mut values)?;
        Ok(RealField {
            grid: self.grid,
            values,
        })
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.grid.len() {
            return Err(Error::SizeMismatch {
                expected: self.grid.len(),
                found: len,
            });
        }
        Ok(())
    }
}

/// Multiplies entry `k` by `scale · (-1)^{k_1+…+k_n}`, the phase produced by
/// centring the lattice at the origin.
fn apply_lattice_phase(grid: &GridSpec, data: &mut [Complex64], scale: f64) {
    let n = grid.points_per_axis;
    for (row, chunk) in data.chunks_exact_mut(n).enumerate() {
        // Parity of the leading indices of this contiguous row.
        let mut parity = 0usize;
        let mut rest = row;
        for _ in 1..grid.dim {
            parity += rest % n;
            rest /= n;
        }
        for (i, c) in chunk.iter_mut().enumerate() {
            let s = if (parity + i).is_multiple_of(2) {
                scale
            } else {
                -scale
            };
            *c *= s;
        }
    }
}

pub fn transform_forward(f: &RealField) -> Result<SpectralField> {
    SpectralTransform::new(f.grid)?.forward(f)
}

pub fn transform_inverse(f: &SpectralField) -> Result<RealField> {
    SpectralTransform::new(f.grid)?.inverse(f)
}
