//! Uniform periodic lattices on `[-L/2, L/2)^n`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};

/// Shape of a periodic box: `dim` axes of `points_per_axis` samples each,
/// every axis of length `box_length`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridSpec {
    pub dim: usize,
    pub points_per_axis: usize,
    pub box_length: f64,
}

impl GridSpec {
    pub fn new(dim: usize, points_per_axis: usize, box_length: f64) -> Result<Self> {
        let spec = Self {
            dim,
            points_per_axis,
            box_length,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.dim) {
            return Err(Error::InvalidGrid("dimension must be 1, 2 or 3"));
        }
        if self.points_per_axis < 8 || !self.points_per_axis.is_power_of_two() {
            return Err(Error::InvalidGrid(
                "points per axis must be a power of two and at least 8",
            ));
        }
        if !(self.box_length.is_finite() && self.box_length > 0.0) {
            return Err(Error::InvalidGrid("box length must be positive and finite"));
        }
        Ok(())
    }

    /// Total number of lattice points, `N^dim`.
    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Lattice spacing `L/N`.
    pub fn spacing(&self) -> f64 {
        self.box_length / self.points_per_axis as f64
    }

    /// Quadrature weight of one cell, `(L/N)^dim`.
    pub fn cell_volume(&self) -> f64 {
        libm::pow(self.spacing(), self.dim as f64)
    }

    /// Box volume `L^dim`.
    pub fn volume(&self) -> f64 {
        libm::pow(self.box_length, self.dim as f64)
    }

    /// Fundamental wavenumber `2π/L`.
    pub fn fundamental(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    /// Signed integer mode index stored at array position `i` along one axis.
    pub fn mode_index(&self, i: usize) -> i64 {
        let n = self.points_per_axis;
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// Splits a row-major flat index into per-axis indices (last axis fastest).
    pub fn unflatten(&self, flat: usize) -> [usize; 3] {
        let n = self.points_per_axis;
        let mut out = [0usize; 3];
        let mut rest = flat;
        for axis in (0..self.dim).rev() {
            out[axis] = rest % n;
            rest /= n;
        }
        out
    }

    /// Physical coordinate of lattice index `i` along one axis.
    pub fn coordinate(&self, i: usize) -> f64 {
        i as f64 * self.spacing() - 0.5 * self.box_length
    }

    /// Physical position of the flat lattice point.
    pub fn point(&self, flat: usize) -> [f64; 3] {
        let idx = self.unflatten(flat);
        let mut x = [0.0; 3];
        for axis in 0..self.dim {
            x[axis] = self.coordinate(idx[axis]);
        }
        x
    }

    /// Wavevector stored at the flat spectral index.
    pub fn wavevector(&self, flat: usize) -> [f64; 3] {
        let idx = self.unflatten(flat);
        let k0 = self.fundamental();
        let mut xi = [0.0; 3];
        for axis in 0..self.dim {
            xi[axis] = k0 * self.mode_index(idx[axis]) as f64;
        }
        xi
    }

    /// Largest `|j|` over the axes of the flat spectral index.
    pub fn max_abs_mode(&self, flat: usize) -> u64 {
        let idx = self.unflatten(flat);
        (0..self.dim)
            .map(|axis| self.mode_index(idx[axis]).unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    /// `|ξ|` for every spectral index, in storage order.
    pub fn abs_wavenumbers(&self) -> Vec<f64> {
        let n = self.points_per_axis;
        let k0 = self.fundamental();
        let axis_sq: Vec<f64> = (0..n)
            .map(|i| {
                let k = k0 * self.mode_index(i) as f64;
                k * k
            })
            .collect();
        let mut out = Vec::with_capacity(self.len());
        match self.dim {
            1 => out.extend(axis_sq.iter().map(|s| libm::sqrt(*s))),
            2 => {
                for a in &axis_sq {
                    for b in &axis_sq {
                        out.push(libm::sqrt(a + b));
                    }
                }
            }
            _ => {
                for a in &axis_sq {
                    for b in &axis_sq {
                        for c in &axis_sq {
                            out.push(libm::sqrt(a + b + c));
                        }
                    }
                }
            }
        }
        out
    }

    /// Largest time for which the continuum decay stays visible on this box:
    /// `0.1 (L/2π)^{2σ}`.
    pub fn validity_horizon(&self, sigma: f64) -> f64 {
        0.1 * libm::pow(self.box_length / (2.0 * PI), 2.0 * sigma)
    }

    /// Box length keeping the continuum rate visible up to `t_end`.
    pub fn suggested_box_length(t_end: f64, sigma: f64) -> f64 {
        2.0 * PI * libm::pow(10.0 * t_end, 1.0 / (2.0 * sigma))
    }
}

/// A validated spec together with its coordinate and wavenumber tables.
#[derive(Debug, Clone)]
pub struct Grid {
    pub spec: GridSpec,
    /// Coordinates along one axis, `x_j = jL/N - L/2`.
    pub axis_coordinates: Vec<f64>,
    /// Wavenumbers along one axis in storage order, `ξ_j = 2πj/L`.
    pub axis_wavenumbers: Vec<f64>,
    /// `|ξ|` for all `N^dim` spectral indices.
    pub abs_wavenumbers: Vec<f64>,
}

pub fn build_grid(spec: GridSpec) -> Result<Grid> {
    spec.validate()?;
    let n = spec.points_per_axis;
    let k0 = spec.fundamental();
    Ok(Grid {
        axis_coordinates: (0..n).map(|i| spec.coordinate(i)).collect(),
        axis_wavenumbers: (0..n).map(|i| k0 * spec.mode_index(i) as f64).collect(),
        abs_wavenumbers: spec.abs_wavenumbers(),
        spec,
    })
}

impl Grid {
    pub fn len(&self) -> usize {
        self.abs_wavenumbers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.abs_wavenumbers.is_empty()
    }

    /// Per-mode symbol `|ξ|^{2σ}` of the fractional Laplacian.
    pub fn laplacian_power(&self, sigma: f64) -> Vec<f64> {
        self.abs_wavenumbers
            .iter()
            .map(|&x| {
                if x == 0.0 {
                    0.0
                } else {
                    libm::pow(x, 2.0 * sigma)
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_wavenumbers() {
        let g = build_grid(GridSpec::new(1, 8, 2.0 * PI).unwrap()).unwrap();
        let expected = [0.0, 1.0, 2.0, 3.0, -4.0, -3.0, -2.0, -1.0];
        for (a, b) in g.axis_wavenumbers.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
        let g = build_grid(GridSpec::new(1, 8, 4.0 * PI).unwrap()).unwrap();
        let expected = [0.0, 0.5, 1.0, 1.5, -2.0, -1.5, -1.0, -0.5];
        for (a, b) in g.axis_wavenumbers.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn two_dimensional_table() {
        let spec = GridSpec {
            dim: 2,
            points_per_axis: 4,
            box_length: 2.0 * PI,
        };
        // N = 4 is below the solver minimum, so exercise the table directly.
        let table = spec.abs_wavenumbers();
        assert_eq!(table.len(), 16);
        let max_component = (0..16)
            .flat_map(|f| {
                let w = spec.wavevector(f);
                [w[0].abs(), w[1].abs()]
            })
            .fold(0.0, f64::max);
        assert!((max_component - 2.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(GridSpec::new(1, 12, 1.0).is_err());
        assert!(GridSpec::new(4, 8, 1.0).is_err());
        assert!(GridSpec::new(0, 8, 1.0).is_err());
        assert!(GridSpec::new(1, 4, 1.0).is_err());
        assert!(GridSpec::new(1, 8, 0.0).is_err());
        assert!(GridSpec::new(3, 8, 1.0).is_ok());
    }

    #[test]
    fn unflatten_is_row_major() {
        let spec = GridSpec::new(3, 8, 1.0).unwrap();
        assert_eq!(spec.unflatten(8 * 8 * 2 + 8 * 3 + 5), [2, 3, 5]);
        assert_eq!(spec.point(0), [-0.5, -0.5, -0.5]);
    }
}
