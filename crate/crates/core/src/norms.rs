//! Discrete Lebesgue and Sobolev norms.

use num_complex::Complex64;

use crate::error::{check_param, Result};
use crate::field::{RealField, SpectralField, SpectralTransform};
use crate::grid::GridSpec;

/// `(Σ |f_j|^r (L/N)^n)^{1/r}`.
pub fn lebesgue_norm(f: &RealField, r: f64) -> Result<f64> {
    check_param("r", r, r >= 1.0, "[1, ∞)")?;
    Ok(lebesgue_norm_slice(&f.values, &f.grid, r))
}

pub(crate) fn lebesgue_norm_slice(values: &[f64], grid: &GridSpec, r: f64) -> f64 {
    let w = grid.cell_volume();
    if r == 1.0 {
        return values.iter().map(|v| v.abs()).sum::<f64>() * w;
    }
    if r == 2.0 {
        return libm::sqrt(values.iter().map(|v| v * v).sum::<f64>() * w);
    }
    // Scale by the maximum to keep |f|^r representable.
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let sum: f64 = values.iter().map(|v| libm::pow(v.abs() / scale, r)).sum();
    scale * libm::pow(sum * w, 1.0 / r)
}

/// L² norm evaluated on the Fourier side: `(L^{-n} Σ |F|²)^{1/2}`.
pub fn spectral_l2(f: &SpectralField) -> f64 {
    weighted_l2(&f.coeffs, &f.grid, |_| 1.0, None)
}

/// `‖ |ξ|^s F ‖` with Parseval weighting.
pub fn spectral_seminorm(f: &SpectralField, s: f64) -> f64 {
    let abs_xi = f.grid.abs_wavenumbers();
    weighted_l2(
        &f.coeffs,
        &f.grid,
        |x| homogeneous_weight(x, s),
        Some(&abs_xi),
    )
}

pub(crate) fn homogeneous_weight(abs_xi: f64, s: f64) -> f64 {
    if s == 0.0 {
        1.0
    } else if abs_xi == 0.0 {
        0.0
    } else {
        libm::pow(abs_xi, s)
    }
}

/// Parseval-weighted norm `(L^{-n} Σ w(|ξ|)² |F|²)^{1/2}`. Without a `|ξ|` table
/// the weight is evaluated at 0 for every mode.
pub(crate) fn weighted_l2(
    coeffs: &[Complex64],
    grid: &GridSpec,
    weight: impl Fn(f64) -> f64,
    abs_xi: Option<&[f64]>,
) -> f64 {
    let sum: f64 = match abs_xi {
        Some(table) => coeffs
            .iter()
            .zip(table)
            .map(|(c, &x)| {
                let w = weight(x);
                w * w * c.norm_sqr()
            })
            .sum(),
        None => coeffs.iter().map(|c| c.norm_sqr()).sum(),
    };
    libm::sqrt(sum / grid.volume())
}

/// Homogeneous Sobolev seminorm `‖(-Δ)^{s/2} f‖_{L²}`.
pub fn sobolev_seminorm(f: &RealField, s: f64) -> Result<f64> {
    check_param("s", s, s >= 0.0, "[0, ∞)")?;
    let spec = SpectralTransform::new(f.grid)?.forward(f)?;
    Ok(spectral_seminorm(&spec, s))
}

/// Inhomogeneous Sobolev norm `‖(1+|ξ|²)^{s/2} F‖` with Parseval weighting.
pub fn sobolev_norm_inhom(f: &RealField, s: f64) -> Result<f64> {
    check_param("s", s, s >= 0.0, "[0, ∞)")?;
    let spec = SpectralTransform::new(f.grid)?.forward(f)?;
    let abs_xi = spec.grid.abs_wavenumbers();
    Ok(weighted_l2(
        &spec.coeffs,
        &spec.grid,
        |x| libm::pow(1.0 + x * x, 0.5 * s),
        Some(&abs_xi),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn constant_field() {
        let g = GridSpec::new(1, 16, 4.0).unwrap();
        let f = RealField::from_fn(g, |_| 2.0);
        assert!((lebesgue_norm(&f, 2.0).unwrap() - 4.0).abs() < 1e-14);
        assert!((lebesgue_norm(&f, 1.0).unwrap() - 8.0).abs() < 1e-14);
        assert!((lebesgue_norm(&f, 3.0).unwrap() - 2.0 * 4f64.powf(1.0 / 3.0)).abs() < 1e-13);
    }

    #[test]
    fn sine_norms() {
        let g = GridSpec::new(1, 64, 2.0 * PI).unwrap();
        let s = RealField::from_fn(g, |x| x[0].sin());
        let c = RealField::from_fn(g, |x| x[0].cos());
        let l2 = lebesgue_norm(&s, 2.0).unwrap();
        assert!((l2 - PI.sqrt()).abs() < 1e-12);
        let semi = sobolev_seminorm(&s, 1.0).unwrap();
        assert!((semi - lebesgue_norm(&c, 2.0).unwrap()).abs() < 1e-12);
        // (1 + 1)^{1/2} on the only active shell.
        let inhom = sobolev_norm_inhom(&s, 1.0).unwrap();
        assert!((inhom - (2.0 * PI).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rejects_r_below_one() {
        let g = GridSpec::new(1, 8, 1.0).unwrap();
        assert!(lebesgue_norm(&RealField::zeros(g), 0.5).is_err());
        assert!(sobolev_seminorm(&RealField::zeros(g), -1.0).is_err());
    }
}
