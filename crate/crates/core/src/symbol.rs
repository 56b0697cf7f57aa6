//! Radial Fourier multipliers: the fractional Laplacian and the Riesz potential.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{check_param, Error, Result};
use crate::field::{RealField, SpectralField, SpectralTransform};

/// A radial symbol `ξ ↦ s(|ξ|)` with an explicit value at `ξ = 0`.
pub struct MultiplierSymbol {
    name: String,
    at_zero: f64,
    rule: Box<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl core::fmt::Debug for MultiplierSymbol {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("MultiplierSymbol")
            .field("name", &self.name)
            .field("at_zero", &self.at_zero)
            .finish()
    }
}

impl MultiplierSymbol {
    /// `rule` is consulted for `|ξ| > 0` only.
    pub fn new(
        name: impl Into<String>,
        at_zero: f64,
        rule: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            at_zero,
            rule: Box::new(rule),
        }
    }

    pub fn identity() -> Self {
        Self::new("identity", 1.0, |_| 1.0)
    }

    /// `|ξ|^s`; the zero mode maps to 0 for `s > 0`, to 1 for `s = 0`.
    pub fn power(s: f64) -> Self {
        let at_zero = if s == 0.0 { 1.0 } else { 0.0 };
        Self::new(alloc::format!("|xi|^{s}"), at_zero, move |x| {
            libm::pow(x, s)
        })
    }

    /// `|ξ|^{2σ}`, the symbol of `(-Δ)^σ`.
    pub fn fractional_laplacian(sigma: f64) -> Self {
        Self::new(alloc::format!("(-Laplacian)^{sigma}"), 0.0, move |x| {
            libm::pow(x, 2.0 * sigma)
        })
    }

    /// `|ξ|^{-α}` with the mean projected out.
    pub fn riesz(alpha: f64) -> Self {
        Self::new(alloc::format!("Riesz I_{alpha}"), 0.0, move |x| {
            libm::pow(x, -alpha)
        })
    }

    /// `(1 + |ξ|²)^{s/2}`.
    pub fn bessel(s: f64) -> Self {
        Self::new(alloc::format!("<xi>^{s}"), 1.0, move |x| {
            libm::pow(1.0 + x * x, 0.5 * s)
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, abs_xi: f64) -> f64 {
        if abs_xi == 0.0 {
            self.at_zero
        } else {
            (self.rule)(abs_xi)
        }
    }

    /// Pointwise product of two symbols.
    pub fn product(self, other: Self) -> Self {
        let name = alloc::format!("{}*{}", self.name, other.name);
        let at_zero = self.at_zero * other.at_zero;
        let (a, b) = (self.rule, other.rule);
        Self::new(name, at_zero, move |x| a(x) * b(x))
    }

    /// Symbol values on a `|ξ|` table, rejecting non-finite entries.
    pub fn tabulate(&self, abs_xi: &[f64]) -> Result<Vec<f64>> {
        abs_xi
            .iter()
            .map(|&x| {
                let v = self.eval(x);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::NonFiniteSymbol {
                        name: self.name.clone(),
                        at: x,
                    })
                }
            })
            .collect()
    }
}

pub fn apply_symbol(f: &SpectralField, s: &MultiplierSymbol) -> Result<SpectralField> {
    let table = s.tabulate(&f.grid.abs_wavenumbers())?;
    Ok(SpectralField {
        grid: f.grid,
        coeffs: f
            .coeffs
            .iter()
            .zip(table.iter())
            .map(|(c, m)| c * m)
            .collect(),
    })
}

fn apply_in_physical(f: &RealField, s: &MultiplierSymbol) -> Result<RealField> {
    let t = SpectralTransform::new(f.grid)?;
    let spec = t.forward(f)?;
    t.inverse(&apply_symbol(&spec, s)?)
}

/// `(-Δ)^σ f`, with symbol `|ξ|^{2σ}`.
pub fn fractional_laplacian(f: &RealField, sigma: f64) -> Result<RealField> {
    check_param("sigma", sigma, sigma >= 0.0, "[0, ∞)")?;
    apply_in_physical(f, &MultiplierSymbol::fractional_laplacian(sigma))
}

/// Normalized Riesz potential `I_α f`, symbol `|ξ|^{-α}` with zero mean mode.
pub fn riesz_potential(f: &RealField, alpha: f64) -> Result<RealField> {
    let dim = f.grid.dim as f64;
    check_param("alpha", alpha, alpha > 0.0 && alpha < dim, "(0, n)")?;
    apply_in_physical(f, &MultiplierSymbol::riesz(alpha))
}
