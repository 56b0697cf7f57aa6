//! Exact per-mode solution of the linear flow
//!
//! ```text
//! û'' + (1 + k) û' + k û = 0,     k = |ξ|^{2σ},
//! ```
//!
//! whose characteristic polynomial factors as `(λ + 1)(λ + k)`. Away from the
//! double root `k = 1` the kernels are differences of two exponentials; near it
//! they are rewritten through `φ₁(z) = (e^z - 1)/z`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{check_param, Result};
use crate::field::SpectralField;
use crate::params::ModelParams;

/// Width of the band around `k = 1` evaluated through `φ₁`.
pub const DOUBLE_ROOT_BAND: f64 = 1e-4;

/// Fundamental solutions of one Fourier mode at time `t`.
///
/// `a` starts from unit displacement, `k1` from unit velocity; `da`, `dk1` are
/// their time derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorKernels {
    pub k: f64,
    pub t: f64,
    pub a: f64,
    pub k1: f64,
    pub da: f64,
    pub dk1: f64,
}

/// `φ₁(z) = (e^z - 1)/z`, by Taylor series near the origin.
pub fn phi1(z: f64) -> f64 {
    if z.abs() < 1e-3 {
        // Eight terms: z^7/8! ≈ 5e-26 at the switch.
        let mut term = 1.0;
        let mut sum = 1.0;
        for j in 2..=8 {
            term *= z / j as f64;
            sum += term;
        }
        sum
    } else {
        libm::expm1(z) / z
    }
}

/// `φ₂(z) = (e^z - 1 - z)/z²`.
pub fn phi2(z: f64) -> f64 {
    if z.abs() < 0.1 {
        let mut term = 0.5;
        let mut sum = 0.5;
        for j in 3..=16 {
            term *= z / j as f64;
            sum += term;
        }
        sum
    } else {
        (libm::expm1(z) - z) / (z * z)
    }
}

pub fn kernels(k: f64, t: f64) -> Result<PropagatorKernels> {
    check_param("k", k, k >= 0.0, "[0, ∞)")?;
    check_param("t", t, t >= 0.0, "[0, ∞)")?;
    Ok(kernels_unchecked(k, t))
}

pub(crate) fn kernels_unchecked(k: f64, t: f64) -> PropagatorKernels {
    let delta = 1.0 - k;
    let (a, k1, dk1) = if delta.abs() > DOUBLE_ROOT_BAND {
        let ek = libm::exp(-k * t);
        let e1 = libm::exp(-t);
        (
            (ek - k * e1) / delta,
            (ek - e1) / delta,
            (e1 - k * ek) / delta,
        )
    } else {
        let e1 = libm::exp(-t);
        let tp = t * phi1(delta * t);
        (e1 * (1.0 + tp), e1 * tp, e1 * (libm::exp(delta * t) - tp))
    };
    PropagatorKernels {
        k,
        t,
        a,
        k1,
        da: -k * k1,
        dk1,
    }
}

/// Linear flow from `u(0) = 0`, `u_t(0) = u₁` to time `t`: returns `(û, û_t)`.
pub fn propagate_linear(
    u1: &SpectralField,
    sigma: f64,
    t: f64,
) -> Result<(SpectralField, SpectralField)> {
    check_param("t", t, t >= 0.0, "[0, ∞)")?;
    check_param("sigma", sigma, sigma > 0.0, "(0, ∞)")?;
    if t == 0.0 {
        return Ok((SpectralField::zeros(u1.grid), u1.clone()));
    }
    let abs_xi = u1.grid.abs_wavenumbers();
    let mut u = Vec::with_capacity(u1.coeffs.len());
    let mut ut = Vec::with_capacity(u1.coeffs.len());
    for (c, &x) in u1.coeffs.iter().zip(&abs_xi) {
        let kern = kernels_unchecked(mode_rate(x, sigma), t);
        u.push(c * kern.k1);
        ut.push(c * kern.dk1);
    }
    Ok((
        SpectralField {
            grid: u1.grid,
            coeffs: u,
        },
        SpectralField {
            grid: u1.grid,
            coeffs: ut,
        },
    ))
}

pub(crate) fn mode_rate(abs_xi: f64, sigma: f64) -> f64 {
    if abs_xi == 0.0 {
        0.0
    } else {
        libm::pow(abs_xi, 2.0 * sigma)
    }
}

/// Exponent of `(1+t)` in the linear estimate for `‖∂_t^j (-Δ)^{a/2} u‖_{L²}`:
/// `-(n/2σ)(1/m - 1/2) - a/(2σ) - j`. `m = 2` gives the L²–L² rate.
pub fn decay_exponent(params: &ModelParams, a: f64, j: u32) -> f64 {
    -params.base_rate() - a / (2.0 * params.sigma) - j as f64
}

/// Per-mode coefficients of one exponential-integrator step of length `h`.
///
/// With forcing `f` linearly interpolated between `f0` (step start) and `f1`
/// (step end):
///
/// ```text
/// u⁺ = a·u + k1·v + wu0·f0 + wu1·f1
/// v⁺ = da·u + dk1·v + wv0·f0 + wv1·f1
/// ```
///
/// `wu_const = wu0 + wu1` and `wv_const` are the weights for forcing held at `f0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepCoefficients {
    pub a: f64,
    pub k1: f64,
    pub da: f64,
    pub dk1: f64,
    pub wu0: f64,
    pub wu1: f64,
    pub wv0: f64,
    pub wv1: f64,
}

impl StepCoefficients {
    pub fn new(k: f64, h: f64) -> Result<Self> {
        check_param("k", k, k >= 0.0, "[0, ∞)")?;
        check_param("h", h, h > 0.0, "(0, ∞)")?;
        Ok(Self::new_unchecked(k, h))
    }

    pub(crate) fn new_unchecked(k: f64, h: f64) -> Self {
        let kern = kernels_unchecked(k, h);
        let delta = 1.0 - k;
        let (wu_const, wu1, wv_const, wv1) = if delta.abs() > DOUBLE_ROOT_BAND {
            // ∫₀^h e^{-aτ} dτ and ∫₀^h e^{-aτ}(1 - τ/h) dτ.
            let e0 = |a: f64| h * phi1(-a * h);
            let e1 = |a: f64| h * phi2(-a * h);
            (
                (e0(k) - e0(1.0)) / delta,
                (e1(k) - e1(1.0)) / delta,
                (e0(1.0) - k * e0(k)) / delta,
                (e1(1.0) - k * e1(k)) / delta,
            )
        } else {
            near_double_root_weights(delta, h)
        };
        Self {
            a: kern.a,
            k1: kern.k1,
            da: kern.da,
            dk1: kern.dk1,
            wu0: wu_const - wu1,
            wu1,
            wv0: wv_const - wv1,
            wv1,
        }
    }

    pub fn wu_const(&self) -> f64 {
        self.wu0 + self.wu1
    }

    pub fn wv_const(&self) -> f64 {
        self.wv0 + self.wv1
    }

    /// Applies the homogeneous part to `(u, v)`.
    #[inline]
    pub fn homogeneous(&self, u: Complex64, v: Complex64) -> (Complex64, Complex64) {
        (u * self.a + v * self.k1, u * self.da + v * self.dk1)
    }
}

/// Expands `K1(τ) = e^{-τ} Σ_{i≥1} δ^{i-1} τ^i / i!` and integrates termwise
/// against `1` and `1 - τ/h` using `G_i = ∫₀^h τ^i e^{-τ} dτ`.
fn near_double_root_weights(delta: f64, h: f64) -> (f64, f64, f64, f64) {
    const TERMS: usize = 6;
    let mut g = [0.0f64; TERMS + 2];
    for (i, gi) in g.iter_mut().enumerate() {
        *gi = lower_incomplete_gamma_int(i, h);
    }
    let mut fact = [1.0f64; TERMS + 2];
    for i in 1..fact.len() {
        fact[i] = fact[i - 1] * i as f64;
    }
    let (mut wu_const, mut wu1, mut wv_const, mut wv1) = (0.0, 0.0, 0.0, 0.0);
    let mut dpow = 1.0;
    for i in 1..=TERMS {
        let shape = |j: usize| g[j] - g[j + 1] / h;
        wu_const += dpow * g[i] / fact[i];
        wu1 += dpow * shape(i) / fact[i];
        wv_const += dpow * (g[i - 1] / fact[i - 1] - g[i] / fact[i]);
        wv1 += dpow * (shape(i - 1) / fact[i - 1] - shape(i) / fact[i]);
        dpow *= delta;
    }
    (wu_const, wu1, wv_const, wv1)
}

/// `∫₀^x τ^i e^{-τ} dτ` via the series `x^{i+1} e^{-x} Σ_m x^m / ((i+1)…(i+1+m))`.
fn lower_incomplete_gamma_int(i: usize, x: f64) -> f64 {
    let s = (i + 1) as f64;
    let mut term = 1.0 / s;
    let mut sum = term;
    for m in 1..1000 {
        term *= x / (s + m as f64);
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    libm::pow(x, s) * libm::exp(-x) * sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn zero_rate_reduces_to_friction_only() {
        for t in [0.0, 0.3, 5.0, 1000.0] {
            let k = kernels(0.0, t).unwrap();
            assert_eq!(k.a, 1.0);
            assert!((k.k1 - (1.0 - (-t).exp())).abs() < 1e-15);
        }
    }

    #[test]
    fn double_root_values() {
        let k = kernels(1.0, 2.0).unwrap();
        assert!(rel(k.k1, 2.0 * (-2.0f64).exp()) < 1e-14);
        assert!(rel(k.a, 3.0 * (-2.0f64).exp()) < 1e-14);
        assert!((k.k1 - 0.27067).abs() < 1e-5);
        assert!((k.a - 0.40601).abs() < 1e-5);
    }

    #[test]
    fn distinct_roots_value() {
        let k = kernels(2.0, 1.0).unwrap();
        let exact = (-1.0f64).exp() - (-2.0f64).exp();
        assert!(rel(k.k1, exact) < 1e-14);
        assert!((k.k1 - 0.23254).abs() < 1e-5);
    }

    #[test]
    fn initial_identities_hold_exactly() {
        for k in [0.0, 1e-3, 0.5, 1.0 - 5e-5, 1.0, 1.0 + 5e-5, 2.0, 1e4] {
            let kern = kernels(k, 0.0).unwrap();
            assert_eq!(kern.a, 1.0, "k={k}");
            assert_eq!(kern.k1, 0.0);
            assert_eq!(kern.da, 0.0);
            assert_eq!(kern.dk1, 1.0);
        }
    }

    #[test]
    fn branches_agree_at_the_switch() {
        for t in [0.01f64, 0.7, 3.0, 40.0] {
            for side in [-1.0, 1.0] {
                let k = 1.0 + side * DOUBLE_ROOT_BAND;
                let near = {
                    let delta = 1.0 - k;
                    let e1 = (-t).exp();
                    let tp = t * phi1(delta * t);
                    (e1 * (1.0 + tp), e1 * tp, e1 * ((delta * t).exp() - tp))
                };
                let far = {
                    let delta = 1.0 - k;
                    let ek = (-k * t).exp();
                    let e1 = (-t).exp();
                    (
                        (ek - k * e1) / delta,
                        (ek - e1) / delta,
                        (e1 - k * ek) / delta,
                    )
                };
                assert!(rel(near.0, far.0) < 1e-10, "A t={t}");
                assert!(rel(near.1, far.1) < 1e-10, "K1 t={t}");
                assert!(rel(near.2, far.2) < 1e-10, "dK1 t={t}");
            }
        }
    }

    #[test]
    fn decay_exponent_examples() {
        let p = ModelParams::new(1, 1.0, 0.5, 4.0, 1.0).unwrap();
        assert_eq!(decay_exponent(&p, 0.0, 0), -0.25);
        assert_eq!(decay_exponent(&p, 0.0, 1), -1.25);
        let q = ModelParams::new(3, 2.0, 0.5, 4.0, 2.0).unwrap();
        assert_eq!(decay_exponent(&q, 2.0, 0), -0.5);
    }

    #[test]
    fn rejects_negative_inputs() {
        assert!(kernels(-1.0, 1.0).is_err());
        assert!(kernels(1.0, -1.0).is_err());
        assert!(kernels(f64::NAN, 1.0).is_err());
    }

    /// Weights against adaptive quadrature of the closed-form kernels.
    #[test]
    fn step_weights_match_quadrature() {
        use crate::quadrature::integrate_adaptive;
        for &k in &[0.0, 0.3, 1.0 - 3e-5, 1.0, 1.0 + 2e-4, 2.5, 80.0, 5e3] {
            for &h in &[0.0125, 0.1, 0.5] {
                let c = StepCoefficients::new(k, h).unwrap();
                let q = |g: &dyn Fn(f64) -> f64| {
                    integrate_adaptive(g, &[0.0, h.min(1.0 / k.max(1.0)), h], 1e-18, 1e-13, 4000).0
                };
                let k1 = |tau: f64| kernels_unchecked(k, tau).k1;
                let dk1 = |tau: f64| kernels_unchecked(k, tau).dk1;
                let wuc = q(&|tau| k1(tau));
                let wu1 = q(&|tau| k1(tau) * (1.0 - tau / h));
                let wvc = q(&|tau| dk1(tau));
                let wv1 = q(&|tau| dk1(tau) * (1.0 - tau / h));
                let tol = 1e-9;
                assert!(rel(c.wu_const(), wuc) < tol, "wuc k={k} h={h}");
                assert!(rel(c.wu1, wu1) < tol, "wu1 k={k} h={h}");
                assert!(rel(c.wv_const(), wvc) < tol, "wvc k={k} h={h}");
                assert!(rel(c.wv1, wv1) < tol, "wv1 k={k} h={h}");
            }
        }
    }

    #[test]
    fn constant_forcing_on_mean_mode() {
        let h = 0.1;
        let c = StepCoefficients::new(0.0, h).unwrap();
        assert!(rel(c.wu_const(), h - 1.0 + (-h).exp()) < 1e-13);
    }
}
