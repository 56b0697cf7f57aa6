//! Closed-form exponent bookkeeping for the global existence result: critical
//! exponent, admissible ranges of `p` and `n`, Gagliardo–Nirenberg exponents,
//! Riesz-boundedness exponents and the decay rule for Duhamel integrals.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{check_param, Error, Result};
use crate::field::RealField;
use crate::norms::{lebesgue_norm, sobolev_seminorm};
use crate::params::ModelParams;
use crate::quadrature::integrate_adaptive;

/// Tolerance of every exponent comparison.
pub const COMPARISON_TOLERANCE: f64 = 1e-12;

/// `1 + 2mσ/n`.
pub fn critical_exponent(n: usize, m: f64, sigma: f64) -> f64 {
    1.0 + 2.0 * m * sigma / n as f64
}

/// `θ = (n/σ)(1/2 - 1/q)`; callers check membership in `[0, 1]`.
pub fn gn_theta(q: f64, n: usize, sigma: f64) -> f64 {
    n as f64 / sigma * (0.5 - 1.0 / q)
}

/// `min(a, b)` when `max(a, b) > 1`, otherwise `None`.
pub fn duhamel_decay(a: f64, b: f64) -> Option<f64> {
    if a.max(b) > 1.0 {
        Some(a.min(b))
    } else {
        None
    }
}

/// Lebesgue space in which the nonlinearity is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetSpace {
    /// `L^m` with the data exponent `m`.
    Data,
    L2,
}

/// Decay exponent of `‖I_α(|u|^p)‖_{L^s}` along solutions with the linear rates:
/// `-np/(2mσ) + (n/2σ)(1/s + α/n)`.
pub fn nonlinearity_decay_exponent(params: &ModelParams, s: TargetSpace) -> f64 {
    let n = params.n as f64;
    let s = match s {
        TargetSpace::Data => params.m,
        TargetSpace::L2 => 2.0,
    };
    -n * params.p / (2.0 * params.m * params.sigma)
        + n / (2.0 * params.sigma) * (1.0 / s + params.alpha / n)
}

/// A bound together with whether it holds.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundCheck {
    pub bound: f64,
    pub holds: bool,
}

/// An exponent together with whether it lies in its admissible range.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExponentCheck {
    pub value: f64,
    pub in_range: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AdmissibilityReport {
    pub params: ModelParams,
    pub p_crit: f64,
    /// `p ≥ 2/m + 2α/n`.
    pub cond_lower: BoundCheck,
    /// `p ≤ (n+2α)/(n-2σ)`; the bound is `+∞` when `n ≤ 2σ`.
    pub cond_upper: BoundCheck,
    /// Largest dimension allowed in the `2σ < n` branch (`+∞` for `m = 2`).
    pub dim_bound: f64,
    /// `true` when `n ≤ 2σ`, or when `2σ < n ≤ dim_bound`.
    pub dim_branch_ok: bool,
    /// `p > 1 + (2σ+α)m/n`.
    pub cond_strict: BoundCheck,
    /// Gagliardo–Nirenberg exponents for `q = 2np/(n+2α)` and `q = mnp/(n+mα)`.
    pub gn_q_s2: f64,
    pub gn_theta_s2: ExponentCheck,
    pub gn_q_sm: f64,
    pub gn_theta_sm: ExponentCheck,
    /// Riesz lemma exponents `2n/(n+2α)` and `mn/(n+mα)`, checked against `(1, n/α)`.
    pub riesz_q_s2: ExponentCheck,
    pub riesz_q_sm: ExponentCheck,
    pub overall: bool,
    pub warnings: Vec<String>,
}

fn at_least(value: f64, bound: f64) -> bool {
    value >= bound - COMPARISON_TOLERANCE
}

fn at_most(value: f64, bound: f64) -> bool {
    value <= bound + COMPARISON_TOLERANCE
}

fn greater(value: f64, bound: f64) -> bool {
    value > bound + COMPARISON_TOLERANCE
}

/// Largest dimension of the `2σ < n` branch:
/// `(4σ + √(16σ(σ + m(2-m)α))) / (2(2-m))`.
pub fn dimension_bound(sigma: f64, alpha: f64, m: f64) -> f64 {
    if m >= 2.0 {
        return f64::INFINITY;
    }
    (4.0 * sigma + libm::sqrt(16.0 * sigma * (sigma + m * (2.0 - m) * alpha))) / (2.0 * (2.0 - m))
}

pub fn admissibility(params: &ModelParams) -> AdmissibilityReport {
    let ModelParams {
        n,
        sigma,
        alpha,
        p,
        m,
    } = *params;
    let nf = n as f64;
    let mut warnings = Vec::new();

    let lower = 2.0 / m + 2.0 * alpha / nf;
    let cond_lower = BoundCheck {
        bound: lower,
        holds: at_least(p, lower),
    };
    let high_dim = 2.0 * sigma < nf;
    let upper = if high_dim {
        (nf + 2.0 * alpha) / (nf - 2.0 * sigma)
    } else {
        f64::INFINITY
    };
    let cond_upper = BoundCheck {
        bound: upper,
        holds: !high_dim || at_most(p, upper),
    };
    let dim_bound = dimension_bound(sigma, alpha, m);
    let dim_branch_ok = !high_dim || at_most(nf, dim_bound);
    let strict = 1.0 + (2.0 * sigma + alpha) * m / nf;
    let cond_strict = BoundCheck {
        bound: strict,
        holds: greater(p, strict),
    };

    let gn = |q: f64| ExponentCheck {
        value: gn_theta(q, n, sigma),
        in_range: {
            let t = gn_theta(q, n, sigma);
            q > 1.0 && at_least(t, 0.0) && at_most(t, 1.0)
        },
    };
    let gn_q_s2 = 2.0 * nf * p / (nf + 2.0 * alpha);
    let gn_q_sm = m * nf * p / (nf + m * alpha);
    let gn_theta_s2 = gn(gn_q_s2);
    let gn_theta_sm = gn(gn_q_sm);
    for (label, q, c) in [("L2", gn_q_s2, gn_theta_s2), ("L^m", gn_q_sm, gn_theta_sm)] {
        if !c.in_range {
            warnings.push(format!(
                "Gagliardo-Nirenberg exponent for the {label} estimate (q = {q}) is theta = {}, outside [0, 1]",
                c.value
            ));
        }
    }

    let riesz = |q: f64| ExponentCheck {
        value: q,
        in_range: greater(q, 1.0) && q < nf / alpha - COMPARISON_TOLERANCE,
    };
    let riesz_q_s2 = riesz(2.0 * nf / (nf + 2.0 * alpha));
    let riesz_q_sm = riesz(m * nf / (nf + m * alpha));
    for (label, c) in [("L2", riesz_q_s2), ("L^m", riesz_q_sm)] {
        if !c.in_range {
            let why = if c.value <= 1.0 + COMPARISON_TOLERANCE {
                "q <= 1"
            } else {
                "q >= n/alpha"
            };
            warnings.push(format!(
                "Riesz potential bound for the {label} estimate needs q in (1, n/alpha) but q = {} ({why})",
                c.value
            ));
        }
    }
    if m >= 2.0 {
        warnings.push(String::from(
            "m = 2 lies outside the data range [1, 2) of the existence result",
        ));
    }

    let overall = cond_lower.holds && cond_upper.holds && dim_branch_ok && cond_strict.holds;
    AdmissibilityReport {
        params: *params,
        p_crit: critical_exponent(n, m, sigma),
        cond_lower,
        cond_upper,
        dim_bound,
        dim_branch_ok,
        cond_strict,
        gn_q_s2,
        gn_theta_s2,
        gn_q_sm,
        gn_theta_sm,
        riesz_q_s2,
        riesz_q_sm,
        overall,
        warnings,
    }
}

/// `∫₀^t (1+t-τ)^{-a} (1+τ)^{-b} dτ`.
pub fn duhamel_integral(a: f64, b: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let mut points = Vec::from([0.0, t]);
    for x in [1.0, 0.5 * t, t - 1.0] {
        if x > 0.0 && x < t {
            points.push(x);
        }
    }
    points.sort_by(f64::total_cmp);
    points.dedup();
    let f = |tau: f64| libm::pow(1.0 + t - tau, -a) * libm::pow(1.0 + tau, -b);
    integrate_adaptive(f, &points, 0.0, 1e-10, 4000).0
}

/// Largest ratio `∫₀^t (1+t-τ)^{-a}(1+τ)^{-b} dτ / (1+t)^{-min(a,b)}` over `times ⊂ [1, 10⁴]`.
pub fn integral_inequality_check(a: f64, b: f64, times: &[f64]) -> Result<f64> {
    let Some(rate) = duhamel_decay(a, b) else {
        return Err(Error::HypothesisFailed { a, b });
    };
    let mut worst = 0.0f64;
    for &t in times {
        check_param("t", t, (1.0..=1e4).contains(&t), "[1, 10^4]")?;
        let ratio = duhamel_integral(a, b, t) * libm::pow(1.0 + t, rate);
        worst = worst.max(ratio);
    }
    Ok(worst)
}

/// `‖f‖_q / (‖f‖_{Ḣ^σ}^θ ‖f‖_{L²}^{1-θ})` with `θ = gn_theta(q, n, σ)`; the
/// inequality says this stays below one constant per `(q, n, σ)`.
pub fn gn_ratio(f: &RealField, q: f64, sigma: f64) -> Result<f64> {
    check_param("q", q, q > 1.0, "(1, ∞)")?;
    let theta = gn_theta(q, f.grid.dim, sigma);
    let lq = lebesgue_norm(f, q)?;
    let semi = sobolev_seminorm(f, sigma)?;
    let l2 = lebesgue_norm(f, 2.0)?;
    Ok(lq / (libm::pow(semi, theta) * libm::pow(l2, 1.0 - theta)))
}

/// Logarithmically spaced times from 1 to `10⁴`.
pub fn log_time_grid(points: usize) -> Vec<f64> {
    let points = points.max(2);
    (0..points)
        .map(|i| libm::pow(10.0, 4.0 * i as f64 / (points - 1) as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(n: usize, sigma: f64, alpha: f64, p: f64, m: f64) -> ModelParams {
        ModelParams {
            n,
            sigma,
            alpha,
            p,
            m,
        }
    }

    #[test]
    fn critical_exponent_values() {
        assert_eq!(critical_exponent(1, 1.0, 1.0), 3.0);
        assert_eq!(critical_exponent(2, 1.0, 1.0), 2.0);
        assert_eq!(critical_exponent(4, 1.5, 2.0), 2.5);
    }

    #[test]
    fn gn_theta_values() {
        assert_eq!(gn_theta(4.0, 2, 1.0), 0.5);
        assert_eq!(gn_theta(2.0, 3, 1.7), 0.0);
        assert!((gn_theta(8.0 / 3.0, 1, 1.0) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn duhamel_decay_values() {
        assert_eq!(duhamel_decay(2.0, 0.5), Some(0.5));
        assert_eq!(duhamel_decay(1.5, 1.2), Some(1.2));
        assert_eq!(duhamel_decay(0.3, 0.9), None);
    }

    #[test]
    fn reference_point_report() {
        let r = admissibility(&point(1, 1.0, 0.5, 4.0, 1.0));
        assert_eq!(r.cond_lower.bound, 3.0);
        assert!(r.cond_lower.holds);
        assert!(r.cond_upper.holds && r.cond_upper.bound.is_infinite());
        assert_eq!(r.cond_strict.bound, 3.5);
        assert!(r.cond_strict.holds);
        assert!(r.overall);
        assert!((r.riesz_q_sm.value - 2.0 / 3.0).abs() < 1e-15);
        assert!(!r.riesz_q_sm.in_range);
        assert!(r.warnings.iter().any(|w| w.contains("q <= 1")));
    }

    #[test]
    fn three_dimensional_branch() {
        let r = admissibility(&point(3, 1.0, 1.0, 4.0, 1.0));
        assert!((r.dim_bound - (4.0 + 32f64.sqrt()) / 2.0).abs() < 1e-12);
        assert!((r.dim_bound - 4.8284).abs() < 1e-4);
        assert!(r.dim_branch_ok);
        assert_eq!(r.cond_upper.bound, 5.0);
        assert!(
            admissibility(&point(3, 1.0, 1.0, 5.0, 1.0))
                .cond_upper
                .holds
        );
        assert!(
            !admissibility(&point(3, 1.0, 1.0, 5.5, 1.0))
                .cond_upper
                .holds
        );
    }

    #[test]
    fn boundary_classification() {
        // p exactly at the strict bound fails, at the lower bound passes.
        let r = admissibility(&point(1, 1.0, 0.5, 3.5, 1.0));
        assert!(!r.cond_strict.holds);
        let r = admissibility(&point(1, 1.0, 0.5, 3.0, 1.0));
        assert!(r.cond_lower.holds);
    }

    #[test]
    fn vanishing_alpha_recovers_critical_exponent() {
        let r = admissibility(&point(1, 1.0, 1e-9, 4.0, 1.0));
        assert!((r.cond_strict.bound - 3.0).abs() < 1e-8);
    }

    #[test]
    fn nonlinearity_exponents() {
        let p = point(1, 1.0, 0.5, 4.0, 1.0);
        assert!((nonlinearity_decay_exponent(&p, TargetSpace::L2) + 1.5).abs() < 1e-15);
        assert!((nonlinearity_decay_exponent(&p, TargetSpace::Data) + 1.25).abs() < 1e-15);
    }

    #[test]
    fn integral_inequality() {
        assert!(matches!(
            integral_inequality_check(0.3, 0.9, &[1.0]),
            Err(Error::HypothesisFailed { .. })
        ));
        assert!(integral_inequality_check(2.0, 2.0, &[0.5]).is_err());
        assert_eq!(duhamel_integral(2.0, 2.0, 0.0), 0.0);
        // a = b = 2 by partial fractions, with s = 2 + t.
        let t: f64 = 3.0;
        let s = 2.0 + t;
        let exact = (2.0 * t / (1.0 + t) + 4.0 * (1.0 + t).ln() / s) / (s * s);
        assert!((duhamel_integral(2.0, 2.0, t) - exact).abs() < 1e-10);
    }
}
