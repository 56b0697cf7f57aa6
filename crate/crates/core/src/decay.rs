//! Norm time series from linear and semilinear runs, log–log slope fits and
//! comparison against the theoretical decay exponents.

use alloc::vec::Vec;

use crate::error::{check_param, Error, Result};
use crate::field::SpectralTransform;
use crate::grid::GridSpec;
use crate::params::ModelParams;
use crate::propagator::{decay_exponent, propagate_linear};
use crate::solver::{integrate, make_data, NormProbe, NormRecord, Outcome, SolverConfig};
use crate::theory::{admissibility, AdmissibilityReport};

/// Minimum number of samples inside a fit window.
pub const MIN_FIT_SAMPLES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Quantity {
    #[cfg_attr(feature = "serde", serde(rename = "u_L2"))]
    UL2,
    #[cfg_attr(feature = "serde", serde(rename = "dtu_L2"))]
    DtuL2,
    #[cfg_attr(feature = "serde", serde(rename = "Hsigma_semi"))]
    HsigmaSemi,
    #[cfg_attr(feature = "serde", serde(rename = "Lm"))]
    Lm,
}

impl Quantity {
    pub const ALL: [Quantity; 4] = [Self::UL2, Self::DtuL2, Self::HsigmaSemi, Self::Lm];
    /// Quantities with a theoretical rate.
    pub const RATED: [Quantity; 3] = [Self::UL2, Self::DtuL2, Self::HsigmaSemi];

    pub fn name(&self) -> &'static str {
        match self {
            Self::UL2 => "u_L2",
            Self::DtuL2 => "dtu_L2",
            Self::HsigmaSemi => "Hsigma_semi",
            Self::Lm => "Lm",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|q| q.name() == name)
    }

    pub fn of(&self, rec: &NormRecord) -> f64 {
        match self {
            Self::UL2 => rec.l2,
            Self::DtuL2 => rec.dt_l2,
            Self::HsigmaSemi => rec.hsigma,
            Self::Lm => rec.lm,
        }
    }

    /// Exponent predicted by the linear estimates, if any.
    pub fn theory(&self, params: &ModelParams) -> Result<f64> {
        match self {
            Self::UL2 => Ok(decay_exponent(params, 0.0, 0)),
            Self::DtuL2 => Ok(decay_exponent(params, 0.0, 1)),
            Self::HsigmaSemi => Ok(decay_exponent(params, params.sigma, 0)),
            Self::Lm => Err(Error::UnsupportedQuantity(self.name())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Provenance {
    pub config_hash: u64,
    /// Attached to semilinear runs only.
    pub admissibility: Option<AdmissibilityReport>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NormTimeSeries {
    pub times: Vec<f64>,
    pub norms: Vec<NormRecord>,
    pub params: ModelParams,
    pub grid: GridSpec,
    pub provenance: Provenance,
    pub outcome: Outcome,
}

impl NormTimeSeries {
    pub fn values(&self, q: Quantity) -> Vec<f64> {
        self.norms.iter().map(|r| q.of(r)).collect()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Linear flow evaluated exactly at each sample time of `config`.
pub fn run_linear(config: &SolverConfig) -> Result<NormTimeSeries> {
    config.validate()?;
    let grid = config.grid;
    let params = config.params;
    let transform = SpectralTransform::new(grid)?;
    let u1_hat = transform.forward(&make_data(config)?)?;
    let probe = NormProbe::new(grid, &params);
    let mut times = Vec::new();
    let mut norms = Vec::new();
    let mut scratch = Vec::new();
    let mut physical = Vec::new();
    for step in config.sample_steps() {
        let t = step as f64 * config.dt;
        let (u, ut) = propagate_linear(&u1_hat, params.sigma, t)?;
        transform.inverse_into(&u.coeffs, &mut scratch, &mut physical)?;
        times.push(t);
        norms.push(probe.record(&u.coeffs, &ut.coeffs, &physical));
    }
    Ok(NormTimeSeries {
        times,
        norms,
        params,
        grid,
        provenance: Provenance {
            config_hash: config.fingerprint(),
            admissibility: None,
        },
        outcome: Outcome::Completed,
    })
}

/// Semilinear run with the admissibility report attached. Runaway growth
/// truncates the series and is carried in `outcome`.
pub fn run_semilinear(config: &SolverConfig) -> Result<NormTimeSeries> {
    let traj = integrate(config)?;
    Ok(NormTimeSeries {
        times: traj.times,
        norms: traj.norms,
        params: config.params,
        grid: config.grid,
        provenance: Provenance {
            config_hash: config.fingerprint(),
            admissibility: Some(admissibility(&config.params)),
        },
        outcome: traj.outcome,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecayFit {
    pub quantity: Quantity,
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub window: (f64, f64),
    pub samples: usize,
    pub r_squared: f64,
}

/// Default window `[max(1, 0.1·t_end), t_end]`.
pub fn default_window(series: &NormTimeSeries) -> (f64, f64) {
    let t_end = series.times.last().copied().unwrap_or(0.0);
    ((0.1 * t_end).max(1.0), t_end)
}

/// Least-squares line through `(log(1+t), log(norm))` over the window.
pub fn fit_decay(
    series: &NormTimeSeries,
    quantity: Quantity,
    window: Option<(f64, f64)>,
) -> Result<DecayFit> {
    let (lo, hi) = window.unwrap_or_else(|| default_window(series));
    check_param("window start", lo, lo >= 1.0, "[1, ∞)")?;
    check_param("window end", hi, hi >= lo, "[start, ∞)")?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (t, rec) in series.times.iter().zip(&series.norms) {
        if *t < lo || *t > hi {
            continue;
        }
        let v = quantity.of(rec);
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::NonPositiveNorm { time: *t });
        }
        xs.push(libm::log1p(*t));
        ys.push(libm::log(v));
    }
    let samples = xs.len();
    if samples < MIN_FIT_SAMPLES {
        return Err(Error::FitWindow {
            lo,
            hi,
            samples,
            required: MIN_FIT_SAMPLES,
        });
    }
    let (slope, intercept, stderr, r_squared) = least_squares(&xs, &ys);
    Ok(DecayFit {
        quantity,
        slope,
        intercept,
        stderr,
        window: (lo, hi),
        samples,
        r_squared,
    })
}

/// `(slope, intercept, slope standard error, r²)`.
fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let dx = x - mx;
        let dy = y - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let stderr = libm::sqrt(ssr / (n - 2.0) / sxx);
    let r_squared = if syy > 0.0 {
        (1.0 - ssr / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    (slope, intercept, stderr, r_squared)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Verdict {
    pub quantity: Quantity,
    pub slope: f64,
    pub theory: f64,
    pub tolerance: f64,
    /// Decays at least as fast as the estimate allows: `slope ≤ theory + tol`.
    pub pass: bool,
    /// `|slope - theory| ≤ tol`.
    pub sharp: bool,
}

pub fn check_rate(
    fit: &DecayFit,
    params: &ModelParams,
    quantity: Quantity,
    tol: f64,
) -> Result<Verdict> {
    let theory = quantity.theory(params)?;
    Ok(Verdict {
        quantity,
        slope: fit.slope,
        theory,
        tolerance: tol,
        pass: fit.slope <= theory + tol,
        sharp: (fit.slope - theory).abs() <= tol,
    })
}
