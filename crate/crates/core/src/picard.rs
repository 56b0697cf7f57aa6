//! Fixed-point form of the semilinear problem.
//!
//! The solution map is `O(u) = u^L + D(u)` where `u^L` is the linear flow of
//! the data and
//!
//! ```text
//! D(u)(t) = ∫₀^t K1(t - τ) F(I_α(|u(τ)|^p)) dτ
//! ```
//!
//! per Fourier mode. `D` is evaluated by the trapezoid rule over the stored
//! snapshots of a trajectory, independently of the time stepper.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{RealField, SpectralField, SpectralTransform};
use crate::propagator::{kernels_unchecked, propagate_linear};
use crate::solver::{
    xt_norm_of_states, Nonlinearity, NormProbe, Outcome, SolverConfig, State, Trajectory, XtNorm,
};

/// Coarsest snapshot spacing accepted by the quadrature.
pub const MAX_SNAPSHOT_SPACING: f64 = 0.05;

/// Longest horizon accepted for Picard iteration.
pub const MAX_PICARD_HORIZON: f64 = 10.0;

fn uniform_spacing(times: &[f64]) -> Result<f64> {
    if times.len() < 2 {
        return Ok(0.0);
    }
    let h = times[1] - times[0];
    if times[0] != 0.0 || h <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "times",
            value: times[0],
            expected: "uniform samples starting at 0",
        });
    }
    for (i, t) in times.iter().enumerate() {
        if (t - i as f64 * h).abs() > 1e-9 * t.max(1.0) {
            return Err(Error::InvalidParameter {
                name: "times",
                value: *t,
                expected: "uniform samples starting at 0",
            });
        }
    }
    if h > MAX_SNAPSHOT_SPACING * (1.0 + 1e-12) {
        return Err(Error::InsufficientDensity {
            spacing: h,
            limit: MAX_SNAPSHOT_SPACING,
        });
    }
    Ok(h)
}

/// `D(u)` at every snapshot time of `(times, states)`.
pub fn duhamel_part(times: &[f64], states: &[State], config: &SolverConfig) -> Result<Vec<State>> {
    if states.len() != times.len() || states.is_empty() {
        return Err(Error::MissingStates);
    }
    let h = uniform_spacing(times)?;
    let grid = config.grid;
    let params = config.params;
    let mut engine = Nonlinearity::new(grid, &params, config.dealias)?;
    let mut forcing = Vec::with_capacity(states.len());
    for (t, s) in times.iter().zip(states) {
        let mut f = Vec::new();
        if !engine.eval(&s.u.coeffs, &mut f)? {
            return Err(Error::BlowUp { time: *t });
        }
        forcing.push(f);
    }

    let steps = times.len();
    let zero = Complex64::new(0.0, 0.0);
    let mut du = vec![vec![zero; grid.len()]; steps];
    let mut dv = vec![vec![zero; grid.len()]; steps];
    let probe = NormProbe::new(grid, &params);
    let mut k1 = vec![0.0; steps];
    let mut dk1 = vec![0.0; steps];
    for (q, &k) in probe.rates().iter().enumerate() {
        if forcing.iter().all(|f| f[q] == zero) {
            continue;
        }
        for (lag, (a, b)) in k1.iter_mut().zip(dk1.iter_mut()).enumerate() {
            let kern = kernels_unchecked(k, lag as f64 * h);
            *a = kern.k1;
            *b = kern.dk1;
        }
        for i in 1..steps {
            let mut su = zero;
            let mut sv = zero;
            for (j, f) in forcing.iter().enumerate().take(i + 1) {
                let w = if j == 0 || j == i { 0.5 * h } else { h };
                let fj = f[q] * w;
                su += fj * k1[i - j];
                sv += fj * dk1[i - j];
            }
            du[i][q] = su;
            dv[i][q] = sv;
        }
    }
    Ok(du
        .into_iter()
        .zip(dv)
        .map(|(u, v)| State {
            u: SpectralField { grid, coeffs: u },
            ut: SpectralField { grid, coeffs: v },
        })
        .collect())
}

fn check_horizon(times: &[f64]) -> Result<()> {
    let t_end = times.last().copied().unwrap_or(0.0);
    if t_end > MAX_PICARD_HORIZON * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter {
            name: "t_end",
            value: t_end,
            expected: "[0, 10] for Picard iteration",
        });
    }
    Ok(())
}

/// Linear flow of `u1` at each time.
pub fn linear_states(times: &[f64], u1: &RealField, config: &SolverConfig) -> Result<Vec<State>> {
    let u1_hat = SpectralTransform::new(config.grid)?.forward(u1)?;
    times
        .iter()
        .map(|&t| {
            let (u, ut) = propagate_linear(&u1_hat, config.params.sigma, t)?;
            Ok(State { u, ut })
        })
        .collect()
}

fn add(a: &State, b: &State) -> State {
    let sum = |x: &SpectralField, y: &SpectralField| SpectralField {
        grid: x.grid,
        coeffs: x.coeffs.iter().zip(&y.coeffs).map(|(p, q)| p + q).collect(),
    };
    State {
        u: sum(&a.u, &b.u),
        ut: sum(&a.ut, &b.ut),
    }
}

fn difference(a: &[State], b: &[State]) -> Vec<State> {
    a.iter()
        .zip(b)
        .map(|(x, y)| State {
            u: crate::solver::sub(&x.u, &y.u),
            ut: crate::solver::sub(&x.ut, &y.ut),
        })
        .collect()
}

fn trajectory_of(times: &[f64], states: Vec<State>, config: &SolverConfig) -> Result<Trajectory> {
    let grid = config.grid;
    let probe = NormProbe::new(grid, &config.params);
    let transform = SpectralTransform::new(grid)?;
    let mut scratch = Vec::new();
    let mut physical = Vec::new();
    let mut norms = Vec::with_capacity(states.len());
    for s in &states {
        transform.inverse_into(&s.u.coeffs, &mut scratch, &mut physical)?;
        norms.push(probe.record(&s.u.coeffs, &s.ut.coeffs, &physical));
    }
    Ok(Trajectory {
        grid,
        params: config.params,
        times: times.to_vec(),
        norms,
        final_state: states.last().cloned(),
        states,
        outcome: Outcome::Completed,
    })
}

/// `O(u)` at every snapshot of `input`, which must store states at every step
/// with spacing at most [`MAX_SNAPSHOT_SPACING`] and end by [`MAX_PICARD_HORIZON`].
pub fn picard_apply(
    input: &Trajectory,
    u1: &RealField,
    config: &SolverConfig,
) -> Result<Trajectory> {
    if !input.has_states() {
        return Err(Error::MissingStates);
    }
    check_horizon(&input.times)?;
    let linear = linear_states(&input.times, u1, config)?;
    let duhamel = duhamel_part(&input.times, &input.states, config)?;
    let states = linear
        .iter()
        .zip(&duhamel)
        .map(|(l, d)| add(l, d))
        .collect();
    trajectory_of(&input.times, states, config)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PicardReport {
    /// `d_k = ‖u^k - u^{k-1}‖_X` for `k = 1, 2, ...`, starting from `u^0 = 0`.
    pub distances: Vec<f64>,
    /// `d_{k+1} / d_k`; a zero distance over zero counts as ratio 0.
    pub ratios: Vec<f64>,
    /// X(T) norm of the last iterate.
    pub last_norm: XtNorm,
}

impl PicardReport {
    pub fn max_ratio(&self) -> f64 {
        self.ratios.iter().copied().fold(0.0, f64::max)
    }
}

/// Runs `iterations` Picard steps from zero on the uniform times
/// `0, dt, ..., t_end` of `config`.
///
/// Successive differences are measured on the Duhamel parts, since the shared
/// linear part cancels exactly.
pub fn picard_contraction(
    u1: &RealField,
    config: &SolverConfig,
    iterations: usize,
) -> Result<PicardReport> {
    config.validate()?;
    let steps = config.steps();
    let times: Vec<f64> = (0..=steps).map(|i| i as f64 * config.dt).collect();
    check_horizon(&times)?;
    uniform_spacing(&times)?;
    let params = config.params;
    let linear = linear_states(&times, u1, config)?;

    let mut distances = Vec::with_capacity(iterations);
    let first = xt_norm_of_states(&times, &linear, &params)?;
    distances.push(first.value);
    let mut current = linear.clone();
    let mut last_norm = first;
    let mut prev_duhamel: Option<Vec<State>> = None;
    for _ in 1..iterations {
        let duhamel = duhamel_part(&times, &current, config)?;
        let step = match &prev_duhamel {
            Some(prev) => difference(&duhamel, prev),
            None => duhamel.clone(),
        };
        distances.push(xt_norm_of_states(&times, &step, &params)?.value);
        current = linear
            .iter()
            .zip(&duhamel)
            .map(|(l, d)| add(l, d))
            .collect();
        last_norm = xt_norm_of_states(&times, &current, &params)?;
        prev_duhamel = Some(duhamel);
    }
    let ratios = distances
        .windows(2)
        .map(|w| if w[1] == 0.0 { 0.0 } else { w[1] / w[0] })
        .collect();
    Ok(PicardReport {
        distances,
        ratios,
        last_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::params::ModelParams;
    use crate::solver::{integrate, make_data, xt_distance, xt_norm};

    fn config(amplitude: f64) -> SolverConfig {
        let params = ModelParams::new(1, 1.0, 0.5, 4.0, 1.0).unwrap();
        let grid = GridSpec::new(1, 512, 100.0).unwrap();
        let mut c = SolverConfig::new(params, grid, 0.02, 2.0);
        c.amplitude = amplitude;
        c.keep_states = true;
        c
    }

    #[test]
    fn zero_input_gives_linear_flow() {
        let c = config(0.5);
        let u1 = make_data(&c).unwrap();
        let mut lin = c.clone();
        lin.nonlinear = false;
        let linear = integrate(&lin).unwrap();
        let zero = Trajectory {
            states: linear.times.iter().map(|_| State::zeros(c.grid)).collect(),
            ..linear.clone()
        };
        let out = picard_apply(&zero, &u1, &c).unwrap();
        let d = xt_distance(&out, &linear, &c.params).unwrap();
        assert!(d.value <= 1e-10 * xt_norm(&linear, &c.params).value);
    }

    #[test]
    fn solver_output_is_nearly_fixed() {
        let c = config(0.5);
        let u1 = make_data(&c).unwrap();
        let traj = integrate(&c).unwrap();
        let image = picard_apply(&traj, &u1, &c).unwrap();
        let d = xt_distance(&image, &traj, &c.params).unwrap();
        assert!(d.value <= 0.05 * xt_norm(&traj, &c.params).value);
    }

    #[test]
    fn coarse_or_stateless_input_is_rejected() {
        let mut c = config(0.01);
        c.dt = 0.1;
        let u1 = make_data(&c).unwrap();
        let traj = integrate(&c).unwrap();
        assert!(matches!(
            picard_apply(&traj, &u1, &c),
            Err(Error::InsufficientDensity { .. })
        ));
        c.keep_states = false;
        c.dt = 0.02;
        let traj = integrate(&c).unwrap();
        assert!(matches!(
            picard_apply(&traj, &u1, &c),
            Err(Error::MissingStates)
        ));
    }

    #[test]
    fn contraction_ratio_grows_with_amplitude() {
        let mut leading = Vec::new();
        for eps in [0.001, 0.01, 0.1] {
            let c = config(eps);
            let u1 = make_data(&c).unwrap();
            let r = picard_contraction(&u1, &c, 4).unwrap();
            assert!(r.max_ratio() < 1.0);
            leading.push(r.ratios[0]);
        }
        assert!(leading[0] < leading[1] && leading[1] < leading[2]);
    }
}
