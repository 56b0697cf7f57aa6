//! Closed forms checked against their independent references.

use std::f64::consts::PI;

use rieszflow_core::ode_oracle::ode_oracle;
use rieszflow_core::riesz_oracle::riesz_oracle;
use rieszflow_core::symbol::riesz_potential;
use rieszflow_core::{kernels, GridSpec, RealField};
use serde::Serialize;

use crate::error::LabResult;

pub const KERNEL_TOLERANCE: f64 = 1e-8;
pub const RIESZ_TOLERANCE: f64 = 0.02;

pub const KERNEL_RATES: [f64; 11] = [
    0.0,
    1e-3,
    0.5,
    0.99,
    1.0 - 1e-6,
    1.0,
    1.0 + 1e-6,
    1.01,
    2.0,
    10.0,
    1e4,
];
pub const KERNEL_TIMES: [f64; 3] = [0.1, 1.0, 10.0];
pub const RIESZ_ORDERS: [f64; 3] = [0.25, 0.5, 0.75];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelCase {
    pub k: f64,
    pub t: f64,
    /// Largest relative error over `A, K1, ∂tA, ∂tK1`. `∂tK1 = e^{-kt} - K1`
    /// changes sign at `t = ln k/(k-1)`, so its error is taken relative to
    /// `e^{-kt} + K1`, the size of the two terms it cancels.
    pub max_rel_error: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RieszData {
    /// `(1 - x²) e^{-x²/2} / √(2π)`; compared as is.
    MeanZero,
    /// `e^{-x²/2} / √(2π)`; compared after removing the best constant offset,
    /// since the multiplier drops the zero mode.
    UnitGaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RieszCase {
    pub alpha: f64,
    pub data: RieszData,
    /// Relative L² discrepancy on `|x| ≤ L/4`.
    pub discrepancy: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub kernels: Vec<KernelCase>,
    pub riesz: Vec<RieszCase>,
    pub pass: bool,
}

fn rel_error(x: f64, reference: f64) -> f64 {
    if reference == 0.0 {
        x.abs()
    } else {
        (x - reference).abs() / reference.abs()
    }
}

pub fn kernel_case(k: f64, t: f64) -> LabResult<KernelCase> {
    let c = kernels(k, t)?;
    let o = ode_oracle(k, t)?;
    let dk1_scale = (-k * t).exp() + o.k1.abs();
    let max_rel_error = [(c.a, o.a), (c.k1, o.k1), (c.da, o.da)]
        .into_iter()
        .map(|(x, y)| rel_error(x, y))
        .fold((c.dk1 - o.dk1).abs() / dk1_scale, f64::max);
    Ok(KernelCase {
        k,
        t,
        max_rel_error,
        pass: max_rel_error <= KERNEL_TOLERANCE,
    })
}

pub fn kernel_suite() -> LabResult<Vec<KernelCase>> {
    KERNEL_RATES
        .iter()
        .flat_map(|&k| KERNEL_TIMES.iter().map(move |&t| kernel_case(k, t)))
        .collect()
}

/// Grid of the Riesz comparison: n = 1, L = 200, N = 4096.
pub fn riesz_grid() -> GridSpec {
    GridSpec {
        dim: 1,
        points_per_axis: 4096,
        box_length: 200.0,
    }
}

pub fn riesz_case(grid: GridSpec, alpha: f64, data: RieszData) -> LabResult<RieszCase> {
    let norm = 1.0 / (2.0 * PI).sqrt();
    let f = RealField::from_fn(grid, |x| {
        let g = norm * (-0.5 * x[0] * x[0]).exp();
        match data {
            RieszData::MeanZero => (1.0 - x[0] * x[0]) * g,
            RieszData::UnitGaussian => g,
        }
    });
    let spectral = riesz_potential(&f, alpha)?;
    let direct = riesz_oracle(&f, alpha)?;
    let central: Vec<usize> = (0..grid.len())
        .filter(|&i| grid.point(i)[0].abs() <= 0.25 * grid.box_length)
        .collect();
    let offset = match data {
        RieszData::MeanZero => 0.0,
        RieszData::UnitGaussian => {
            central
                .iter()
                .map(|&i| direct.values[i] - spectral.values[i])
                .sum::<f64>()
                / central.len() as f64
        }
    };
    let (mut diff, mut reference) = (0.0, 0.0);
    for &i in &central {
        let d = spectral.values[i] + offset - direct.values[i];
        diff += d * d;
        reference += direct.values[i] * direct.values[i];
    }
    let discrepancy = (diff / reference).sqrt();
    Ok(RieszCase {
        alpha,
        data,
        discrepancy,
        pass: discrepancy <= RIESZ_TOLERANCE,
    })
}

pub fn riesz_suite() -> LabResult<Vec<RieszCase>> {
    let grid = riesz_grid();
    let mut out = Vec::new();
    for alpha in RIESZ_ORDERS {
        for data in [RieszData::MeanZero, RieszData::UnitGaussian] {
            out.push(riesz_case(grid, alpha, data)?);
        }
    }
    Ok(out)
}

pub fn oracle_suite() -> LabResult<OracleReport> {
    let kernels = kernel_suite()?;
    let riesz = riesz_suite()?;
    let pass = kernels.iter().all(|c| c.pass) && riesz.iter().all(|c| c.pass);
    Ok(OracleReport {
        kernels,
        riesz,
        pass,
    })
}
