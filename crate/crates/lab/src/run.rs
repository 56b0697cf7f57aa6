//! Subcommand pipelines and the run manifest.

use std::time::Instant;

use rieszflow_core::decay::{
    check_rate, fit_decay, run_linear, DecayFit, NormTimeSeries, Provenance, Quantity, Verdict,
};
use rieszflow_core::solver::{integrate, make_data, xt_norm, XtNorm};
use rieszflow_core::theory::{admissibility, AdmissibilityReport};
use rieszflow_core::{propagate_linear, transform_forward, transform_inverse, Outcome};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{Emit, RunConfig, Subcommand};
use crate::error::{exit, LabResult};
use crate::io::{norms_csv, trajectory_csv, Outputs};
use crate::oracle::oracle_suite;
use crate::sweep::{region_csv, region_table, sweep, sweep_csv};

pub const MANIFEST: &str = "manifest.json";

/// SHA-256 of the JSON echo of the effective config.
pub fn config_hash(config: &RunConfig) -> LabResult<String> {
    let bytes = serde_json::to_vec(config)?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    core_version: &'static str,
    subcommand: Subcommand,
    config: &'a RunConfig,
    config_hash: String,
    wall_time_s: f64,
    exit_status: i32,
    outputs: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RateRecord {
    pub quantity: Quantity,
    pub fit: Option<DecayFit>,
    pub verdict: Option<Verdict>,
    pub error: Option<String>,
}

#[derive(Debug, Serialize)]
struct RunReport<'a> {
    outcome: &'a Outcome,
    label: &'static str,
    provenance: &'a Provenance,
    rates: Vec<RateRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    xt_norm: Option<XtNorm>,
}

/// Result of a dispatched run.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub exit_code: i32,
    pub outputs: Outputs,
    pub config_hash: String,
}

/// Fits and checks every rated quantity; failures are recorded, not raised.
pub fn rate_records(series: &NormTimeSeries, config: &RunConfig) -> Vec<RateRecord> {
    let window = Some((config.fit_start, config.fit_end));
    Quantity::RATED
        .into_iter()
        .map(|q| {
            let result = fit_decay(series, q, window)
                .and_then(|fit| Ok((fit, check_rate(&fit, &series.params, q, config.tolerance)?)));
            match result {
                Ok((fit, verdict)) => RateRecord {
                    quantity: q,
                    fit: Some(fit),
                    verdict: Some(verdict),
                    error: None,
                },
                Err(e) => RateRecord {
                    quantity: q,
                    fit: None,
                    verdict: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}

fn linear(config: &RunConfig, out: &mut Outputs) -> LabResult<i32> {
    let solver = config.solver();
    let series = run_linear(&solver)?;
    if config.emits(Emit::Csv) {
        out.text("norms.csv", &norms_csv(&series))?;
        out.text(
            "trajectory.csv",
            &trajectory_csv(&series.times, &series.norms, &series.params),
        )?;
    }
    if config.emits(Emit::Json) {
        out.json(
            "report.json",
            &RunReport {
                outcome: &series.outcome,
                label: series.outcome.label(),
                provenance: &series.provenance,
                rates: rate_records(&series, config),
                xt_norm: None,
            },
        )?;
    }
    if config.emits(Emit::Fields) {
        let u1 = make_data(&solver)?;
        let (u, ut) =
            propagate_linear(&transform_forward(&u1)?, solver.params.sigma, solver.t_end)?;
        out.field("u1.bin", &u1)?;
        out.field("u_final.bin", &transform_inverse(&u)?)?;
        out.field("ut_final.bin", &transform_inverse(&ut)?)?;
    }
    Ok(exit::SUCCESS)
}

fn semilinear(config: &RunConfig, out: &mut Outputs) -> LabResult<i32> {
    let solver = config.solver();
    let traj = integrate(&solver)?;
    let series = NormTimeSeries {
        times: traj.times.clone(),
        norms: traj.norms.clone(),
        params: traj.params,
        grid: traj.grid,
        provenance: Provenance {
            config_hash: solver.fingerprint(),
            admissibility: Some(admissibility(&solver.params)),
        },
        outcome: traj.outcome,
    };
    if config.emits(Emit::Csv) {
        out.text("norms.csv", &norms_csv(&series))?;
        out.text(
            "trajectory.csv",
            &trajectory_csv(&traj.times, &traj.norms, &traj.params),
        )?;
    }
    if config.emits(Emit::Json) {
        out.json(
            "report.json",
            &RunReport {
                outcome: &series.outcome,
                label: series.outcome.label(),
                provenance: &series.provenance,
                rates: rate_records(&series, config),
                xt_norm: Some(xt_norm(&traj, &traj.params)),
            },
        )?;
    }
    if config.emits(Emit::Fields) {
        out.field("u1.bin", &make_data(&solver)?)?;
        if let Some(last) = &traj.final_state {
            out.field("u_final.bin", &transform_inverse(&last.u)?)?;
            out.field("ut_final.bin", &transform_inverse(&last.ut)?)?;
        }
    }
    Ok(if traj.outcome.is_growth() {
        exit::GROWTH_DETECTED
    } else {
        exit::SUCCESS
    })
}

fn admissible(config: &RunConfig, out: &mut Outputs) -> LabResult<i32> {
    let report: AdmissibilityReport = admissibility(&config.model);
    if config.emits(Emit::Json) {
        out.json("admissibility.json", &report)?;
    }
    if config.emits(Emit::Csv) {
        let m = &config.model;
        let region = region_table(
            m.sigma,
            m.alpha,
            m.m,
            (config.region_p_min, config.region_p_max),
            config.region_p_count,
            config.region_n_max,
        );
        out.text("region.csv", &region_csv(&region))?;
    }
    Ok(exit::SUCCESS)
}

fn sweep_run(config: &RunConfig, out: &mut Outputs) -> LabResult<i32> {
    let rows = sweep(
        &config.solver(),
        config.sweep_param,
        &config.sweep_values,
        config.sweep_mode,
        (config.fit_start, config.fit_end),
        config.tolerance,
    );
    if config.emits(Emit::Csv) {
        out.text("sweep.csv", &sweep_csv(&rows))?;
    }
    if config.emits(Emit::Json) {
        out.json("sweep.json", &rows)?;
    }
    Ok(exit::SUCCESS)
}

fn oracle_test(config: &RunConfig, out: &mut Outputs) -> LabResult<i32> {
    let report = oracle_suite()?;
    if config.emits(Emit::Json) {
        out.json("oracle.json", &report)?;
    }
    Ok(if report.pass {
        exit::SUCCESS
    } else {
        exit::INTERNAL
    })
}

/// Runs the pipeline of `config.subcommand`, then writes the manifest.
/// Every file lands under `config.output_dir`.
pub fn dispatch(config: &RunConfig) -> LabResult<RunSummary> {
    config.validate()?;
    let start = Instant::now();
    let hash = config_hash(config)?;
    let mut out = Outputs::new(&config.output_dir);
    let exit_code = match config.subcommand {
        Subcommand::Linear => linear(config, &mut out)?,
        Subcommand::Semilinear => semilinear(config, &mut out)?,
        Subcommand::Admissible => admissible(config, &mut out)?,
        Subcommand::Sweep => sweep_run(config, &mut out)?,
        Subcommand::OracleTest => oracle_test(config, &mut out)?,
    };
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        core_version: env!("CARGO_PKG_VERSION"),
        subcommand: config.subcommand,
        config,
        config_hash: hash.clone(),
        wall_time_s: start.elapsed().as_secs_f64(),
        exit_status: exit_code,
        outputs: out.files.iter().map(|p| p.display().to_string()).collect(),
    };
    out.json(MANIFEST, &manifest)?;
    Ok(RunSummary {
        exit_code,
        outputs: out,
        config_hash: hash,
    })
}
