//! Parameter sweeps and (p, n) admissibility tables.

use std::fmt::Write as _;

use rayon::prelude::*;
use rieszflow_core::decay::{check_rate, fit_decay, run_linear, run_semilinear, Quantity};
use rieszflow_core::theory::{admissibility, AdmissibilityReport};
use rieszflow_core::{ModelParams, SolverConfig};
use serde::Serialize;

use crate::config::{SweepMode, SweepParam};
use crate::io::float;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateCell {
    pub quantity: Quantity,
    pub slope: f64,
    pub stderr: f64,
    pub theory: f64,
    pub pass: bool,
    pub sharp: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub params: ModelParams,
    pub amplitude: f64,
    /// `decayed` or `growth-detected` when the run finished.
    pub label: Option<String>,
    pub rates: Vec<RateCell>,
    pub admissibility: Option<AdmissibilityReport>,
    /// First failure of this row (invalid point, failed run or fit).
    pub error: Option<String>,
}

fn with_value(base: &SolverConfig, param: SweepParam, value: f64) -> SolverConfig {
    let mut c = base.clone();
    match param {
        SweepParam::N => {
            c.params.n = value as usize;
            c.grid.dim = value as usize;
        }
        SweepParam::Sigma => c.params.sigma = value,
        SweepParam::Alpha => c.params.alpha = value,
        SweepParam::P => c.params.p = value,
        SweepParam::M => c.params.m = value,
        SweepParam::Amplitude => c.amplitude = value,
    }
    c
}

fn run_row(
    config: &SolverConfig,
    value: f64,
    mode: SweepMode,
    window: (f64, f64),
    tol: f64,
) -> SweepRow {
    let mut row = SweepRow {
        value,
        params: config.params,
        amplitude: config.amplitude,
        label: None,
        rates: Vec::new(),
        admissibility: None,
        error: None,
    };
    if let Err(e) = config.params.validate() {
        row.error = Some(e.to_string());
        return row;
    }
    row.admissibility = Some(admissibility(&config.params));
    let series = match mode {
        SweepMode::Linear => run_linear(config),
        SweepMode::Semilinear => run_semilinear(config),
    };
    let series = match series {
        Ok(s) => s,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    row.label = Some(series.outcome.label().to_string());
    for q in Quantity::RATED {
        let cell = fit_decay(&series, q, Some(window)).and_then(|fit| {
            let v = check_rate(&fit, &config.params, q, tol)?;
            Ok(RateCell {
                quantity: q,
                slope: fit.slope,
                stderr: fit.stderr,
                theory: v.theory,
                pass: v.pass,
                sharp: v.sharp,
            })
        });
        match cell {
            Ok(c) => row.rates.push(c),
            Err(e) => {
                row.error
                    .get_or_insert_with(|| format!("{}: {e}", q.name()));
            }
        }
    }
    row
}

/// Runs one row per value in parallel; rows come back sorted by value.
pub fn sweep(
    base: &SolverConfig,
    param: SweepParam,
    values: &[f64],
    mode: SweepMode,
    window: (f64, f64),
    tol: f64,
) -> Vec<SweepRow> {
    let mut rows: Vec<SweepRow> = values
        .par_iter()
        .map(|&v| run_row(&with_value(base, param, v), v, mode, window, tol))
        .collect();
    rows.sort_by(|a, b| a.value.total_cmp(&b.value));
    rows
}

fn flag(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("n,sigma,alpha,p,m,amplitude,label");
    for q in Quantity::RATED {
        let q = q.name();
        let _ = write!(s, ",slope_{q},stderr_{q},theory_{q},pass_{q},sharp_{q}");
    }
    s.push_str(",overall,cond_lower,cond_upper,dim_branch_ok,cond_strict,error\n");
    for r in rows {
        let p = &r.params;
        let _ = write!(
            s,
            "{},{},{},{},{},{},{}",
            p.n,
            float(p.sigma),
            float(p.alpha),
            float(p.p),
            float(p.m),
            float(r.amplitude),
            r.label.as_deref().unwrap_or("")
        );
        for q in Quantity::RATED {
            match r.rates.iter().find(|c| c.quantity == q) {
                Some(c) => {
                    let _ = write!(
                        s,
                        ",{},{},{},{},{}",
                        float(c.slope),
                        float(c.stderr),
                        float(c.theory),
                        flag(c.pass),
                        flag(c.sharp)
                    );
                }
                None => s.push_str(",,,,,"),
            }
        }
        match &r.admissibility {
            Some(a) => {
                let _ = write!(
                    s,
                    ",{},{},{},{},{}",
                    flag(a.overall),
                    flag(a.cond_lower.holds),
                    flag(a.cond_upper.holds),
                    flag(a.dim_branch_ok),
                    flag(a.cond_strict.holds)
                );
            }
            None => s.push_str(",,,,,"),
        }
        let err = r
            .error
            .as_deref()
            .unwrap_or("")
            .replace(['"', ',', '\n'], " ");
        let _ = writeln!(s, ",{err}");
    }
    s
}

/// Admissibility at every `(p, n)` with `p` on a uniform grid and
/// `n = 1..=n_max`; points with `α ≥ n` are skipped.
pub fn region_table(
    sigma: f64,
    alpha: f64,
    m: f64,
    p_range: (f64, f64),
    p_count: usize,
    n_max: usize,
) -> Vec<AdmissibilityReport> {
    let ps: Vec<f64> = match p_count {
        0 => Vec::new(),
        1 => vec![p_range.0],
        k => (0..k)
            .map(|i| p_range.0 + (p_range.1 - p_range.0) * i as f64 / (k - 1) as f64)
            .collect(),
    };
    (1..=n_max)
        .flat_map(|n| {
            ps.iter().map(move |&p| ModelParams {
                n,
                sigma,
                alpha,
                p,
                m,
            })
        })
        .filter(|params| params.validate().is_ok())
        .map(|params| admissibility(&params))
        .collect()
}

pub fn region_csv(reports: &[AdmissibilityReport]) -> String {
    let mut s = String::from(
        "n,sigma,alpha,p,m,p_crit,lower_bound,upper_bound,strict_bound,dim_bound,\
         cond_lower,cond_upper,dim_branch_ok,cond_strict,gn_theta_s2,gn_theta_s2_ok,\
         gn_theta_sm,gn_theta_sm_ok,overall\n",
    );
    for r in reports {
        let p = &r.params;
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            p.n,
            float(p.sigma),
            float(p.alpha),
            float(p.p),
            float(p.m),
            float(r.p_crit),
            float(r.cond_lower.bound),
            float(r.cond_upper.bound),
            float(r.cond_strict.bound),
            float(r.dim_bound),
            flag(r.cond_lower.holds),
            flag(r.cond_upper.holds),
            flag(r.dim_branch_ok),
            flag(r.cond_strict.holds),
            float(r.gn_theta_s2.value),
            flag(r.gn_theta_s2.in_range),
            float(r.gn_theta_sm.value),
            flag(r.gn_theta_sm.in_range),
            flag(r.overall)
        );
    }
    s
}
