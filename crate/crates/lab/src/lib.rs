//! Experiment harness around `rieszflow-core`: flat run configs, CSV/JSON and
//! binary field formats, parallel parameter sweeps, the oracle suite and the
//! `rieszflow` command-line driver.
//!
//! Exit statuses of the driver:
//!
//! | status | meaning |
//! |---|---|
//! | 0 | success |
//! | 1 | internal error, or a failed oracle suite |
//! | 2 | invalid config or parameters |
//! | 3 | semilinear run stopped on detected growth |

pub mod config;
pub mod error;
pub mod io;
pub mod oracle;
pub mod run;
pub mod sweep;

pub use config::{parse_config, RunConfig, Subcommand};
pub use error::{exit, LabError, LabResult};
pub use run::{dispatch, RunSummary};
