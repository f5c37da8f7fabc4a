//! Scenario-driven front end for `qdsim-core`.
//!
//! A scenario file names one evolution kind and its parameters
//! ([`scenario`]); [`run::run`] executes it together with every oracle
//! cross-check available for that kind, and [`output`] writes the resulting
//! series as CSV and SVG.

// `!(x > 0.0)` is used deliberately so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod output;
pub mod run;
pub mod scenario;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

pub use error::{CliError, Result, ScenarioError};
pub use output::{emit_csv, emit_svg, render_svg, write_csv, PlotSpec};
pub use run::{run, Check, RunReport, SeriesTrajectory};
pub use scenario::{parse_scenario, serialize_scenario, Scenario, ScenarioKind, Value};

/// Scenarios shipped with the crate: `(file name, contents)`.
pub const SHIPPED: &[(&str, &str)] = &[
    ("eigenstate-probability-g4.scn", include_str!("../scenarios/eigenstate-probability-g4.scn")),
    ("eigenstate-probability-g5_5.scn", include_str!("../scenarios/eigenstate-probability-g5_5.scn")),
    ("eigenstate-probability-g5_95.scn", include_str!("../scenarios/eigenstate-probability-g5_95.scn")),
    ("eigenstate-probability-critical.scn", include_str!("../scenarios/eigenstate-probability-critical.scn")),
    ("eigenstate-probability-damped.scn", include_str!("../scenarios/eigenstate-probability-damped.scn")),
    ("single-lindblad.scn", include_str!("../scenarios/single-lindblad.scn")),
    ("single-lindblad-entropy.scn", include_str!("../scenarios/single-lindblad-entropy.scn")),
    ("structural-instability.scn", include_str!("../scenarios/structural-instability.scn")),
    ("jaynes-cummings.scn", include_str!("../scenarios/jaynes-cummings.scn")),
    ("bmt-e-half.scn", include_str!("../scenarios/bmt-e-half.scn")),
    ("bmt-e-pi.scn", include_str!("../scenarios/bmt-e-pi.scn")),
    ("neutrino-damping.scn", include_str!("../scenarios/neutrino-damping.scn")),
    ("neutrino-msw.scn", include_str!("../scenarios/neutrino-msw.scn")),
];

/// Command-line overrides shared by every job.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub step: Option<f64>,
    pub t_end: Option<f64>,
}

/// A parsed scenario with the name it is reported under.
#[derive(Debug, Clone)]
pub struct Job {
    pub name: String,
    pub scenario: Scenario,
}

/// Parses `text` and applies the overrides in `opts`.
pub fn load_job(name: &str, text: &str, opts: &RunOptions) -> std::result::Result<Job, ScenarioError> {
    let mut scenario = parse_scenario(text)?;
    if let Some(step) = opts.step {
        if !(step > 0.0 && step.is_finite()) {
            return Err(ScenarioError::Domain {
                line: None,
                key: "step".into(),
                message: format!("override must be positive, got {step}"),
            });
        }
        scenario.integrator.step = Some(step);
    }
    if let Some(t_end) = opts.t_end {
        if !(t_end >= 0.0 && t_end.is_finite()) {
            return Err(ScenarioError::Domain {
                line: None,
                key: "t_end".into(),
                message: format!("override must be non-negative, got {t_end}"),
            });
        }
        scenario.integrator.t_end = t_end;
    }
    Ok(Job {
        name: name.to_string(),
        scenario,
    })
}

fn output_paths(job: &Job, out_dir: &Path) -> Vec<PathBuf> {
    let out = &job.scenario.output;
    out.csv.iter().chain(out.svg.iter()).map(|p| out_dir.join(p)).collect()
}

/// Fails if two jobs would write the same file.
pub fn check_output_collisions(jobs: &[Job], out_dir: &Path) -> Result<()> {
    let mut owners: BTreeMap<PathBuf, &str> = BTreeMap::new();
    for job in jobs {
        for path in output_paths(job, out_dir) {
            if let Some(other) = owners.insert(path.clone(), &job.name) {
                return Err(CliError::Output(format!(
                    "{} is written by both {other} and {}",
                    path.display(),
                    job.name
                )));
            }
        }
    }
    Ok(())
}

fn x_label(kind: ScenarioKind) -> &'static str {
    match kind {
        ScenarioKind::Bmt => "proper time",
        ScenarioKind::Neutrino => "L (km)",
        _ => "t",
    }
}

/// Runs one job and writes its CSV and SVG into `opts.out_dir`.
pub fn execute(job: &Job, opts: &RunOptions) -> Result<RunReport> {
    let (traj, report) = run(&job.scenario)?;
    let out = &job.scenario.output;
    if out.csv.is_some() || out.svg.is_some() {
        std::fs::create_dir_all(&opts.out_dir).map_err(CliError::io(&opts.out_dir))?;
    }
    if let Some(csv) = &out.csv {
        emit_csv(&traj, &report.columns, &opts.out_dir.join(csv))?;
    }
    if let Some(svg) = &out.svg {
        let spec = PlotSpec {
            title: out.title.clone().unwrap_or_else(|| job.name.clone()),
            columns: report.columns.clone(),
            x_label: x_label(job.scenario.kind).into(),
            log_t: out.log_t,
        };
        emit_svg(&traj, &spec, &opts.out_dir.join(svg))?;
    }
    Ok(report)
}

/// Runs independent jobs on `threads` workers; results keep the input order.
pub fn execute_all(jobs: &[Job], opts: &RunOptions, threads: usize) -> Result<Vec<Result<RunReport>>> {
    check_output_collisions(jobs, &opts.out_dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| CliError::Output(format!("thread pool: {e}")))?;
    Ok(pool.install(|| jobs.par_iter().map(|job| execute(job, opts)).collect()))
}
