use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qdsim_cli::{execute_all, load_job, CliError, Job, RunOptions, SHIPPED};

/// Quasi-linear quantum evolution scenarios.
#[derive(Debug, Parser)]
#[command(name = "qdsim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run scenario files and write their CSV/SVG outputs.
    Run {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Directory for output files.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Override the integrator step (or sample spacing).
        #[arg(long)]
        step: Option<f64>,
        /// Override the final time.
        #[arg(long)]
        t_end: Option<f64>,
        /// Exit with status 2 when a check fails (default).
        #[arg(long, overrides_with = "no_check")]
        check: bool,
        /// Report failed checks without changing the exit status.
        #[arg(long = "no-check")]
        no_check: bool,
        /// Number of scenarios run in parallel.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Regenerate the outputs of every shipped scenario.
    Figures {
        #[arg(long, default_value = "figures")]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

fn report_error(name: &str, err: &CliError) {
    match err {
        CliError::Scenario(e) => eprintln!("error[{}]: {name}: {e}", e.code()),
        e => eprintln!("error: {name}: {e}"),
    }
}

fn run_jobs(jobs: Vec<Job>, opts: &RunOptions, threads: usize, enforce: bool, mut failed: bool) -> ExitCode {
    let results = match execute_all(&jobs, opts, threads) {
        Ok(r) => r,
        Err(e) => {
            report_error("batch", &e);
            return ExitCode::from(1);
        }
    };
    let mut check_failed = false;
    for (job, result) in jobs.iter().zip(results) {
        match result {
            Ok(report) => {
                println!("== {} ==\n{report}\n", job.name);
                check_failed |= !report.passed();
            }
            Err(e) => {
                report_error(&job.name, &e);
                failed = true;
            }
        }
    }
    if failed {
        ExitCode::from(1)
    } else if check_failed && enforce {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            files,
            out_dir,
            step,
            t_end,
            check: _,
            no_check,
            jobs,
        } => {
            let opts = RunOptions { out_dir, step, t_end };
            let mut loaded = Vec::new();
            let mut failed = false;
            for path in &files {
                let name = path.display().to_string();
                let text = match std::fs::read_to_string(path) {
                    Ok(t) => t,
                    Err(source) => {
                        report_error(&name, &CliError::Io { path: path.clone(), source });
                        failed = true;
                        continue;
                    }
                };
                match load_job(&name, &text, &opts) {
                    Ok(job) => loaded.push(job),
                    Err(e) => {
                        report_error(&name, &e.into());
                        failed = true;
                    }
                }
            }
            if failed {
                return ExitCode::from(1);
            }
            run_jobs(loaded, &opts, jobs, !no_check, failed)
        }
        Command::Figures { out_dir, jobs } => {
            let opts = RunOptions {
                out_dir,
                ..RunOptions::default()
            };
            let loaded = SHIPPED
                .iter()
                .map(|(name, text)| load_job(name, text, &opts))
                .collect::<Result<Vec<_>, _>>();
            match loaded {
                Ok(loaded) => run_jobs(loaded, &opts, jobs, true, false),
                Err(e) => {
                    report_error("shipped scenario", &e.into());
                    ExitCode::from(1)
                }
            }
        }
    }
}
