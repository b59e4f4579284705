use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use analogmp::audit::{self, AuditConfig, RunReport, LAW_SUITES, PLANNER_SUITES};
use analogmp::planners::catalog;
use analogmp::Result;

#[derive(Parser)]
#[command(
    name = "analogmp",
    version,
    about = "Audits of analog motion planners and measure laws"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every suite listed in a config file.
    Run {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
        /// Directory for report.json and samples.csv.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Override any config key, e.g. `--set dims=1,3`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Audit one registered planner.
    Audit {
        planner: String,
        #[arg(long, default_value = "bundle")]
        suite: String,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Write report.json and samples.csv here instead of only printing.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// List planners and suites.
    List,
}

fn apply_overrides(config: &mut AuditConfig, overrides: &[String]) -> Result<()> {
    for kv in overrides {
        let Some((k, v)) = kv.split_once('=') else {
            return Err(analogmp::Error::Config {
                line: 0,
                message: format!("override `{kv}` is not KEY=VALUE"),
            });
        };
        config.set(0, k.trim(), v)?;
    }
    config.validate()
}

fn finish(report: &RunReport, write: bool, config: &AuditConfig) -> Result<ExitCode> {
    for r in &report.reports {
        println!("{}", r.summary_line());
    }
    if write {
        println!("wrote {}", config.report_path().display());
    }
    if report.pass {
        println!("all suites passed");
        Ok(ExitCode::SUCCESS)
    } else {
        let names: Vec<String> = report.failing().map(|r| r.summary_line()).collect();
        println!("failing: {}", names.join("; "));
        Ok(ExitCode::from(1))
    }
}

fn dispatch(command: Command) -> Result<ExitCode> {
    match command {
        Command::Run {
            config,
            seed,
            samples,
            output,
            overrides,
        } => {
            let mut cfg = AuditConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(n) = samples {
                cfg.samples = n;
            }
            if let Some(dir) = output {
                cfg.output_dir = dir;
            }
            apply_overrides(&mut cfg, &overrides)?;
            let report = audit::run(&cfg)?;
            finish(&report, true, &cfg)
        }
        Command::Audit {
            planner,
            suite,
            samples,
            seed,
            dim,
            output,
        } => {
            let mut cfg = AuditConfig {
                suites: vec![suite],
                planners: vec![planner],
                dims: vec![dim],
                samples,
                seed,
                ..AuditConfig::default()
            };
            let write = output.is_some();
            if let Some(dir) = output {
                cfg.output_dir = dir;
            }
            cfg.validate()?;
            let report = if write {
                audit::run(&cfg)?
            } else {
                audit::execute(&cfg)?
            };
            finish(&report, write, &cfg)
        }
        Command::List => {
            println!("planners:");
            for info in catalog() {
                let tag = if info.expected_to_fail {
                    " [expected to fail]"
                } else {
                    ""
                };
                println!("  {:<22}{}{tag}", info.name, info.summary);
            }
            println!("planner suites: {}, bundle", PLANNER_SUITES.join(", "));
            println!("law suites: {}", LAW_SUITES.join(", "));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
