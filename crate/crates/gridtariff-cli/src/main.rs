//! Command line front end for the grid tariff engine.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use gridtariff_core::classification::DesignSpec;
use gridtariff_core::dataset::Dataset;
use gridtariff_core::oracle;
use gridtariff_core::reporting::{
    default_groupings, load_results, write_group_averages, GroupDim, GroupingSpec, Weighting,
};
use gridtariff_core::scenario::{parse_sweep_file, run_scenario, sweep, ScenarioSpec, SweepEntry};
use gridtariff_core::solver::SolverConfig;
use gridtariff_core::synthgen::{generate_dataset, provenance, GeneratorConfig};
use gridtariff_core::{exec, Error};

const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (data format revision 1)");

/// Deterministic electricity grid tariff simulator.
#[derive(Parser)]
#[command(name = "gridtariff", version = VERSION)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum DesignArg {
    Flat,
    Tou,
    Ipp,
    Dcpp,
    Dcipp,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the synthetic household dataset.
    Generate {
        /// Random seed; overrides the seed in --config.
        #[arg(long)]
        seed: u64,
        /// Output directory for the dataset trio and provenance file.
        #[arg(long)]
        out: PathBuf,
        /// JSON generator configuration; missing fields use defaults.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run a single tariff scenario and write its reports.
    Run {
        /// Directory holding profiles.csv, categories.csv, system_load.csv.
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum)]
        design: DesignArg,
        /// Hourly consumption threshold in kWh (ipp, dcipp).
        #[arg(long)]
        threshold: Option<f64>,
        /// Trigger as a fraction of the year's hours, e.g. 0.05 for 5% (dcpp, dcipp).
        #[arg(long)]
        trigger: Option<f64>,
        /// Recovery factor applied to the base rate.
        #[arg(long, default_value_t = 0.95)]
        frecov: f64,
        /// Anchor grid tariff in Øre/kWh.
        #[arg(long = "gt-base", default_value_t = 18.25)]
        gt_base: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every scenario of a sweep file and write combined reports.
    Sweep {
        #[arg(long)]
        data: PathBuf,
        /// JSON scenario list.
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Bound on worker threads; default = available cores.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Recompute group averages from a finished run directory.
    Report {
        /// Directory written by `run` or `sweep`.
        #[arg(long)]
        results: PathBuf,
        /// Comma-separated dimensions: dwelling,occupancy,area,income,ev,hp.
        #[arg(long = "group-by")]
        group_by: String,
        /// Average over categories instead of households.
        #[arg(long)]
        unweighted: bool,
    },
    /// Check the engine against the brute-force reference on a dataset.
    OracleCheck {
        #[arg(long)]
        data: PathBuf,
    },
}

/// Terminal failure: exit code plus the machine-readable error for stderr.
struct Failure {
    code: u8,
    kind: String,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            kind: "usage".into(),
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::Io(_) => 4,
            Error::InfeasiblePeakRecovery { .. } => 3,
            _ => 2,
        };
        Failure {
            code,
            kind: err.kind().to_string(),
            message: err.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            err.print().expect("stderr is writable");
            return match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(1),
            };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!(
                "{}",
                serde_json::json!({ "error": failure.kind, "message": failure.message })
            );
            ExitCode::from(failure.code)
        }
    }
}

fn dispatch(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Generate { seed, out, config } => cmd_generate(seed, &out, config.as_deref()),
        Command::Run {
            data,
            design,
            threshold,
            trigger,
            frecov,
            gt_base,
            out,
        } => cmd_run(&data, design, threshold, trigger, frecov, gt_base, &out),
        Command::Sweep {
            data,
            spec,
            out,
            jobs,
        } => cmd_sweep(&data, &spec, &out, jobs),
        Command::Report {
            results,
            group_by,
            unweighted,
        } => cmd_report(&results, &group_by, unweighted),
        Command::OracleCheck { data } => cmd_oracle_check(&data),
    }
}

fn cmd_generate(seed: u64, out: &Path, config: Option<&Path>) -> Result<u8, Failure> {
    let mut cfg = match config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(Error::from)?;
            serde_json::from_str::<GeneratorConfig>(&text).map_err(|err| {
                Failure::from(Error::SchemaViolation {
                    file: path.display().to_string(),
                    message: err.to_string(),
                })
            })?
        }
        None => GeneratorConfig::default(),
    };
    cfg.seed = seed;
    let dataset = generate_dataset(&cfg)?;
    std::fs::create_dir_all(out).map_err(Error::from)?;
    dataset.write(out)?;
    let meta = provenance(&dataset, &cfg);
    let json = serde_json::to_string_pretty(&meta).expect("provenance serializes");
    std::fs::write(out.join("provenance.json"), json + "\n").map_err(Error::from)?;
    println!(
        "wrote {} ({} categories, {} hours, sha256 {})",
        out.display(),
        meta.category_count,
        meta.hours,
        &meta.dataset_sha256[..12]
    );
    Ok(0)
}

/// Builds a design from the run flags, rejecting missing or extraneous ones.
fn design_from_flags(
    design: DesignArg,
    threshold: Option<f64>,
    trigger: Option<f64>,
) -> Result<DesignSpec, Failure> {
    let need = |flag: &str, value: Option<f64>, design: DesignArg| {
        value.ok_or_else(|| Failure::usage(format!("design '{design:?}' requires --{flag}")))
    };
    let forbid = |flag: &str, value: Option<f64>, design: DesignArg| {
        if value.is_some() {
            Err(Failure::usage(format!(
                "design '{design:?}' does not take --{flag}"
            )))
        } else {
            Ok(())
        }
    };
    let spec = match design {
        DesignArg::Flat => {
            forbid("threshold", threshold, design)?;
            forbid("trigger", trigger, design)?;
            DesignSpec::Flat
        }
        DesignArg::Tou => {
            forbid("threshold", threshold, design)?;
            forbid("trigger", trigger, design)?;
            DesignSpec::Tou {
                window: Default::default(),
            }
        }
        DesignArg::Ipp => {
            forbid("trigger", trigger, design)?;
            DesignSpec::Ipp {
                threshold_kwh: need("threshold", threshold, design)?,
            }
        }
        DesignArg::Dcpp => {
            forbid("threshold", threshold, design)?;
            DesignSpec::Dcpp {
                trigger_fraction: need("trigger", trigger, design)?,
            }
        }
        DesignArg::Dcipp => DesignSpec::Dcipp {
            threshold_kwh: need("threshold", threshold, design)?,
            trigger_fraction: need("trigger", trigger, design)?,
        },
    };
    spec.validate()
        .map_err(|err| Failure::usage(err.to_string()))?;
    Ok(spec)
}

fn cmd_run(
    data: &Path,
    design: DesignArg,
    threshold: Option<f64>,
    trigger: Option<f64>,
    frecov: f64,
    gt_base: f64,
    out: &Path,
) -> Result<u8, Failure> {
    let design = design_from_flags(design, threshold, trigger)?;
    let solver = SolverConfig {
        gt_base,
        f_recov: frecov,
    };
    solver
        .validate()
        .map_err(|err| Failure::usage(err.to_string()))?;
    let dataset = Dataset::load(data)?;
    let spec = ScenarioSpec::named(design, solver, gt_base);
    let name = spec.name.clone();
    let result = run_scenario(&dataset, &spec)?;
    let base = result.rates.base_rate;
    let peak = result.rates.peak_rate;
    let entries = vec![SweepEntry::Completed(result)];
    gridtariff_core::reporting::emit_reports(&dataset, &entries, &default_groupings(), out)?;
    println!("{name}: base {base} Øre/kWh, peak {peak} Øre/kWh");
    println!("reports in {}", out.display());
    Ok(0)
}

fn cmd_sweep(data: &Path, spec: &Path, out: &Path, jobs: Option<usize>) -> Result<u8, Failure> {
    let dataset = Dataset::load(data)?;
    let text = std::fs::read_to_string(spec).map_err(Error::from)?;
    let specs: Vec<ScenarioSpec> = parse_sweep_file(&text)?;
    let entries = exec::with_job_limit(jobs, || sweep(&dataset, &specs))?;
    gridtariff_core::reporting::emit_reports(&dataset, &entries, &default_groupings(), out)?;

    let mut infeasible = 0usize;
    let mut failed = 0usize;
    for entry in &entries {
        match entry {
            SweepEntry::Completed(result) => println!(
                "{}: base {} Øre/kWh, peak {} Øre/kWh",
                result.spec.name, result.rates.base_rate, result.rates.peak_rate
            ),
            SweepEntry::Failed { spec, error } => {
                println!("{}: failed ({})", spec.name, error.kind());
                if matches!(error, Error::InfeasiblePeakRecovery { .. }) {
                    infeasible += 1;
                } else {
                    failed += 1;
                }
            }
        }
    }
    println!("reports in {}", out.display());
    if failed > 0 {
        Err(Failure {
            code: 2,
            kind: "scenario_failures".into(),
            message: format!("{failed} scenario(s) failed; see failures.csv"),
        })
    } else if infeasible > 0 {
        Err(Failure {
            code: 3,
            kind: "infeasible_peak_recovery".into(),
            message: format!("{infeasible} scenario(s) infeasible; see failures.csv"),
        })
    } else {
        Ok(0)
    }
}

fn cmd_report(results: &Path, group_by: &str, unweighted: bool) -> Result<u8, Failure> {
    let mut dims = Vec::new();
    for part in group_by.split(',') {
        let part = part.trim();
        let dim = GroupDim::parse(part)
            .map_err(|_| Failure::usage(format!("unknown grouping dimension {part:?}")))?;
        dims.push(dim);
    }
    let weighting = if unweighted {
        Weighting::Unweighted
    } else {
        Weighting::HouseholdCount
    };
    let grouping =
        GroupingSpec::new(dims, weighting).map_err(|err| Failure::usage(err.to_string()))?;
    let stored = load_results(results)?;
    let path = write_group_averages(&stored, &grouping, results)?;
    println!("wrote {}", path.display());
    Ok(0)
}

fn cmd_oracle_check(data: &Path) -> Result<u8, Failure> {
    let dataset = Dataset::load(data)?;
    let comparisons = oracle::check_battery(&dataset, &SolverConfig::default(), 18.25)?;
    let tolerance = 1e-9;
    let mut mismatches = Vec::new();
    for cmp in &comparisons {
        let verdict = if cmp.within(tolerance) {
            "ok"
        } else {
            "MISMATCH"
        };
        println!(
            "{}: max error {:.3e} {}",
            cmp.scenario,
            cmp.max_error(),
            verdict
        );
        if !cmp.within(tolerance) {
            mismatches.push(cmp.scenario.clone());
        }
    }
    if mismatches.is_empty() {
        println!("oracle check passed ({} scenarios)", comparisons.len());
        Ok(0)
    } else {
        Err(Failure {
            code: 2,
            kind: "oracle_mismatch".into(),
            message: format!(
                "engine disagrees with reference on: {}",
                mismatches.join(", ")
            ),
        })
    }
}
