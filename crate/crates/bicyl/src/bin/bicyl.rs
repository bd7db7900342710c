//! Command-line front-end for the cylinder-intersection library.
//!
//! Exit codes: 0 on success, 1 when validation or a numerical computation
//! fails, 2 on usage errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use bicyl::cli::{
    cylinder_from_array, parse_cylinder, run_estimate, run_reduced, run_sweep, run_validate,
    CylinderPairSpec, OutputFormat, ValidateOptions,
};
use bicyl::{Containment, Cylinder, QmcSpec, QuadratureSpec};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "bicyl",
    version,
    about = "Intersection volume and lateral surface area of two finite cylinders",
    long_about = "Computes the intersection volume and lateral surface area of two finite \
cylinders: exactly (tanh-sinh quadrature of the reduced integrals) for the orthogonal \
equal-diameter case, via closed-form approximations, and stochastically (Sobol \
quasi-Monte Carlo) for arbitrary configurations."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Worker threads for the QMC hit loops; never changes results.
    /// Falls back to the BICYL_THREADS environment variable, then 1.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum ContainmentArg {
    /// Distance to the axis segment (capsule membership).
    #[default]
    Capsule,
    /// Capsule test plus axial parameter in [0, 1] (flat-capped cylinder).
    Strict,
}

impl From<ContainmentArg> for Containment {
    fn from(arg: ContainmentArg) -> Self {
        match arg {
            ContainmentArg::Capsule => Containment::SegmentCapsule,
            ContainmentArg::Strict => Containment::StrictFinite,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Exact, approximate, and optionally QMC values at one depth delta.
    Reduced {
        /// Intersection depth in [0, 1].
        delta: f64,
        /// Also run the QMC estimators with 2^M samples per stream.
        #[arg(long, value_name = "M")]
        qmc: Option<u32>,
        /// Scramble seed for the QMC estimators.
        #[arg(long, value_name = "S")]
        seed: Option<u64>,
        /// Emit a JSON array instead of the human-readable listing.
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        /// Emit a CSV header and row.
        #[arg(long)]
        csv: bool,
    },
    /// CSV (or JSON) sweep of uniformly spaced depths.
    Sweep {
        /// First depth (inclusive), in [0, 1].
        #[arg(long)]
        from: f64,
        /// Last depth (inclusive), in [0, 1]; must exceed --from.
        #[arg(long)]
        to: f64,
        /// Number of rows (>= 2), endpoints included.
        #[arg(long)]
        steps: u32,
        /// Add QMC estimate columns with 2^M samples per stream.
        #[arg(long, value_name = "M")]
        qmc: Option<u32>,
        /// Scramble seed for the QMC estimators.
        #[arg(long, value_name = "S")]
        seed: Option<u64>,
        /// Emit a JSON array instead of CSV.
        #[arg(long)]
        json: bool,
    },
    /// QMC volume and area estimates for two arbitrary cylinders.
    Estimate {
        /// First cylinder as ax,ay,az,bx,by,bz,r.
        #[arg(long, value_name = "SPEC")]
        c1: Option<String>,
        /// Second cylinder as ax,ay,az,bx,by,bz,r.
        #[arg(long, value_name = "SPEC")]
        c2: Option<String>,
        /// JSON file with a batch of pairs: [{"c1": [..7..], "c2": [..7..]}, ...].
        #[arg(long, conflicts_with_all = ["c1", "c2"])]
        file: Option<PathBuf>,
        /// Samples per stream are 2^M.
        #[arg(long, value_name = "M", default_value_t = 20)]
        log2: u32,
        /// Scramble seed; omitted means the raw Sobol sequence.
        #[arg(long, value_name = "S")]
        seed: Option<u64>,
        /// Containment predicate for the hit tests.
        #[arg(long, value_enum, default_value_t)]
        containment: ContainmentArg,
        /// Emit a JSON array instead of the human-readable listing.
        #[arg(long)]
        json: bool,
    },
    /// Self-validation: reference tables, closed forms, QMC cross-checks.
    Validate {
        /// Samples per stream are 2^M for the QMC cross-checks.
        #[arg(long, value_name = "M", default_value_t = 20)]
        log2: u32,
        /// Scramble seed for the QMC cross-checks.
        #[arg(long, value_name = "S", default_value_t = 1)]
        seed: u64,
    },
}

enum AppError {
    Usage(String),
    Failure(String),
}

impl AppError {
    fn exit_code(&self) -> u8 {
        match self {
            AppError::Usage(_) => EXIT_USAGE,
            AppError::Failure(_) => EXIT_FAILURE,
        }
    }

    fn message(&self) -> &str {
        match self {
            AppError::Usage(m) | AppError::Failure(m) => m,
        }
    }
}

fn usage(msg: impl Into<String>) -> AppError {
    AppError::Usage(msg.into())
}

fn failure(e: bicyl::Error) -> AppError {
    AppError::Failure(e.to_string())
}

fn resolve_threads(flag: Option<usize>) -> Result<usize, AppError> {
    if let Some(t) = flag {
        if t == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        return Ok(t);
    }
    match std::env::var("BICYL_THREADS") {
        Ok(v) => v
            .parse::<usize>()
            .ok()
            .filter(|&t| t > 0)
            .ok_or_else(|| usage(format!("BICYL_THREADS=`{v}` is not a positive integer"))),
        Err(_) => Ok(1),
    }
}

fn qmc_spec(
    log2: u32,
    seed: Option<u64>,
    containment: Containment,
    threads: usize,
) -> Result<QmcSpec, AppError> {
    let spec = QmcSpec {
        log2_samples: log2,
        scramble_seed: seed,
        containment,
        threads,
    };
    spec.validate().map_err(|e| usage(e.to_string()))?;
    Ok(spec)
}

fn check_delta(delta: f64) -> Result<(), AppError> {
    if delta.is_finite() && (0.0..=1.0).contains(&delta) {
        Ok(())
    } else {
        Err(usage(format!("delta {delta} must lie in [0, 1]")))
    }
}

fn load_batch(path: &PathBuf) -> Result<Vec<(Cylinder, Cylinder)>, AppError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let specs: Vec<CylinderPairSpec> = serde_json::from_str(&text)
        .map_err(|e| usage(format!("{} is not a valid batch file: {e}", path.display())))?;
    if specs.is_empty() {
        return Err(usage(format!(
            "{} contains no cylinder pairs",
            path.display()
        )));
    }
    specs
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let c1 = cylinder_from_array(&format!("c1[{i}]"), &s.c1)
                .map_err(|e| usage(e.to_string()))?;
            let c2 = cylinder_from_array(&format!("c2[{i}]"), &s.c2)
                .map_err(|e| usage(e.to_string()))?;
            Ok((c1, c2))
        })
        .collect()
}

fn run(cli: Cli) -> Result<(String, bool), AppError> {
    let threads = resolve_threads(cli.threads)?;
    let qspec = QuadratureSpec::default();

    match cli.command {
        Command::Reduced {
            delta,
            qmc,
            seed,
            json,
            csv,
        } => {
            check_delta(delta)?;
            let qmc_opt = qmc
                .map(|m| qmc_spec(m, seed, Containment::SegmentCapsule, threads))
                .transpose()?;
            let format = if json {
                OutputFormat::Json
            } else if csv {
                OutputFormat::Csv
            } else {
                OutputFormat::Human
            };
            let out = run_reduced(delta, &qspec, qmc_opt.as_ref(), format).map_err(failure)?;
            Ok((out, true))
        }
        Command::Sweep {
            from,
            to,
            steps,
            qmc,
            seed,
            json,
        } => {
            bicyl::cli::sweep_deltas(from, to, steps).map_err(|e| usage(e.to_string()))?;
            let qmc_opt = qmc
                .map(|m| qmc_spec(m, seed, Containment::SegmentCapsule, threads))
                .transpose()?;
            let format = if json {
                OutputFormat::Json
            } else {
                OutputFormat::Csv
            };
            let out =
                run_sweep(from, to, steps, &qspec, qmc_opt.as_ref(), format).map_err(failure)?;
            Ok((out, true))
        }
        Command::Estimate {
            c1,
            c2,
            file,
            log2,
            seed,
            containment,
            json,
        } => {
            let pairs = if let Some(path) = &file {
                load_batch(path)?
            } else {
                let c1 = c1.ok_or_else(|| usage("--c1 is required (or use --file)"))?;
                let c2 = c2.ok_or_else(|| usage("--c2 is required (or use --file)"))?;
                let c1 = parse_cylinder("--c1", &c1).map_err(|e| usage(e.to_string()))?;
                let c2 = parse_cylinder("--c2", &c2).map_err(|e| usage(e.to_string()))?;
                vec![(c1, c2)]
            };
            let spec = qmc_spec(log2, seed, containment.into(), threads)?;
            let format = if json {
                OutputFormat::Json
            } else {
                OutputFormat::Human
            };
            let out = run_estimate(&pairs, &spec, format).map_err(failure)?;
            Ok((out, true))
        }
        Command::Validate { log2, seed } => {
            let tol_scale = match std::env::var("BICYL_VALIDATE_TOL_SCALE") {
                Ok(v) => v.parse::<f64>().map_err(|_| {
                    usage(format!("BICYL_VALIDATE_TOL_SCALE=`{v}` is not a number"))
                })?,
                Err(_) => 1.0,
            };
            QmcSpec {
                log2_samples: log2,
                ..Default::default()
            }
            .validate()
            .map_err(|e| usage(e.to_string()))?;
            let opts = ValidateOptions {
                log2_samples: log2,
                seed,
                threads,
                tol_scale,
            };
            let (report, passed) = run_validate(&opts).map_err(failure)?;
            Ok((report, passed))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((output, passed)) => {
            print!("{output}");
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAILURE)
            }
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
