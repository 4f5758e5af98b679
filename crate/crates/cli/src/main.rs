//! `hclab` — command-line runner for the calibration laboratory.
//!
//! Every command reads JSON inputs, writes a JSON result (optionally with a
//! CSV mirror for curves and tables), and is deterministic for a fixed
//! configuration and seed. Exit codes: 0 success, 1 invariant violation
//! (with a machine-readable error record on stderr), 2 I/O or schema errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use hclab_core::catalog::{expected_quadratic, full_catalog, SpecConfig};
use hclab_core::gamma::{gamma_of, validate_bound_shape};
use hclab_core::growth::{fit_growth, GrowthReport, Verdict};
use hclab_core::instance::{DiscreteInstance, HypothesisSet};
use hclab_core::mingap::compute_gap;
use hclab_core::solve::parse_grid;
use hclab_core::transform::{sample_curve, CurveOptions, TransformCurve};
use hclab_core::verifier::{fuzz_bounds, rademacher_bound, LabeledSample, SampleItem};
use hclab_core::{Error, Family};

#[derive(Parser)]
#[command(
    name = "hclab",
    about = "Numerical laboratory for surrogate-loss transformation functions, growth rates, \
             minimizability gaps, and estimation-error bound checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the estimation-error transformation T(t) of a surrogate on a
    /// t grid by nested convex optimization.
    Transform {
        /// Spec file: {family, phi_id, n, tau?, lambda?}
        #[arg(long)]
        spec: PathBuf,
        /// Grid description, e.g. log:1e-4:0.5:40 or lin:0.01:0.5:50
        #[arg(long = "t-grid", default_value = "log:1e-4:0.5:40")]
        t_grid: String,
        #[arg(long)]
        out: PathBuf,
        /// Optional CSV mirror (header t,T,a_star,tau_star)
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Truncation bound for the constrained-family outer infimum
        #[arg(long, default_value_t = 10.0)]
        truncation: f64,
    },
    /// Fit the growth exponent of a sampled curve near zero: quadratic for
    /// smooth losses (square-root bounds), linear for polyhedral ones.
    Growth {
        #[arg(long)]
        curve: PathBuf,
        /// Fit window lo:hi
        #[arg(long, default_value = "1e-3:1e-1")]
        window: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Validate the cataloged closed-form bound function against a curve:
    /// Gamma(T(t)) >= t at every sample.
    CheckGamma {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exact minimizability gap, approximation error, and pointwise-infimum
    /// difference of a hypothesis set on a discrete instance.
    Mingap {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        hset: PathBuf,
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Randomized validity testing of the estimation-error bound across the
    /// loss catalog; reports the violation count (which must be zero).
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        draws: u64,
        /// Comma-separated families, or "all"
        #[arg(long, default_value = "all")]
        families: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Empirical Rademacher complexity of the loss class on a sample and the
    /// resulting generalization bound.
    Radbound {
        /// Sample file: {n, labels: [..]}; hypothesis tables are row-aligned
        /// with the labels and the sample doubles as its empirical instance.
        #[arg(long)]
        sample: PathBuf,
        #[arg(long)]
        hset: PathBuf,
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep the full loss catalog: sample each transformation curve, fit its
    /// growth exponent, and tabulate the smooth-vs-polyhedral separation.
    Dichotomy {
        #[arg(long, default_value = "log:1e-4:0.5:40")]
        t_grid: String,
        #[arg(long, default_value = "1e-3:1e-1")]
        window: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

/// Machine-readable error record emitted on stderr.
#[derive(Serialize)]
struct ErrorRecord {
    error: String,
    kind: &'static str,
}

enum Failure {
    /// Invariant violations (exit 1).
    Invariant(String),
    /// I/O and schema problems (exit 2).
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Schema(_) => Failure::Io(e.to_string()),
            other => Failure::Invariant(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Io(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    Ok(())
}

fn parse_window(desc: &str) -> Result<(f64, f64), Failure> {
    let parts: Vec<&str> = desc.split(':').collect();
    if parts.len() != 2 {
        return Err(Failure::Io(format!(
            "window `{desc}` must have the form lo:hi"
        )));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| Failure::Io(format!("bad window bound `{}`", parts[0])))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| Failure::Io(format!("bad window bound `{}`", parts[1])))?;
    Ok((lo, hi))
}

fn parse_families(desc: &str) -> Result<Vec<Family>, Failure> {
    if desc == "all" {
        return Ok(vec![Family::Margin, Family::CompSum, Family::Constrained]);
    }
    desc.split(',')
        .map(|s| match s.trim() {
            "margin" => Ok(Family::Margin),
            "comp-sum" => Ok(Family::CompSum),
            "constrained" => Ok(Family::Constrained),
            other => Err(Failure::Io(format!("unknown family `{other}`"))),
        })
        .collect()
}

/// Sample file for `radbound`: the sample is its own empirical instance
/// (uniform weights, deterministic labels).
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SampleFile {
    #[serde(default)]
    #[allow(dead_code)]
    schema: Option<u32>,
    n: usize,
    labels: Vec<usize>,
}

#[derive(Serialize)]
struct DichotomyRow {
    spec_id: String,
    exponent: f64,
    verdict: Verdict,
    c_lower: f64,
    #[serde(rename = "C_upper")]
    c_upper: f64,
    expected_quadratic: bool,
}

#[derive(Serialize)]
struct DichotomyReport {
    schema: u32,
    window: (f64, f64),
    rows: Vec<DichotomyRow>,
    all_as_expected: bool,
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Transform {
            spec,
            t_grid,
            out,
            csv,
            truncation,
        } => {
            let cfg: SpecConfig = read_json(&spec)?;
            let spec = cfg.to_spec()?;
            let grid = parse_grid(&t_grid).map_err(Failure::Io)?;
            let options = CurveOptions {
                truncation,
                ..CurveOptions::default()
            };
            let mut curve = sample_curve(&spec, &grid, &options)?;
            curve.grid = t_grid;
            write_json(&out, &curve)?;
            if let Some(csv_path) = csv {
                std::fs::write(&csv_path, curve.to_csv())?;
            }
            let errors: Vec<&str> = curve
                .samples
                .iter()
                .filter(|s| s.flag.starts_with("error"))
                .map(|s| s.flag.as_str())
                .collect();
            if !errors.is_empty() {
                return Err(Failure::Invariant(format!(
                    "{} samples failed: {}",
                    errors.len(),
                    errors[0]
                )));
            }
            Ok(())
        }
        Command::Growth { curve, window, out } => {
            let curve: TransformCurve = read_json(&curve)?;
            let window = parse_window(&window)?;
            let report: GrowthReport = fit_growth(&curve, window)?;
            write_json(&out, &report)?;
            Ok(())
        }
        Command::CheckGamma { curve, out } => {
            let curve: TransformCurve = read_json(&curve)?;
            let form = gamma_of(&curve.spec)?;
            let report = validate_bound_shape(&curve, &form)?;
            write_json(&out, &report)?;
            if !report.valid {
                return Err(Failure::Invariant(format!(
                    "bound function violated: min slack {}",
                    report.min_slack
                )));
            }
            Ok(())
        }
        Command::Mingap {
            instance,
            hset,
            spec,
            out,
        } => {
            let instance: DiscreteInstance = read_json(&instance)?;
            let hset: HypothesisSet = read_json(&hset)?;
            let cfg: SpecConfig = read_json(&spec)?;
            let report = compute_gap(&instance, &hset, &cfg.to_spec()?)?;
            write_json(&out, &report)?;
            Ok(())
        }
        Command::Verify {
            seed,
            draws,
            families,
            out,
        } => {
            let families = parse_families(&families)?;
            let summary = fuzz_bounds(seed, draws, &families)?;
            let violations = summary.violations.len();
            write_json(&out, &summary)?;
            if violations > 0 {
                return Err(Failure::Invariant(format!(
                    "{violations} bound violations recorded"
                )));
            }
            Ok(())
        }
        Command::Radbound {
            sample,
            hset,
            spec,
            delta,
            out,
        } => {
            let file: SampleFile = read_json(&sample)?;
            let hset: HypothesisSet = read_json(&hset)?;
            let cfg: SpecConfig = read_json(&spec)?;
            let spec = cfg.to_spec()?;
            if file.labels.iter().any(|&y| y >= file.n) {
                return Err(Failure::Io("sample label out of range".into()));
            }
            let m = file.labels.len();
            let instance = DiscreteInstance::deterministic(file.n, &file.labels);
            let sample = LabeledSample {
                schema: Some(1),
                items: (0..m)
                    .map(|i| SampleItem {
                        point: i,
                        label: file.labels[i],
                    })
                    .collect(),
            };
            let gamma = gamma_of(&spec)?;
            let (estimate, bound) = rademacher_bound(
                &instance,
                &sample,
                &hset,
                &spec,
                &gamma,
                delta,
                seed_from_delta(delta),
            )?;
            #[derive(Serialize)]
            struct RadboundReport {
                schema: u32,
                spec_id: String,
                m: usize,
                delta: f64,
                estimate: hclab_core::verifier::RademacherEstimate,
                bound_value: f64,
            }
            let report = RadboundReport {
                schema: 1,
                spec_id: spec.id(),
                m,
                delta,
                estimate,
                bound_value: bound,
            };
            match out {
                Some(path) => write_json(&path, &report)?,
                None => println!(
                    "{}",
                    serde_json::to_string_pretty(&report)
                        .map_err(|e| Failure::Io(e.to_string()))?
                ),
            }
            Ok(())
        }
        Command::Dichotomy {
            t_grid,
            window,
            out,
            csv,
        } => {
            let grid = parse_grid(&t_grid).map_err(Failure::Io)?;
            let window = parse_window(&window)?;
            let mut rows = Vec::new();
            let mut all_ok = true;
            for spec in full_catalog() {
                let curve = sample_curve(&spec, &grid, &CurveOptions::default())?;
                let report = fit_growth(&curve, window)?;
                let want_quadratic = expected_quadratic(&spec);
                let ok = match report.verdict {
                    Verdict::Quadratic => want_quadratic,
                    Verdict::Linear => !want_quadratic,
                    Verdict::Other => false,
                };
                all_ok &= ok;
                rows.push(DichotomyRow {
                    spec_id: spec.id(),
                    exponent: report.exponent,
                    verdict: report.verdict,
                    c_lower: report.c_lower,
                    c_upper: report.c_upper,
                    expected_quadratic: want_quadratic,
                });
            }
            let report = DichotomyReport {
                schema: 1,
                window,
                rows,
                all_as_expected: all_ok,
            };
            write_json(&out, &report)?;
            if let Some(csv_path) = csv {
                let mut text = String::from("spec_id,exponent,verdict,c_lower,C_upper\n");
                for r in &report.rows {
                    text.push_str(&format!(
                        "{},{},{:?},{},{}\n",
                        r.spec_id, r.exponent, r.verdict, r.c_lower, r.c_upper
                    ));
                }
                std::fs::write(&csv_path, text)?;
            }
            if !all_ok {
                return Err(Failure::Invariant(
                    "a catalog entry missed its expected growth verdict".into(),
                ));
            }
            Ok(())
        }
    }
}

/// Stable Monte Carlo seed derived from the configuration.
fn seed_from_delta(delta: f64) -> u64 {
    delta.to_bits()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invariant(msg)) => {
            let rec = ErrorRecord {
                error: msg,
                kind: "invariant-violation",
            };
            eprintln!("{}", serde_json::to_string(&rec).unwrap());
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            let rec = ErrorRecord {
                error: msg,
                kind: "io-or-schema",
            };
            eprintln!("{}", serde_json::to_string(&rec).unwrap());
            ExitCode::from(2)
        }
    }
}
