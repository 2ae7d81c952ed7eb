//! `heisflow`: curvature grids, characteristic loci, flow leaves and
//! verification suites for surfaces in the Heisenberg group.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use heisflow_core::builders::SurfaceSpec;
use heisflow_core::curvature::CurvatureOptions;
use heisflow_core::flow::{cc_length, horizontality_residual, integrate_flow, STOP_FACTOR};
use heisflow_core::horizontal::CharThreshold;
use heisflow_core::locus::{find_locus, DEFAULT_REFINE};
use heisflow_core::report::{evaluate_grid, to_json_sci};
use heisflow_core::verify::{run_suite, Suite};
use heisflow_core::{GeomError, SurfaceHandle};

const EPS_ENV: &str = "HEISFLOW_EPS_CHAR";

#[derive(Parser)]
#[command(name = "heisflow", version, about = "Horizontal geometry of surfaces in the Heisenberg group")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate normals and horizontal mean curvature on a parameter grid.
    Eval {
        /// Surface-spec JSON file or catalog name.
        surface: String,
        #[arg(long, default_value = "51x51", value_parser = parse_grid)]
        grid: [usize; 2],
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Detect the characteristic locus by grid scan and edge bisection.
    Locus {
        surface: String,
        #[arg(long, default_value = "101x101", value_parser = parse_grid)]
        grid: [usize; 2],
        /// Bisection steps per edge.
        #[arg(long, default_value_t = DEFAULT_REFINE)]
        refine: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Trace the leaf of the horizontal flow through a parameter point.
    Flow {
        surface: String,
        /// Seed as `u,v`.
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
        start: [f64; 2],
        #[arg(long, default_value_t = 1e-2)]
        ds: f64,
        /// Maximum steps in each direction.
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite; exits with status 1 if any check fails.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        /// Seed of the random suites.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Core,
    Examples,
    Minimal,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Core => Suite::Core,
            SuiteArg::Examples => Suite::Examples,
            SuiteArg::Minimal => Suite::Minimal,
            SuiteArg::All => Suite::All,
        }
    }
}

fn parse_grid(s: &str) -> Result<[usize; 2], String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected NxM, got `{s}`"))?;
    let n = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad grid size `{t}`: {e}"));
    let grid = [n(a)?, n(b)?];
    if grid.contains(&0) {
        return Err("grid sizes must be positive".into());
    }
    Ok(grid)
}

fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected u,v, got `{s}`"))?;
    let n = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("bad number `{t}`: {e}"));
    Ok([n(a)?, n(b)?])
}

enum Failure {
    Input(String),
    Verification,
}

impl From<GeomError> for Failure {
    fn from(e: GeomError) -> Self {
        Failure::Input(e.to_string())
    }
}

fn eps_char() -> Result<CharThreshold, Failure> {
    match std::env::var(EPS_ENV) {
        Err(_) => Ok(CharThreshold::default()),
        Ok(text) => match text.trim().parse::<f64>() {
            Ok(e) if e.is_finite() && e > 0.0 => Ok(CharThreshold::Absolute(e)),
            _ => Err(Failure::Input(format!("{EPS_ENV} must be a positive number, got `{text}`"))),
        },
    }
}

/// A path to an existing file is read as a surface spec; anything else is
/// looked up in the catalog.
fn load_surface(arg: &str) -> Result<SurfaceHandle, Failure> {
    let path = Path::new(arg);
    let spec = if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{arg}: {e}")))?;
        SurfaceSpec::from_json(&text).map_err(|e| Failure::Input(format!("{arg}: {e}")))?
    } else {
        SurfaceSpec::Catalog { name: arg.to_string(), domain: None }
    };
    Ok(spec.build()?)
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, bytes).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(bytes).map_err(|e| Failure::Input(e.to_string()))
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Eval { surface, grid, out, format } => {
            let s = load_surface(&surface)?;
            let opts = CurvatureOptions { eps_char: eps_char()?, ..Default::default() };
            let report = evaluate_grid(&s, grid, &opts)?;
            let bytes = match format {
                Format::Json => report.to_json(),
                Format::Csv => report.to_csv(),
            };
            emit(out.as_deref(), &bytes)
        }
        Command::Locus { surface, grid, refine, out } => {
            let s = load_surface(&surface)?;
            emit(out.as_deref(), &to_json_sci(&find_locus(&s, grid, refine)))
        }
        Command::Flow { surface, start, ds, steps, out } => {
            if !(ds.is_finite() && ds > 0.0) {
                return Err(Failure::Input(format!("--ds must be positive, got {ds}")));
            }
            let s = load_surface(&surface)?;
            let stop = eps_char()?.times(STOP_FACTOR);
            let trace = integrate_flow(&s, start[0], start[1], ds, steps, stop)?;
            let samples = trace.samples();
            let residual = horizontality_residual(&samples).ok();
            let length = cc_length(&samples, f64::INFINITY).ok();
            let doc = json!({
                "surface": s.name(),
                "start": start,
                "ds": ds,
                "stop_reason": trace.stop_reason(),
                "horizontality_residual": residual,
                "cc_length": length,
                "trace": trace,
            });
            emit(out.as_deref(), &to_json_sci(&doc))
        }
        Command::Verify { suite, seed, out } => {
            let report = run_suite(suite.into(), seed);
            for c in &report.checks {
                eprintln!(
                    "{} {:<32} max_error={:.3e} tol={:.1e} n={}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.max_error,
                    c.tol,
                    c.samples
                );
            }
            emit(out.as_deref(), &to_json_sci(&report))?;
            if report.pass {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
