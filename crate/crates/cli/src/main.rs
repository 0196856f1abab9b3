use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use weylconn_cli::commands::{self, GeodesicRequest, LoopSpec, ObjectSpec};
use weylconn_cli::report::Report;
use weylconn_cli::{bindings_of, load_scenario, parse_param, parse_reals, CliError};

/// Comma-separated reals as one argument.
#[derive(Clone, Debug)]
struct Reals(Vec<f64>);

fn reals(s: &str) -> Result<Reals, String> {
    parse_reals(s).map(Reals)
}

#[derive(Parser)]
#[command(
    name = "weylconn",
    version,
    about = "Locally metric connections on quotient manifolds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Built-in scenario name (rw-klein, rw-torus, deg-cylinder) or a JSON scenario file.
    #[arg(long)]
    scenario: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Parameter override `name=value`; repeatable.
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, f64)>,
    /// Write the JSON report to this path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print JSON instead of text on stdout.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Closedness, deck invariance, defining equation and equivariance checks.
    Verify {
        #[command(flatten)]
        common: Common,
    },
    /// Periods, exactness verdict, holonomy scales and cocycles.
    Classify {
        #[command(flatten)]
        common: Common,
    },
    /// Nonzero Christoffel symbols at a point.
    Christoffel {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = reals)]
        point: Reals,
        /// Use the spatial slice at `t = t0` (point given in slice coordinates).
        #[arg(long)]
        slice: bool,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        t0: f64,
    },
    /// Parallel transport of the metric or a vector around a deck loop.
    Transport {
        #[command(flatten)]
        common: Common,
        /// `gen:N` or `word:N,M,...`
        #[arg(long = "loop")]
        loop_spec: LoopSpec,
        /// `metric` or `vector:v1,...,vn`
        #[arg(long, default_value = "metric", allow_hyphen_values = true)]
        object: ObjectSpec,
        #[arg(long, value_parser = reals, allow_hyphen_values = true)]
        base: Option<Reals>,
    },
    /// Integrate a geodesic.
    Geodesic {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = reals, allow_hyphen_values = true)]
        x0: Reals,
        #[arg(long, value_parser = reals, allow_hyphen_values = true)]
        v0: Reals,
        #[arg(long)]
        smax: f64,
        /// Keep every n-th RK4 step in the trajectory.
        #[arg(long, default_value_t = 100)]
        stride: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Riemann, Ricci, scalar and Einstein tensors in a gauge.
    Curvature {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = reals, allow_hyphen_values = true)]
        point: Reals,
        #[arg(long, default_value_t = 1.0)]
        gauge: f64,
        #[arg(long)]
        rescale_check: bool,
    },
    /// All of the above with default arguments.
    Report {
        #[command(flatten)]
        common: Common,
    },
}

fn run(cmd: Command) -> Result<(Report, Common), CliError> {
    let (name, common, sections) = match cmd {
        Command::Verify { common } => {
            let sc = load_scenario(&common.scenario, &common.params)?;
            let s = vec![commands::verify(&sc, common.seed)?];
            ("verify", (common, sc), s)
        }
        Command::Classify { common } => {
            let sc = load_scenario(&common.scenario, &common.params)?;
            let s = vec![commands::classify(&sc)?];
            ("classify", (common, sc), s)
        }
        Command::Christoffel {
            common,
            point,
            slice,
            t0,
        } => {
            let sc = load_scenario(&common.scenario, &common.params)?;
            let s = vec![commands::christoffel(&sc, &point.0, slice.then_some(t0))?];
            ("christoffel", (common, sc), s)
        }
        Command::Transport {
            common,
            loop_spec,
            object,
            base,
        } => {
            let sc = load_scenario(&common.scenario, &common.params)?;
            let s = vec![commands::transport(
                &sc,
                &loop_spec,
                &object,
                base.as_ref().map(|b| b.0.as_slice()),
            )?];
            ("transport", (common, sc), s)
        }
        Command::Geodesic {
            common,
            x0,
            v0,
            smax,
            stride,
            csv,
        } => {
            let sc = load_scenario(&common.scenario, &common.params)?;
            let req = GeodesicRequest {
                x0: &x0.0,
                v0: &v0.0,
                s_max: smax,
                stride,
                csv: csv.as_deref(),
            };
            let s = vec![commands::geodesic_cmd(&sc, &req)?];
            ("geodesic", (common, sc), s)
        }
        Command::Curvature {
            common,
            point,
            gauge,
            rescale_check,
        } => {
            let sc = load_scenario(&common.scenario, &common.params)?;
            let s = vec![commands::curvature(&sc, &point.0, gauge, rescale_check)?];
            ("curvature", (common, sc), s)
        }
        Command::Report { common } => {
            let sc = load_scenario(&common.scenario, &common.params)?;
            let s = commands::full_report(&sc, common.seed)?;
            ("report", (common, sc), s)
        }
    };
    let (common, sc) = common;
    let report = Report::new(name, &sc.name, common.seed, bindings_of(&sc), sections);
    Ok((report, common))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok((report, common)) => {
            let json = report.to_json();
            if let Some(path) = &common.out {
                if let Err(e) = std::fs::write(path, &json) {
                    eprintln!("weylconn: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            if common.json {
                print!("{json}");
            } else {
                print!("{}", report.to_text());
            }
            ExitCode::from(if report.passed() { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("weylconn: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
