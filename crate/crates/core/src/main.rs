use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use affine_cluster::cli::{
    self, Bounds, CliError, CoefficientMode, Format, Identity, RunConfig, EXIT_CONFIG, EXIT_VIOLATION,
};

#[derive(Parser)]
#[command(name = "affine-cluster", version, about = "Exact computations for acyclic affine cluster algebras")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: FormatArg,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum CoeffArg {
    Principal,
    Free,
    Custom,
}

#[derive(Args, Clone)]
struct Common {
    /// Bundled matrix name (e.g. A2tilde, A2tilde.json, kronecker) or a
    /// path to a matrix file.
    #[arg(long, short)]
    matrix: String,
    #[arg(long, value_enum, default_value = "principal")]
    coefficients: CoeffArg,
    /// Custom coefficient rows, e.g. "1,0;0,1"; defaults to the rows in the
    /// matrix file.
    #[arg(long)]
    rows: Option<String>,
    #[arg(long, default_value_t = Bounds::default().bfs_depth)]
    bfs_depth: usize,
    /// Root enumeration bound as a multiple of height(delta).
    #[arg(long, default_value_t = Bounds::default().height_factor)]
    height_factor: i64,
    /// Series order for rank-2 scattering diagrams.
    #[arg(long, default_value_t = Bounds::default().series_order)]
    order: usize,
    #[arg(long, default_value_t = Bounds::default().peel_budget)]
    peel_budget: usize,
    #[arg(long, default_value_t = Bounds::default().graph_budget)]
    graph_budget: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Mutate the initial seed along a word of 1-based indices.
    Mutate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "")]
        word: String,
    },
    /// g-vectors of the cluster reached by a mutation word.
    Gvec {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "")]
        word: String,
    },
    /// Tubes, Simples orbits, arcs and their nu_c images.
    TubeInfo {
        #[command(flatten)]
        common: Common,
    },
    /// c-cluster expansion of a root in the imaginary wall (--root), or the
    /// theta-basis expansion of a product of two theta functions.
    Expand {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["left", "right"])]
        root: Option<String>,
        #[arg(long, allow_hyphen_values = true, requires = "right")]
        left: Option<String>,
        #[arg(long, allow_hyphen_values = true, requires = "left")]
        right: Option<String>,
    },
    /// Theta function of a label: "delta", "k*delta", "root:a,b,..", or a weight "a,b,..".
    Theta {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        target: String,
    },
    /// Rank-2 theta function from broken lines.
    Theta2 {
        #[command(flatten)]
        common: Common,
        #[arg(long, visible_alias = "lambda", allow_hyphen_values = true)]
        weight: String,
        /// Endpoint "p,q" with rational coordinates.
        #[arg(long, allow_hyphen_values = true)]
        endpoint: Option<String>,
    },
    /// Complete a rank-2 scattering diagram.
    Scatter2 {
        #[command(flatten)]
        common: Common,
        /// Include every wall; with a path, write them there as JSON.
        #[arg(long, num_args = 0..=1, value_name = "FILE")]
        dump: Option<Option<String>>,
    },
    /// Re-check the consistency of a diagram written by `scatter2 --dump`.
    CheckWalls {
        #[arg(long, value_name = "FILE")]
        file: String,
    },
    /// Exchange graph of the generalized cluster algebra of one tube.
    GcaGraph {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        tube: usize,
        /// JSON output; with a path, write it there.
        #[arg(long, num_args = 0..=1, value_name = "FILE")]
        json: Option<Option<String>>,
    },
    /// Check every tube's generalized cluster algebra.
    GcaVerify {
        #[command(flatten)]
        common: Common,
    },
    /// Check identities; exit 1 if any fails.
    Verify {
        #[command(flatten)]
        common: Common,
        /// thetaxi, cheby, imexch, expansion, tube-closure, csym, gca or all.
        #[arg(long, default_value = "all")]
        identity: String,
        /// Seed for sampled checks.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
    /// Tubes, nu_c values, theta functions and exchange graph statistics.
    Report {
        #[command(flatten)]
        common: Common,
    },
}

fn config(common: &Common, format: FormatArg) -> Result<RunConfig, CliError> {
    let coefficients = match (common.coefficients, &common.rows) {
        (CoeffArg::Principal, None) => CoefficientMode::Principal,
        (CoeffArg::Free, None) => CoefficientMode::Free,
        (CoeffArg::Custom, rows) => {
            CoefficientMode::Custom(rows.as_deref().map(cli::parse_rows).transpose()?)
        }
        (_, Some(_)) => return Err(CliError::config("--rows needs --coefficients custom")),
    };
    Ok(RunConfig {
        matrix: common.matrix.clone(),
        coefficients,
        bounds: Bounds {
            bfs_depth: common.bfs_depth,
            height_factor: common.height_factor,
            series_order: common.order,
            peel_budget: common.peel_budget,
            graph_budget: common.graph_budget,
        },
        format: match format {
            FormatArg::Text => Format::Text,
            FormatArg::Json => Format::Json,
        },
        seed: 0,
        samples: 50,
    })
}

fn write_or_return(out: String, path: Option<String>) -> Result<String, CliError> {
    match path {
        Some(p) => {
            std::fs::write(&p, &out).map_err(|e| CliError::config(format!("{p}: {e}")))?;
            Ok(format!("wrote {p}\n"))
        }
        None => Ok(out),
    }
}

/// Output and exit code.
fn run(cli: Cli) -> Result<(String, i32), CliError> {
    let f = cli.format;
    let ok = |s: String| Ok((s, 0));
    match cli.command {
        Command::Mutate { common, word } => {
            let c = config(&common, f)?;
            ok(cli::seed_output(&c, &word, false)?.render(c.format))
        }
        Command::Gvec { common, word } => {
            let c = config(&common, f)?;
            if c.coefficients != CoefficientMode::Principal {
                return Err(CliError::config("g-vectors need principal coefficients"));
            }
            ok(cli::seed_output(&c, &word, true)?.render(c.format))
        }
        Command::TubeInfo { common } => ok(cli::tube_info(&config(&common, f)?)?),
        Command::Expand { common, root, left, right } => {
            let c = config(&common, f)?;
            match (root, left, right) {
                (Some(r), _, _) => ok(cli::expansion_command(&c, &r)?),
                (None, Some(l), Some(r)) => ok(cli::expand_command(&c, &l, &r)?),
                _ => Err(CliError::config("expand needs --root or both --left and --right")),
            }
        }
        Command::Theta { common, target } => ok(cli::theta_command(&config(&common, f)?, &target)?),
        Command::Theta2 { common, weight, endpoint } => {
            ok(cli::theta2_command(&config(&common, f)?, &weight, endpoint.as_deref())?)
        }
        Command::CheckWalls { file } => {
            let format = if matches!(f, FormatArg::Json) { Format::Json } else { Format::Text };
            let out = cli::scatter2_check_command(&file, format)?;
            let code = if out.ends_with("inconsistent diagram\n") { EXIT_VIOLATION } else { 0 };
            Ok((out, code))
        }
        Command::Scatter2 { common, dump } => {
            let mut c = config(&common, f)?;
            let path = dump.clone().flatten();
            if path.is_some() {
                c.format = Format::Json;
            }
            let out = cli::scatter2_command(&c, dump.is_some())?;
            let out = write_or_return(out, path)?;
            let code = if out.ends_with("inconsistent diagram\n") { EXIT_VIOLATION } else { 0 };
            Ok((out, code))
        }
        Command::GcaGraph { common, tube, json } => {
            let mut c = config(&common, f)?;
            if json.is_some() {
                c.format = Format::Json;
            }
            ok(write_or_return(cli::gca_graph_command(&c, tube)?, json.flatten())?)
        }
        Command::GcaVerify { common } => ok(cli::gca_verify_command(&config(&common, f)?)?),
        Command::Verify { common, identity, seed, samples } => {
            let mut c = config(&common, f)?;
            c.seed = seed;
            c.samples = samples;
            let ids = Identity::parse_list(&identity)?;
            let report = cli::run_verify(&c, &ids)?;
            Ok((report.render(c.format), report.exit_code()))
        }
        Command::Report { common } => {
            let c = config(&common, f)?;
            ok(cli::build_report(&c)?.render(c.format))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CLUSTER_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok((out, code)) => {
            let _ = std::io::stdout().write_all(out.as_bytes());
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
