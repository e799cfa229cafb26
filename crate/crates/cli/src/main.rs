//! `netsum`: generate graphs, analyze spectra, run global-sum protocols,
//! and work with step-matrix factorizations.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use netsum_cli::commands::{self, AuditScope, CmdResult};
use netsum_cli::experiment::{
    ExperimentConfig, GraphSource, InputSpec, ProtocolSpec, DEFAULT_EXACT_TOL,
};

#[derive(Parser)]
#[command(
    name = "netsum",
    version,
    about = "Global-sum protocols on regular networks: spectral schedules, exact small-diameter protocols, and step-matrix factorizations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Subcommand's main tolerance: eigenvalue clustering for `spectrum`,
    /// exactness for `run`/`audit`, residual factor for `factor`.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Default seed for seeded inputs and searches.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Capture per-round per-vertex states in run reports.
    #[arg(long, global = true)]
    trace: bool,

    /// Write the primary output to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Write a graph file for a named family
    /// (cycle N | complete N | hypercube D | petersen | circulant N S1,S2 |
    /// product SPEC SPEC)
    Generate {
        #[arg(required = true, num_args = 1..)]
        family: Vec<String>,
        /// Emit the JSON graph form (also chosen by a .json --out extension)
        #[arg(long)]
        json: bool,
    },
    /// Distinct eigenvalues, m, BFS diameter, the m - D gap, and the
    /// Chebyshev diameter bound
    Spectrum { graph: PathBuf },
    /// Run a protocol and check exactness (exit 0 iff the check passes)
    Run {
        /// Graph file; alternatively use --graph-spec or --config
        graph: Option<PathBuf>,
        /// Build the graph from a family spec, e.g. "product cycle 5 complete 2"
        #[arg(long)]
        graph_spec: Option<String>,
        /// hoffman | tree | diam2 | product | approx | schedule
        #[arg(long)]
        protocol: Option<String>,
        /// Tree root (default 0)
        #[arg(long)]
        root: Option<usize>,
        /// Polynomial degree for --protocol approx
        #[arg(short, long)]
        m: Option<usize>,
        /// Schedule file for --protocol schedule
        #[arg(long)]
        schedule: Option<PathBuf>,
        /// Factor protocols for --protocol product, e.g. "hoffman,tree"
        #[arg(long)]
        factor_protocols: Option<String>,
        /// ones | unit:K | uniform:SEED | file:PATH (default ones)
        #[arg(long)]
        input: Option<String>,
        /// Full ExperimentConfig JSON; other flags are ignored
        #[arg(long)]
        config: Option<PathBuf>,
        /// Eigenvalue clustering tolerance override
        #[arg(long)]
        cluster_tol: Option<f64>,
        /// Export the linear schedule's step matrices in triplet form
        #[arg(long)]
        save_schedule: Option<PathBuf>,
    },
    /// Factorization tools for the step-matrix product problem
    Factor {
        graph: PathBuf,
        #[command(subcommand)]
        action: FactorAction,
    },
    /// CSV audit: graph, n, d, D, m, best exact protocol rounds, gap
    Audit {
        /// Comma-separated: cycle,complete,hypercube,petersen,product
        #[arg(long, default_value = "cycle,complete,hypercube,petersen,product")]
        families: String,
        #[arg(long, default_value_t = 3)]
        min: usize,
        #[arg(long, default_value_t = 12)]
        max: usize,
        /// Largest product-graph size to include
        #[arg(long, default_value_t = 64)]
        product_cap: usize,
    },
}

#[derive(Subcommand)]
enum FactorAction {
    /// Exact eigenvalue-derived factorization (factor file to --out,
    /// summary JSON to stdout)
    Eigen,
    /// Verify a factorization file against the graph support and J
    Verify { file: PathBuf },
    /// Alternating-least-squares search for a length-M factorization
    Search {
        m: usize,
        budget: usize,
        /// Restart seed (defaults to --seed)
        seed: Option<u64>,
        /// Warm-start factorization file
        #[arg(long)]
        warm: Option<PathBuf>,
        /// Write the best factorization found
        #[arg(long)]
        save_best: Option<PathBuf>,
    },
    /// Per-frequency Fourier cover report for circulant schedules
    /// (eigenvalue-derived by default)
    Fourier {
        #[arg(long)]
        schedule: Option<PathBuf>,
    },
    /// Project a factorization onto the circulant subspace
    Symmetrize { file: PathBuf },
}

fn parse_simple_protocol(name: &str, root: usize) -> Result<ProtocolSpec, String> {
    match name {
        "hoffman" => Ok(ProtocolSpec::Hoffman),
        "tree" => Ok(ProtocolSpec::Tree { root }),
        "diam2" => Ok(ProtocolSpec::Diam2),
        other => Err(format!("unknown factor protocol `{other}`")),
    }
}

#[allow(clippy::too_many_arguments)]
fn run_config_from_flags(
    graph: Option<PathBuf>,
    graph_spec: Option<String>,
    protocol: Option<String>,
    root: Option<usize>,
    m: Option<usize>,
    schedule: Option<PathBuf>,
    factor_protocols: Option<String>,
    input: Option<String>,
    cluster_tol: Option<f64>,
    tol: Option<f64>,
    seed: u64,
    trace: bool,
) -> Result<ExperimentConfig, String> {
    let graph = match (graph, graph_spec) {
        (Some(file), None) => GraphSource::File { file },
        (None, Some(spec)) => GraphSource::Spec { spec },
        (Some(_), Some(_)) => return Err("give either a graph file or --graph-spec, not both".into()),
        (None, None) => return Err("missing graph: give a file, --graph-spec, or --config".into()),
    };
    let root = root.unwrap_or(0);
    let protocol = match protocol.as_deref() {
        Some("hoffman") | None => ProtocolSpec::Hoffman,
        Some("tree") => ProtocolSpec::Tree { root },
        Some("diam2") => ProtocolSpec::Diam2,
        Some("approx") => ProtocolSpec::Approx {
            m: m.ok_or("--protocol approx needs --m")?,
        },
        Some("schedule") => ProtocolSpec::Schedule {
            file: schedule.ok_or("--protocol schedule needs --schedule FILE")?,
        },
        Some("product") => {
            let spec = factor_protocols.unwrap_or_else(|| "hoffman,hoffman".into());
            let (first, second) = spec
                .split_once(',')
                .ok_or("--factor-protocols needs two comma-separated names")?;
            ProtocolSpec::Product {
                first: Box::new(parse_simple_protocol(first.trim(), root)?),
                second: Box::new(parse_simple_protocol(second.trim(), root)?),
            }
        }
        Some(other) => return Err(format!("unknown protocol `{other}`")),
    };
    let input = match input.as_deref() {
        None => InputSpec::Ones,
        Some("uniform") => InputSpec::Uniform { seed },
        Some(s) => InputSpec::parse_cli(s).map_err(|e| e.to_string())?,
    };
    Ok(ExperimentConfig {
        graph,
        protocol,
        input,
        cluster_tol,
        exact_tol: tol.unwrap_or(DEFAULT_EXACT_TOL),
        trace,
        out: None,
    })
}

fn dispatch(cli: Cli) -> CmdResult {
    let out = cli.out.as_deref();
    match cli.command {
        Command::Generate { family, json } => commands::cmd_generate(&family, json, out),
        Command::Spectrum { graph } => commands::cmd_spectrum(&graph, cli.tol, out),
        Command::Run {
            graph,
            graph_spec,
            protocol,
            root,
            m,
            schedule,
            factor_protocols,
            input,
            config,
            cluster_tol,
            save_schedule,
        } => {
            let config = match config {
                Some(path) => {
                    ExperimentConfig::load(&path).map_err(|e| commands::UsageError(e.to_string()))?
                }
                None => run_config_from_flags(
                    graph,
                    graph_spec,
                    protocol,
                    root,
                    m,
                    schedule,
                    factor_protocols,
                    input,
                    cluster_tol,
                    cli.tol,
                    cli.seed,
                    cli.trace,
                )
                .map_err(commands::UsageError)?,
            };
            commands::cmd_run(&config, out, save_schedule.as_deref())
        }
        Command::Factor { graph, action } => match action {
            FactorAction::Eigen => commands::cmd_factor_eigen(&graph, cli.tol, out),
            FactorAction::Verify { file } => {
                commands::cmd_factor_verify(&graph, &file, cli.tol, out)
            }
            FactorAction::Search {
                m,
                budget,
                seed,
                warm,
                save_best,
            } => commands::cmd_factor_search(
                &graph,
                m,
                budget,
                seed.unwrap_or(cli.seed),
                warm.as_deref(),
                save_best.as_deref(),
                out,
            ),
            FactorAction::Fourier { schedule } => {
                commands::cmd_factor_fourier(&graph, schedule.as_deref(), cli.tol, out)
            }
            FactorAction::Symmetrize { file } => {
                commands::cmd_factor_symmetrize(&graph, &file, out)
            }
        },
        Command::Audit {
            families,
            min,
            max,
            product_cap,
        } => {
            let scope = AuditScope {
                families: families.split(',').map(|s| s.trim().to_string()).collect(),
                min,
                max,
                product_cap,
            };
            commands::cmd_audit(&scope, cli.tol, out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
