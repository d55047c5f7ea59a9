mod commands;
mod report;

use clap::{Args, Parser, Subcommand};
use commands::{load_form, load_graph, EvalArgs};
use holofeyn::amplitude::required_test_form_degree;
use holofeyn::quadrature::QuadConfig;
use holofeyn::Error;
use report::{Format, Report};
use std::path::PathBuf;
use std::process::ExitCode;

/// Workbench for holomorphic Feynman graph integrals.
///
/// Exit codes: 0 success, 1 usage/parse/input errors, 2 a checked identity failed,
/// 3 quadrature did not converge.
#[derive(Parser)]
#[command(name = "holofeyn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    output: Format,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "HOLOFEYN_THREADS")]
    threads: Option<usize>,
}

#[derive(Args)]
struct GraphArgs {
    /// Graph file (`dim`, `vertices`, `edge TAIL HEAD n=...` lines, 1-based).
    #[arg(long)]
    graph: PathBuf,
    /// Complex dimension; overrides the file's `dim`, padding decorations with zeros.
    #[arg(long)]
    d: Option<usize>,
}

#[derive(Args)]
struct QuadArgs {
    #[arg(long, default_value_t = 1e-6)]
    rtol: f64,
    #[arg(long, default_value_t = 1e-12)]
    atol: f64,
    #[arg(long, default_value_t = 2_000_000)]
    max_evals: usize,
}

impl QuadArgs {
    fn config(&self) -> QuadConfig {
        QuadConfig::new(self.rtol, self.atol, self.max_evals)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Laman verdict, witness and vanishing certificate.
    Classify(GraphArgs),
    /// Kirchhoff polynomial with the determinant identity.
    Kirchhoff(GraphArgs),
    /// Weighted Laplacian and its inverse with the product identity.
    Minverse(GraphArgs),
    /// Entries of d⁻¹ with the numerator-inclusion check.
    Dinverse(GraphArgs),
    /// Lowest ρ power of the Kirchhoff polynomial in each corner chart.
    Corners(GraphArgs),
    /// Regularized amplitude by quadrature, optionally against Monte Carlo.
    Eval {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        quad: QuadArgs,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        #[arg(long = "L", default_value_t = f64::INFINITY)]
        l: f64,
        /// Test-form JSON; a fixed Gaussian packet when omitted.
        #[arg(long)]
        phi: Option<PathBuf>,
        #[arg(long)]
        mc: bool,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Position-space Monte-Carlo estimate of the regularized amplitude.
    McOracle {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long = "L", default_value_t = 1.0)]
        l: f64,
        #[arg(long)]
        phi: Option<PathBuf>,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Symbol of the anomaly operator, applied to a form when one is given.
    Anomaly {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        quad: QuadArgs,
        #[arg(long)]
        phi: Option<PathBuf>,
    },
    /// Signed sum of composed anomaly terms over Laman subgraphs.
    QuadraticCheck {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        quad: QuadArgs,
        #[arg(long)]
        phi: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
    },
    /// Outer-face contributions for increasing box sizes.
    BoundaryDecay {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        quad: QuadArgs,
        #[arg(long)]
        phi: Option<PathBuf>,
        #[arg(long = "Ls", value_delimiter = ',', default_values_t = vec![1.0, 2.0, 4.0, 8.0])]
        ls: Vec<f64>,
        /// Exit 2 unless the magnitudes strictly decrease.
        #[arg(long)]
        assert_decreasing: bool,
    },
}

enum Failure {
    Input(String),
    Engine(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Engine(e)
    }
}

impl From<String> for Failure {
    fn from(s: String) -> Self {
        Failure::Input(s)
    }
}

fn run(cmd: &Command) -> Result<Report, Failure> {
    let graph = |a: &GraphArgs| load_graph(&a.graph, a.d);
    Ok(match cmd {
        Command::Classify(a) => commands::classify(&graph(a)?)?,
        Command::Kirchhoff(a) => commands::kirchhoff(&graph(a)?)?,
        Command::Minverse(a) => commands::minverse(&graph(a)?)?,
        Command::Dinverse(a) => commands::dinverse(&graph(a)?)?,
        Command::Corners(a) => commands::corners(&graph(a)?)?,
        Command::Eval { graph: ga, quad, eps, l, phi, mc, samples, seed } => {
            if *mc && !(*eps > 0.0 && l.is_finite()) {
                return Err(Failure::Input("--mc needs a positive --eps and a finite --L".into()));
            }
            let g = graph(ga)?;
            let form = load_form(phi, &g, required_test_form_degree(&g, g.dim()))?;
            commands::eval(&g, &form, &EvalArgs { eps: *eps, l: *l, mc: *mc, samples: *samples, seed: *seed }, &quad.config())?
        }
        Command::McOracle { graph: ga, eps, l, phi, samples, seed } => {
            let g = graph(ga)?;
            let form = load_form(phi, &g, required_test_form_degree(&g, g.dim()))?;
            commands::mc_oracle(&g, &form, &EvalArgs { eps: *eps, l: *l, mc: true, samples: *samples, seed: *seed })?
        }
        Command::Anomaly { graph: ga, quad, phi } => {
            let g = graph(ga)?;
            let form = match phi {
                Some(_) => Some(load_form(phi, &g, required_test_form_degree(&g, g.dim()) - 1)?),
                None => None,
            };
            commands::anomaly(&g, form.as_ref(), &quad.config())?
        }
        Command::QuadraticCheck { graph: ga, quad, phi, tol } => {
            let g = graph(ga)?;
            let form = load_form(phi, &g, required_test_form_degree(&g, g.dim()) - 2)?;
            commands::quadratic_check(&g, &form, *tol, &quad.config())?
        }
        Command::BoundaryDecay { graph: ga, quad, phi, ls, assert_decreasing } => {
            let g = graph(ga)?;
            let form = load_form(phi, &g, required_test_form_degree(&g, g.dim()) - 1)?;
            commands::boundary_decay(&g, &form, ls, *assert_decreasing, &quad.config())?
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {}", e);
            return ExitCode::from(1);
        }
    }
    match run(&cli.command) {
        Ok(report) => {
            let mut out = std::io::stdout().lock();
            match report.render(cli.output, &mut out) {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => return ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {}", e);
                    return ExitCode::from(1);
                }
                Ok(()) => {}
            }
            match &report.failure {
                Some(msg) => {
                    eprintln!("check failed: {}", msg);
                    ExitCode::from(2)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(1)
        }
        Err(Failure::Engine(e)) => {
            eprintln!("error: {}", e);
            ExitCode::from(match e {
                Error::AssertionFailed(_) => 2,
                Error::NonConvergence { .. } => 3,
                _ => 1,
            })
        }
    }
}
