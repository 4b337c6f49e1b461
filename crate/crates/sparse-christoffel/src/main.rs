use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sparse_christoffel::cli::{
    self, DensityConfig, EvalDenseConfig, FitConfig, GraphAnalyzeConfig, ScoreConfig,
    SublevelConfig, Summary,
};
use sparse_christoffel::multiindex::DegreeMode;
use sparse_christoffel::rational::DEFAULT_MAX_DEGREE;

/// Rational Christoffel functions over graphical models: fit from moments,
/// score outliers, estimate densities and export sublevel sets.
#[derive(Parser)]
#[command(name = "christoffel", version, about)]
struct Cli {
    /// Random seed recorded in summaries; every command is deterministic
    /// given its inputs.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a model from sample CSV or a built-in measure and write it to disk.
    Fit {
        /// Headerless CSV of samples, one point per row.
        #[arg(long, conflicts_with = "measure")]
        samples: Option<PathBuf>,
        /// Built-in measure id: uniform<d>, quad<d> or coupled.
        #[arg(long)]
        measure: Option<String>,
        /// Graph file: first line d, then one "u v" edge per line (1-based).
        /// Defaults to the measure's own graph when fitting from a measure.
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Factor degree n.
        #[arg(long, default_value_t = 2)]
        degree: usize,
        /// Basis truncation per factor.
        #[arg(long, default_value = "coord")]
        mode: DegreeMode,
        /// Diagonal shift for empirical moment matrices.
        #[arg(long, default_value_t = 0.0)]
        jitter: f64,
        /// Disable the per-coordinate rescaling onto [-1, 1].
        #[arg(long)]
        no_rescale: bool,
        /// Degree guardrail override.
        #[arg(long, default_value_t = DEFAULT_MAX_DEGREE)]
        max_degree: usize,
        /// Do not store training scores in the model (disables quantile
        /// thresholds for later scoring).
        #[arg(long)]
        no_scores: bool,
        /// Output model file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Score points against a fitted model; writes index,log_score,flag CSV.
    Score {
        #[arg(long)]
        model: PathBuf,
        /// Points to score, headerless CSV.
        #[arg(long)]
        samples: PathBuf,
        /// Training-score quantile used as the flagging threshold.
        #[arg(long, default_value_t = 0.95)]
        quantile: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate the density at points; writes index,density CSV.
    Density {
        #[arg(long)]
        model: PathBuf,
        /// Points to evaluate, headerless CSV.
        #[arg(long)]
        samples: PathBuf,
        /// Box-average width in the model's rescaled coordinates.
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate log Ψ over a grid with a sublevel mask log Ψ <= log γ.
    Sublevel {
        #[arg(long)]
        model: PathBuf,
        /// Per-axis spec lo:hi:count, comma separated, one axis per variable.
        #[arg(long)]
        grid: String,
        /// Sublevel threshold on Ψ itself.
        #[arg(long, conflicts_with = "quantile")]
        gamma: Option<f64>,
        /// Threshold as a quantile of the model's training scores.
        #[arg(long)]
        quantile: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate the unfactored (dense) Christoffel polynomial of a built-in
    /// measure at points, for comparison against a fitted model.
    EvalDense {
        /// Built-in measure id supplying the exact moments.
        #[arg(long)]
        measure: String,
        /// Points to evaluate, headerless CSV.
        #[arg(long)]
        samples: PathBuf,
        #[arg(long, default_value_t = 2)]
        degree: usize,
        #[arg(long, default_value = "coord")]
        mode: DegreeMode,
        #[arg(long, default_value_t = 0.0)]
        jitter: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Graph utilities.
    Graph {
        #[command(subcommand)]
        action: GraphAction,
    },
}

#[derive(Subcommand)]
enum GraphAction {
    /// Report cliques, separators, clique number and treewidth bound of the
    /// min-fill completion, with a DOT rendering of the junction tree.
    Analyze {
        #[arg(long)]
        graph: PathBuf,
        /// Write the DOT rendering here instead of inlining it in the summary.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> sparse_christoffel::Result<Summary> {
    let seed = cli.seed;
    match cli.command {
        Command::Fit {
            samples,
            measure,
            graph,
            degree,
            mode,
            jitter,
            no_rescale,
            max_degree,
            no_scores,
            out,
        } => cli::run_fit(&FitConfig {
            samples,
            measure,
            graph,
            degree,
            mode,
            jitter,
            rescale: !no_rescale,
            max_degree,
            retain_scores: !no_scores,
            out,
            seed,
        }),
        Command::Score {
            model,
            samples,
            quantile,
            out,
        } => cli::run_score(&ScoreConfig {
            model,
            samples,
            quantile,
            out,
            seed,
        }),
        Command::Density {
            model,
            samples,
            epsilon,
            out,
        } => cli::run_density(&DensityConfig {
            model,
            samples,
            epsilon,
            out,
            seed,
        }),
        Command::Sublevel {
            model,
            grid,
            gamma,
            quantile,
            out,
        } => cli::run_sublevel(&SublevelConfig {
            model,
            grid,
            gamma,
            quantile,
            out,
            seed,
        }),
        Command::EvalDense {
            measure,
            samples,
            degree,
            mode,
            jitter,
            out,
        } => cli::run_eval_dense(&EvalDenseConfig {
            measure,
            samples,
            degree,
            mode,
            jitter,
            out,
            seed,
        }),
        Command::Graph {
            action: GraphAction::Analyze { graph, dot },
        } => cli::run_graph_analyze(&GraphAnalyzeConfig {
            graph,
            dot_out: dot,
            seed,
        }),
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(summary) => {
            print!("{}", summary.lines());
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
