use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dimcut_cli::commands::{self, BenchArgs, RunArgs};
use dimcut_cli::CliError;
use dimcut_core::tabular::ProblemType;

const KV_KEYS_HELP: &str = "\
Report key-value file (report.kv) keys, one `key = value` per line, lists
comma-separated, floats in full precision:
  problem_type, n_rows, n_features_initial, feature_names, seed,
  interpretability_weight, integrity_weight, target_resolution (or `auto`),
  score_statistic (mean|best),
  rf_importance, pca_importance             (per original feature/component),
  selection_fold_scores, selection_epochs,
  extraction_fold_scores, extraction_epochs,
  mlp_accuracy_selection_mean, mlp_accuracy_selection_best,
  mlp_accuracy_extraction_mean, mlp_accuracy_extraction_best,
  mlp_accuracy_selection, mlp_accuracy_extraction   (statistic fed to the
                                                     decision equations),
  interpretability_score, integrity_score, chosen_method,
  selection_n_kept, selection_resolution,
  selection_cut_lambda, selection_cut_wdelta, selection_cut_total,
  extraction_n_kept, extraction_resolution,
  extraction_cut_lambda, extraction_cut_wdelta, extraction_cut_total,
  n_kept, achieved_resolution, reduced_dataset      (path of the CSV).

Other outputs in --out: report.txt (human-readable justification),
reduced.csv (the reduced dataset), importance_rf.csv, importance_pca.csv
(rank,name,importance series), cut_scores.csv (cut_position,resolution,
weighted_delta,total for the chosen pipeline's automatic cut).";

const SYNTH_SPEC_HELP: &str = "\
Synth spec format: TYPE,ROWS,FEATURES[,informative=K][,classes=C][,noise=S][,seed=N]
  e.g. `regression,500,5`, `classification,10000,100,seed=1`.
Defaults: all features informative, 2 classes, noise 10 (regression),
seed taken from --seed.";

/// Decide between feature selection and feature extraction for a supervised
/// tabular dataset, pick how many features/components to keep, and emit the
/// reduced dataset with a justified decision report.
///
/// The environment variable DIMCUT_THREADS caps internal parallelism.
#[derive(Parser)]
#[command(name = "dimcut", version, about, long_about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run both reduction pipelines on a CSV or synthetic dataset and write
    /// the decision report plus plot-data files.
    #[command(after_long_help = KV_KEYS_HELP)]
    Run {
        /// Input CSV (header row, target in the last column).
        #[arg(long, value_name = "FILE")]
        input: Option<PathBuf>,
        /// Generate the input instead of reading it.
        #[arg(long, value_name = "SPEC", long_help = SYNTH_SPEC_HELP)]
        synth: Option<String>,
        /// Problem type; required with --input, optional cross-check with
        /// --synth.
        #[arg(long, value_parser = parse_problem)]
        problem: Option<ProblemType>,
        /// Interpretability weight in [0, 1] (default 0.5).
        #[arg(long)]
        interp: Option<f64>,
        /// Integrity weight in [0, 1] (default 0.5); must sum to 1 with
        /// --interp.
        #[arg(long)]
        integ: Option<f64>,
        /// Target resolution in (0, 1); omitted = automatic cut-point.
        #[arg(long)]
        resolution: Option<f64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output directory.
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        /// Override the forest size (default 100 trees).
        #[arg(long)]
        trees: Option<usize>,
        /// Override the MLP epoch cap (default 100000).
        #[arg(long)]
        max_epochs: Option<usize>,
        /// Override the cross-validation fold count (default 10).
        #[arg(long)]
        folds: Option<usize>,
        /// Feed best-fold scores (instead of fold means) to the decision
        /// equations.
        #[arg(long)]
        best_fold: bool,
    },
    /// Generate a synthetic dataset and write it as CSV.
    Synth {
        #[arg(long, value_name = "SPEC", long_help = SYNTH_SPEC_HELP)]
        spec: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output CSV path.
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Replay the decision rule on random (accuracy, weight) cases and emit
    /// scatter data; exits 0 only if every label matches the threshold rule.
    Validate {
        #[arg(long, default_value_t = 250)]
        cases: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
    /// Time the pipeline over a sweep of dataset sizes and report growth
    /// ratios.
    Bench {
        /// Comma-separated row counts, e.g. 1000,2000,4000.
        #[arg(long, value_delimiter = ',')]
        rows_sweep: Option<Vec<usize>>,
        /// Comma-separated feature counts, e.g. 5,10,20,40.
        #[arg(long, value_delimiter = ',')]
        features_sweep: Option<Vec<usize>>,
        /// Fixed feature count for --rows-sweep.
        #[arg(long, default_value_t = 8)]
        features: usize,
        /// Fixed row count for --features-sweep.
        #[arg(long, default_value_t = 2000)]
        rows: usize,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_parser = parse_problem, default_value = "regression")]
        problem: ProblemType,
        /// Override the forest size for faster sweeps.
        #[arg(long)]
        trees: Option<usize>,
        /// Override the MLP epoch cap for faster sweeps.
        #[arg(long)]
        max_epochs: Option<usize>,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
}

fn parse_problem(raw: &str) -> Result<ProblemType, String> {
    raw.parse().map_err(|e: dimcut_core::Error| e.to_string())
}

fn init_thread_pool() {
    if let Ok(raw) = std::env::var("DIMCUT_THREADS") {
        match raw.parse::<usize>() {
            Ok(n) if n >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("warning: ignoring DIMCUT_THREADS={raw:?} (not a positive integer)"),
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Run {
            input,
            synth,
            problem,
            interp,
            integ,
            resolution,
            seed,
            out,
            trees,
            max_epochs,
            folds,
            best_fold,
        } => commands::cmd_run(&RunArgs {
            input,
            synth,
            problem,
            interp,
            integ,
            resolution,
            seed,
            out,
            trees,
            max_epochs,
            folds,
            best_fold,
        }),
        Command::Synth { spec, seed, out } => commands::cmd_synth(&spec, seed, &out),
        Command::Validate { cases, seed, out } => commands::cmd_validate(cases, seed, &out),
        Command::Bench {
            rows_sweep,
            features_sweep,
            features,
            rows,
            repeats,
            seed,
            problem,
            trees,
            max_epochs,
            out,
        } => commands::cmd_bench(&BenchArgs {
            rows_sweep,
            features_sweep,
            features,
            rows,
            repeats,
            seed,
            problem,
            trees,
            max_epochs,
            out,
        }),
    }
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
