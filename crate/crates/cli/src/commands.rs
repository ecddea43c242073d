//! The four subcommands. Each returns `Ok(exit_code)`; usage problems
//! surface as `CliError::Usage` (exit 2) and everything else as runtime
//! errors (exit 1).

use std::fs;
use std::path::{Path, PathBuf};

use dimcut_core::decision::{self, PipelineConfig, ScoreStatistic};
use dimcut_core::tabular::{self, ProblemType};
use dimcut_core::validate;

use crate::bench::{self, BenchOptions};
use crate::output;
use crate::synth::parse_spec;
use crate::{CliError, CliResult};

pub struct RunArgs {
    pub input: Option<PathBuf>,
    pub synth: Option<String>,
    pub problem: Option<ProblemType>,
    pub interp: Option<f64>,
    pub integ: Option<f64>,
    pub resolution: Option<f64>,
    pub seed: u64,
    pub out: PathBuf,
    pub trees: Option<usize>,
    pub max_epochs: Option<usize>,
    pub folds: Option<usize>,
    pub best_fold: bool,
}

/// Resolve the interpretability/integrity pair: both default to 0.5, a lone
/// value implies its complement, and an explicit pair must sum to 1.
fn resolve_weights(interp: Option<f64>, integ: Option<f64>) -> CliResult<(f64, f64, bool)> {
    let (wi, wg, defaulted) = match (interp, integ) {
        (None, None) => (0.5, 0.5, true),
        (Some(i), None) => (i, 1.0 - i, false),
        (None, Some(g)) => (1.0 - g, g, false),
        (Some(i), Some(g)) => (i, g, false),
    };
    if !(0.0..=1.0).contains(&wi) || !(0.0..=1.0).contains(&wg) {
        return Err(CliError::usage(format!(
            "weights must be in [0, 1]: interpretability {wi}, integrity {wg}"
        )));
    }
    if (wi + wg - 1.0).abs() > 1e-9 {
        return Err(CliError::usage(format!(
            "interpretability and integrity weights follow an a / 1-a pattern and must sum \
             to 1; got {wi} + {wg} = {}",
            wi + wg
        )));
    }
    Ok((wi, wg, defaulted))
}

pub fn cmd_run(args: &RunArgs) -> CliResult<i32> {
    let (w_interp, w_integ, weights_defaulted) = resolve_weights(args.interp, args.integ)?;
    if let Some(r) = args.resolution {
        if !(r > 0.0 && r < 1.0) {
            return Err(CliError::usage(format!("--resolution must be in (0, 1), got {r}")));
        }
    }

    let dataset = match (&args.input, &args.synth) {
        (Some(_), Some(_)) => {
            return Err(CliError::usage("--input and --synth are mutually exclusive"));
        }
        (None, None) => {
            return Err(CliError::usage("one of --input or --synth is required"));
        }
        (Some(path), None) => {
            let problem = args.problem.ok_or_else(|| {
                CliError::usage("--problem is required with --input")
            })?;
            tabular::load_csv(path, problem)?
        }
        (None, Some(spec_raw)) => {
            let spec = parse_spec(spec_raw, args.seed)?;
            if let Some(problem) = args.problem {
                if problem != spec.problem_type {
                    return Err(CliError::usage(format!(
                        "--problem {} contradicts the synth spec type {}",
                        problem.as_str(),
                        spec.problem_type.as_str()
                    )));
                }
            }
            match spec.problem_type {
                ProblemType::Regression => {
                    tabular::make_regression(&spec).map_err(usage_if_spec)?
                }
                ProblemType::Classification => {
                    tabular::make_classification(&spec).map_err(usage_if_spec)?
                }
            }
        }
    };

    let mut config = PipelineConfig::new(dataset.problem_type(), args.seed);
    config.interpretability_weight = w_interp;
    config.integrity_weight = w_integ;
    config.target_resolution = args.resolution;
    if let Some(n) = args.trees {
        config.forest.n_trees = n;
    }
    if let Some(n) = args.max_epochs {
        config.mlp.max_epochs = n;
    }
    if let Some(k) = args.folds {
        config.mlp.k_folds = k;
    }
    if args.best_fold {
        config.score_statistic = ScoreStatistic::BestFold;
    }

    if weights_defaulted {
        println!("using defaults: interpretability 0.5, integrity 0.5");
    }
    if args.resolution.is_none() {
        println!("no target resolution given; the cut-point is chosen automatically");
    }

    let report = decision::run_pipeline(&dataset, &config)?;

    fs::create_dir_all(&args.out)?;
    output::write_atomic(&args.out.join("report.txt"), &decision::render_report(&report))?;
    output::write_atomic(
        &args.out.join("report.kv"),
        &decision::render_kv(&report, "reduced.csv"),
    )?;
    output::write_dataset_atomic(&report.reduced_dataset, &args.out.join("reduced.csv"))?;
    let names = report.feature_names.clone();
    output::write_atomic(
        &args.out.join("importance_rf.csv"),
        &output::importance_csv(&report.rf_importance, |i| names[i].clone()),
    )?;
    output::write_atomic(
        &args.out.join("importance_pca.csv"),
        &output::importance_csv(&report.pca_importance, |i| format!("PC{}", i + 1)),
    )?;
    let chosen_cut = match report.chosen_method {
        decision::Method::Selection => &report.selection_cut,
        decision::Method::Extraction => &report.extraction_cut,
    };
    let cut_series = chosen_cut.scores.as_deref().unwrap_or(&[]);
    output::write_atomic(
        &args.out.join("cut_scores.csv"),
        &dimcut_core::resolution::cut_scores_csv(cut_series),
    )?;

    print!("{}", decision::render_report(&report));
    println!("outputs written to {}", args.out.display());
    Ok(0)
}

fn usage_if_spec(e: dimcut_core::Error) -> CliError {
    match e {
        dimcut_core::Error::InvalidSpec(msg) => CliError::usage(format!("invalid spec: {msg}")),
        other => other.into(),
    }
}

pub fn cmd_synth(spec_raw: &str, seed: u64, out: &Path) -> CliResult<i32> {
    let spec = parse_spec(spec_raw, seed)?;
    let dataset = match spec.problem_type {
        ProblemType::Regression => tabular::make_regression(&spec).map_err(usage_if_spec)?,
        ProblemType::Classification => {
            tabular::make_classification(&spec).map_err(usage_if_spec)?
        }
    };
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    output::write_dataset_atomic(&dataset, out)?;
    println!(
        "wrote {} ({} rows x {} features, {})",
        out.display(),
        dataset.n_rows(),
        dataset.n_features(),
        dataset.problem_type().as_str()
    );
    Ok(0)
}

pub fn cmd_validate(cases: usize, seed: u64, out: &Path) -> CliResult<i32> {
    let run = validate::run_validation(cases, seed)?;
    fs::create_dir_all(out)?;
    output::write_atomic(&out.join("validation_scatter.csv"), &validate::scatter_csv(&run.cases))?;
    println!("{}", validate::summary_line(&run));
    Ok(if run.verdict { 0 } else { 1 })
}

pub struct BenchArgs {
    pub rows_sweep: Option<Vec<usize>>,
    pub features_sweep: Option<Vec<usize>>,
    pub features: usize,
    pub rows: usize,
    pub repeats: usize,
    pub seed: u64,
    pub problem: ProblemType,
    pub trees: Option<usize>,
    pub max_epochs: Option<usize>,
    pub out: PathBuf,
}

pub fn cmd_bench(args: &BenchArgs) -> CliResult<i32> {
    let sweep = match (&args.rows_sweep, &args.features_sweep) {
        (Some(rows), None) => {
            if rows.is_empty() {
                return Err(CliError::usage("empty --rows-sweep"));
            }
            bench::Sweep::Rows { sweep: rows.clone(), n_features: args.features }
        }
        (None, Some(features)) => {
            if features.is_empty() {
                return Err(CliError::usage("empty --features-sweep"));
            }
            bench::Sweep::Features { sweep: features.clone(), n_rows: args.rows }
        }
        _ => {
            return Err(CliError::usage(
                "exactly one of --rows-sweep or --features-sweep is required",
            ));
        }
    };

    let options = BenchOptions {
        sweep,
        repeats: args.repeats,
        seed: args.seed,
        problem_type: args.problem,
        n_trees: args.trees,
        max_epochs: args.max_epochs,
    };
    let records = bench::run_bench(&options)?;

    fs::create_dir_all(&args.out)?;
    output::write_atomic(&args.out.join("bench.csv"), &bench::bench_csv(&records))?;

    let points = options.sweep.points();
    let means = bench::mean_totals(&records, &points);
    for ((rows, features), mean) in points.iter().zip(&means) {
        println!("{rows} rows x {features} features: mean total {mean:.3}s");
    }
    for (pair, ratio) in points.windows(2).zip(bench::growth_ratios(&records, &points)) {
        println!(
            "growth {}x{} -> {}x{}: total time x{ratio:.2}",
            pair[0].0, pair[0].1, pair[1].0, pair[1].1
        );
    }
    Ok(0)
}
