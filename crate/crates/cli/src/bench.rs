//! Wall-clock scaling harness: times the whole pipeline and each phase over
//! a sweep of dataset sizes.
//!
//! `Total` is one full `run_pipeline` call; the component phases are then
//! measured independently (so their sum can differ from the total). Growth
//! ratios compare mean total times of consecutive sweep points.

use std::time::Instant;

use dimcut_core::decision::{self, PipelineConfig};
use dimcut_core::forest;
use dimcut_core::mlp;
use dimcut_core::pca;
use dimcut_core::resolution;
use dimcut_core::tabular::{make_classification, make_regression, Dataset, ProblemType, SynthSpec};

use crate::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Total,
    Forest,
    Pca,
    MlpSelection,
    MlpExtraction,
    Decision,
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Phase::Total => "total",
            Phase::Forest => "forest",
            Phase::Pca => "pca",
            Phase::MlpSelection => "mlp_selection",
            Phase::MlpExtraction => "mlp_extraction",
            Phase::Decision => "decision",
        };
        write!(f, "{name}")
    }
}

#[derive(Clone, Debug)]
pub struct BenchRecord {
    pub n_rows: usize,
    pub n_features: usize,
    pub phase: Phase,
    pub repeat: usize,
    pub wall_time_s: f64,
    pub seed: u64,
}

/// Which dimension the sweep varies.
#[derive(Clone, Debug)]
pub enum Sweep {
    Rows { sweep: Vec<usize>, n_features: usize },
    Features { sweep: Vec<usize>, n_rows: usize },
}

impl Sweep {
    pub fn points(&self) -> Vec<(usize, usize)> {
        match self {
            Sweep::Rows { sweep, n_features } => {
                sweep.iter().map(|&rows| (rows, *n_features)).collect()
            }
            Sweep::Features { sweep, n_rows } => {
                sweep.iter().map(|&features| (*n_rows, features)).collect()
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchOptions {
    pub sweep: Sweep,
    pub repeats: usize,
    pub seed: u64,
    pub problem_type: ProblemType,
    /// Trimmed-down pipeline knobs for faster sweeps; `None` keeps defaults.
    pub n_trees: Option<usize>,
    pub max_epochs: Option<usize>,
}

fn make_dataset(problem_type: ProblemType, n_rows: usize, n_features: usize, seed: u64) -> CliResult<Dataset> {
    let dataset = match problem_type {
        ProblemType::Regression => {
            make_regression(&SynthSpec::regression(n_rows, n_features, seed))?
        }
        ProblemType::Classification => {
            make_classification(&SynthSpec::classification(n_rows, n_features, seed))?
        }
    };
    Ok(dataset)
}

fn config_for(options: &BenchOptions) -> PipelineConfig {
    let mut config = PipelineConfig::new(options.problem_type, options.seed);
    if let Some(n) = options.n_trees {
        config.forest.n_trees = n;
    }
    if let Some(n) = options.max_epochs {
        config.mlp.max_epochs = n;
    }
    config
}

pub fn run_bench(options: &BenchOptions) -> CliResult<Vec<BenchRecord>> {
    if options.sweep.points().is_empty() {
        return Err(CliError::usage("empty sweep"));
    }
    if options.repeats < 1 {
        return Err(CliError::usage("repeats must be >= 1"));
    }

    let config = config_for(options);
    let mut records = Vec::new();
    for (n_rows, n_features) in options.sweep.points() {
        let dataset = make_dataset(options.problem_type, n_rows, n_features, options.seed)?;
        for repeat in 0..options.repeats {
            let mut record = |phase: Phase, seconds: f64| {
                records.push(BenchRecord {
                    n_rows,
                    n_features,
                    phase,
                    repeat,
                    wall_time_s: seconds,
                    seed: options.seed,
                });
            };

            let start = Instant::now();
            decision::run_pipeline(&dataset, &config)?;
            record(Phase::Total, start.elapsed().as_secs_f64());

            // Component phases, measured on their own.
            let mut forest_cfg = config.forest.clone();
            forest_cfg.seed = options.seed;
            let start = Instant::now();
            let forest_model = forest::fit_forest(&dataset, &forest_cfg)?;
            let rf_importance = forest::feature_importance(&forest_model);
            record(Phase::Forest, start.elapsed().as_secs_f64());

            let start = Instant::now();
            let pca_model = pca::fit_pca(&dataset)?;
            let pca_importance = pca::pca_importance(&pca_model);
            record(Phase::Pca, start.elapsed().as_secs_f64());

            let mut mlp_cfg = config.mlp.clone();
            mlp_cfg.seed = options.seed;

            let start = Instant::now();
            let cut = resolution::auto_cut(&resolution::prune_tail(&rf_importance));
            let pruned = resolution::prune_tail(&rf_importance);
            let reduced = dataset.select_features(&pruned.order()[..cut.n_kept])?;
            let selection_cv = mlp::evaluate(&reduced, &mlp_cfg)?;
            record(Phase::MlpSelection, start.elapsed().as_secs_f64());

            let start = Instant::now();
            let cut = resolution::auto_cut(&resolution::prune_tail(&pca_importance));
            let projected = pca::project(&pca_model, &dataset, cut.n_kept)?;
            let extraction_cv = mlp::evaluate(&projected, &mlp_cfg)?;
            record(Phase::MlpExtraction, start.elapsed().as_secs_f64());

            let start = Instant::now();
            decision::decide(selection_cv.mean_score, extraction_cv.mean_score, 0.5, 0.5)?;
            record(Phase::Decision, start.elapsed().as_secs_f64());
        }
    }
    Ok(records)
}

/// Mean total wall time per sweep point, in sweep order.
pub fn mean_totals(records: &[BenchRecord], points: &[(usize, usize)]) -> Vec<f64> {
    points
        .iter()
        .map(|&(rows, features)| {
            let times: Vec<f64> = records
                .iter()
                .filter(|r| {
                    r.phase == Phase::Total && r.n_rows == rows && r.n_features == features
                })
                .map(|r| r.wall_time_s)
                .collect();
            times.iter().sum::<f64>() / times.len() as f64
        })
        .collect()
}

/// Ratios of mean total time between consecutive sweep points.
pub fn growth_ratios(records: &[BenchRecord], points: &[(usize, usize)]) -> Vec<f64> {
    let means = mean_totals(records, points);
    means.windows(2).map(|w| w[1] / w[0]).collect()
}

pub fn bench_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from("n_rows,n_features,phase,repeat,wall_time_s,seed\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.n_rows, r.n_features, r.phase, r.repeat, r.wall_time_s, r.seed
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_options() -> BenchOptions {
        BenchOptions {
            sweep: Sweep::Rows { sweep: vec![60, 120], n_features: 3 },
            repeats: 1,
            seed: 1,
            problem_type: ProblemType::Regression,
            n_trees: Some(5),
            max_epochs: Some(30),
        }
    }

    #[test]
    fn records_cover_every_point_phase_and_repeat() {
        let options = tiny_options();
        let records = run_bench(&options).unwrap();
        assert_eq!(records.len(), 2 * 6);
        assert!(records.iter().all(|r| r.wall_time_s >= 0.0));

        let points = options.sweep.points();
        let ratios = growth_ratios(&records, &points);
        assert_eq!(ratios.len(), 1);
        assert!(ratios[0] > 0.0);

        // Phases are measured independently; the total still dominates half
        // their sum.
        for (rows, features) in &points {
            let total: f64 = records
                .iter()
                .filter(|r| r.phase == Phase::Total && r.n_rows == *rows)
                .map(|r| r.wall_time_s)
                .sum();
            let others: f64 = records
                .iter()
                .filter(|r| {
                    r.phase != Phase::Total && r.n_rows == *rows && r.n_features == *features
                })
                .map(|r| r.wall_time_s)
                .sum();
            assert!(total >= others * 0.5 - 0.05, "total {total} vs phases {others}");
        }
    }

    #[test]
    fn empty_sweep_is_a_usage_error() {
        let mut options = tiny_options();
        options.sweep = Sweep::Rows { sweep: vec![], n_features: 3 };
        assert!(matches!(run_bench(&options), Err(CliError::Usage(_))));
    }

    #[test]
    fn csv_has_one_row_per_record() {
        let records = run_bench(&tiny_options()).unwrap();
        let csv = bench_csv(&records);
        assert_eq!(csv.lines().count(), records.len() + 1);
        assert!(csv.starts_with("n_rows,n_features,phase,repeat,wall_time_s,seed\n"));
    }
}
