//! Pipeline orchestration and the selection-vs-extraction decision.
//!
//! `run_pipeline` executes both reduction pipelines on the same dataset:
//! random-forest importance → cut → column selection → MLP score, and PCA
//! importance → cut → projection → MLP score. Each pipeline cuts on its own
//! importance vector with the same rule (user target, or tail-prune plus
//! automatic cut). The two scores feed the interpretability/integrity
//! equations and the higher score picks the method; exact ties go to
//! selection because it keeps the original feature names.

use crate::error::{Error, Result};
use crate::forest::{self, ForestConfig, ImportanceVector};
use crate::mlp::{self, CvResult, MlpConfig};
use crate::pca;
use crate::resolution::{self, CutDecision, CutMode};
use crate::seed;
use crate::tabular::{Dataset, ProblemType};

const FOREST_STREAM: u64 = 1;
const MLP_STREAM: u64 = 2;

/// The reduction method picked by the decision rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Selection,
    Extraction,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Selection => write!(f, "SELECTION"),
            Method::Extraction => write!(f, "EXTRACTION"),
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "SELECTION" => Ok(Method::Selection),
            "EXTRACTION" => Ok(Method::Extraction),
            other => Err(Error::ReportParse(format!("unknown method {other:?}"))),
        }
    }
}

/// Which cross-validation statistic the decision equations consume.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ScoreStatistic {
    #[default]
    MeanFold,
    BestFold,
}

/// Full pipeline configuration.
///
/// `seed` is the master seed: the forest and MLP stages run on sub-seeds
/// derived from it, overriding the seed fields inside `forest` and `mlp`.
#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub problem_type: ProblemType,
    pub interpretability_weight: f64,
    pub integrity_weight: f64,
    /// `None` selects the automatic cut for both pipelines.
    pub target_resolution: Option<f64>,
    pub forest: ForestConfig,
    pub mlp: MlpConfig,
    pub score_statistic: ScoreStatistic,
    pub seed: u64,
}

impl PipelineConfig {
    /// Defaults: 50/50 weights, automatic resolution, per-problem forest
    /// defaults, the standard MLP configuration.
    pub fn new(problem_type: ProblemType, seed: u64) -> Self {
        PipelineConfig {
            problem_type,
            interpretability_weight: 0.5,
            integrity_weight: 0.5,
            target_resolution: None,
            forest: ForestConfig::for_problem(problem_type, seed),
            mlp: MlpConfig { seed, ..Default::default() },
            score_statistic: ScoreStatistic::MeanFold,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        for (name, w) in [
            ("interpretability_weight", self.interpretability_weight),
            ("integrity_weight", self.integrity_weight),
        ] {
            if !(0.0..=1.0).contains(&w) || !w.is_finite() {
                return Err(Error::InvalidConfig(format!("{name} must be in [0, 1], got {w}")));
            }
        }
        if (self.interpretability_weight + self.integrity_weight - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!(
                "interpretability and integrity weights must sum to 1 (got {} + {})",
                self.interpretability_weight, self.integrity_weight
            )));
        }
        if let Some(t) = self.target_resolution {
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "target_resolution must be in (0, 1), got {t}"
                )));
            }
        }
        Ok(())
    }
}

/// Everything the user gets back: the ten justification items plus both
/// pipelines' diagnostics and the reduced dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct DecisionReport {
    pub problem_type: ProblemType,
    pub n_rows: usize,
    pub n_features_initial: usize,
    pub feature_names: Vec<String>,
    pub seed: u64,
    pub interpretability_weight: f64,
    pub integrity_weight: f64,
    pub target_resolution: Option<f64>,
    pub score_statistic: ScoreStatistic,
    pub rf_importance: ImportanceVector,
    pub pca_importance: ImportanceVector,
    pub selection_cv: CvResult,
    pub extraction_cv: CvResult,
    /// The statistic fed to the decision equations.
    pub mlp_accuracy_selection: f64,
    pub mlp_accuracy_extraction: f64,
    pub interpretability_score: f64,
    pub integrity_score: f64,
    pub chosen_method: Method,
    pub selection_cut: CutDecision,
    pub extraction_cut: CutDecision,
    /// Features/components kept by the chosen pipeline.
    pub n_kept: usize,
    pub achieved_resolution: f64,
    pub reduced_dataset: Dataset,
}

/// Interpretability and integrity scores plus the winning method.
///
/// `interpret_s = w_interp * s_fs`, `integ_s = w_integ * s_fe`; selection
/// wins ties. Scores outside [0, 1] (a negative held-out R², say) are
/// accepted; only the weights are validated.
pub fn decide(s_fs: f64, s_fe: f64, w_interp: f64, w_integ: f64) -> Result<(f64, f64, Method)> {
    for (name, w) in [("interpretability", w_interp), ("integrity", w_integ)] {
        if !(0.0..=1.0).contains(&w) || !w.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "{name} weight must be in [0, 1], got {w}"
            )));
        }
    }
    if (w_interp + w_integ - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "weights must sum to 1, got {w_interp} + {w_integ}"
        )));
    }
    if !s_fs.is_finite() || !s_fe.is_finite() {
        return Err(Error::InvalidArgument("scores must be finite".into()));
    }
    let interpret_s = w_interp * s_fs;
    let integ_s = w_integ * s_fe;
    let method = if interpret_s >= integ_s { Method::Selection } else { Method::Extraction };
    Ok((interpret_s, integ_s, method))
}

fn cut_importance(importance: &ImportanceVector, target: Option<f64>) -> Result<CutDecision> {
    match target {
        Some(t) => resolution::select_by_target(importance, t),
        None => Ok(resolution::auto_cut(&resolution::prune_tail(importance))),
    }
}

/// Run both pipelines and assemble the decision report.
pub fn run_pipeline(dataset: &Dataset, config: &PipelineConfig) -> Result<DecisionReport> {
    config.validate()?;
    if dataset.problem_type() != config.problem_type {
        return Err(Error::InvalidConfig(format!(
            "config is for {} but the dataset is {}",
            config.problem_type.as_str(),
            dataset.problem_type().as_str()
        )));
    }

    let forest_cfg =
        ForestConfig { seed: seed::derive(config.seed, FOREST_STREAM, 0), ..config.forest.clone() };
    let mlp_cfg =
        MlpConfig { seed: seed::derive(config.seed, MLP_STREAM, 0), ..config.mlp.clone() };

    // Selection pipeline: forest importance -> cut -> column subset -> MLP.
    let forest_model = forest::fit_forest(dataset, &forest_cfg)?;
    let rf_importance = forest::feature_importance(&forest_model);
    let selection_cut = cut_importance(&rf_importance, config.target_resolution)?;
    let kept_indices: Vec<usize> = match config.target_resolution {
        Some(_) => rf_importance.order()[..selection_cut.n_kept].to_vec(),
        None => {
            let pruned = resolution::prune_tail(&rf_importance);
            pruned.order()[..selection_cut.n_kept].to_vec()
        }
    };
    let reduced_selection = dataset.select_features(&kept_indices)?;
    let selection_cv = mlp::evaluate(&reduced_selection, &mlp_cfg)?;

    // Extraction pipeline: PCA importance -> same cut rule -> projection.
    let pca_model = pca::fit_pca(dataset)?;
    let pca_importance = pca::pca_importance(&pca_model);
    let extraction_cut = cut_importance(&pca_importance, config.target_resolution)?;
    let reduced_extraction = pca::project(&pca_model, dataset, extraction_cut.n_kept)?;
    let extraction_cv = mlp::evaluate(&reduced_extraction, &mlp_cfg)?;

    let pick = |cv: &CvResult| match config.score_statistic {
        ScoreStatistic::MeanFold => cv.mean_score,
        ScoreStatistic::BestFold => cv.best_score(),
    };
    let s_fs = pick(&selection_cv);
    let s_fe = pick(&extraction_cv);
    let (interpretability_score, integrity_score, chosen_method) = decide(
        s_fs,
        s_fe,
        config.interpretability_weight,
        config.integrity_weight,
    )?;

    let (n_kept, achieved_resolution, reduced_dataset) = match chosen_method {
        Method::Selection => {
            (selection_cut.n_kept, selection_cut.achieved_resolution, reduced_selection)
        }
        Method::Extraction => {
            (extraction_cut.n_kept, extraction_cut.achieved_resolution, reduced_extraction)
        }
    };

    Ok(DecisionReport {
        problem_type: dataset.problem_type(),
        n_rows: dataset.n_rows(),
        n_features_initial: dataset.n_features(),
        feature_names: dataset.feature_names().to_vec(),
        seed: config.seed,
        interpretability_weight: config.interpretability_weight,
        integrity_weight: config.integrity_weight,
        target_resolution: config.target_resolution,
        score_statistic: config.score_statistic,
        rf_importance,
        pca_importance,
        selection_cv,
        extraction_cv,
        mlp_accuracy_selection: s_fs,
        mlp_accuracy_extraction: s_fe,
        interpretability_score,
        integrity_score,
        chosen_method,
        selection_cut,
        extraction_cut,
        n_kept,
        achieved_resolution,
        reduced_dataset,
    })
}

/// Human-readable justification block: the ten report items in order.
/// Scores round to 3 decimals, resolutions to one decimal percent; the
/// key-value serialization keeps full precision.
pub fn render_report(report: &DecisionReport) -> String {
    let mut out = String::new();
    let importance_line = |imp: &ImportanceVector, names: &dyn Fn(usize) -> String| {
        imp.order()
            .iter()
            .map(|&i| format!("{}={:.3}", names(i), imp.scores()[i]))
            .collect::<Vec<_>>()
            .join(", ")
    };

    out.push_str("=== Decision report ===\n");
    out.push_str(&format!(
        "problem: {}   rows: {}   features: {}\n",
        report.problem_type.as_str(),
        report.n_rows,
        report.n_features_initial
    ));
    let feature_name = |i: usize| report.feature_names[i].clone();
    let pc_name = |i: usize| format!("PC{}", i + 1);
    out.push_str(&format!(
        " 1. Feature importance (random forest): {}\n",
        importance_line(&report.rf_importance, &feature_name)
    ));
    out.push_str(&format!(
        " 2. Component importance (PCA): {}\n",
        importance_line(&report.pca_importance, &pc_name)
    ));
    out.push_str(&format!(
        " 3. MLP accuracy, selection pipeline: {:.3} (mean {:.3}, best {:.3})\n",
        report.mlp_accuracy_selection,
        report.selection_cv.mean_score,
        report.selection_cv.best_score()
    ));
    out.push_str(&format!(
        " 4. MLP accuracy, extraction pipeline: {:.3} (mean {:.3}, best {:.3})\n",
        report.mlp_accuracy_extraction,
        report.extraction_cv.mean_score,
        report.extraction_cv.best_score()
    ));
    out.push_str(&format!(" 5. Interpretability score: {:.3}\n", report.interpretability_score));
    out.push_str(&format!(" 6. Integrity score: {:.3}\n", report.integrity_score));
    out.push_str(&format!(" 7. Chosen method: {}\n", report.chosen_method));
    out.push_str(&format!(
        " 8. Features kept (selection): {}\n",
        report.selection_cut.n_kept
    ));
    out.push_str(&format!(
        " 9. Components kept (extraction): {}\n",
        report.extraction_cut.n_kept
    ));
    match report.target_resolution {
        Some(t) => out.push_str(&format!(
            "10. Resolution reached: {:.1}% (target {:.1}%)\n",
            report.achieved_resolution * 100.0,
            t * 100.0
        )),
        None => out.push_str(&format!(
            "10. Resolution reached: {:.1}% (automatic cut)\n",
            report.achieved_resolution * 100.0
        )),
    }
    out
}

fn float_list(values: impl IntoIterator<Item = f64>) -> String {
    values.into_iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn push_cut(out: &mut String, prefix: &str, cut: &CutDecision) {
    out.push_str(&format!("{prefix}_n_kept = {}\n", cut.n_kept));
    out.push_str(&format!("{prefix}_resolution = {}\n", cut.achieved_resolution));
    if let Some(scores) = &cut.scores {
        out.push_str(&format!(
            "{prefix}_cut_lambda = {}\n",
            float_list(scores.iter().map(|s| s.resolution))
        ));
        out.push_str(&format!(
            "{prefix}_cut_wdelta = {}\n",
            float_list(scores.iter().map(|s| s.weighted_delta))
        ));
        out.push_str(&format!(
            "{prefix}_cut_total = {}\n",
            float_list(scores.iter().map(|s| s.total))
        ));
    }
}

/// Machine-readable serialization: one `key = value` line per field, lists
/// comma-separated, floats in shortest-roundtrip form. `reduced_path` is
/// where the reduced dataset CSV lives.
pub fn render_kv(report: &DecisionReport, reduced_path: &str) -> String {
    let mut out = String::new();
    out.push_str(&format!("problem_type = {}\n", report.problem_type.as_str()));
    out.push_str(&format!("n_rows = {}\n", report.n_rows));
    out.push_str(&format!("n_features_initial = {}\n", report.n_features_initial));
    out.push_str(&format!("feature_names = {}\n", report.feature_names.join(",")));
    out.push_str(&format!("seed = {}\n", report.seed));
    out.push_str(&format!("interpretability_weight = {}\n", report.interpretability_weight));
    out.push_str(&format!("integrity_weight = {}\n", report.integrity_weight));
    match report.target_resolution {
        Some(t) => out.push_str(&format!("target_resolution = {t}\n")),
        None => out.push_str("target_resolution = auto\n"),
    }
    let stat = match report.score_statistic {
        ScoreStatistic::MeanFold => "mean",
        ScoreStatistic::BestFold => "best",
    };
    out.push_str(&format!("score_statistic = {stat}\n"));
    out.push_str(&format!(
        "rf_importance = {}\n",
        float_list(report.rf_importance.scores().iter().copied())
    ));
    out.push_str(&format!(
        "pca_importance = {}\n",
        float_list(report.pca_importance.scores().iter().copied())
    ));
    out.push_str(&format!(
        "selection_fold_scores = {}\n",
        float_list(report.selection_cv.fold_scores.iter().copied())
    ));
    out.push_str(&format!(
        "selection_epochs = {}\n",
        report.selection_cv.epochs_run.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")
    ));
    out.push_str(&format!(
        "extraction_fold_scores = {}\n",
        float_list(report.extraction_cv.fold_scores.iter().copied())
    ));
    out.push_str(&format!(
        "extraction_epochs = {}\n",
        report.extraction_cv.epochs_run.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")
    ));
    out.push_str(&format!(
        "mlp_accuracy_selection_mean = {}\n",
        report.selection_cv.mean_score
    ));
    out.push_str(&format!(
        "mlp_accuracy_selection_best = {}\n",
        report.selection_cv.best_score()
    ));
    out.push_str(&format!(
        "mlp_accuracy_extraction_mean = {}\n",
        report.extraction_cv.mean_score
    ));
    out.push_str(&format!(
        "mlp_accuracy_extraction_best = {}\n",
        report.extraction_cv.best_score()
    ));
    out.push_str(&format!("mlp_accuracy_selection = {}\n", report.mlp_accuracy_selection));
    out.push_str(&format!("mlp_accuracy_extraction = {}\n", report.mlp_accuracy_extraction));
    out.push_str(&format!("interpretability_score = {}\n", report.interpretability_score));
    out.push_str(&format!("integrity_score = {}\n", report.integrity_score));
    out.push_str(&format!("chosen_method = {}\n", report.chosen_method));
    push_cut(&mut out, "selection", &report.selection_cut);
    push_cut(&mut out, "extraction", &report.extraction_cut);
    out.push_str(&format!("n_kept = {}\n", report.n_kept));
    out.push_str(&format!("achieved_resolution = {}\n", report.achieved_resolution));
    out.push_str(&format!("reduced_dataset = {reduced_path}\n"));
    out
}

struct KvMap(std::collections::HashMap<String, String>);

impl KvMap {
    fn parse(text: &str) -> Result<KvMap> {
        let mut map = std::collections::HashMap::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::ReportParse(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            map.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(KvMap(map))
    }

    fn get(&self, key: &str) -> Result<&str> {
        self.0
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| Error::ReportParse(format!("missing key {key:?}")))
    }

    fn parse_value<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)?
            .parse()
            .map_err(|_| Error::ReportParse(format!("cannot parse value of {key:?}")))
    }

    fn float_list(&self, key: &str) -> Result<Vec<f64>> {
        let raw = self.get(key)?;
        if raw.is_empty() {
            return Ok(Vec::new());
        }
        raw.split(',')
            .map(|v| {
                v.trim()
                    .parse()
                    .map_err(|_| Error::ReportParse(format!("bad float in {key:?}: {v:?}")))
            })
            .collect()
    }

    fn usize_list(&self, key: &str) -> Result<Vec<usize>> {
        let raw = self.get(key)?;
        if raw.is_empty() {
            return Ok(Vec::new());
        }
        raw.split(',')
            .map(|v| {
                v.trim()
                    .parse()
                    .map_err(|_| Error::ReportParse(format!("bad integer in {key:?}: {v:?}")))
            })
            .collect()
    }
}

/// Rebuild a report from its key-value serialization plus the separately
/// loaded reduced dataset. `parse_kv(render_kv(r), r.reduced_dataset)`
/// reproduces `r` exactly.
pub fn parse_kv(text: &str, reduced_dataset: Dataset) -> Result<DecisionReport> {
    use crate::forest::ImportanceSource;
    use crate::mlp::ScoreKind;
    use crate::resolution::CutScore;

    let map = KvMap::parse(text)?;
    let problem_type: ProblemType = map.parse_value("problem_type")?;
    let target_resolution = match map.get("target_resolution")? {
        "auto" => None,
        raw => Some(raw.parse().map_err(|_| {
            Error::ReportParse(format!("bad target_resolution {raw:?}"))
        })?),
    };
    let score_statistic = match map.get("score_statistic")? {
        "mean" => ScoreStatistic::MeanFold,
        "best" => ScoreStatistic::BestFold,
        other => return Err(Error::ReportParse(format!("unknown score_statistic {other:?}"))),
    };
    let score_kind = match problem_type {
        ProblemType::Regression => ScoreKind::R2,
        ProblemType::Classification => ScoreKind::Accuracy,
    };

    let cv = |prefix: &str| -> Result<CvResult> {
        let fold_scores = map.float_list(&format!("{prefix}_fold_scores"))?;
        let epochs_run = map.usize_list(&format!("{prefix}_epochs"))?;
        let mean_score: f64 = map.parse_value(&format!("mlp_accuracy_{prefix}_mean"))?;
        Ok(CvResult { fold_scores, mean_score, score_kind, epochs_run })
    };

    let cut = |prefix: &str| -> Result<CutDecision> {
        let n_kept = map.parse_value(&format!("{prefix}_n_kept"))?;
        let achieved_resolution = map.parse_value(&format!("{prefix}_resolution"))?;
        let mode = match target_resolution {
            Some(t) => CutMode::UserTarget(t),
            None => CutMode::Auto,
        };
        let scores = if map.0.contains_key(&format!("{prefix}_cut_lambda")) {
            let lambda = map.float_list(&format!("{prefix}_cut_lambda"))?;
            let wdelta = map.float_list(&format!("{prefix}_cut_wdelta"))?;
            let total = map.float_list(&format!("{prefix}_cut_total"))?;
            if lambda.len() != wdelta.len() || lambda.len() != total.len() {
                return Err(Error::ReportParse(format!("{prefix} cut series length mismatch")));
            }
            Some(
                lambda
                    .into_iter()
                    .zip(wdelta)
                    .zip(total)
                    .enumerate()
                    .map(|(i, ((resolution, weighted_delta), total))| CutScore {
                        position: i + 1,
                        resolution,
                        weighted_delta,
                        total,
                    })
                    .collect(),
            )
        } else {
            None
        };
        Ok(CutDecision { n_kept, achieved_resolution, mode, scores })
    };

    let feature_names: Vec<String> =
        map.get("feature_names")?.split(',').map(|s| s.to_string()).collect();

    Ok(DecisionReport {
        problem_type,
        n_rows: map.parse_value("n_rows")?,
        n_features_initial: map.parse_value("n_features_initial")?,
        feature_names,
        seed: map.parse_value("seed")?,
        interpretability_weight: map.parse_value("interpretability_weight")?,
        integrity_weight: map.parse_value("integrity_weight")?,
        target_resolution,
        score_statistic,
        rf_importance: ImportanceVector::new(
            map.float_list("rf_importance")?,
            ImportanceSource::Forest,
        )?,
        pca_importance: ImportanceVector::new(
            map.float_list("pca_importance")?,
            ImportanceSource::Pca,
        )?,
        selection_cv: cv("selection")?,
        extraction_cv: cv("extraction")?,
        mlp_accuracy_selection: map.parse_value("mlp_accuracy_selection")?,
        mlp_accuracy_extraction: map.parse_value("mlp_accuracy_extraction")?,
        interpretability_score: map.parse_value("interpretability_score")?,
        integrity_score: map.parse_value("integrity_score")?,
        chosen_method: map.parse_value("chosen_method")?,
        selection_cut: cut("selection")?,
        extraction_cut: cut("extraction")?,
        n_kept: map.parse_value("n_kept")?,
        achieved_resolution: map.parse_value("achieved_resolution")?,
        reduced_dataset,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tabular::{make_classification, make_regression, SynthSpec};

    #[test]
    fn decide_reproduces_published_score_arithmetic() {
        // (s_fs, s_fe, w_interp, w_integ, interpret_s, integ_s, method)
        let cases = [
            (0.961, 0.941, 0.5, 0.5, 0.481, 0.471, Method::Selection),
            (0.936, 0.934, 0.4, 0.6, 0.374, 0.560, Method::Extraction),
            (0.980, 0.993, 0.4, 0.6, 0.392, 0.596, Method::Extraction),
            (0.875, 0.988, 0.8, 0.2, 0.700, 0.198, Method::Selection),
        ];
        let round3 = |x: f64| (x * 1000.0).round() / 1000.0;
        for (s_fs, s_fe, wi, wg, want_i, want_g, want_m) in cases {
            let (i, g, m) = decide(s_fs, s_fe, wi, wg).unwrap();
            assert!((round3(i) - want_i).abs() <= 0.005, "interpretability {i} vs {want_i}");
            assert!((round3(g) - want_g).abs() <= 0.005, "integrity {g} vs {want_g}");
            assert_eq!(m, want_m);
        }
    }

    #[test]
    fn ties_go_to_selection() {
        for x in [0.0, 0.25, 0.5, 0.75, 0.936, 1.0] {
            let (i, g, m) = decide(x, x, 0.5, 0.5).unwrap();
            assert_eq!(i, g);
            assert_eq!(m, Method::Selection);
        }
    }

    #[test]
    fn decide_validates_weights() {
        assert!(decide(0.9, 0.9, 0.7, 0.7).is_err());
        assert!(decide(0.9, 0.9, -0.1, 1.1).is_err());
        assert!(decide(0.9, 0.9, 1.2, -0.2).is_err());
        assert!(decide(f64::NAN, 0.9, 0.5, 0.5).is_err());
    }

    #[test]
    fn increasing_interpretability_weight_never_flips_to_extraction() {
        let grid: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
        for &s_fs in &[0.6, 0.8, 0.99] {
            for &s_fe in &[0.6, 0.8, 0.99] {
                let mut selected = false;
                for &w in &grid {
                    let (_, _, m) = decide(s_fs, s_fe, w, 1.0 - w).unwrap();
                    if selected {
                        assert_eq!(
                            m,
                            Method::Selection,
                            "selection flipped back at w={w} ({s_fs}, {s_fe})"
                        );
                    }
                    selected = m == Method::Selection;
                }
            }
        }
    }

    #[test]
    fn scores_are_exact_products() {
        for wi in [0.0, 0.3, 0.5, 0.9, 1.0] {
            for s in [0.0, 0.42, 0.87, 1.0] {
                let (i, g, _) = decide(s, s, wi, 1.0 - wi).unwrap();
                assert_eq!(i, wi * s);
                assert_eq!(g, (1.0 - wi) * s);
            }
        }
    }

    fn quick_config(problem_type: ProblemType, seed: u64) -> PipelineConfig {
        let mut config = PipelineConfig::new(problem_type, seed);
        config.forest.n_trees = 20;
        config.mlp.max_epochs = 60;
        config.mlp.k_folds = 5;
        config
    }

    #[test]
    fn pipeline_runs_end_to_end_and_is_deterministic() {
        let d = make_regression(&SynthSpec::regression(80, 4, 5)).unwrap();
        let mut config = quick_config(ProblemType::Regression, 5);
        config.target_resolution = Some(0.9);
        let a = run_pipeline(&d, &config).unwrap();
        let b = run_pipeline(&d, &config).unwrap();
        assert_eq!(a, b);

        assert!(a.n_kept >= 1 && a.n_kept <= 4);
        assert!(a.achieved_resolution + 1e-9 >= 0.9);
        assert_eq!(a.selection_cut.mode, CutMode::UserTarget(0.9));
        assert!(a.selection_cut.scores.is_none());
        let expect = a.interpretability_weight * a.mlp_accuracy_selection;
        assert!((a.interpretability_score - expect).abs() <= 1e-12);
        let expect = a.integrity_weight * a.mlp_accuracy_extraction;
        assert!((a.integrity_score - expect).abs() <= 1e-12);
        match a.chosen_method {
            Method::Selection => {
                assert!(a.reduced_dataset.feature_names().iter().all(|n| !n.starts_with("PC")));
                assert_eq!(a.n_kept, a.selection_cut.n_kept);
            }
            Method::Extraction => {
                assert_eq!(a.reduced_dataset.feature_names()[0], "PC1");
                assert_eq!(a.n_kept, a.extraction_cut.n_kept);
            }
        }
    }

    #[test]
    fn auto_mode_applies_to_both_pipelines() {
        let d = make_classification(&SynthSpec::classification(80, 5, 6)).unwrap();
        let config = quick_config(ProblemType::Classification, 6);
        let report = run_pipeline(&d, &config).unwrap();
        assert_eq!(report.selection_cut.mode, CutMode::Auto);
        assert_eq!(report.extraction_cut.mode, CutMode::Auto);
        assert!(report.selection_cut.scores.is_some());
        assert!(report.extraction_cut.scores.is_some());
        assert_eq!(report.reduced_dataset.n_features(), report.n_kept);
    }

    #[test]
    fn mismatched_problem_type_is_rejected() {
        let d = make_regression(&SynthSpec::regression(80, 4, 5)).unwrap();
        let config = quick_config(ProblemType::Classification, 5);
        assert!(matches!(run_pipeline(&d, &config), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn config_weight_validation() {
        let mut config = PipelineConfig::new(ProblemType::Regression, 1);
        config.interpretability_weight = 0.7;
        config.integrity_weight = 0.7;
        let d = make_regression(&SynthSpec::regression(40, 2, 1)).unwrap();
        assert!(run_pipeline(&d, &config).is_err());

        let mut config = PipelineConfig::new(ProblemType::Regression, 1);
        config.target_resolution = Some(1.5);
        assert!(run_pipeline(&d, &config).is_err());
    }

    #[test]
    fn report_text_lists_the_ten_items() {
        let d = make_regression(&SynthSpec::regression(80, 4, 7)).unwrap();
        let mut config = quick_config(ProblemType::Regression, 7);
        config.target_resolution = Some(0.8);
        let report = run_pipeline(&d, &config).unwrap();
        let text = render_report(&report);
        assert!(text.contains(&report.chosen_method.to_string()));
        assert!(text.contains("Interpretability score"));
        assert!(text.contains("Integrity score"));
        assert!(text.contains("PC1="));
        for i in 1..=10 {
            assert!(text.contains(&format!("{i}. ")), "missing item {i}:\n{text}");
        }
    }

    #[test]
    fn extraction_report_names_components() {
        // Force extraction with full integrity weight.
        let d = make_classification(&SynthSpec::classification(80, 4, 8)).unwrap();
        let mut config = quick_config(ProblemType::Classification, 8);
        config.interpretability_weight = 0.0;
        config.integrity_weight = 1.0;
        let report = run_pipeline(&d, &config).unwrap();
        assert_eq!(report.chosen_method, Method::Extraction);
        assert!(report.reduced_dataset.feature_names().iter().all(|n| n.starts_with("PC")));
    }

    #[test]
    fn kv_round_trip_is_exact() {
        let d = make_regression(&SynthSpec::regression(80, 4, 9)).unwrap();
        for target in [None, Some(0.85)] {
            let mut config = quick_config(ProblemType::Regression, 9);
            config.target_resolution = target;
            let report = run_pipeline(&d, &config).unwrap();
            let kv = render_kv(&report, "reduced.csv");
            let back = parse_kv(&kv, report.reduced_dataset.clone()).unwrap();
            assert_eq!(report, back);
        }
    }

    #[test]
    fn kv_parse_rejects_malformed_input() {
        assert!(matches!(parse_kv("not a kv line", dummy_dataset()), Err(Error::ReportParse(_))));
        assert!(matches!(parse_kv("a = 1\n", dummy_dataset()), Err(Error::ReportParse(_))));
    }

    fn dummy_dataset() -> Dataset {
        make_regression(&SynthSpec::regression(10, 2, 1)).unwrap()
    }
}
