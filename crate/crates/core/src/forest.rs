//! Random-forest training and mean-decrease-in-impurity feature importance.
//!
//! Trees are CART: exhaustive split search with thresholds at midpoints
//! between consecutive sorted unique values, Gini impurity for
//! classification and variance reduction for regression. Each tree trains on
//! a bootstrap sample of the full dataset. Per-tree randomness is derived
//! solely from (seed, tree index), so parallel training reproduces
//! sequential training bit for bit.

use ndarray::ArrayView2;
use rand::Rng;
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::seed;
use crate::tabular::{Dataset, ProblemType};

const TREE_STREAM: u64 = 0x7265_6573; // per-tree seed stream

/// How many features a split may consider.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SplitFeatures {
    /// floor(sqrt(n_features)), at least 1.
    Sqrt,
    /// Every feature (exhaustive search).
    All,
    /// floor(r * n_features) for r in (0, 1], at least 1.
    Fraction(f64),
}

impl SplitFeatures {
    fn resolve(&self, n_features: usize) -> Result<usize> {
        let m = match self {
            SplitFeatures::Sqrt => (n_features as f64).sqrt().floor() as usize,
            SplitFeatures::All => n_features,
            SplitFeatures::Fraction(r) => {
                if !(*r > 0.0 && *r <= 1.0) {
                    return Err(Error::InvalidConfig(format!(
                        "split feature fraction must be in (0, 1], got {r}"
                    )));
                }
                (r * n_features as f64).floor() as usize
            }
        };
        Ok(m.clamp(1, n_features))
    }
}

/// Forest hyperparameters.
#[derive(Clone, Debug)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub max_features_per_split: SplitFeatures,
    pub seed: u64,
}

impl ForestConfig {
    /// Defaults: 100 trees, unlimited depth, min split 2, Sqrt features for
    /// classification and a 1/3 fraction for regression.
    pub fn for_problem(problem_type: ProblemType, seed: u64) -> Self {
        let max_features_per_split = match problem_type {
            ProblemType::Classification => SplitFeatures::Sqrt,
            ProblemType::Regression => SplitFeatures::Fraction(1.0 / 3.0),
        };
        ForestConfig {
            n_trees: 100,
            max_depth: None,
            min_samples_split: 2,
            max_features_per_split,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_trees < 1 {
            return Err(Error::InvalidConfig("n_trees must be >= 1".into()));
        }
        if self.min_samples_split < 2 {
            return Err(Error::InvalidConfig("min_samples_split must be >= 2".into()));
        }
        if self.max_depth == Some(0) {
            return Err(Error::InvalidConfig("max_depth must be >= 1 when set".into()));
        }
        Ok(())
    }
}

/// Where an importance vector came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ImportanceSource {
    Forest,
    Pca,
}

/// Normalized per-feature importance scores with a descending sort order.
///
/// `scores` always keeps one entry per original feature and sums to 1.
/// `order` lists the *active* features, most important first; tail pruning
/// (see [`crate::resolution::prune_tail`]) truncates `order` while leaving
/// `scores` untouched, so resolutions keep their meaning as a share of the
/// original total.
#[derive(Clone, Debug, PartialEq)]
pub struct ImportanceVector {
    scores: Vec<f64>,
    order: Vec<usize>,
    source: ImportanceSource,
}

impl ImportanceVector {
    /// Validate scores and build the descending order. Ties sort by lower
    /// original index so downstream cut-points are deterministic.
    pub fn new(scores: Vec<f64>, source: ImportanceSource) -> Result<Self> {
        if scores.is_empty() {
            return Err(Error::InvalidArgument("empty importance vector".into()));
        }
        if scores.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidArgument(
                "importance scores must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = scores.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "importance scores must sum to 1 (got {total})"
            )));
        }
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.sort_by(|&a, &b| {
            scores[b].partial_cmp(&scores[a]).unwrap().then(a.cmp(&b))
        });
        Ok(ImportanceVector { scores, order, source })
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    /// Active features, most important first (original indices).
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn source(&self) -> ImportanceSource {
        self.source
    }

    /// Total number of original features.
    pub fn n_features(&self) -> usize {
        self.scores.len()
    }

    /// Number of features still active (equals `n_features` unless pruned).
    pub fn n_active(&self) -> usize {
        self.order.len()
    }

    /// Scores of the active features in descending order.
    pub fn sorted_scores(&self) -> Vec<f64> {
        self.order.iter().map(|&i| self.scores[i]).collect()
    }

    /// Copy keeping only the `keep` most important active features. Scores
    /// are not renormalized.
    pub fn keep_prefix(&self, keep: usize) -> ImportanceVector {
        assert!(keep >= 1 && keep <= self.order.len());
        ImportanceVector {
            scores: self.scores.clone(),
            order: self.order[..keep].to_vec(),
            source: self.source,
        }
    }
}

enum Node {
    Leaf { value: f64 },
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

struct Tree {
    nodes: Vec<Node>,
    /// Impurity-decrease credit per original feature, sample-weighted.
    importance_raw: Vec<f64>,
}

/// A trained forest. Immutable and shareable across threads.
pub struct FittedForest {
    trees: Vec<Tree>,
    n_features: usize,
    problem_type: ProblemType,
    n_classes: usize,
    seed: u64,
}

/// Bootstrap row indices for one tree: n draws with replacement.
pub(crate) fn bootstrap_indices(tree_seed: u64, n_rows: usize) -> Vec<usize> {
    let mut rng = seed::rng(tree_seed);
    (0..n_rows).map(|_| rng.gen_range(0..n_rows)).collect()
}

pub(crate) fn tree_seed(forest_seed: u64, tree_idx: usize) -> u64 {
    seed::derive(forest_seed, TREE_STREAM, tree_idx as u64)
}

/// Train a random forest.
pub fn fit_forest(dataset: &Dataset, config: &ForestConfig) -> Result<FittedForest> {
    config.validate()?;
    let n_classes = dataset.n_classes().unwrap_or(0);
    let labels: Vec<usize> = match dataset.problem_type() {
        ProblemType::Classification => dataset.class_labels(),
        ProblemType::Regression => Vec::new(),
    };
    let max_features = config.max_features_per_split.resolve(dataset.n_features())?;

    let trees: Vec<Tree> = (0..config.n_trees)
        .into_par_iter()
        .map(|t| {
            let ts = tree_seed(config.seed, t);
            let rows = bootstrap_indices(ts, dataset.n_rows());
            let mut rng = seed::rng(seed::derive(ts, 1, 0));
            let mut builder = TreeBuilder {
                features: dataset.features().view(),
                target: dataset.target().as_slice().expect("contiguous target"),
                labels: &labels,
                n_classes,
                problem_type: dataset.problem_type(),
                config,
                max_features,
                n_root: rows.len(),
                nodes: Vec::new(),
                importance_raw: vec![0.0; dataset.n_features()],
                rng: &mut rng,
            };
            builder.grow(rows, 0);
            Tree { nodes: builder.nodes, importance_raw: builder.importance_raw }
        })
        .collect();

    Ok(FittedForest {
        trees,
        n_features: dataset.n_features(),
        problem_type: dataset.problem_type(),
        n_classes,
        seed: config.seed,
    })
}

impl FittedForest {
    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn problem_type(&self) -> ProblemType {
        self.problem_type
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Predict each row: mean of tree means (regression) or the majority
    /// class over tree votes (classification; vote ties go to the lower
    /// class index).
    pub fn predict(&self, features: ArrayView2<f64>) -> Vec<f64> {
        assert_eq!(features.ncols(), self.n_features);
        (0..features.nrows())
            .map(|i| {
                let row = features.row(i);
                match self.problem_type {
                    ProblemType::Regression => {
                        let sum: f64 = self.trees.iter().map(|t| t.predict(&row)).sum();
                        sum / self.trees.len() as f64
                    }
                    ProblemType::Classification => {
                        let mut votes = vec![0usize; self.n_classes];
                        for t in &self.trees {
                            votes[t.predict(&row) as usize] += 1;
                        }
                        let best = votes
                            .iter()
                            .enumerate()
                            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
                            .unwrap()
                            .0;
                        best as f64
                    }
                }
            })
            .collect()
    }
}

impl Tree {
    fn predict(&self, row: &ndarray::ArrayView1<f64>) -> f64 {
        let mut idx = 0usize;
        loop {
            match &self.nodes[idx] {
                Node::Leaf { value } => return *value,
                Node::Split { feature, threshold, left, right } => {
                    idx = if row[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }
}

/// Mean decrease in impurity across trees, normalized to sum 1. A forest
/// with no splits at all (constant target) falls back to uniform scores.
pub fn feature_importance(forest: &FittedForest) -> ImportanceVector {
    let f = forest.n_features;
    let mut total = vec![0.0; f];
    for tree in &forest.trees {
        for (j, credit) in tree.importance_raw.iter().enumerate() {
            total[j] += credit;
        }
    }
    // Sum the normalizer in value order so the result does not depend on
    // column order; column permutations then relabel scores bit for bit.
    let mut addends = total.clone();
    addends.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let sum: f64 = addends.iter().sum();
    let scores = if sum <= 0.0 {
        vec![1.0 / f as f64; f]
    } else {
        total.iter().map(|v| v / sum).collect()
    };
    ImportanceVector::new(scores, ImportanceSource::Forest)
        .expect("normalized scores always form a valid vector")
}

struct TreeBuilder<'a> {
    features: ArrayView2<'a, f64>,
    target: &'a [f64],
    labels: &'a [usize],
    n_classes: usize,
    problem_type: ProblemType,
    config: &'a ForestConfig,
    max_features: usize,
    n_root: usize,
    nodes: Vec<Node>,
    importance_raw: Vec<f64>,
    rng: &'a mut Xoshiro256PlusPlus,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    gain: f64, // (n*imp - nl*imp_l - nr*imp_r) / n_root
}

impl TreeBuilder<'_> {
    /// Grow a node from `rows` (bootstrap indices, repeats allowed). Returns
    /// the node's index in the arena.
    fn grow(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let impurity = self.node_impurity(&rows);
        let at_depth_limit = self.config.max_depth.is_some_and(|d| depth >= d);
        if rows.len() < self.config.min_samples_split || impurity <= 1e-12 || at_depth_limit {
            return self.push_leaf(&rows);
        }

        let split = match self.best_split(&rows, impurity) {
            Some(s) if s.gain > 1e-12 => s,
            _ => return self.push_leaf(&rows),
        };

        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
            .iter()
            .partition(|&&r| self.features[(r, split.feature)] <= split.threshold);
        debug_assert!(!left_rows.is_empty() && !right_rows.is_empty());

        self.importance_raw[split.feature] += split.gain;

        let idx = self.nodes.len();
        self.nodes.push(Node::Leaf { value: 0.0 }); // placeholder
        let left = self.grow(left_rows, depth + 1);
        let right = self.grow(right_rows, depth + 1);
        self.nodes[idx] = Node::Split { feature: split.feature, threshold: split.threshold, left, right };
        idx
    }

    fn push_leaf(&mut self, rows: &[usize]) -> usize {
        let value = match self.problem_type {
            ProblemType::Regression => {
                rows.iter().map(|&r| self.target[r]).sum::<f64>() / rows.len() as f64
            }
            ProblemType::Classification => {
                let mut counts = vec![0usize; self.n_classes];
                for &r in rows {
                    counts[self.labels[r]] += 1;
                }
                let best = counts
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
                    .unwrap()
                    .0;
                best as f64
            }
        };
        self.nodes.push(Node::Leaf { value });
        self.nodes.len() - 1
    }

    fn node_impurity(&self, rows: &[usize]) -> f64 {
        match self.problem_type {
            ProblemType::Regression => {
                let n = rows.len() as f64;
                let sum: f64 = rows.iter().map(|&r| self.target[r]).sum();
                let sumsq: f64 = rows.iter().map(|&r| self.target[r] * self.target[r]).sum();
                (sumsq / n - (sum / n).powi(2)).max(0.0)
            }
            ProblemType::Classification => {
                let mut counts = vec![0usize; self.n_classes];
                for &r in rows {
                    counts[self.labels[r]] += 1;
                }
                gini(&counts, rows.len())
            }
        }
    }

    /// Candidate features for a split: all of them when max_features covers
    /// the whole set, otherwise a random subset without replacement, scanned
    /// in ascending index order so gain ties resolve to the lower index.
    fn candidate_features(&mut self) -> Vec<usize> {
        let f = self.features.ncols();
        if self.max_features >= f {
            return (0..f).collect();
        }
        let mut pool: Vec<usize> = (0..f).collect();
        for i in 0..self.max_features {
            let j = self.rng.gen_range(i..f);
            pool.swap(i, j);
        }
        let mut chosen = pool[..self.max_features].to_vec();
        chosen.sort_unstable();
        chosen
    }

    fn best_split(&mut self, rows: &[usize], node_impurity: f64) -> Option<BestSplit> {
        let candidates = self.candidate_features();
        let n = rows.len();
        let mut best: Option<BestSplit> = None;

        // (value, target-or-label) pairs, reused across features.
        let mut column: Vec<(f64, f64)> = Vec::with_capacity(n);
        for &feature in &candidates {
            column.clear();
            for &r in rows {
                let y = match self.problem_type {
                    ProblemType::Regression => self.target[r],
                    ProblemType::Classification => self.labels[r] as f64,
                };
                column.push((self.features[(r, feature)], y));
            }
            column.sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

            let gain_threshold = match self.problem_type {
                ProblemType::Regression => scan_regression(&column, node_impurity),
                ProblemType::Classification => {
                    scan_classification(&column, node_impurity, self.n_classes)
                }
            };
            if let Some((gain_local, threshold)) = gain_threshold {
                let gain = gain_local * n as f64 / self.n_root as f64;
                // Exact gain ties (two features inducing the same partition)
                // break on the threshold value, not the column position, so
                // column permutations relabel trees instead of changing them.
                let wins = best
                    .as_ref()
                    .is_none_or(|b| gain > b.gain || (gain == b.gain && threshold < b.threshold));
                if wins {
                    best = Some(BestSplit { feature, threshold, gain });
                }
            }
        }
        best
    }
}

fn gini(counts: &[usize], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>()
}

/// Scan sorted (value, target) pairs for the best variance-reduction split.
/// Returns (impurity decrease weighted by local fractions, threshold).
fn scan_regression(column: &[(f64, f64)], node_impurity: f64) -> Option<(f64, f64)> {
    let n = column.len() as f64;
    let mut left_sum = 0.0;
    let mut left_sumsq = 0.0;
    let total_sum: f64 = column.iter().map(|p| p.1).sum();
    let total_sumsq: f64 = column.iter().map(|p| p.1 * p.1).sum();

    let mut best: Option<(f64, f64)> = None;
    for i in 0..column.len() - 1 {
        left_sum += column[i].1;
        left_sumsq += column[i].1 * column[i].1;
        if column[i].0 == column[i + 1].0 {
            continue;
        }
        let nl = (i + 1) as f64;
        let nr = n - nl;
        let var_l = (left_sumsq / nl - (left_sum / nl).powi(2)).max(0.0);
        let var_r = ((total_sumsq - left_sumsq) / nr - ((total_sum - left_sum) / nr).powi(2)).max(0.0);
        let gain = node_impurity - (nl / n) * var_l - (nr / n) * var_r;
        if best.is_none_or(|b| gain > b.0) {
            best = Some((gain, midpoint(column[i].0, column[i + 1].0)));
        }
    }
    best
}

/// Same scan with Gini impurity; targets in the column are class labels.
fn scan_classification(
    column: &[(f64, f64)],
    node_impurity: f64,
    n_classes: usize,
) -> Option<(f64, f64)> {
    let n = column.len();
    let mut left_counts = vec![0usize; n_classes];
    let mut total_counts = vec![0usize; n_classes];
    for p in column {
        total_counts[p.1 as usize] += 1;
    }

    let mut best: Option<(f64, f64)> = None;
    for i in 0..n - 1 {
        left_counts[column[i].1 as usize] += 1;
        if column[i].0 == column[i + 1].0 {
            continue;
        }
        let nl = i + 1;
        let nr = n - nl;
        let right_counts: Vec<usize> =
            total_counts.iter().zip(&left_counts).map(|(t, l)| t - l).collect();
        let gain = node_impurity
            - (nl as f64 / n as f64) * gini(&left_counts, nl)
            - (nr as f64 / n as f64) * gini(&right_counts, nr);
        if best.is_none_or(|b| gain > b.0) {
            best = Some((gain, midpoint(column[i].0, column[i + 1].0)));
        }
    }
    best
}

fn midpoint(a: f64, b: f64) -> f64 {
    a + (b - a) / 2.0
}
