//! Single-hidden-layer MLP evaluator with k-fold cross-validation.
//!
//! Architecture: one input per feature, a hidden layer of
//! `round(hidden_multiplier * inputs)` units (minimum 2), and either one
//! linear output (regression, MSE loss) or one softmax unit per class
//! (classification, cross-entropy loss). Training is plain mini-batch SGD at
//! a fixed learning rate with He initialization.
//!
//! Per fold, features are standardized with training-split statistics and
//! the net trains on the other k-1 folds, stopping early once the held-out
//! loss has failed to improve by a relative `tol` for 10 consecutive epochs.
//! Scores are R² for regression (0 by convention on zero-variance targets)
//! and fraction-correct for classification. Regression targets are
//! internally standardized with training-split statistics so the fixed
//! learning rate behaves across target scales; R² is invariant to that
//! affine map.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::seed;
use crate::tabular::{Dataset, ProblemType};

const FOLD_SPLIT_STREAM: u64 = 0x666f_6c64;
const FOLD_TRAIN_STREAM: u64 = 0x7472_6169;
const EARLY_STOP_PATIENCE: usize = 10;

/// Hidden-layer activation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Activation {
    ReLU,
    Tanh,
}

/// MLP and cross-validation hyperparameters.
#[derive(Clone, Debug)]
pub struct MlpConfig {
    pub learning_rate: f64,
    /// Relative improvement threshold for early stopping.
    pub tol: f64,
    pub max_epochs: usize,
    pub k_folds: usize,
    pub hidden_multiplier: f64,
    pub batch_size: usize,
    pub seed: u64,
    pub activation: Activation,
}

impl Default for MlpConfig {
    fn default() -> Self {
        MlpConfig {
            learning_rate: 0.001,
            tol: 0.0001,
            max_epochs: 100_000,
            k_folds: 10,
            hidden_multiplier: 1.2,
            batch_size: 32,
            seed: 1,
            activation: Activation::ReLU,
        }
    }
}

impl MlpConfig {
    fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig("learning_rate must be positive".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidConfig("tol must be positive".into()));
        }
        if self.max_epochs < 1 {
            return Err(Error::InvalidConfig("max_epochs must be >= 1".into()));
        }
        if self.k_folds < 2 {
            return Err(Error::InvalidConfig("k_folds must be >= 2".into()));
        }
        if !(self.hidden_multiplier > 0.0 && self.hidden_multiplier.is_finite()) {
            return Err(Error::InvalidConfig("hidden_multiplier must be positive".into()));
        }
        if self.batch_size < 1 {
            return Err(Error::InvalidConfig("batch_size must be >= 1".into()));
        }
        Ok(())
    }

    /// Hidden width: round(multiplier × inputs), half-to-even, minimum 2.
    pub fn hidden_units(&self, n_inputs: usize) -> usize {
        let exact = self.hidden_multiplier * n_inputs as f64;
        (exact.round_ties_even() as usize).max(2)
    }
}

/// What a fold score means.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScoreKind {
    R2,
    Accuracy,
}

/// Cross-validation outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct CvResult {
    pub fold_scores: Vec<f64>,
    pub mean_score: f64,
    pub score_kind: ScoreKind,
    pub epochs_run: Vec<usize>,
}

impl CvResult {
    pub fn best_score(&self) -> f64 {
        self.fold_scores.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Evaluate a dataset with k-fold cross-validation. Deterministic under the
/// config seed; folds may train in parallel with identical results.
pub fn evaluate(dataset: &Dataset, config: &MlpConfig) -> Result<CvResult> {
    config.validate()?;
    if dataset.n_rows() < config.k_folds {
        return Err(Error::InvalidConfig(format!(
            "{} rows cannot be split into {} folds",
            dataset.n_rows(),
            config.k_folds
        )));
    }

    let folds = build_folds(dataset, config);
    let fold_outcomes: Result<Vec<(f64, usize)>> = (0..config.k_folds)
        .into_par_iter()
        .map(|f| run_fold(dataset, config, &folds, f))
        .collect();
    let fold_outcomes = fold_outcomes?;

    let fold_scores: Vec<f64> = fold_outcomes.iter().map(|o| o.0).collect();
    let epochs_run: Vec<usize> = fold_outcomes.iter().map(|o| o.1).collect();
    let mean_score = fold_scores.iter().sum::<f64>() / fold_scores.len() as f64;
    let score_kind = match dataset.problem_type() {
        ProblemType::Regression => ScoreKind::R2,
        ProblemType::Classification => ScoreKind::Accuracy,
    };
    Ok(CvResult { fold_scores, mean_score, score_kind, epochs_run })
}

/// Fold assignment per row. Regression: shuffled contiguous folds.
/// Classification: stratified — each class's shuffled members are dealt
/// round-robin so every fold gets a proportional share.
fn build_folds(dataset: &Dataset, config: &MlpConfig) -> Vec<usize> {
    let n = dataset.n_rows();
    let k = config.k_folds;
    let mut rng = seed::rng(seed::derive(config.seed, FOLD_SPLIT_STREAM, 0));
    let mut assignment = vec![0usize; n];
    match dataset.problem_type() {
        ProblemType::Regression => {
            let mut indices: Vec<usize> = (0..n).collect();
            indices.shuffle(&mut rng);
            for (pos, &row) in indices.iter().enumerate() {
                // First n % k folds take one extra row.
                assignment[row] = pos % k;
            }
        }
        ProblemType::Classification => {
            let labels = dataset.class_labels();
            let n_classes = dataset.n_classes().unwrap_or(0);
            for class in 0..n_classes {
                let mut members: Vec<usize> =
                    (0..n).filter(|&i| labels[i] == class).collect();
                members.shuffle(&mut rng);
                for (pos, &row) in members.iter().enumerate() {
                    assignment[row] = pos % k;
                }
            }
        }
    }
    assignment
}

/// Column means and stds over the training split only.
struct Standardizer {
    mean: Array1<f64>,
    std: Array1<f64>,
}

impl Standardizer {
    fn fit(features: &Array2<f64>, rows: &[usize]) -> Standardizer {
        let f = features.ncols();
        let n = rows.len() as f64;
        let mut mean = Array1::zeros(f);
        for &r in rows {
            mean += &features.row(r);
        }
        mean /= n;
        let mut var = Array1::zeros(f);
        for &r in rows {
            let diff = &features.row(r) - &mean;
            var += &diff.mapv(|v| v * v);
        }
        var /= n;
        let std = var.mapv(|v| if v.sqrt() > 1e-12 { v.sqrt() } else { 1.0 });
        Standardizer { mean, std }
    }

    fn transform(&self, features: &Array2<f64>, rows: &[usize]) -> Array2<f64> {
        let mut out = Array2::zeros((rows.len(), features.ncols()));
        for (i, &r) in rows.iter().enumerate() {
            let z = (&features.row(r) - &self.mean) / &self.std;
            out.row_mut(i).assign(&z);
        }
        out
    }
}

fn run_fold(
    dataset: &Dataset,
    config: &MlpConfig,
    fold_of: &[usize],
    fold: usize,
) -> Result<(f64, usize)> {
    let train_rows: Vec<usize> =
        (0..dataset.n_rows()).filter(|&i| fold_of[i] != fold).collect();
    let test_rows: Vec<usize> =
        (0..dataset.n_rows()).filter(|&i| fold_of[i] == fold).collect();

    let standardizer = Standardizer::fit(dataset.features(), &train_rows);
    let x_train = standardizer.transform(dataset.features(), &train_rows);
    let x_test = standardizer.transform(dataset.features(), &test_rows);

    let mut rng = seed::rng(seed::derive(config.seed, FOLD_TRAIN_STREAM, fold as u64));
    let n_inputs = dataset.n_features();
    let hidden = config.hidden_units(n_inputs);

    match dataset.problem_type() {
        ProblemType::Regression => {
            let y = dataset.target();
            let y_mean =
                train_rows.iter().map(|&r| y[r]).sum::<f64>() / train_rows.len() as f64;
            let y_var = train_rows.iter().map(|&r| (y[r] - y_mean).powi(2)).sum::<f64>()
                / train_rows.len() as f64;
            let y_std = if y_var.sqrt() > 1e-12 { y_var.sqrt() } else { 1.0 };

            let y_train: Vec<Target> =
                train_rows.iter().map(|&r| Target::Value((y[r] - y_mean) / y_std)).collect();
            let y_test: Vec<Target> =
                test_rows.iter().map(|&r| Target::Value((y[r] - y_mean) / y_std)).collect();

            let mut net = Network::init(n_inputs, hidden, 1, config.activation, LossKind::Mse, &mut rng);
            let epochs = train(&mut net, &x_train, &y_train, &x_test, &y_test, config, fold, &mut rng)?;

            // Score on the original target scale.
            let outputs = net.forward(x_test.view()).output;
            let mut preds = Vec::with_capacity(test_rows.len());
            for i in 0..test_rows.len() {
                preds.push(outputs[(i, 0)] * y_std + y_mean);
            }
            let actual: Vec<f64> = test_rows.iter().map(|&r| y[r]).collect();
            Ok((r_squared(&actual, &preds), epochs))
        }
        ProblemType::Classification => {
            let labels = dataset.class_labels();
            let n_classes = dataset.n_classes().unwrap_or(0);
            for class in 0..n_classes {
                if !train_rows.iter().any(|&r| labels[r] == class) {
                    return Err(Error::MissingClass { fold, class });
                }
            }
            let y_train: Vec<Target> =
                train_rows.iter().map(|&r| Target::Class(labels[r])).collect();
            let y_test: Vec<Target> =
                test_rows.iter().map(|&r| Target::Class(labels[r])).collect();

            let mut net = Network::init(
                n_inputs,
                hidden,
                n_classes,
                config.activation,
                LossKind::SoftmaxCrossEntropy,
                &mut rng,
            );
            let epochs = train(&mut net, &x_train, &y_train, &x_test, &y_test, config, fold, &mut rng)?;

            let outputs = net.forward(x_test.view()).output;
            let mut correct = 0usize;
            for (i, t) in y_test.iter().enumerate() {
                let row = outputs.row(i);
                let pred = row
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.partial_cmp(b.1).unwrap().then(b.0.cmp(&a.0)))
                    .unwrap()
                    .0;
                if let Target::Class(c) = t {
                    correct += usize::from(pred == *c);
                }
            }
            Ok((correct as f64 / y_test.len() as f64, epochs))
        }
    }
}

/// SGD training loop with early stopping on the held-out loss. Returns the
/// number of epochs run.
#[allow(clippy::too_many_arguments)]
fn train(
    net: &mut Network,
    x_train: &Array2<f64>,
    y_train: &[Target],
    x_val: &Array2<f64>,
    y_val: &[Target],
    config: &MlpConfig,
    fold: usize,
    rng: &mut Xoshiro256PlusPlus,
) -> Result<usize> {
    let n = x_train.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    let mut best_val = f64::INFINITY;
    let mut stall = 0usize;
    let mut epochs = 0usize;

    for epoch in 1..=config.max_epochs {
        epochs = epoch;
        order.shuffle(rng);
        for chunk in order.chunks(config.batch_size) {
            let xb = gather_rows(x_train, chunk);
            let yb: Vec<Target> = chunk.iter().map(|&i| y_train[i]).collect();
            let grads = net.backprop(xb.view(), &yb);
            net.step(&grads, config.learning_rate);
        }

        let val_loss = net.loss(x_val.view(), y_val);
        if !val_loss.is_finite() {
            return Err(Error::Divergence { fold, epoch });
        }
        if val_loss < best_val * (1.0 - config.tol) || best_val == f64::INFINITY {
            best_val = val_loss;
            stall = 0;
        } else {
            stall += 1;
            if stall >= EARLY_STOP_PATIENCE {
                break;
            }
        }
    }
    Ok(epochs)
}

fn gather_rows(x: &Array2<f64>, rows: &[usize]) -> Array2<f64> {
    let mut out = Array2::zeros((rows.len(), x.ncols()));
    for (i, &r) in rows.iter().enumerate() {
        out.row_mut(i).assign(&x.row(r));
    }
    out
}

fn r_squared(actual: &[f64], predicted: &[f64]) -> f64 {
    let n = actual.len() as f64;
    let mean = actual.iter().sum::<f64>() / n;
    let ss_tot: f64 = actual.iter().map(|v| (v - mean).powi(2)).sum();
    if ss_tot <= 1e-24 {
        // Zero-variance target: R² defined as 0.
        return 0.0;
    }
    let ss_res: f64 = actual.iter().zip(predicted).map(|(a, p)| (a - p).powi(2)).sum();
    1.0 - ss_res / ss_tot
}

#[derive(Clone, Copy)]
enum Target {
    Value(f64),
    Class(usize),
}

#[derive(Clone, Copy, PartialEq)]
enum LossKind {
    Mse,
    SoftmaxCrossEntropy,
}

struct Network {
    w1: Array2<f64>,
    b1: Array1<f64>,
    w2: Array2<f64>,
    b2: Array1<f64>,
    activation: Activation,
    loss_kind: LossKind,
}

struct Forward {
    hidden_pre: Array2<f64>,
    hidden: Array2<f64>,
    output: Array2<f64>,
}

struct Gradients {
    w1: Array2<f64>,
    b1: Array1<f64>,
    w2: Array2<f64>,
    b2: Array1<f64>,
}

impl Network {
    /// He-style initialization: every hidden unit gets a random direction
    /// with its norm fixed at the He scale (sqrt 2, the expected norm of a
    /// fan-in-scaled Gaussian row), drawn in antithetic pairs so narrow ReLU
    /// layers start covering both half-spaces. The output layer starts at
    /// zero: its weights pick up the right signs from the data before any
    /// hidden gradient flows, which stops tiny hidden layers from collapsing
    /// through the origin early in training.
    fn init(
        n_in: usize,
        n_hidden: usize,
        n_out: usize,
        activation: Activation,
        loss_kind: LossKind,
        rng: &mut Xoshiro256PlusPlus,
    ) -> Network {
        use rand_distr::{Distribution, StandardNormal};
        let mut w1 = Array2::<f64>::zeros((n_in, n_hidden));
        for j in 0..n_hidden {
            if j % 2 == 1 {
                for i in 0..n_in {
                    w1[(i, j)] = -w1[(i, j - 1)];
                }
            } else {
                let mut direction: Vec<f64> =
                    (0..n_in).map(|_| StandardNormal.sample(rng)).collect();
                let norm = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm < 1e-12 {
                    direction[0] = 1.0;
                } else {
                    direction.iter_mut().for_each(|v| *v /= norm);
                }
                for (i, u) in direction.iter().enumerate() {
                    w1[(i, j)] = u * std::f64::consts::SQRT_2;
                }
            }
        }
        Network {
            w1,
            b1: Array1::zeros(n_hidden),
            w2: Array2::zeros((n_hidden, n_out)),
            b2: Array1::zeros(n_out),
            activation,
            loss_kind,
        }
    }

    fn forward(&self, x: ArrayView2<f64>) -> Forward {
        let hidden_pre = x.dot(&self.w1) + &self.b1;
        let hidden = match self.activation {
            Activation::ReLU => hidden_pre.mapv(|v| v.max(0.0)),
            Activation::Tanh => hidden_pre.mapv(f64::tanh),
        };
        let output = hidden.dot(&self.w2) + &self.b2;
        Forward { hidden_pre, hidden, output }
    }

    /// Mean loss over the batch.
    fn loss(&self, x: ArrayView2<f64>, y: &[Target]) -> f64 {
        let out = self.forward(x).output;
        let n = y.len() as f64;
        match self.loss_kind {
            LossKind::Mse => {
                let mut total = 0.0;
                for (i, t) in y.iter().enumerate() {
                    if let Target::Value(v) = t {
                        total += (out[(i, 0)] - v).powi(2);
                    }
                }
                total / n
            }
            LossKind::SoftmaxCrossEntropy => {
                let mut total = 0.0;
                for (i, t) in y.iter().enumerate() {
                    if let Target::Class(c) = t {
                        let row = out.row(i);
                        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                        let log_sum = row.iter().map(|v| (v - max).exp()).sum::<f64>().ln() + max;
                        let log_p = row[*c] - log_sum;
                        total -= log_p;
                    }
                }
                total / n
            }
        }
    }

    /// Analytic gradients of the mean batch loss.
    fn backprop(&self, x: ArrayView2<f64>, y: &[Target]) -> Gradients {
        let fwd = self.forward(x);
        let n = y.len() as f64;
        let n_out = self.b2.len();

        // dL/dOutput
        let mut d_out = Array2::zeros((y.len(), n_out));
        match self.loss_kind {
            LossKind::Mse => {
                for (i, t) in y.iter().enumerate() {
                    if let Target::Value(v) = t {
                        d_out[(i, 0)] = 2.0 * (fwd.output[(i, 0)] - v) / n;
                    }
                }
            }
            LossKind::SoftmaxCrossEntropy => {
                for (i, t) in y.iter().enumerate() {
                    let row = fwd.output.row(i);
                    let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    let exps: Vec<f64> = row.iter().map(|v| (v - max).exp()).collect();
                    let sum: f64 = exps.iter().sum();
                    for (j, e) in exps.iter().enumerate() {
                        d_out[(i, j)] = e / sum / n;
                    }
                    if let Target::Class(c) = t {
                        d_out[(i, *c)] -= 1.0 / n;
                    }
                }
            }
        }

        let g_w2 = fwd.hidden.t().dot(&d_out);
        let g_b2 = d_out.sum_axis(Axis(0));

        let mut d_hidden = d_out.dot(&self.w2.t());
        match self.activation {
            Activation::ReLU => {
                ndarray::Zip::from(&mut d_hidden).and(&fwd.hidden_pre).for_each(|d, &pre| {
                    if pre <= 0.0 {
                        *d = 0.0;
                    }
                });
            }
            Activation::Tanh => {
                ndarray::Zip::from(&mut d_hidden).and(&fwd.hidden).for_each(|d, &h| {
                    *d *= 1.0 - h * h;
                });
            }
        }

        let g_w1 = x.t().dot(&d_hidden);
        let g_b1 = d_hidden.sum_axis(Axis(0));

        Gradients { w1: g_w1, b1: g_b1, w2: g_w2, b2: g_b2 }
    }

    fn step(&mut self, grads: &Gradients, lr: f64) {
        self.w1.scaled_add(-lr, &grads.w1);
        self.b1.scaled_add(-lr, &grads.b1);
        self.w2.scaled_add(-lr, &grads.w2);
        self.b2.scaled_add(-lr, &grads.b2);
    }
}

/// Compare backprop gradients against central finite differences (step 1e-5)
/// for every parameter on a small probe dataset. Returns the maximum
/// relative error.
pub fn gradient_check(config: &MlpConfig, probe: &Dataset) -> Result<f64> {
    config.validate()?;
    if probe.n_rows() > 20 || probe.n_features() > 5 {
        return Err(Error::InvalidArgument(
            "gradient check probe must be at most 20 rows and 5 features".into(),
        ));
    }
    let mut rng = seed::rng(config.seed);
    let hidden = config.hidden_units(probe.n_features());
    let (net, y) = match probe.problem_type() {
        ProblemType::Regression => {
            let net = Network::init(
                probe.n_features(),
                hidden,
                1,
                config.activation,
                LossKind::Mse,
                &mut rng,
            );
            let y: Vec<Target> = probe.target().iter().map(|&v| Target::Value(v)).collect();
            (net, y)
        }
        ProblemType::Classification => {
            let n_classes = probe.n_classes().unwrap_or(0);
            let net = Network::init(
                probe.n_features(),
                hidden,
                n_classes,
                config.activation,
                LossKind::SoftmaxCrossEntropy,
                &mut rng,
            );
            let y: Vec<Target> =
                probe.class_labels().iter().map(|&c| Target::Class(c)).collect();
            (net, y)
        }
    };
    Ok(max_gradient_error(net, probe.features().view(), &y))
}

/// Flat-index access into a matrix regardless of memory layout.
fn mat_get(m: &Array2<f64>, idx: usize) -> f64 {
    m[(idx / m.ncols(), idx % m.ncols())]
}

fn mat_add(m: &mut Array2<f64>, idx: usize, delta: f64) {
    let pos = (idx / m.ncols(), idx % m.ncols());
    m[pos] += delta;
}

/// Shared by the public check and the zero-init unit test.
fn max_gradient_error(mut net: Network, x: ArrayView2<f64>, y: &[Target]) -> f64 {
    const STEP: f64 = 1e-5;
    let analytic = net.backprop(x, y);
    let mut max_err = 0.0f64;

    for param in 0..4usize {
        let len = match param {
            0 => net.w1.len(),
            1 => net.b1.len(),
            2 => net.w2.len(),
            3 => net.b2.len(),
            _ => unreachable!(),
        };
        for idx in 0..len {
            let a = match param {
                0 => mat_get(&analytic.w1, idx),
                1 => analytic.b1[idx],
                2 => mat_get(&analytic.w2, idx),
                3 => analytic.b2[idx],
                _ => unreachable!(),
            };
            let read = |net: &mut Network, delta: f64| -> f64 {
                match param {
                    0 => mat_add(&mut net.w1, idx, delta),
                    1 => net.b1[idx] += delta,
                    2 => mat_add(&mut net.w2, idx, delta),
                    3 => net.b2[idx] += delta,
                    _ => unreachable!(),
                }
                net.loss(x, y)
            };
            let plus = read(&mut net, STEP);
            let minus = read(&mut net, -2.0 * STEP);
            read(&mut net, STEP); // restore
            let numeric = (plus - minus) / (2.0 * STEP);
            let err = (a - numeric).abs() / (a.abs() + numeric.abs()).max(1e-4);
            max_err = max_err.max(err);
        }
    }
    max_err
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tabular::{make_classification, make_regression, SynthSpec};
    use ndarray::{arr1, Array2};
    use rand_distr::{Distribution, StandardNormal};

    fn regression_probe(seed_v: u64) -> Dataset {
        let mut rng = seed::rng(seed_v);
        let mut x = Array2::zeros((12, 3));
        let mut y = ndarray::Array1::zeros(12);
        for i in 0..12 {
            for j in 0..3 {
                x[(i, j)] = StandardNormal.sample(&mut rng);
            }
            let z: f64 = StandardNormal.sample(&mut rng);
            y[i] = x[(i, 0)] - 0.5 * x[(i, 2)] + 0.1 * z;
        }
        let names = (0..3).map(|i| format!("f{i}")).collect();
        Dataset::new(names, x, y, ProblemType::Regression).unwrap()
    }

    fn classification_probe(seed_v: u64) -> Dataset {
        let mut rng = seed::rng(seed_v);
        let mut x = Array2::zeros((12, 3));
        let mut y = ndarray::Array1::zeros(12);
        for i in 0..12 {
            for j in 0..3 {
                x[(i, j)] = StandardNormal.sample(&mut rng);
            }
            y[i] = f64::from(i % 3 == 0);
        }
        let names = (0..3).map(|i| format!("f{i}")).collect();
        Dataset::new(names, x, y, ProblemType::Classification).unwrap()
    }

    #[test]
    fn gradients_match_finite_differences_regression() {
        for activation in [Activation::ReLU, Activation::Tanh] {
            let cfg = MlpConfig { activation, ..Default::default() };
            let err = gradient_check(&cfg, &regression_probe(5)).unwrap();
            assert!(err <= 1e-5, "{activation:?}: max relative error {err}");
        }
    }

    #[test]
    fn gradients_match_finite_differences_classification() {
        for activation in [Activation::ReLU, Activation::Tanh] {
            let cfg = MlpConfig { activation, ..Default::default() };
            let err = gradient_check(&cfg, &classification_probe(6)).unwrap();
            assert!(err <= 1e-5, "{activation:?}: max relative error {err}");
        }
    }

    #[test]
    fn gradients_match_at_zero_init_symmetric_point() {
        let probe = regression_probe(9);
        let net = Network {
            w1: Array2::zeros((3, 4)),
            b1: ndarray::Array1::zeros(4),
            w2: Array2::zeros((4, 1)),
            b2: ndarray::Array1::zeros(1),
            activation: Activation::Tanh,
            loss_kind: LossKind::Mse,
        };
        let y: Vec<Target> = probe.target().iter().map(|&v| Target::Value(v)).collect();
        let err = max_gradient_error(net, probe.features().view(), &y);
        assert!(err <= 1e-5, "max relative error {err}");
    }

    #[test]
    fn gradient_check_rejects_oversized_probes() {
        let d = make_regression(&SynthSpec::regression(30, 3, 1)).unwrap();
        assert!(gradient_check(&MlpConfig::default(), &d).is_err());
    }

    #[test]
    fn noiseless_linear_regression_scores_high() {
        let mut spec = SynthSpec::regression(500, 1, 3);
        spec.noise_scale = 0.0;
        let d = make_regression(&spec).unwrap();
        let cv = evaluate(&d, &MlpConfig::default()).unwrap();
        assert_eq!(cv.score_kind, ScoreKind::R2);
        assert!(cv.mean_score >= 0.99, "mean R² = {}", cv.mean_score);
        // Trained model beats the fold-mean baseline (R² 0) in every fold.
        assert!(cv.fold_scores.iter().all(|&s| s > 0.0));
    }

    #[test]
    fn separated_gaussians_classify_well() {
        // Two classes 6 sigma apart in 2-D: Bayes error is far below 5%.
        let mut rng = seed::rng(8);
        let n = 500;
        let mut x = Array2::zeros((n, 2));
        let mut y = ndarray::Array1::zeros(n);
        for i in 0..n {
            let class = i % 2;
            let center = if class == 0 { -3.0 } else { 3.0 };
            let z0: f64 = StandardNormal.sample(&mut rng);
            let z1: f64 = StandardNormal.sample(&mut rng);
            x[(i, 0)] = center + z0;
            x[(i, 1)] = center + z1;
            y[i] = class as f64;
        }
        let d = Dataset::new(
            vec!["a".into(), "b".into()],
            x,
            y,
            ProblemType::Classification,
        )
        .unwrap();
        let cv = evaluate(&d, &MlpConfig::default()).unwrap();
        assert_eq!(cv.score_kind, ScoreKind::Accuracy);
        assert!(cv.mean_score >= 0.95, "mean accuracy = {}", cv.mean_score);
        assert!(cv.fold_scores.iter().all(|&s| (0.0..=1.0).contains(&s)));
    }

    #[test]
    fn constant_target_scores_zero() {
        let mut rng = seed::rng(4);
        let mut x = Array2::zeros((50, 2));
        for v in x.iter_mut() {
            *v = StandardNormal.sample(&mut rng);
        }
        let d = Dataset::new(
            vec!["a".into(), "b".into()],
            x,
            arr1(&[5.0; 50]),
            ProblemType::Regression,
        )
        .unwrap();
        let cv = evaluate(&d, &MlpConfig { max_epochs: 50, ..Default::default() }).unwrap();
        assert!(cv.fold_scores.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn evaluation_is_deterministic() {
        let d = make_classification(&SynthSpec::classification(120, 4, 9)).unwrap();
        let cfg = MlpConfig { max_epochs: 200, ..Default::default() };
        let a = evaluate(&d, &cfg).unwrap();
        let b = evaluate(&d, &cfg).unwrap();
        assert_eq!(a.fold_scores, b.fold_scores);
        assert_eq!(a.epochs_run, b.epochs_run);
        assert_eq!(a.mean_score.to_bits(), b.mean_score.to_bits());
    }

    #[test]
    fn mean_is_arithmetic_mean_of_folds() {
        let d = make_regression(&SynthSpec::regression(100, 2, 2)).unwrap();
        let cfg = MlpConfig { max_epochs: 100, ..Default::default() };
        let cv = evaluate(&d, &cfg).unwrap();
        let mean = cv.fold_scores.iter().sum::<f64>() / cv.fold_scores.len() as f64;
        assert!((cv.mean_score - mean).abs() <= 1e-12);
        assert!(cv.best_score() >= cv.mean_score);
        assert_eq!(cv.epochs_run.len(), 10);
    }

    #[test]
    fn stratified_folds_cover_classes() {
        let d = make_classification(&SynthSpec::classification(100, 3, 12)).unwrap();
        let cfg = MlpConfig::default();
        let folds = build_folds(&d, &cfg);
        let labels = d.class_labels();
        for fold in 0..cfg.k_folds {
            for class in 0..2 {
                let in_train = (0..d.n_rows())
                    .any(|i| folds[i] != fold && labels[i] == class);
                assert!(in_train, "fold {fold} training split lost class {class}");
            }
        }
    }

    #[test]
    fn missing_class_in_training_split_is_reported() {
        // 10 folds, one class with a single member: the fold holding it
        // loses the class from its training split.
        let mut x = Array2::zeros((20, 1));
        let mut y = ndarray::Array1::zeros(20);
        for i in 0..20 {
            x[(i, 0)] = i as f64;
            y[i] = f64::from(i == 0);
        }
        let d = Dataset::new(vec!["a".into()], x, y, ProblemType::Classification).unwrap();
        let err = evaluate(&d, &MlpConfig { max_epochs: 10, ..Default::default() }).unwrap_err();
        assert!(matches!(err, Error::MissingClass { .. }));
    }

    #[test]
    fn standardizer_ignores_held_out_rows() {
        let mut x = Array2::zeros((10, 1));
        for i in 0..10 {
            x[(i, 0)] = i as f64;
        }
        let train: Vec<usize> = (0..5).collect();
        let before = Standardizer::fit(&x, &train);

        // Shift the held-out rows wildly; training statistics must not move.
        for i in 5..10 {
            x[(i, 0)] += 1e6;
        }
        let after = Standardizer::fit(&x, &train);
        assert_eq!(before.mean, after.mean);
        assert_eq!(before.std, after.std);
    }

    #[test]
    fn hidden_units_round_half_to_even_with_floor_two() {
        let cfg = MlpConfig::default();
        assert_eq!(cfg.hidden_units(5), 6); // 6.0
        assert_eq!(cfg.hidden_units(25), 30);
        assert_eq!(cfg.hidden_units(1), 2); // 1.2 -> 1 -> floor 2
        let cfg = MlpConfig { hidden_multiplier: 2.5, ..Default::default() };
        assert_eq!(cfg.hidden_units(1), 2); // 2.5 rounds to 2
        assert_eq!(cfg.hidden_units(3), 8); // 7.5 rounds to 8
    }

    #[test]
    fn r_squared_conventions() {
        assert_eq!(r_squared(&[1.0, 1.0], &[0.0, 2.0]), 0.0); // zero variance
        let r = r_squared(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]);
        assert!((r - 1.0).abs() <= 1e-12);
        assert!(r_squared(&[1.0, 2.0, 3.0], &[3.0, 3.0, 3.0]) < 0.0);
    }
}
