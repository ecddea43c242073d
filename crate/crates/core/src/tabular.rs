//! Dataset representation, CSV ingestion/emission, and synthetic data
//! generation for regression and classification problems.
//!
//! CSV format: comma-separated, `.` decimal point, header row, LF line
//! endings, target in the last column. Feature names are restricted to
//! `[A-Za-z0-9_]` so no quoting is ever needed. Floats are written in
//! shortest-roundtrip form, so `load_csv(save_csv(d))` reproduces `d`
//! exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use ndarray::{Array1, Array2};
use rand::distributions::{Distribution, Uniform};
use rand::seq::SliceRandom;
use rand_distr::{Normal, StandardNormal};

use crate::error::{Error, Result};
use crate::seed;

/// Nature of the supervised problem carried by a [`Dataset`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProblemType {
    Regression,
    Classification,
}

impl ProblemType {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProblemType::Regression => "regression",
            ProblemType::Classification => "classification",
        }
    }
}

impl std::str::FromStr for ProblemType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "regression" => Ok(ProblemType::Regression),
            "classification" => Ok(ProblemType::Classification),
            other => Err(Error::InvalidArgument(format!(
                "unknown problem type {other:?} (expected \"regression\" or \"classification\")"
            ))),
        }
    }
}

/// A supervised tabular dataset: named float feature columns plus a target
/// column, immutable after construction.
///
/// Classification targets are stored as `f64` but validated at construction
/// to be integers `0..n_classes` with every class present at least once.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    feature_names: Vec<String>,
    features: Array2<f64>,
    target: Array1<f64>,
    problem_type: ProblemType,
}

fn valid_name(name: &str) -> bool {
    !name.is_empty() && name.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

impl Dataset {
    /// Build a dataset, validating every invariant.
    pub fn new(
        feature_names: Vec<String>,
        features: Array2<f64>,
        target: Array1<f64>,
        problem_type: ProblemType,
    ) -> Result<Self> {
        let (n_rows, n_features) = features.dim();
        if n_features < 1 {
            return Err(Error::InvalidDataset("needs at least 1 feature column".into()));
        }
        if n_rows < 2 {
            return Err(Error::InvalidDataset(format!(
                "needs at least 2 rows, got {n_rows}"
            )));
        }
        if target.len() != n_rows {
            return Err(Error::InvalidDataset(format!(
                "target length {} does not match {} rows",
                target.len(),
                n_rows
            )));
        }
        if feature_names.len() != n_features {
            return Err(Error::InvalidDataset(format!(
                "{} feature names for {} columns",
                feature_names.len(),
                n_features
            )));
        }
        for name in &feature_names {
            if !valid_name(name) {
                return Err(Error::InvalidDataset(format!(
                    "feature name {name:?} is not of the form [A-Za-z0-9_]+"
                )));
            }
        }
        for (i, a) in feature_names.iter().enumerate() {
            if feature_names[..i].contains(a) {
                return Err(Error::InvalidDataset(format!("duplicate feature name {a:?}")));
            }
        }
        if features.iter().any(|v| !v.is_finite()) || target.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidDataset("non-finite value".into()));
        }
        if problem_type == ProblemType::Classification {
            let mut max_label = 0usize;
            for (i, &v) in target.iter().enumerate() {
                if v.fract() != 0.0 || v < 0.0 {
                    return Err(Error::InvalidDataset(format!(
                        "class label {v} at row {} is not a nonnegative integer",
                        i + 1
                    )));
                }
                max_label = max_label.max(v as usize);
            }
            let n_classes = max_label + 1;
            if n_classes < 2 {
                return Err(Error::InvalidDataset(
                    "classification target has a single class".into(),
                ));
            }
            let mut counts = vec![0usize; n_classes];
            for &v in target.iter() {
                counts[v as usize] += 1;
            }
            if let Some(missing) = counts.iter().position(|&c| c == 0) {
                return Err(Error::InvalidDataset(format!(
                    "class {missing} has no samples (labels must cover 0..{n_classes})"
                )));
            }
        }
        Ok(Dataset { feature_names, features, target, problem_type })
    }

    pub fn n_rows(&self) -> usize {
        self.features.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn target(&self) -> &Array1<f64> {
        &self.target
    }

    pub fn problem_type(&self) -> ProblemType {
        self.problem_type
    }

    /// Number of classes for classification datasets, `None` for regression.
    pub fn n_classes(&self) -> Option<usize> {
        match self.problem_type {
            ProblemType::Regression => None,
            ProblemType::Classification => {
                let max = self.target.iter().fold(0.0f64, |a, &b| a.max(b));
                Some(max as usize + 1)
            }
        }
    }

    /// Class labels as integers. Panics on regression datasets.
    pub fn class_labels(&self) -> Vec<usize> {
        assert_eq!(self.problem_type, ProblemType::Classification);
        self.target.iter().map(|&v| v as usize).collect()
    }

    /// New dataset keeping only the given feature columns, in the given
    /// order. The target is carried over unchanged.
    pub fn select_features(&self, indices: &[usize]) -> Result<Dataset> {
        if indices.is_empty() {
            return Err(Error::InvalidArgument("cannot select zero features".into()));
        }
        for (i, &idx) in indices.iter().enumerate() {
            if idx >= self.n_features() {
                return Err(Error::InvalidArgument(format!(
                    "feature index {idx} out of range (0..{})",
                    self.n_features()
                )));
            }
            if indices[..i].contains(&idx) {
                return Err(Error::InvalidArgument(format!("duplicate feature index {idx}")));
            }
        }
        let names = indices.iter().map(|&i| self.feature_names[i].clone()).collect();
        let mut out = Array2::zeros((self.n_rows(), indices.len()));
        for (new_col, &old_col) in indices.iter().enumerate() {
            out.column_mut(new_col).assign(&self.features.column(old_col));
        }
        Dataset::new(names, out, self.target.clone(), self.problem_type)
    }
}

/// Parameters for the synthetic generators.
#[derive(Clone, Debug)]
pub struct SynthSpec {
    pub problem_type: ProblemType,
    pub n_rows: usize,
    pub n_features: usize,
    /// Features that actually carry signal; the first `n_informative`
    /// columns. Defaults to all of them.
    pub n_informative: usize,
    /// Std of the additive Gaussian target noise (regression only).
    pub noise_scale: f64,
    /// Number of classes (classification only).
    pub n_classes: usize,
    pub seed: u64,
}

impl SynthSpec {
    pub fn regression(n_rows: usize, n_features: usize, seed: u64) -> Self {
        SynthSpec {
            problem_type: ProblemType::Regression,
            n_rows,
            n_features,
            n_informative: n_features,
            noise_scale: 10.0,
            n_classes: 0,
            seed,
        }
    }

    pub fn classification(n_rows: usize, n_features: usize, seed: u64) -> Self {
        SynthSpec {
            problem_type: ProblemType::Classification,
            n_rows,
            n_features,
            n_informative: n_features,
            noise_scale: 0.0,
            n_classes: 2,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_rows < 2 {
            return Err(Error::InvalidSpec(format!("n_rows must be >= 2, got {}", self.n_rows)));
        }
        if self.n_features < 1 {
            return Err(Error::InvalidSpec("n_features must be >= 1".into()));
        }
        if self.n_informative < 1 || self.n_informative > self.n_features {
            return Err(Error::InvalidSpec(format!(
                "n_informative must be in 1..={}, got {}",
                self.n_features, self.n_informative
            )));
        }
        match self.problem_type {
            ProblemType::Regression => {
                if !self.noise_scale.is_finite() || self.noise_scale < 0.0 {
                    return Err(Error::InvalidSpec(format!(
                        "noise_scale must be a nonnegative real, got {}",
                        self.noise_scale
                    )));
                }
            }
            ProblemType::Classification => {
                if self.n_classes < 2 {
                    return Err(Error::InvalidSpec(format!(
                        "n_classes must be >= 2, got {}",
                        self.n_classes
                    )));
                }
                if self.n_rows < self.n_classes {
                    return Err(Error::InvalidSpec(format!(
                        "n_rows {} < n_classes {}",
                        self.n_rows, self.n_classes
                    )));
                }
                let bits = self.n_informative.min(63) as u32;
                if (self.n_classes as u64) > (1u64 << bits) {
                    return Err(Error::InvalidSpec(format!(
                        "cannot place {} classes on distinct vertices of a {}-dimensional hypercube",
                        self.n_classes, self.n_informative
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Generate a linear regression problem.
///
/// Features are i.i.d. standard normal. The target is
/// `X[:, ..n_informative] . w + noise` with weights drawn uniformly from
/// `[1, 100]` and noise `N(0, noise_scale^2)`. Draw order is fixed (weights,
/// then features row-major, then per-row noise) so a given seed always
/// produces byte-identical output.
pub fn make_regression(spec: &SynthSpec) -> Result<Dataset> {
    make_regression_with_coef(spec).map(|(d, _)| d)
}

/// Like [`make_regression`] but also returns the true coefficient vector
/// (zeros for non-informative features).
pub fn make_regression_with_coef(spec: &SynthSpec) -> Result<(Dataset, Vec<f64>)> {
    if spec.problem_type != ProblemType::Regression {
        return Err(Error::InvalidSpec("make_regression needs a regression spec".into()));
    }
    spec.validate()?;
    let mut rng = seed::rng(spec.seed);

    let weight_dist = Uniform::new_inclusive(1.0f64, 100.0);
    let mut coef = vec![0.0; spec.n_features];
    for w in coef.iter_mut().take(spec.n_informative) {
        *w = weight_dist.sample(&mut rng);
    }

    let mut features = Array2::zeros((spec.n_rows, spec.n_features));
    for mut row in features.rows_mut() {
        for v in row.iter_mut() {
            *v = StandardNormal.sample(&mut rng);
        }
    }

    let noise = Normal::new(0.0, spec.noise_scale)
        .map_err(|e| Error::InvalidSpec(format!("noise_scale: {e}")))?;
    let mut target = Array1::zeros(spec.n_rows);
    for (i, mut_t) in target.iter_mut().enumerate() {
        let mut y = 0.0;
        for j in 0..spec.n_informative {
            y += coef[j] * features[(i, j)];
        }
        *mut_t = y + noise.sample(&mut rng);
    }

    let names = (1..=spec.n_features).map(|i| format!("f{i}")).collect();
    let dataset = Dataset::new(names, features, target, ProblemType::Regression)?;
    Ok((dataset, coef))
}

/// Map class `c` to a hypercube vertex code, spreading classes across the
/// vertex range so that e.g. 2 classes land on antipodal corners.
fn class_vertex_code(class: usize, n_classes: usize, bits: u32) -> u64 {
    let cap_minus_one = (1u128 << bits) - 1;
    ((class as u128) * cap_minus_one / (n_classes as u128 - 1)) as u64
}

/// Generate a classification problem with per-class Gaussian clusters.
///
/// Each class gets a distinct vertex of the `n_informative`-dimensional
/// hypercube `{-1, +1}^k` (side 2) as its cluster center; cluster std is 1.
/// Non-informative features are i.i.d. standard normal. Class sizes are
/// balanced to within one sample and rows are shuffled deterministically.
pub fn make_classification(spec: &SynthSpec) -> Result<Dataset> {
    if spec.problem_type != ProblemType::Classification {
        return Err(Error::InvalidSpec("make_classification needs a classification spec".into()));
    }
    spec.validate()?;
    let mut rng = seed::rng(spec.seed);

    // Balanced labels, block-assigned then shuffled.
    let base = spec.n_rows / spec.n_classes;
    let extra = spec.n_rows % spec.n_classes;
    let mut labels = Vec::with_capacity(spec.n_rows);
    for class in 0..spec.n_classes {
        let count = base + usize::from(class < extra);
        labels.extend(std::iter::repeat(class).take(count));
    }
    labels.shuffle(&mut rng);

    // Vertex coordinates per class. Hypercube codes use at most 63 bits;
    // informative dimensions beyond that stay at -1 for every class.
    let bits = spec.n_informative.min(63) as u32;
    let centers: Vec<Vec<f64>> = (0..spec.n_classes)
        .map(|c| {
            let code = class_vertex_code(c, spec.n_classes, bits);
            (0..spec.n_informative)
                .map(|j| {
                    if j < bits as usize && (code >> j) & 1 == 1 {
                        1.0
                    } else {
                        -1.0
                    }
                })
                .collect()
        })
        .collect();

    let mut features = Array2::zeros((spec.n_rows, spec.n_features));
    for (i, mut row) in features.rows_mut().into_iter().enumerate() {
        let center = &centers[labels[i]];
        for (j, v) in row.iter_mut().enumerate() {
            let z: f64 = StandardNormal.sample(&mut rng);
            *v = if j < spec.n_informative { center[j] + z } else { z };
        }
    }

    let target = Array1::from_iter(labels.iter().map(|&c| c as f64));
    let names = (1..=spec.n_features).map(|i| format!("f{i}")).collect();
    Dataset::new(names, features, target, ProblemType::Classification)
}

/// Load a dataset from CSV. The last column is the target; all other columns
/// are features named by the header.
pub fn load_csv(path: &Path, problem_type: ProblemType) -> Result<Dataset> {
    let file = File::open(path)?;
    let mut lines = BufReader::new(file).lines();

    let header = match lines.next() {
        Some(line) => line?,
        None => return Err(Error::CsvEmpty(path.to_path_buf())),
    };
    let header = header.trim_end_matches('\r');
    if header.trim().is_empty() {
        return Err(Error::CsvEmpty(path.to_path_buf()));
    }
    let columns: Vec<&str> = header.split(',').collect();
    if columns.len() < 2 {
        return Err(Error::CsvParse {
            row: 0,
            col: 1,
            msg: "header needs at least one feature column and a target column".into(),
        });
    }
    let n_features = columns.len() - 1;
    let feature_names: Vec<String> = columns[..n_features].iter().map(|s| s.to_string()).collect();

    let mut values: Vec<f64> = Vec::new();
    let mut target: Vec<f64> = Vec::new();
    let mut row = 0usize;
    for line in lines {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        row += 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns.len() {
            return Err(Error::CsvParse {
                row,
                col: fields.len().min(columns.len()),
                msg: format!("expected {} fields, found {}", columns.len(), fields.len()),
            });
        }
        for (col_idx, field) in fields.iter().enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| Error::CsvParse {
                row,
                col: col_idx + 1,
                msg: format!("cannot parse {field:?} as a number"),
            })?;
            if col_idx < n_features {
                values.push(v);
            } else {
                if problem_type == ProblemType::Classification && (v.fract() != 0.0 || v < 0.0) {
                    return Err(Error::NonIntegerLabel { row, col: col_idx + 1, value: v });
                }
                target.push(v);
            }
        }
    }
    if row == 0 {
        return Err(Error::CsvEmpty(path.to_path_buf()));
    }

    let features = Array2::from_shape_vec((row, n_features), values)
        .expect("row-major shape follows from the parse loop");
    Dataset::new(feature_names, features, Array1::from_vec(target), problem_type)
}

/// Write a dataset as CSV (header, LF endings, target last under the name
/// `target`). Floats use shortest-roundtrip formatting, so reading the file
/// back reproduces the exact values.
pub fn save_csv(dataset: &Dataset, path: &Path) -> Result<()> {
    let file = File::create(path)?;
    let mut w = BufWriter::new(file);
    for name in dataset.feature_names() {
        write!(w, "{name},")?;
    }
    w.write_all(b"target\n")?;
    for i in 0..dataset.n_rows() {
        for j in 0..dataset.n_features() {
            write!(w, "{},", dataset.features()[(i, j)])?;
        }
        writeln!(w, "{}", dataset.target()[i])?;
    }
    w.flush()?;
    Ok(())
}
