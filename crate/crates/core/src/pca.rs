//! PCA: explained-variance-ratio importance and projection onto principal
//! components.
//!
//! Features are centered (optionally standardized) and the sample covariance
//! matrix (divisor n-1) is eigendecomposed with a cyclic Jacobi sweep —
//! deterministic, pure Rust, and comfortably fast for the few hundred
//! features this pipeline targets. The target column is never part of the
//! fit.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::forest::{ImportanceSource, ImportanceVector};
use crate::tabular::Dataset;

/// A fitted PCA basis.
///
/// `components` columns are orthonormal eigenvectors of the covariance
/// matrix, ordered by descending eigenvalue and sign-fixed so the
/// largest-magnitude loading of each component is positive.
#[derive(Clone, Debug, PartialEq)]
pub struct PcaModel {
    mean: Array1<f64>,
    scale: Option<Array1<f64>>,
    components: Array2<f64>,
    explained_variance: Vec<f64>,
    explained_variance_ratio: Vec<f64>,
}

impl PcaModel {
    pub fn mean(&self) -> &Array1<f64> {
        &self.mean
    }

    /// Orthonormal basis, one component per column.
    pub fn components(&self) -> &Array2<f64> {
        &self.components
    }

    /// Eigenvalues of the covariance matrix, descending.
    pub fn explained_variance(&self) -> &[f64] {
        &self.explained_variance
    }

    /// Eigenvalues divided by the covariance trace; sums to 1.
    pub fn explained_variance_ratio(&self) -> &[f64] {
        &self.explained_variance_ratio
    }

    pub fn n_features(&self) -> usize {
        self.components.nrows()
    }

    fn centered(&self, dataset: &Dataset) -> Array2<f64> {
        let mut x = dataset.features().clone();
        for mut row in x.rows_mut() {
            row -= &self.mean;
        }
        if let Some(scale) = &self.scale {
            for mut row in x.rows_mut() {
                row /= scale;
            }
        }
        x
    }
}

/// Fit a full-rank PCA (as many components as features), centering only.
pub fn fit_pca(dataset: &Dataset) -> Result<PcaModel> {
    fit_pca_with(dataset, false)
}

/// Fit a PCA, optionally scaling each centered feature to unit variance.
pub fn fit_pca_with(dataset: &Dataset, standardize: bool) -> Result<PcaModel> {
    let n = dataset.n_rows();
    let f = dataset.n_features();
    if n < 2 {
        return Err(Error::InvalidDataset("pca needs at least 2 rows".into()));
    }

    let x = dataset.features();
    let mean = x.sum_axis(ndarray::Axis(0)) / n as f64;
    let mut centered = x.clone();
    for mut row in centered.rows_mut() {
        row -= &mean;
    }

    let scale = if standardize {
        let mut sd = Array1::zeros(f);
        for j in 0..f {
            let var = centered.column(j).mapv(|v| v * v).sum() / (n as f64 - 1.0);
            if var <= 1e-24 {
                return Err(Error::InvalidDataset(format!(
                    "feature {j} has zero variance; cannot standardize"
                )));
            }
            sd[j] = var.sqrt();
        }
        for mut row in centered.rows_mut() {
            row /= &sd;
        }
        Some(sd)
    } else {
        None
    };

    let cov = centered.t().dot(&centered) / (n as f64 - 1.0);
    let (mut eigenvalues, mut vectors) = jacobi_eigen(&cov);

    // Descending eigenvalue order, tiny negatives clamped to zero.
    let mut idx: Vec<usize> = (0..f).collect();
    idx.sort_by(|&a, &b| eigenvalues[b].partial_cmp(&eigenvalues[a]).unwrap().then(a.cmp(&b)));
    eigenvalues = idx.iter().map(|&i| eigenvalues[i].max(0.0)).collect();
    let mut components = Array2::zeros((f, f));
    for (new_col, &old_col) in idx.iter().enumerate() {
        components.column_mut(new_col).assign(&vectors.column(old_col));
    }
    vectors = components;

    // Sign convention: largest-magnitude loading positive.
    for mut col in vectors.columns_mut() {
        let mut pivot = 0usize;
        for (i, v) in col.iter().enumerate() {
            if v.abs() > col[pivot].abs() {
                pivot = i;
            }
        }
        if col[pivot] < 0.0 {
            col.mapv_inplace(|v| -v);
        }
    }

    let total: f64 = eigenvalues.iter().sum();
    if total <= 0.0 {
        return Err(Error::InvalidDataset(
            "features have zero total variance; explained-variance ratios are undefined".into(),
        ));
    }
    let ratio: Vec<f64> = eigenvalues.iter().map(|&v| v / total).collect();

    Ok(PcaModel {
        mean,
        scale,
        components: vectors,
        explained_variance: eigenvalues,
        explained_variance_ratio: ratio,
    })
}

/// The extraction pipeline's importance: explained-variance ratios, already
/// in descending order (identity permutation).
pub fn pca_importance(model: &PcaModel) -> ImportanceVector {
    // Ratios sum to 1 by construction; renormalize to absorb rounding.
    let total: f64 = model.explained_variance_ratio.iter().sum();
    let scores: Vec<f64> = model.explained_variance_ratio.iter().map(|v| v / total).collect();
    ImportanceVector::new(scores, ImportanceSource::Pca)
        .expect("ratios form a valid importance vector")
}

/// Project a dataset onto the first `n_components` principal components.
/// Feature names become PC1..PCn; the target is carried over unchanged.
pub fn project(model: &PcaModel, dataset: &Dataset, n_components: usize) -> Result<Dataset> {
    let f = model.n_features();
    if dataset.n_features() != f {
        return Err(Error::InvalidArgument(format!(
            "dataset has {} features but the model was fit on {f}",
            dataset.n_features()
        )));
    }
    if n_components < 1 || n_components > f {
        return Err(Error::InvalidArgument(format!(
            "n_components must be in 1..={f}, got {n_components}"
        )));
    }
    let centered = model.centered(dataset);
    let basis = model.components.slice(ndarray::s![.., ..n_components]);
    let scores = centered.dot(&basis);
    let names = (1..=n_components).map(|i| format!("PC{i}")).collect();
    Dataset::new(names, scores, dataset.target().clone(), dataset.problem_type())
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns
/// (eigenvalues, eigenvectors as columns), unsorted.
fn jacobi_eigen(matrix: &Array2<f64>) -> (Vec<f64>, Array2<f64>) {
    let n = matrix.nrows();
    let mut a = matrix.clone();
    let mut v = Array2::eye(n);

    if n == 1 {
        return (vec![a[(0, 0)]], v);
    }

    let scale: f64 = matrix.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
    let tol = 1e-14 * scale;

    for _sweep in 0..100 {
        let off: f64 = {
            let mut s = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    s += a[(p, q)] * a[(p, q)];
                }
            }
            s.sqrt()
        };
        if off <= tol {
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() <= tol * 1e-3 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let eigenvalues = (0..n).map(|i| a[(i, i)]).collect();
    (eigenvalues, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tabular::{make_classification, ProblemType, SynthSpec};
    use crate::seed;
    use ndarray::{arr1, arr2, Array2};
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn rank1_dataset() -> Dataset {
        // x2 = 2 * x1 exactly.
        let x1 = [0.5, -1.0, 2.0, 3.5, -2.5, 1.0];
        let mut x = Array2::zeros((6, 2));
        for (i, v) in x1.iter().enumerate() {
            x[(i, 0)] = *v;
            x[(i, 1)] = 2.0 * v;
        }
        Dataset::new(
            vec!["a".into(), "b".into()],
            x,
            arr1(&[0.0; 6]),
            ProblemType::Regression,
        )
        .unwrap()
    }

    #[test]
    fn rank1_data_gives_ratio_one_zero() {
        let model = fit_pca(&rank1_dataset()).unwrap();
        let r = model.explained_variance_ratio();
        assert!((r[0] - 1.0).abs() <= 1e-9, "{r:?}");
        assert!(r[1].abs() <= 1e-9);

        let imp = pca_importance(&model);
        assert!((imp.scores()[0] - 1.0).abs() <= 1e-9);
        assert_eq!(imp.order(), &[0, 1]);
    }

    #[test]
    fn isotropic_data_splits_variance_evenly() {
        for seed_v in 1..=5u64 {
            let mut rng = seed::rng(seed_v);
            let mut x = Array2::zeros((10_000, 2));
            for v in x.iter_mut() {
                *v = StandardNormal.sample(&mut rng);
            }
            let d = Dataset::new(
                vec!["a".into(), "b".into()],
                x,
                Array2::zeros((10_000, 1)).column(0).to_owned(),
                ProblemType::Regression,
            )
            .unwrap();
            let m = fit_pca(&d).unwrap();
            for r in m.explained_variance_ratio() {
                assert!(*r > 0.45 && *r < 0.55, "seed {seed_v}: ratios {:?}", m.explained_variance_ratio());
            }
        }
    }

    #[test]
    fn components_are_orthonormal_and_reconstruct() {
        let mut rng = seed::rng(3);
        let mut x = Array2::zeros((60, 5));
        for v in x.iter_mut() {
            *v = rng.gen_range(-2.0..2.0);
        }
        let names = (0..5).map(|i| format!("f{i}")).collect();
        let d = Dataset::new(names, x, arr1(&vec![0.0; 60]), ProblemType::Regression).unwrap();
        let m = fit_pca(&d).unwrap();

        let c = m.components();
        for i in 0..5 {
            for j in 0..5 {
                let dot = c.column(i).dot(&c.column(j));
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() <= 1e-8, "c{i}.c{j} = {dot}");
            }
        }
        // ratios sum to 1, nonincreasing
        let sum: f64 = m.explained_variance_ratio().iter().sum();
        assert!((sum - 1.0).abs() <= 1e-9);
        assert!(m.explained_variance().windows(2).all(|w| w[0] >= w[1]));

        // Full-rank projection times basis transpose reconstructs the
        // centered data.
        let centered = m.centered(&d);
        let scores = centered.dot(c);
        let back = scores.dot(&c.t());
        for (a, b) in back.iter().zip(centered.iter()) {
            assert!((a - b).abs() <= 1e-8);
        }
    }

    #[test]
    fn projection_variances_match_eigenvalues() {
        let d = make_classification(&SynthSpec::classification(300, 6, 5)).unwrap();
        let m = fit_pca(&d).unwrap();
        let full = project(&m, &d, d.n_features()).unwrap();
        assert_eq!(full.n_rows(), d.n_rows());
        assert_eq!(full.target(), d.target());
        assert_eq!(full.feature_names()[0], "PC1");

        let n = full.n_rows() as f64;
        for j in 0..full.n_features() {
            let col = full.features().column(j);
            let mean = col.sum() / n;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
            assert!(
                (var - m.explained_variance()[j]).abs() <= 1e-8,
                "PC{} variance {var} vs eigenvalue {}",
                j + 1,
                m.explained_variance()[j]
            );
        }
        // PC1 variance >= PC2 variance is the eigenvalue ordering itself.
        assert!(m.explained_variance()[0] >= m.explained_variance()[1]);
    }

    #[test]
    fn rank1_single_component_captures_everything() {
        let d = rank1_dataset();
        let m = fit_pca(&d).unwrap();
        let p = project(&m, &d, 1).unwrap();
        let n = p.n_rows() as f64;
        let col = p.features().column(0);
        let mean = col.sum() / n;
        let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let total: f64 = m.explained_variance().iter().sum();
        assert!((var - total).abs() <= 1e-9);
    }

    #[test]
    fn out_of_range_components_rejected() {
        let d = rank1_dataset();
        let m = fit_pca(&d).unwrap();
        assert!(project(&m, &d, 0).is_err());
        assert!(project(&m, &d, 3).is_err());
    }

    #[test]
    fn rotated_dominant_axis_is_recovered() {
        // One dominant axis (std 5) plus isotropic noise, rotated by a known
        // angle in the first two coordinates: PC1 must align with the
        // rotated axis up to sign.
        let mut rng = seed::rng(17);
        let n = 10_000;
        let angle: f64 = 0.6;
        let (cos, sin) = (angle.cos(), angle.sin());
        let mut x = Array2::zeros((n, 3));
        for i in 0..n {
            let dominant: f64 = { let z: f64 = StandardNormal.sample(&mut rng); 5.0 * z };
            let e1: f64 = StandardNormal.sample(&mut rng);
            let e2: f64 = StandardNormal.sample(&mut rng);
            x[(i, 0)] = cos * dominant - sin * e1;
            x[(i, 1)] = sin * dominant + cos * e1;
            x[(i, 2)] = e2;
        }
        let d = Dataset::new(
            vec!["a".into(), "b".into(), "c".into()],
            x,
            arr1(&vec![0.0; n]),
            ProblemType::Regression,
        )
        .unwrap();
        let m = fit_pca(&d).unwrap();
        let pc1 = m.components().column(0);
        let cosine = (pc1[0] * cos + pc1[1] * sin).abs();
        assert!(cosine >= 0.99, "cosine similarity {cosine}");
    }

    #[test]
    fn standardize_flag_equalizes_scales() {
        let mut rng = seed::rng(4);
        let mut x = Array2::zeros((500, 2));
        for i in 0..500 {
            let a: f64 = StandardNormal.sample(&mut rng);
            let b: f64 = StandardNormal.sample(&mut rng);
            x[(i, 0)] = 100.0 * a;
            x[(i, 1)] = b;
        }
        let d = Dataset::new(
            vec!["a".into(), "b".into()],
            x,
            arr1(&vec![0.0; 500]),
            ProblemType::Regression,
        )
        .unwrap();
        let plain = fit_pca(&d).unwrap();
        assert!(plain.explained_variance_ratio()[0] > 0.99);
        let standardized = fit_pca_with(&d, true).unwrap();
        assert!(standardized.explained_variance_ratio()[0] < 0.6);
    }

    #[test]
    fn jacobi_solves_known_matrix() {
        // Eigenvalues of [[2,1],[1,2]] are 3 and 1.
        let m = arr2(&[[2.0, 1.0], [1.0, 2.0]]);
        let (vals, vecs) = jacobi_eigen(&m);
        let mut sorted = vals.clone();
        sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert!((sorted[0] - 3.0).abs() <= 1e-12);
        assert!((sorted[1] - 1.0).abs() <= 1e-12);
        // Residual check: M v = lambda v.
        for (k, &lambda) in vals.iter().enumerate() {
            let v = vecs.column(k);
            let mv = m.dot(&v);
            for i in 0..2 {
                assert!((mv[i] - lambda * v[i]).abs() <= 1e-12);
            }
        }
    }
}
