//! Dual-pipeline dimensionality reduction for supervised tabular data.
//!
//! Given a dataset and user preferences, the library runs two reduction
//! pipelines side by side — feature *selection* driven by random-forest
//! importance and feature *extraction* driven by PCA — evaluates both with an
//! MLP under k-fold cross-validation, and returns a justified decision: which
//! method to use, how many features/components to keep, and the reduced
//! dataset itself.
//!
//! The number of kept features is either the minimal prefix reaching a
//! user-supplied target resolution (the cumulative share of normalized
//! importance), or an automatic cut-point scored per candidate position as
//! `resolution + (importance gap)^2` on ×10-scaled importances, after a
//! 30%/3% tail prune. See [`resolution`] for details.
//!
//! # Determinism
//!
//! Every randomized stage is driven by xoshiro256++ seeded through SplitMix64
//! (`seed_from_u64`), with per-tree and per-fold sub-seeds derived from the
//! master seed. Identical inputs and seeds produce bit-identical outputs, and
//! parallel execution (rayon) yields the same results as sequential runs.

pub mod decision;
pub mod forest;
pub mod mlp;
pub mod pca;
pub mod resolution;
pub mod tabular;
pub mod validate;

mod error;
mod seed;

pub use error::{Error, Result};
