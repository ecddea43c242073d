//! Cut-point selection: how many of the most important features or
//! components to keep.
//!
//! Two modes. With a user target, the smallest prefix of the
//! descending-sorted importances whose cumulative sum reaches the target is
//! kept. Without one, the cut is placed automatically: importances are
//! tail-pruned (drop entries past 70% cumulative resolution worth less than
//! 3%), scaled by [`AUTO_CUT_SCALE`], and each candidate cut position `f`
//! scores `lambda_f + (phi_f - phi_{f+1})^2` where `lambda_f` is the scaled
//! cumulative resolution through `f`. The position with the highest score
//! wins; ties go to fewer features. Achieved resolutions are always reported
//! on the unscaled, unrenormalized importances.

use crate::error::{Error, Result};
use crate::forest::ImportanceVector;

/// Fixed scaling applied to normalized importances before scoring cut
/// positions. Part of the algorithm definition: without it the squared gap
/// term would be negligible next to the cumulative term.
pub const AUTO_CUT_SCALE: f64 = 10.0;

/// A feature is prunable once the cumulative importance before it reaches
/// this share...
pub const PRUNE_TAIL_START: f64 = 0.70;
/// ...and its own importance falls below this floor.
pub const PRUNE_MIN_IMPORTANCE: f64 = 0.03;

const EPS: f64 = 1e-9;

/// How the cut was chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CutMode {
    UserTarget(f64),
    Auto,
}

/// Diagnostics for one candidate cut position (1-based), on scaled
/// importances.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutScore {
    pub position: usize,
    pub resolution: f64,
    pub weighted_delta: f64,
    pub total: f64,
}

/// The chosen cut.
#[derive(Clone, Debug, PartialEq)]
pub struct CutDecision {
    pub n_kept: usize,
    /// Cumulative unscaled importance of the kept prefix.
    pub achieved_resolution: f64,
    pub mode: CutMode,
    /// Per-position diagnostics (Auto mode only).
    pub scores: Option<Vec<CutScore>>,
}

/// Smallest prefix of the descending importances whose cumulative sum
/// reaches `target`.
pub fn select_by_target(importance: &ImportanceVector, target: f64) -> Result<CutDecision> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "target resolution must be in (0, 1), got {target}"
        )));
    }
    let sorted = importance.sorted_scores();
    let mut cumulative = 0.0;
    for (i, score) in sorted.iter().enumerate() {
        cumulative += score;
        if cumulative + EPS >= target {
            return Ok(CutDecision {
                n_kept: i + 1,
                achieved_resolution: cumulative,
                mode: CutMode::UserTarget(target),
                scores: None,
            });
        }
    }
    // Importances sum to 1 > target, so the loop always returns; keeping
    // everything is still the right answer if rounding got us here.
    Ok(CutDecision {
        n_kept: sorted.len(),
        achieved_resolution: cumulative,
        mode: CutMode::UserTarget(target),
        scores: None,
    })
}

/// Drop every feature that sits past [`PRUNE_TAIL_START`] cumulative
/// resolution and is worth less than [`PRUNE_MIN_IMPORTANCE`]. Surviving
/// scores are not renormalized. At least one feature always survives
/// (position 1 has zero cumulative-before). Because scores are descending,
/// the dropped set is always a contiguous tail.
pub fn prune_tail(importance: &ImportanceVector) -> ImportanceVector {
    let sorted = importance.sorted_scores();
    let mut cumulative_before = 0.0;
    let mut keep = sorted.len();
    for (i, score) in sorted.iter().enumerate() {
        if cumulative_before >= PRUNE_TAIL_START - 1e-12 && *score < PRUNE_MIN_IMPORTANCE {
            keep = i;
            break;
        }
        cumulative_before += score;
    }
    importance.keep_prefix(keep.max(1))
}

/// Automatic cut with the default ×10 scaling.
pub fn auto_cut(importance: &ImportanceVector) -> CutDecision {
    auto_cut_scaled(importance, AUTO_CUT_SCALE)
}

/// Automatic cut with an explicit scaling constant.
pub fn auto_cut_scaled(importance: &ImportanceVector, scale: f64) -> CutDecision {
    let sorted = importance.sorted_scores();
    let n = sorted.len();
    if n == 1 {
        return CutDecision {
            n_kept: 1,
            achieved_resolution: sorted[0],
            mode: CutMode::Auto,
            scores: Some(Vec::new()),
        };
    }

    let scaled: Vec<f64> = sorted.iter().map(|v| v * scale).collect();
    let mut scores = Vec::with_capacity(n - 1);
    let mut best_position = 1usize;
    let mut best_total = f64::NEG_INFINITY;
    let mut lambda = 0.0;
    for f in 1..n {
        lambda += scaled[f - 1];
        let delta = scaled[f - 1] - scaled[f];
        let weighted_delta = delta * delta;
        let total = lambda + weighted_delta;
        scores.push(CutScore { position: f, resolution: lambda, weighted_delta, total });
        // Strict comparison keeps ties at the smaller position (fewer
        // features at equal score).
        if total > best_total {
            best_total = total;
            best_position = f;
        }
    }

    let achieved_resolution = sorted[..best_position].iter().sum();
    CutDecision {
        n_kept: best_position,
        achieved_resolution,
        mode: CutMode::Auto,
        scores: Some(scores),
    }
}

/// Render the diagnostic score series as CSV (`cut_position,resolution,
/// weighted_delta,total`).
pub fn cut_scores_csv(scores: &[CutScore]) -> String {
    let mut out = String::from("cut_position,resolution,weighted_delta,total\n");
    for s in scores {
        out.push_str(&format!("{},{},{},{}\n", s.position, s.resolution, s.weighted_delta, s.total));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::ImportanceSource;
    use crate::seed;
    use rand::Rng;

    fn imp(scores: &[f64]) -> ImportanceVector {
        ImportanceVector::new(scores.to_vec(), ImportanceSource::Forest).unwrap()
    }

    #[test]
    fn worked_example_eighty_percent() {
        let cut = select_by_target(&imp(&[0.35, 0.30, 0.15, 0.10, 0.10]), 0.80).unwrap();
        assert_eq!(cut.n_kept, 3);
        assert!((cut.achieved_resolution - 0.80).abs() <= 1e-9);
        assert_eq!(cut.mode, CutMode::UserTarget(0.80));
    }

    #[test]
    fn single_feature_always_selected() {
        let cut = select_by_target(&imp(&[1.0]), 0.5).unwrap();
        assert_eq!(cut.n_kept, 1);
        assert_eq!(cut.achieved_resolution, 1.0);
    }

    #[test]
    fn target_past_every_prefix_keeps_all() {
        let cut = select_by_target(&imp(&[0.25, 0.25, 0.25, 0.25]), 0.90).unwrap();
        assert_eq!(cut.n_kept, 4);
        assert!((cut.achieved_resolution - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn select_by_target_rejects_bad_targets() {
        let v = imp(&[0.5, 0.5]);
        assert!(select_by_target(&v, 0.0).is_err());
        assert!(select_by_target(&v, 1.0).is_err());
        assert!(select_by_target(&v, -0.1).is_err());
    }

    #[test]
    fn select_by_target_is_minimal() {
        let mut rng = seed::rng(77);
        for _ in 0..200 {
            let n = rng.gen_range(1..20);
            let mut scores: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..1.0)).collect();
            let total: f64 = scores.iter().sum();
            scores.iter_mut().for_each(|v| *v /= total);
            let v = imp(&scores);
            let target = rng.gen_range(0.05..0.95);
            let cut = select_by_target(&v, target).unwrap();
            assert!(cut.achieved_resolution + 1e-9 >= target);
            if cut.n_kept > 1 {
                let shorter: f64 = v.sorted_scores()[..cut.n_kept - 1].iter().sum();
                assert!(shorter < target + 1e-9);
            }
        }
    }

    #[test]
    fn prune_drops_small_tail_entries() {
        let pruned = prune_tail(&imp(&[0.50, 0.25, 0.22, 0.02, 0.01]));
        assert_eq!(pruned.n_active(), 3);
        assert_eq!(pruned.sorted_scores(), vec![0.50, 0.25, 0.22]);
        // Scores stay full-length and unrenormalized.
        assert_eq!(pruned.n_features(), 5);
        assert!((pruned.scores().iter().sum::<f64>() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn prune_is_vacuous_without_small_entries() {
        let v = imp(&[0.40, 0.35, 0.25]);
        let pruned = prune_tail(&v);
        assert_eq!(pruned.n_active(), 3);
        assert_eq!(pruned.sorted_scores(), v.sorted_scores());
    }

    #[test]
    fn prune_sorts_first() {
        // Input order [0.70, 0.02, 0.28] sorts to [0.70, 0.28, 0.02]; the
        // 0.02 sits past 98% cumulative and is dropped.
        let pruned = prune_tail(&imp(&[0.70, 0.02, 0.28]));
        assert_eq!(pruned.sorted_scores(), vec![0.70, 0.28]);
        assert_eq!(pruned.order(), &[0, 2]);
    }

    #[test]
    fn prune_boundary_is_inclusive_at_seventy_percent() {
        // Cumulative-before hits exactly 0.70 at position 2; every 0.02
        // entry is dropped.
        let mut scores = vec![0.70];
        scores.extend(std::iter::repeat(0.02).take(15));
        let pruned = prune_tail(&imp(&scores));
        assert_eq!(pruned.n_active(), 1);
    }

    #[test]
    fn prune_never_empties() {
        // A lone feature below the floor still survives (cumulative-before
        // is 0 at position 1).
        let pruned = prune_tail(&imp(&[0.98, 0.02]));
        assert_eq!(pruned.n_active(), 1);

        let one = prune_tail(&imp(&[1.0]));
        assert_eq!(one.n_active(), 1);
    }

    #[test]
    fn prune_predicate_partitions_correctly() {
        let mut rng = seed::rng(31);
        for _ in 0..200 {
            let n = rng.gen_range(1..30);
            let mut scores: Vec<f64> = (0..n).map(|_| rng.gen_range(0.001f64..1.0)).collect();
            let total: f64 = scores.iter().sum();
            scores.iter_mut().for_each(|v| *v /= total);
            let v = imp(&scores);
            let pruned = prune_tail(&v);
            assert!(pruned.n_active() >= 1);

            let sorted = v.sorted_scores();
            let mut cum_before = 0.0;
            for (i, s) in sorted.iter().enumerate() {
                let prunable = cum_before >= PRUNE_TAIL_START - 1e-12 && *s < PRUNE_MIN_IMPORTANCE;
                if i < pruned.n_active() {
                    assert!(!prunable || i == 0, "kept a prunable entry at {i}");
                } else {
                    assert!(prunable, "dropped a non-prunable entry at {i}");
                }
                cum_before += s;
            }
        }
    }

    #[test]
    fn auto_cut_two_equal_features() {
        let cut = auto_cut(&imp(&[0.5, 0.5]));
        assert_eq!(cut.n_kept, 1);
        assert!((cut.achieved_resolution - 0.5).abs() <= 1e-12);
        let scores = cut.scores.unwrap();
        assert_eq!(scores.len(), 1);
        assert!((scores[0].resolution - 5.0).abs() <= 1e-12);
        assert_eq!(scores[0].weighted_delta, 0.0);
        assert!((scores[0].total - 5.0).abs() <= 1e-12);
    }

    #[test]
    fn auto_cut_worked_example_three_features() {
        // Scaled [6,3,1]: f=1 scores 6+9=15, f=2 scores 9+4=13.
        let cut = auto_cut(&imp(&[0.6, 0.3, 0.1]));
        assert_eq!(cut.n_kept, 1);
        assert!((cut.achieved_resolution - 0.6).abs() <= 1e-12);
        let s = cut.scores.unwrap();
        assert!((s[0].total - 15.0).abs() <= 1e-9);
        assert!((s[1].total - 13.0).abs() <= 1e-9);
    }

    #[test]
    fn auto_cut_worked_example_five_features() {
        // Scaled [3.5,3,1.5,1,1]: totals 3.75, 8.75, 8.25, 9.0 -> keep 4.
        let cut = auto_cut(&imp(&[0.35, 0.30, 0.15, 0.10, 0.10]));
        assert_eq!(cut.n_kept, 4);
        let s = cut.scores.unwrap();
        let totals: Vec<f64> = s.iter().map(|x| x.total).collect();
        for (got, want) in totals.iter().zip([3.75, 8.75, 8.25, 9.0]) {
            assert!((got - want).abs() <= 1e-9, "totals {totals:?}");
        }
        assert!((cut.achieved_resolution - 0.90).abs() <= 1e-9);
    }

    #[test]
    fn auto_cut_single_active_feature() {
        let v = imp(&[0.98, 0.02]);
        let pruned = prune_tail(&v);
        let cut = auto_cut(&pruned);
        assert_eq!(cut.n_kept, 1);
        assert!((cut.achieved_resolution - 0.98).abs() <= 1e-12);
        assert_eq!(cut.scores.as_deref(), Some(&[][..]));
    }

    #[test]
    fn auto_cut_matches_brute_force() {
        // Independent scorer over all cut positions, including the tie rule.
        let brute = |sorted: &[f64], scale: f64| -> usize {
            let phi: Vec<f64> = sorted.iter().map(|v| v * scale).collect();
            let mut best = (1usize, f64::NEG_INFINITY);
            for f in 1..phi.len() {
                let lambda: f64 = phi[..f].iter().sum();
                let delta = phi[f - 1] - phi[f];
                let total = lambda + delta * delta;
                if total > best.1 {
                    best = (f, total);
                }
            }
            best.0
        };

        let mut rng = seed::rng(2024);
        for _ in 0..1000 {
            let n = rng.gen_range(2..=50);
            let concentration = rng.gen_range(1.0f64..4.0);
            let mut scores: Vec<f64> =
                (0..n).map(|_| rng.gen_range(0.0001f64..1.0).powf(concentration)).collect();
            let total: f64 = scores.iter().sum();
            scores.iter_mut().for_each(|v| *v /= total);
            let v = imp(&scores);
            let cut = auto_cut(&v);
            assert_eq!(cut.n_kept, brute(&v.sorted_scores(), AUTO_CUT_SCALE));
        }
    }

    #[test]
    fn auto_cut_is_input_order_invariant() {
        let a = auto_cut(&imp(&[0.1, 0.6, 0.3]));
        let b = auto_cut(&imp(&[0.6, 0.3, 0.1]));
        assert_eq!(a.n_kept, b.n_kept);
        assert_eq!(a.achieved_resolution, b.achieved_resolution);
    }

    #[test]
    fn cut_scores_render_as_csv() {
        let cut = auto_cut(&imp(&[0.6, 0.3, 0.1]));
        let csv = cut_scores_csv(&cut.scores.unwrap());
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "cut_position,resolution,weighted_delta,total");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("1,"));
    }
}
