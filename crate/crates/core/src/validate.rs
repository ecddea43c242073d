//! Randomized validation of the decision rule: generate plausible
//! (accuracy, weight) cases, classify each with [`decide`], and re-check
//! every label against the threshold comparison.

use rand::Rng;

use crate::decision::{decide, Method};
use crate::error::{Error, Result};
use crate::seed;

/// One simulated decision case.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValidationCase {
    pub acc_fs: f64,
    pub acc_fe: f64,
    pub w_interp: f64,
    pub w_integ: f64,
    pub interpret_s: f64,
    pub integ_s: f64,
    pub label: Method,
}

/// A full validation run.
#[derive(Clone, Debug)]
pub struct ValidationRun {
    pub cases: Vec<ValidationCase>,
    /// True iff every label matches an independent re-evaluation of the
    /// threshold comparison. Definitional — guards against decision-rule
    /// regressions.
    pub verdict: bool,
}

impl ValidationRun {
    pub fn n_selection(&self) -> usize {
        self.cases.iter().filter(|c| c.label == Method::Selection).count()
    }

    pub fn n_extraction(&self) -> usize {
        self.cases.len() - self.n_selection()
    }
}

/// Evaluate one case through the decision rule.
pub fn build_case(acc_fs: f64, acc_fe: f64, w_interp: f64) -> Result<ValidationCase> {
    let w_integ = 1.0 - w_interp;
    let (interpret_s, integ_s, label) = decide(acc_fs, acc_fe, w_interp, w_integ)?;
    Ok(ValidationCase { acc_fs, acc_fe, w_interp, w_integ, interpret_s, integ_s, label })
}

/// Generate `n_cases` random cases: selection accuracy uniform on
/// [0.6, 0.99], extraction accuracy correlated within ±0.2 of it (clamped to
/// the same range), interpretability weight uniform on [0, 1].
pub fn run_validation(n_cases: usize, seed_value: u64) -> Result<ValidationRun> {
    if n_cases < 1 {
        return Err(Error::InvalidArgument("n_cases must be >= 1".into()));
    }
    let mut rng = seed::rng(seed_value);
    let mut cases = Vec::with_capacity(n_cases);
    let mut verdict = true;
    for _ in 0..n_cases {
        let acc_fs: f64 = rng.gen_range(0.6..=0.99);
        let delta: f64 = rng.gen_range(-0.2..=0.2);
        let acc_fe = (acc_fs + delta).clamp(0.6, 0.99);
        let w_interp: f64 = rng.gen_range(0.0..=1.0);
        let case = build_case(acc_fs, acc_fe, w_interp)?;

        let expected =
            if case.interpret_s >= case.integ_s { Method::Selection } else { Method::Extraction };
        verdict &= case.label == expected;
        cases.push(case);
    }
    Ok(ValidationRun { cases, verdict })
}

/// Scatter data for plotting: one `interpret_s,integ_s,label` row per case.
pub fn scatter_csv(cases: &[ValidationCase]) -> String {
    let mut out = String::from("interpret_s,integ_s,label\n");
    for c in cases {
        out.push_str(&format!("{},{},{}\n", c.interpret_s, c.integ_s, c.label));
    }
    out
}

/// One-line summary: `n_cases, n_selection, n_extraction, verdict`.
pub fn summary_line(run: &ValidationRun) -> String {
    format!(
        "{}, {}, {}, {}",
        run.cases.len(),
        run.n_selection(),
        run.n_extraction(),
        run.verdict
    )
}
