//! Synthetic-dataset spec strings:
//! `TYPE,ROWS,FEATURES[,informative=K][,classes=C][,noise=S][,seed=N]`
//! e.g. `regression,500,5` or `classification,10000,100,seed=1`.

use dimcut_core::tabular::{ProblemType, SynthSpec};

use crate::CliError;

pub fn parse_spec(raw: &str, default_seed: u64) -> Result<SynthSpec, CliError> {
    let parts: Vec<&str> = raw.split(',').map(str::trim).collect();
    if parts.len() < 3 {
        return Err(CliError::usage(format!(
            "synth spec {raw:?} needs at least TYPE,ROWS,FEATURES"
        )));
    }
    let problem_type: ProblemType = parts[0]
        .parse()
        .map_err(|e: dimcut_core::Error| CliError::usage(e.to_string()))?;
    let n_rows: usize = parts[1]
        .parse()
        .map_err(|_| CliError::usage(format!("bad row count {:?}", parts[1])))?;
    let n_features: usize = parts[2]
        .parse()
        .map_err(|_| CliError::usage(format!("bad feature count {:?}", parts[2])))?;

    let mut spec = match problem_type {
        ProblemType::Regression => SynthSpec::regression(n_rows, n_features, default_seed),
        ProblemType::Classification => SynthSpec::classification(n_rows, n_features, default_seed),
    };

    for option in &parts[3..] {
        let (key, value) = option.split_once('=').ok_or_else(|| {
            CliError::usage(format!("synth spec option {option:?} is not key=value"))
        })?;
        match key {
            "informative" => {
                spec.n_informative = value
                    .parse()
                    .map_err(|_| CliError::usage(format!("bad informative count {value:?}")))?;
            }
            "classes" => {
                spec.n_classes = value
                    .parse()
                    .map_err(|_| CliError::usage(format!("bad class count {value:?}")))?;
            }
            "noise" => {
                spec.noise_scale = value
                    .parse()
                    .map_err(|_| CliError::usage(format!("bad noise scale {value:?}")))?;
            }
            "seed" => {
                spec.seed = value
                    .parse()
                    .map_err(|_| CliError::usage(format!("bad seed {value:?}")))?;
            }
            other => {
                return Err(CliError::usage(format!(
                    "unknown synth spec option {other:?} (expected informative/classes/noise/seed)"
                )));
            }
        }
    }
    Ok(spec)
}
