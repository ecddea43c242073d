//! Output-file helpers. Every file is written to a temp name in the target
//! directory and renamed into place, so interrupted runs never leave a
//! partial CSV behind.

use std::fs;
use std::path::Path;

use dimcut_core::forest::ImportanceVector;
use dimcut_core::tabular::{save_csv, Dataset};

use crate::CliResult;

pub fn write_atomic(path: &Path, content: &str) -> CliResult<()> {
    let tmp = tmp_path(path);
    fs::write(&tmp, content)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_dataset_atomic(dataset: &Dataset, path: &Path) -> CliResult<()> {
    let tmp = tmp_path(path);
    save_csv(dataset, &tmp)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn tmp_path(path: &Path) -> std::path::PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".tmp");
    path.with_file_name(name)
}

/// Importance series for plotting: one `rank,name,importance` row per
/// active feature, most important first.
pub fn importance_csv(importance: &ImportanceVector, name_of: impl Fn(usize) -> String) -> String {
    let mut out = String::from("rank,name,importance\n");
    for (rank, &feature) in importance.order().iter().enumerate() {
        out.push_str(&format!(
            "{},{},{}\n",
            rank + 1,
            name_of(feature),
            importance.scores()[feature]
        ));
    }
    out
}
