use std::path::PathBuf;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty csv file: {0}")]
    CsvEmpty(PathBuf),

    #[error("csv parse error at row {row}, column {col}: {msg}")]
    CsvParse { row: usize, col: usize, msg: String },

    #[error("non-integer class label at row {row}, column {col}: {value}")]
    NonIntegerLabel { row: usize, col: usize, value: f64 },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("training diverged (non-finite loss) in fold {fold} at epoch {epoch}")]
    Divergence { fold: usize, epoch: usize },

    #[error("training split of fold {fold} is missing class {class}")]
    MissingClass { fold: usize, class: usize },

    #[error("report parse error: {0}")]
    ReportParse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
