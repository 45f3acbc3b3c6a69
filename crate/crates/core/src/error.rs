// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("toml: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("row {row}, column {column} ({name}): cannot parse {value:?} as a number")]
    NonNumeric {
        row: usize,
        column: usize,
        name: String,
        value: String,
    },
    #[error("row {row}: expected {expected} fields, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("label column {0:?} not found")]
    MissingLabelColumn(String),
    #[error("dataset has {0} class(es); at least 2 are required")]
    TooFewClasses(usize),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("class {class} has {count} sample(s); at least 2 are required for a stratified split")]
    ClassTooSmall { class: usize, count: usize },
    #[error("value {value} at row {row}, column {column} is outside [0, 1]")]
    OutOfUnitRange {
        row: usize,
        column: usize,
        value: f64,
    },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("gene {index} ({kind}) = {value} is outside [{lo}, {hi}]")]
    GeneOutOfBounds {
        index: usize,
        kind: &'static str,
        value: i64,
        lo: i64,
        hi: i64,
    },
    #[error("chromosome length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("invalid topology: {0}")]
    Topology(String),
    #[error("invalid model: {0}")]
    Model(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("combinational loop: {0} node(s) could not be ordered")]
    CombinationalLoop(usize),
    #[error("malformed netlist: {0}")]
    Netlist(String),
    #[error("unsupported {what} document version {found} (expected {expected})")]
    Version {
        what: &'static str,
        found: u32,
        expected: u32,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
