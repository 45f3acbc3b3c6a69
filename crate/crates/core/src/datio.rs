// SPDX-License-Identifier: Apache-2.0

//! Dataset loading and preprocessing: CSV in, normalized and quantized
//! integer features with a stratified train/test split out.

use std::collections::HashMap;
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::{rng, Error, Result};

pub const DATASET_VERSION: u32 = 1;

/// Which column of the CSV holds the class label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LabelColumn {
    Name(String),
    Index(usize),
}

impl Default for LabelColumn {
    fn default() -> Self {
        LabelColumn::Name("class".to_string())
    }
}

impl std::str::FromStr for LabelColumn {
    type Err = std::convert::Infallible;

    /// Bare integers select by position, anything else by header name.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) => LabelColumn::Name(s.to_string()),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RawDataset {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub feature_names: Vec<String>,
    /// Original label text, indexed by class id (first-occurrence order).
    pub class_names: Vec<String>,
}

impl RawDataset {
    pub fn num_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

pub fn load_csv(path: impl AsRef<Path>, label: &LabelColumn) -> Result<RawDataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, label)
}

/// Parses CSV text with a header row. Class ids are assigned in order of
/// first appearance.
pub fn read_csv(reader: impl std::io::Read, label: &LabelColumn) -> Result<RawDataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let label_idx = match label {
        LabelColumn::Name(name) => headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingLabelColumn(name.clone()))?,
        LabelColumn::Index(i) if *i < headers.len() => *i,
        LabelColumn::Index(i) => return Err(Error::MissingLabelColumn(i.to_string())),
    };
    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|&(c, _)| c != label_idx)
        .map(|(_, h)| h.clone())
        .collect();

    let mut class_ids: HashMap<String, usize> = HashMap::new();
    let mut class_names = Vec::new();
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (r, record) in rdr.records().enumerate() {
        let record = record?;
        // 1-based data row, header excluded
        let row = r + 1;
        if record.len() != headers.len() {
            return Err(Error::RaggedRow {
                row,
                expected: headers.len(),
                found: record.len(),
            });
        }
        let mut values = Vec::with_capacity(feature_names.len());
        for (c, cell) in record.iter().enumerate() {
            if c == label_idx {
                continue;
            }
            let v: f64 = cell.parse().map_err(|_| Error::NonNumeric {
                row,
                column: c,
                name: headers[c].clone(),
                value: cell.to_string(),
            })?;
            if !v.is_finite() {
                return Err(Error::NonNumeric {
                    row,
                    column: c,
                    name: headers[c].clone(),
                    value: cell.to_string(),
                });
            }
            values.push(v);
        }
        let text = &record[label_idx];
        let next_id = class_names.len();
        let id = *class_ids.entry(text.to_string()).or_insert_with(|| {
            class_names.push(text.to_string());
            next_id
        });
        features.push(values);
        labels.push(id);
    }
    if labels.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if class_names.len() < 2 {
        return Err(Error::TooFewClasses(class_names.len()));
    }
    Ok(RawDataset {
        features,
        labels,
        feature_names,
        class_names,
    })
}

/// Per-feature min-max statistics, kept so the same affine map can be
/// applied to new samples at inference time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scaling {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl Scaling {
    /// Maps `v` of feature `c` into `[0, 1]`; constant features map to 0 and
    /// values outside the fitted range are clamped.
    pub fn apply(&self, c: usize, v: f64) -> f64 {
        let (lo, hi) = (self.min[c], self.max[c]);
        if hi <= lo {
            return 0.0;
        }
        ((v - lo) / (hi - lo)).clamp(0.0, 1.0)
    }
}

/// Min-max scales every column to `[0, 1]` using statistics of the whole dataset.
pub fn normalize(ds: &RawDataset) -> Result<(RawDataset, Scaling)> {
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let cols = ds.num_features();
    let mut min = vec![f64::INFINITY; cols];
    let mut max = vec![f64::NEG_INFINITY; cols];
    for row in &ds.features {
        for (c, &v) in row.iter().enumerate() {
            min[c] = min[c].min(v);
            max[c] = max[c].max(v);
        }
    }
    let scaling = Scaling { min, max };
    let features = ds
        .features
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(c, &v)| scaling.apply(c, v))
                .collect()
        })
        .collect();
    Ok((
        RawDataset {
            features,
            ..ds.clone()
        },
        scaling,
    ))
}

/// `round(x)` with halves going up. Products such as `0.7 * 45` land just
/// below the half in binary, so a tolerance of 1e-9 is applied.
pub(crate) fn round_half_up(x: f64) -> f64 {
    (x + 0.5 + 1e-9).floor()
}

/// Per-class train size: `round_half_up(fraction · n)`, kept within `[1, n - 1]`.
pub fn class_train_count(n: usize, fraction: f64) -> usize {
    let raw = round_half_up(fraction * n as f64) as usize;
    raw.clamp(1, n.saturating_sub(1).max(1))
}

/// Stratified split of row indices. Both returned index sets are sorted.
pub fn stratified_split(
    labels: &[usize],
    train_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if labels.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if !(0.0..=1.0).contains(&train_fraction) {
        return Err(Error::Config(format!(
            "train fraction must be in [0, 1], got {train_fraction}"
        )));
    }
    let num_classes = labels.iter().max().map_or(0, |&m| m + 1);
    let mut by_class = vec![Vec::new(); num_classes];
    for (i, &c) in labels.iter().enumerate() {
        by_class[c].push(i);
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (class, mut rows) in by_class.into_iter().enumerate() {
        if rows.is_empty() {
            continue;
        }
        if rows.len() < 2 {
            return Err(Error::ClassTooSmall {
                class,
                count: rows.len(),
            });
        }
        let mut r = rng::stream(seed, rng::Domain::Split, class as u64);
        rows.shuffle(&mut r);
        let k = class_train_count(rows.len(), train_fraction);
        train.extend_from_slice(&rows[..k]);
        test.extend_from_slice(&rows[k..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// `round_half_up(v · (2^w − 1))`.
pub fn quantize_value(v: f64, w_in: u32) -> u32 {
    let levels = f64::from((1u32 << w_in) - 1);
    round_half_up(v * levels) as u32
}

/// Quantizes a normalized dataset to `w_in`-bit unsigned integers.
pub fn quantize_inputs(ds: &RawDataset, w_in: u32) -> Result<Vec<Vec<u32>>> {
    if !(1..=16).contains(&w_in) {
        return Err(Error::Config(format!("w_in must be in 1..=16, got {w_in}")));
    }
    ds.features
        .iter()
        .enumerate()
        .map(|(r, row)| {
            row.iter()
                .enumerate()
                .map(|(c, &v)| {
                    if !(0.0..=1.0).contains(&v) {
                        return Err(Error::OutOfUnitRange {
                            row: r,
                            column: c,
                            value: v,
                        });
                    }
                    Ok(quantize_value(v, w_in))
                })
                .collect()
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
    All,
}

/// Quantized features plus labels and a fixed train/test split.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantDataset {
    pub version: u32,
    pub name: String,
    pub w_in: u32,
    pub feature_names: Vec<String>,
    pub class_names: Vec<String>,
    pub features: Vec<Vec<u32>>,
    pub labels: Vec<usize>,
    pub train_idx: Vec<usize>,
    pub test_idx: Vec<usize>,
    pub scaling: Scaling,
    #[serde(skip)]
    all_idx: Vec<usize>,
}

/// Knobs for the full preprocessing pipeline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrepareOptions {
    pub name: String,
    pub w_in: u32,
    pub train_fraction: f64,
    pub seed: u64,
}

impl Default for PrepareOptions {
    fn default() -> Self {
        PrepareOptions {
            name: "dataset".to_string(),
            w_in: 4,
            train_fraction: 0.7,
            seed: 0,
        }
    }
}

impl QuantDataset {
    /// normalize → stratified split → quantize.
    pub fn prepare(raw: &RawDataset, opts: &PrepareOptions) -> Result<Self> {
        let (normalized, scaling) = normalize(raw)?;
        let (train_idx, test_idx) = stratified_split(&raw.labels, opts.train_fraction, opts.seed)?;
        let features = quantize_inputs(&normalized, opts.w_in)?;
        let mut ds = QuantDataset {
            version: DATASET_VERSION,
            name: opts.name.clone(),
            w_in: opts.w_in,
            feature_names: raw.feature_names.clone(),
            class_names: raw.class_names.clone(),
            features,
            labels: raw.labels.clone(),
            train_idx,
            test_idx,
            scaling,
            all_idx: Vec::new(),
        };
        ds.finish()?;
        Ok(ds)
    }

    fn finish(&mut self) -> Result<()> {
        self.all_idx = (0..self.labels.len()).collect();
        self.validate()
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != DATASET_VERSION {
            return Err(Error::Version {
                what: "dataset",
                found: self.version,
                expected: DATASET_VERSION,
            });
        }
        let n = self.labels.len();
        if self.features.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: self.features.len(),
            });
        }
        let limit = (1u32 << self.w_in) - 1;
        let width = self.num_features();
        for (r, row) in self.features.iter().enumerate() {
            if row.len() != width {
                return Err(Error::RaggedRow {
                    row: r,
                    expected: width,
                    found: row.len(),
                });
            }
            if row.iter().any(|&v| v > limit) {
                return Err(Error::Config(format!(
                    "row {r} holds a value wider than {} bits",
                    self.w_in
                )));
            }
        }
        if self.labels.iter().any(|&c| c >= self.class_names.len()) {
            return Err(Error::Config("label outside the class list".into()));
        }
        let mut seen = vec![false; n];
        for &i in self.train_idx.iter().chain(&self.test_idx) {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(Error::Config(format!(
                    "split index {i} is out of range or repeated"
                )));
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Config("split does not cover every row".into()));
        }
        Ok(())
    }

    pub fn num_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn indices(&self, split: Split) -> &[usize] {
        match split {
            Split::Train => &self.train_idx,
            Split::Test => &self.test_idx,
            Split::All => &self.all_idx,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mut ds: QuantDataset = serde_json::from_str(text)?;
        ds.finish()?;
        Ok(ds)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}
