// SPDX-License-Identifier: Apache-2.0

//! Bit-exact integer inference for pow2-weighted, mask-pruned MLPs.
//!
//! Every weight is `s · 2^k` and every connection carries a summand mask `m`,
//! so neuron `j` of a layer computes
//!
//! ```text
//! Σ_i s_i · ((x_i & m_i) << k_i) + b
//! ```
//!
//! Hidden layers pass the sum through a quantized ReLU. The output layer is
//! compared by raw argmax. No floating point is involved anywhere on the
//! inference path.

use serde::{Deserialize, Serialize};

use crate::datio::{QuantDataset, Split};
use crate::{Error, Result};

/// Version tag written into serialized models.
pub const MODEL_VERSION: u32 = 1;

/// Sign of a pow2 weight. Serialized as `+1` / `-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    #[inline]
    pub fn apply(self, v: i64) -> i64 {
        match self {
            Sign::Plus => v,
            Sign::Minus => -v,
        }
    }

    pub fn flipped(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn is_negative(self) -> bool {
        self == Sign::Minus
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;

    fn try_from(v: i8) -> std::result::Result<Self, Self::Error> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(format!("sign must be +1 or -1, got {other}")),
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        match s {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// A weight of the form `sign · 2^shift`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Pow2Weight {
    pub sign: Sign,
    pub shift: u32,
}

impl Pow2Weight {
    pub fn value(self) -> i64 {
        self.sign.apply(1i64 << self.shift)
    }
}

/// One neuron: per-input mask, sign and shift, plus an integer bias.
///
/// Stored as parallel arrays, which is also the JSON layout
/// (`{"m": [..], "s": [..], "k": [..], "b": ..}`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ApproxNeuron {
    #[serde(rename = "m")]
    pub masks: Vec<u32>,
    #[serde(rename = "s")]
    pub signs: Vec<Sign>,
    #[serde(rename = "k")]
    pub shifts: Vec<u32>,
    #[serde(rename = "b")]
    pub bias: i32,
}

impl ApproxNeuron {
    /// Unpruned neuron: every mask all-ones, every weight `+2^0`, zero bias.
    pub fn dense(fan_in: usize, w_act: u32) -> Self {
        ApproxNeuron {
            masks: vec![full_mask(w_act); fan_in],
            signs: vec![Sign::Plus; fan_in],
            shifts: vec![0; fan_in],
            bias: 0,
        }
    }

    pub fn fan_in(&self) -> usize {
        self.masks.len()
    }

    pub fn weight(&self, i: usize) -> Pow2Weight {
        Pow2Weight {
            sign: self.signs[i],
            shift: self.shifts[i],
        }
    }

    /// `(mask, sign, shift)` per input, in input order.
    pub fn summands(&self) -> impl Iterator<Item = (u32, Sign, u32)> + '_ {
        self.masks
            .iter()
            .zip(&self.signs)
            .zip(&self.shifts)
            .map(|((&m, &s), &k)| (m, s, k))
    }

    fn check_shape(&self) -> Result<()> {
        let n = self.masks.len();
        if self.signs.len() != n || self.shifts.len() != n {
            return Err(Error::Model(format!(
                "neuron arrays disagree: {} masks, {} signs, {} shifts",
                n,
                self.signs.len(),
                self.shifts.len()
            )));
        }
        Ok(())
    }
}

/// All-ones mask for a `w`-bit activation.
#[inline]
pub fn full_mask(w: u32) -> u32 {
    if w >= 32 {
        u32::MAX
    } else {
        (1u32 << w) - 1
    }
}

/// Bitwidths and QReLU scaling shared by every neuron of a model.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MlpConfig {
    /// Input feature width.
    pub w_in: u32,
    /// QReLU output width, i.e. the activation width seen by every layer after the first.
    pub w_hidden: u32,
    /// Weight bits `n`; shifts range over `0..n-1` (half-open).
    pub n_bits: u32,
    /// Signed bias width.
    pub bias_bits: u32,
    /// Per hidden layer QReLU right shift. `None` uses [`MlpConfig::default_qrelu_shift`].
    pub qrelu_shifts: Option<Vec<u32>>,
    /// Append one gene per hidden layer so the GA also searches the QReLU shift.
    pub evolve_qrelu_shift: bool,
}

impl Default for MlpConfig {
    fn default() -> Self {
        MlpConfig {
            w_in: 4,
            w_hidden: 8,
            n_bits: 8,
            bias_bits: 8,
            qrelu_shifts: None,
            evolve_qrelu_shift: false,
        }
    }
}

impl MlpConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(1..=16).contains(&self.w_in) {
            return bad(format!("w_in must be in 1..=16, got {}", self.w_in));
        }
        if !(1..=16).contains(&self.w_hidden) {
            return bad(format!("w_hidden must be in 1..=16, got {}", self.w_hidden));
        }
        if !(2..=24).contains(&self.n_bits) {
            return bad(format!("n_bits must be in 2..=24, got {}", self.n_bits));
        }
        if !(1..=24).contains(&self.bias_bits) {
            return bad(format!(
                "bias_bits must be in 1..=24, got {}",
                self.bias_bits
            ));
        }
        Ok(())
    }

    /// Largest shift exponent, `n - 2`.
    pub fn max_shift(&self) -> u32 {
        self.n_bits - 2
    }

    /// Inclusive bias range `[-2^(B-1), 2^(B-1) - 1]`.
    pub fn bias_range(&self) -> (i64, i64) {
        let half = 1i64 << (self.bias_bits - 1);
        (-half, half - 1)
    }

    /// Width of the activations feeding `layer`.
    pub fn act_width(&self, layer: usize) -> u32 {
        if layer == 0 {
            self.w_in
        } else {
            self.w_hidden
        }
    }

    /// Accumulator width covering any neuron of the layer: all masks full,
    /// every shift at its maximum, bias at either extreme.
    pub fn worst_case_width(&self, fan_in: usize, layer: usize) -> u32 {
        let per_input = i128::from(full_mask(self.act_width(layer))) << self.max_shift();
        let reach = per_input * fan_in as i128;
        let (b_lo, b_hi) = self.bias_range();
        signed_width(-reach + i128::from(b_lo), reach + i128::from(b_hi))
    }

    /// Static QReLU shift for a hidden layer: `max(0, worst_case_width - w_hidden)`.
    pub fn default_qrelu_shift(&self, fan_in: usize, layer: usize) -> u32 {
        self.worst_case_width(fan_in, layer)
            .saturating_sub(self.w_hidden)
    }

    /// QReLU shifts for every hidden layer of `topology`, honoring overrides.
    pub fn resolve_qrelu_shifts(&self, topology: &[usize]) -> Result<Vec<u32>> {
        let hidden = topology.len().saturating_sub(2);
        match &self.qrelu_shifts {
            Some(shifts) if shifts.len() != hidden => Err(Error::Config(format!(
                "{} qrelu shift override(s) for {} hidden layer(s)",
                shifts.len(),
                hidden
            ))),
            Some(shifts) => Ok(shifts.clone()),
            None => Ok((0..hidden)
                .map(|l| self.default_qrelu_shift(topology[l], l))
                .collect()),
        }
    }
}

/// Smallest `W >= 1` such that `[lo, hi]` fits in signed `W`-bit two's complement.
pub fn signed_width(lo: i128, hi: i128) -> u32 {
    let mut w = 1u32;
    while lo < -(1i128 << (w - 1)) || hi > (1i128 << (w - 1)) - 1 {
        w += 1;
    }
    w
}

pub fn validate_topology(topology: &[usize]) -> Result<()> {
    if topology.len() < 2 {
        return Err(Error::Topology(format!(
            "need at least an input and an output layer, got {topology:?}"
        )));
    }
    if topology.contains(&0) {
        return Err(Error::Topology(format!(
            "layer widths must be positive, got {topology:?}"
        )));
    }
    Ok(())
}

/// A complete approximate MLP: topology, bitwidths and every neuron.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ApproxMlp {
    pub topology: Vec<usize>,
    pub config: MlpConfig,
    /// Resolved QReLU shift per hidden layer.
    pub qrelu_shifts: Vec<u32>,
    pub layers: Vec<Vec<ApproxNeuron>>,
}

#[derive(Serialize, Deserialize)]
struct ModelDocument {
    version: u32,
    #[serde(flatten)]
    model: ApproxMlp,
}

impl ApproxMlp {
    /// The unpruned reference model: every neuron [`ApproxNeuron::dense`].
    pub fn dense(topology: &[usize], config: &MlpConfig) -> Result<Self> {
        validate_topology(topology)?;
        config.validate()?;
        let layers = topology
            .windows(2)
            .enumerate()
            .map(|(l, w)| vec![ApproxNeuron::dense(w[0], config.act_width(l)); w[1]])
            .collect();
        let mlp = ApproxMlp {
            topology: topology.to_vec(),
            config: config.clone(),
            qrelu_shifts: config.resolve_qrelu_shifts(topology)?,
            layers,
        };
        mlp.validate()?;
        Ok(mlp)
    }

    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn num_classes(&self) -> usize {
        *self.topology.last().expect("validated topology")
    }

    pub fn is_output_layer(&self, layer: usize) -> bool {
        layer + 1 == self.layers.len()
    }

    pub fn neurons(&self) -> impl Iterator<Item = (usize, usize, &ApproxNeuron)> {
        self.layers
            .iter()
            .enumerate()
            .flat_map(|(l, layer)| layer.iter().enumerate().map(move |(j, n)| (l, j, n)))
    }

    /// Checks that every parameter is within the bounds implied by the config.
    pub fn validate(&self) -> Result<()> {
        validate_topology(&self.topology)?;
        self.config.validate()?;
        if self.layers.len() != self.topology.len() - 1 {
            return Err(Error::Model(format!(
                "{} layers for topology {:?}",
                self.layers.len(),
                self.topology
            )));
        }
        if self.qrelu_shifts.len() != self.topology.len() - 2 {
            return Err(Error::Model(format!(
                "{} qrelu shifts for {} hidden layer(s)",
                self.qrelu_shifts.len(),
                self.topology.len() - 2
            )));
        }
        let (b_lo, b_hi) = self.config.bias_range();
        for (l, layer) in self.layers.iter().enumerate() {
            if layer.len() != self.topology[l + 1] {
                return Err(Error::Model(format!(
                    "layer {l} has {} neurons, topology says {}",
                    layer.len(),
                    self.topology[l + 1]
                )));
            }
            let mask_max = full_mask(self.config.act_width(l));
            for (j, neuron) in layer.iter().enumerate() {
                neuron.check_shape()?;
                if neuron.fan_in() != self.topology[l] {
                    return Err(Error::Model(format!(
                        "neuron {l}/{j} has fan-in {}, expected {}",
                        neuron.fan_in(),
                        self.topology[l]
                    )));
                }
                if let Some(m) = neuron.masks.iter().find(|&&m| m > mask_max) {
                    return Err(Error::Model(format!(
                        "neuron {l}/{j}: mask {m:#b} wider than {} bits",
                        self.config.act_width(l)
                    )));
                }
                if let Some(k) = neuron.shifts.iter().find(|&&k| k > self.config.max_shift()) {
                    return Err(Error::Model(format!(
                        "neuron {l}/{j}: shift {k} exceeds {}",
                        self.config.max_shift()
                    )));
                }
                let b = i64::from(neuron.bias);
                if b < b_lo || b > b_hi {
                    return Err(Error::Model(format!(
                        "neuron {l}/{j}: bias {b} outside [{b_lo}, {b_hi}]"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = ModelDocument {
            version: MODEL_VERSION,
            model: self.clone(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ModelDocument = serde_json::from_str(text)?;
        if doc.version != MODEL_VERSION {
            return Err(Error::Version {
                what: "model",
                found: doc.version,
                expected: MODEL_VERSION,
            });
        }
        doc.model.validate()?;
        Ok(doc.model)
    }
}

/// `(x & m) << k`.
#[inline]
pub fn masked_shift(x: u32, m: u32, k: u32) -> u64 {
    u64::from(x & m) << k
}

/// Signed pre-activation `Σ s·((x & m) << k) + b`.
pub fn neuron_preact(neuron: &ApproxNeuron, x: &[u32]) -> Result<i64> {
    if x.len() != neuron.fan_in() {
        return Err(Error::DimensionMismatch {
            expected: neuron.fan_in(),
            got: x.len(),
        });
    }
    Ok(preact_unchecked(neuron, x))
}

#[inline]
fn preact_unchecked(neuron: &ApproxNeuron, x: &[u32]) -> i64 {
    let mut acc = i64::from(neuron.bias);
    for (i, (m, s, k)) in neuron.summands().enumerate() {
        acc += s.apply(masked_shift(x[i], m, k) as i64);
    }
    acc
}

/// Quantized ReLU: `clamp(max(0, v) >> r, 0, 2^w_out - 1)`.
#[inline]
pub fn qrelu(v: i64, r: u32, w_out: u32) -> u32 {
    if v <= 0 {
        return 0;
    }
    let shifted = if r >= 63 { 0 } else { v >> r };
    shifted.min(i64::from(full_mask(w_out))) as u32
}

/// Lowest index of the maximum score.
pub fn argmax(scores: &[i64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inference {
    pub scores: Vec<i64>,
    pub class: usize,
}

/// Runs the whole network on one quantized input vector.
pub fn forward(theta: &ApproxMlp, x: &[u32]) -> Result<Inference> {
    if x.len() != theta.topology[0] {
        return Err(Error::DimensionMismatch {
            expected: theta.topology[0],
            got: x.len(),
        });
    }
    let limit = full_mask(theta.config.w_in);
    if let Some(v) = x.iter().find(|&&v| v > limit) {
        return Err(Error::Model(format!(
            "input value {v} exceeds {} bits",
            theta.config.w_in
        )));
    }
    let mut scratch = Scratch::default();
    let scores = scratch.run(theta, x).to_vec();
    let class = argmax(&scores);
    Ok(Inference { scores, class })
}

/// Reusable buffers for repeated inference without per-sample allocation.
#[derive(Default)]
pub struct Scratch {
    acts: Vec<u32>,
    next: Vec<u32>,
    scores: Vec<i64>,
}

impl Scratch {
    /// Returns the output-layer scores; inputs must already be validated.
    pub fn run(&mut self, theta: &ApproxMlp, x: &[u32]) -> &[i64] {
        self.acts.clear();
        self.acts.extend_from_slice(x);
        let last = theta.layers.len() - 1;
        for (l, layer) in theta.layers.iter().enumerate() {
            if l == last {
                self.scores.clear();
                for neuron in layer {
                    self.scores.push(preact_unchecked(neuron, &self.acts));
                }
            } else {
                let r = theta.qrelu_shifts[l];
                self.next.clear();
                for neuron in layer {
                    let v = preact_unchecked(neuron, &self.acts);
                    self.next.push(qrelu(v, r, theta.config.w_hidden));
                }
                std::mem::swap(&mut self.acts, &mut self.next);
            }
        }
        &self.scores
    }

    pub fn classify(&mut self, theta: &ApproxMlp, x: &[u32]) -> usize {
        argmax(self.run(theta, x))
    }
}

/// Fraction of samples in `split` whose argmax matches the label.
pub fn accuracy(theta: &ApproxMlp, ds: &QuantDataset, split: Split) -> Result<f64> {
    let (correct, total) = correct_count(theta, ds, split)?;
    if total == 0 {
        return Ok(0.0);
    }
    Ok(correct as f64 / total as f64)
}

/// `(correct, total)` over `split`.
pub fn correct_count(theta: &ApproxMlp, ds: &QuantDataset, split: Split) -> Result<(usize, usize)> {
    if ds.num_features() != theta.topology[0] {
        return Err(Error::DimensionMismatch {
            expected: theta.topology[0],
            got: ds.num_features(),
        });
    }
    if ds.w_in != theta.config.w_in {
        return Err(Error::Config(format!(
            "dataset is quantized to {} bits, model expects {}",
            ds.w_in, theta.config.w_in
        )));
    }
    let idx = ds.indices(split);
    let mut scratch = Scratch::default();
    let correct = idx
        .iter()
        .filter(|&&i| scratch.classify(theta, &ds.features[i]) == ds.labels[i])
        .count();
    Ok((correct, idx.len()))
}
