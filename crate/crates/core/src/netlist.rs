// SPDX-License-Identifier: Apache-2.0

//! Structural compilation of an [`ApproxMlp`] into full adders.
//!
//! Each neuron becomes a multi-operand adder. Shifts are pure wiring, masked
//! bits never enter the tree, and a negative summand is realized as inverters
//! on its live bits. The `+1` of every two's-complement negation and the
//! constant `1` padding of the complemented word are merged with the bias into
//! a single constant word, so constants cost nothing beyond the bits they set.
//!
//! The tree is reduced with 3:2 full adders pass by pass until every column
//! holds at most two bits (the same schedule [`crate::areamodel::fa_count`]
//! counts), then a ripple-carry stage produces the sum. Hidden neurons end in
//! combinational QReLU saturation logic.

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::qarith::{signed_width, ApproxMlp, ApproxNeuron};
use crate::{Error, Result};

pub const NETLIST_VERSION: u32 = 1;

pub type WireId = usize;
pub type NodeId = usize;

/// Minimal two's-complement width holding every reachable pre-activation.
pub fn acc_width(neuron: &ApproxNeuron, _w_act: u32) -> u32 {
    let mut pos = 0i128;
    let mut neg = 0i128;
    for (m, s, k) in neuron.summands() {
        let reach = i128::from(m) << k;
        if s.is_negative() {
            neg += reach;
        } else {
            pos += reach;
        }
    }
    let b = i128::from(neuron.bias);
    signed_width(b - neg, b + pos)
}

/// Which summands are inverted, and the bias after absorbing one `+1` per
/// inverted summand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldedNegations {
    pub complemented: Vec<bool>,
    pub folded_bias: i64,
}

pub fn fold_negations(neuron: &ApproxNeuron) -> FoldedNegations {
    let complemented: Vec<bool> = neuron
        .summands()
        .map(|(m, s, _)| s.is_negative() && m != 0)
        .collect();
    let ones = complemented.iter().filter(|&&c| c).count() as i64;
    FoldedNegations {
        complemented,
        folded_bias: i64::from(neuron.bias) + ones,
    }
}

/// Evaluates a neuron the way the hardware does: inverted summands at the
/// accumulator width plus the folded bias, wrapped to that width.
pub fn eval_folded(neuron: &ApproxNeuron, x: &[u32], w_act: u32) -> Result<i64> {
    if x.len() != neuron.fan_in() {
        return Err(Error::DimensionMismatch {
            expected: neuron.fan_in(),
            got: x.len(),
        });
    }
    let width = acc_width(neuron, w_act);
    let word_mask = (1u128 << width) - 1;
    let folded = fold_negations(neuron);
    let mut acc = folded.folded_bias as i128 as u128;
    for (i, (m, _, k)) in neuron.summands().enumerate() {
        let v = u128::from(x[i] & m) << k;
        acc = acc.wrapping_add(if folded.complemented[i] {
            !v & word_mask
        } else {
            v
        });
    }
    Ok(sign_extend(acc & word_mask, width))
}

fn sign_extend(word: u128, width: u32) -> i64 {
    let shift = 128 - width;
    (((word << shift) as i128) >> shift) as i64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum NodeKind {
    Input,
    Output,
    Const0,
    Const1,
    Not,
    And,
    Or,
    Ha,
    Fa,
}

impl NodeKind {
    /// `(inputs, outputs)`.
    pub fn arity(self) -> (usize, usize) {
        match self {
            NodeKind::Input | NodeKind::Const0 | NodeKind::Const1 => (0, 1),
            NodeKind::Output => (1, 0),
            NodeKind::Not => (1, 1),
            NodeKind::And | NodeKind::Or => (2, 1),
            NodeKind::Ha => (2, 2),
            NodeKind::Fa => (3, 2),
        }
    }
}

/// What part of the datapath a node belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Io,
    Constant,
    Negation,
    Reduction,
    CarryPropagate,
    Activation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub kind: NodeKind,
    pub stage: Stage,
    pub inputs: Vec<WireId>,
    /// `[sum, carry]` for adders.
    pub outputs: Vec<WireId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Wire {
    pub name: String,
    pub driver: NodeId,
}

/// A named multi-bit port, least significant bit first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Port {
    pub name: String,
    pub wires: Vec<WireId>,
    pub signed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeuronInfo {
    pub layer: usize,
    pub neuron: usize,
    pub acc_width: u32,
    pub folded_bias: i64,
    /// Everything constant in the sum, as an `acc_width`-bit word.
    pub constant_word: u64,
    pub reduction_fas: u64,
    pub final_fas: u64,
    pub final_has: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetlistMetadata {
    pub theta_sha256: String,
    pub topology: Vec<usize>,
    pub w_in: u32,
    pub w_hidden: u32,
    pub n_bits: u32,
    pub bias_bits: u32,
    pub qrelu_shifts: Vec<u32>,
    /// Full adders of the 3:2 reduction trees; the area estimate.
    pub fa_count_reduction: u64,
    /// Full adders of the ripple-carry stages, reported separately.
    pub fa_count_final_adder: u64,
    pub ha_count_final_adder: u64,
    pub neurons: Vec<NeuronInfo>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Netlist {
    pub version: u32,
    pub nodes: Vec<Node>,
    pub wires: Vec<Wire>,
    pub inputs: Vec<Port>,
    pub outputs: Vec<Port>,
    pub metadata: NetlistMetadata,
}

pub fn theta_sha256(theta: &ApproxMlp) -> Result<String> {
    let bytes = serde_json::to_vec(theta)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

struct Builder {
    nodes: Vec<Node>,
    wires: Vec<Wire>,
    const0: Option<WireId>,
    const1: Option<WireId>,
}

impl Builder {
    fn add(
        &mut self,
        kind: NodeKind,
        stage: Stage,
        inputs: Vec<WireId>,
        names: Vec<String>,
    ) -> Vec<WireId> {
        let id = self.nodes.len();
        let outputs: Vec<WireId> = names
            .into_iter()
            .map(|name| {
                self.wires.push(Wire { name, driver: id });
                self.wires.len() - 1
            })
            .collect();
        self.nodes.push(Node {
            id,
            kind,
            stage,
            inputs,
            outputs: outputs.clone(),
        });
        outputs
    }

    fn add1(&mut self, kind: NodeKind, stage: Stage, inputs: Vec<WireId>, name: String) -> WireId {
        self.add(kind, stage, inputs, vec![name])[0]
    }

    fn constant(&mut self, one: bool) -> WireId {
        let slot = if one { self.const1 } else { self.const0 };
        if let Some(w) = slot {
            return w;
        }
        let (kind, name) = if one {
            (NodeKind::Const1, "const1")
        } else {
            (NodeKind::Const0, "const0")
        };
        let w = self.add1(kind, Stage::Constant, vec![], name.to_string());
        if one {
            self.const1 = Some(w);
        } else {
            self.const0 = Some(w);
        }
        w
    }

    /// Emits the adder for one neuron and returns its `acc_width` sum bits.
    fn neuron(
        &mut self,
        l: usize,
        j: usize,
        neuron: &ApproxNeuron,
        acts: &[Vec<WireId>],
        w_act: u32,
    ) -> (Vec<WireId>, NeuronInfo) {
        let prefix = format!("l{l}_n{j}");
        let width = acc_width(neuron, w_act) as usize;
        let folded = fold_negations(neuron);
        let mut columns: Vec<VecDeque<WireId>> = vec![VecDeque::new(); width];

        // Constant part: folded bias plus the '1' padding of every inverted
        // word outside its live bits, all modulo 2^width.
        let modulus = 1i128 << width;
        let mut constant = i128::from(folded.folded_bias);
        for (i, (m, _, k)) in neuron.summands().enumerate() {
            if m == 0 {
                continue;
            }
            for p in 0..w_act {
                if m >> p & 1 == 1 {
                    let q = (p + k) as usize;
                    let mut bit = acts[i][p as usize];
                    if folded.complemented[i] {
                        bit = self.add1(
                            NodeKind::Not,
                            Stage::Negation,
                            vec![bit],
                            format!("{prefix}_inv{i}_{p}"),
                        );
                    }
                    columns[q].push_back(bit);
                }
            }
            if folded.complemented[i] {
                for q in 0..width {
                    let live = q >= k as usize
                        && (q - k as usize) < w_act as usize
                        && m >> (q - k as usize) & 1 == 1;
                    if !live {
                        constant += 1i128 << q;
                    }
                }
            }
        }
        let constant_word = constant.rem_euclid(modulus) as u64;
        for (q, column) in columns.iter_mut().enumerate() {
            if constant_word >> q & 1 == 1 {
                column.push_back(self.constant(true));
            }
        }

        // 3:2 reduction, one pass at a time, oldest bits first.
        let mut reduction_fas = 0u64;
        let mut fa_index = 0usize;
        loop {
            if columns.iter().all(|c| c.len() <= 2) {
                break;
            }
            let mut next: Vec<VecDeque<WireId>> = vec![VecDeque::new(); columns.len() + 1];
            let mut carries: Vec<Vec<WireId>> = vec![Vec::new(); columns.len() + 1];
            for (q, column) in columns.iter_mut().enumerate() {
                let groups = column.len() / 3;
                let mut sums = Vec::with_capacity(groups);
                for _ in 0..groups {
                    let a = column.pop_front().unwrap();
                    let b = column.pop_front().unwrap();
                    let c = column.pop_front().unwrap();
                    let out = self.add(
                        NodeKind::Fa,
                        Stage::Reduction,
                        vec![a, b, c],
                        vec![
                            format!("{prefix}_fa{fa_index}_s"),
                            format!("{prefix}_fa{fa_index}_c"),
                        ],
                    );
                    fa_index += 1;
                    reduction_fas += 1;
                    sums.push(out[0]);
                    carries[q + 1].push(out[1]);
                }
                next[q].extend(column.drain(..));
                next[q].extend(sums);
            }
            for (q, cs) in carries.into_iter().enumerate() {
                next[q].extend(cs);
            }
            while next.last().is_some_and(|c| c.is_empty()) {
                next.pop();
            }
            columns = next;
        }

        // Ripple-carry over the low `width` columns; higher columns only
        // carry bits that vanish modulo 2^width.
        let mut final_fas = 0u64;
        let mut final_has = 0u64;
        let mut carry: Option<WireId> = None;
        let mut sum = Vec::with_capacity(width);
        for q in 0..width {
            let mut ins: Vec<WireId> = columns
                .get(q)
                .map(|c| c.iter().copied().collect())
                .unwrap_or_default();
            ins.extend(carry.take());
            let names = vec![format!("{prefix}_rc{q}_s"), format!("{prefix}_rc{q}_c")];
            let bit = match ins.len() {
                0 => self.constant(false),
                1 => ins[0],
                2 => {
                    final_has += 1;
                    let out = self.add(NodeKind::Ha, Stage::CarryPropagate, ins, names);
                    carry = Some(out[1]);
                    out[0]
                }
                _ => {
                    final_fas += 1;
                    let out = self.add(NodeKind::Fa, Stage::CarryPropagate, ins, names);
                    carry = Some(out[1]);
                    out[0]
                }
            };
            sum.push(bit);
        }

        let info = NeuronInfo {
            layer: l,
            neuron: j,
            acc_width: width as u32,
            folded_bias: folded.folded_bias,
            constant_word,
            reduction_fas,
            final_fas,
            final_has,
        };
        (sum, info)
    }

    /// `clamp(max(0, v) >> r, 0, 2^w_out - 1)` on a two's-complement word.
    fn qrelu(&mut self, prefix: &str, sum: &[WireId], r: u32, w_out: u32) -> Vec<WireId> {
        let width = sum.len();
        let sign = sum[width - 1];
        let positive = self.add1(
            NodeKind::Not,
            Stage::Activation,
            vec![sign],
            format!("{prefix}_pos"),
        );
        // Magnitude bits are sum[0..width-1]; anything at or above r + w_out saturates.
        let top = width - 1;
        let r = r as usize;
        let w_out = w_out as usize;
        let mut overflow: Option<WireId> = None;
        for (q, &bit) in sum.iter().enumerate().take(top).skip(r + w_out) {
            overflow = Some(match overflow {
                None => bit,
                Some(acc) => self.add1(
                    NodeKind::Or,
                    Stage::Activation,
                    vec![acc, bit],
                    format!("{prefix}_ovf{q}"),
                ),
            });
        }
        (0..w_out)
            .map(|b| {
                let base = (r + b < top).then(|| sum[r + b]);
                let raw = match (base, overflow) {
                    (None, None) => return self.constant(false),
                    (Some(x), None) | (None, Some(x)) => x,
                    (Some(x), Some(o)) => self.add1(
                        NodeKind::Or,
                        Stage::Activation,
                        vec![x, o],
                        format!("{prefix}_sat{b}"),
                    ),
                };
                self.add1(
                    NodeKind::And,
                    Stage::Activation,
                    vec![positive, raw],
                    format!("{prefix}_act{b}"),
                )
            })
            .collect()
    }
}

/// Compiles `theta` into a gate-level netlist.
pub fn build(theta: &ApproxMlp) -> Result<Netlist> {
    theta.validate()?;
    let cfg = &theta.config;
    let mut b = Builder {
        nodes: Vec::new(),
        wires: Vec::new(),
        const0: None,
        const1: None,
    };

    let mut inputs = Vec::with_capacity(theta.topology[0]);
    for i in 0..theta.topology[0] {
        let wires = (0..cfg.w_in)
            .map(|bit| b.add1(NodeKind::Input, Stage::Io, vec![], format!("x{i}_{bit}")))
            .collect();
        inputs.push(Port {
            name: format!("x{i}"),
            wires,
            signed: false,
        });
    }

    let mut acts: Vec<Vec<WireId>> = inputs.iter().map(|p| p.wires.clone()).collect();
    let mut outputs = Vec::new();
    let mut neurons = Vec::new();
    for (l, layer) in theta.layers.iter().enumerate() {
        let w_act = cfg.act_width(l);
        let mut next = Vec::with_capacity(layer.len());
        for (j, neuron) in layer.iter().enumerate() {
            let (sum, info) = b.neuron(l, j, neuron, &acts, w_act);
            neurons.push(info);
            if theta.is_output_layer(l) {
                let name = format!("score{j}");
                for &w in &sum {
                    b.add(NodeKind::Output, Stage::Io, vec![w], vec![]);
                }
                outputs.push(Port {
                    name,
                    wires: sum,
                    signed: true,
                });
            } else {
                let prefix = format!("l{l}_n{j}");
                next.push(b.qrelu(&prefix, &sum, theta.qrelu_shifts[l], cfg.w_hidden));
            }
        }
        acts = next;
    }

    let metadata = NetlistMetadata {
        theta_sha256: theta_sha256(theta)?,
        topology: theta.topology.clone(),
        w_in: cfg.w_in,
        w_hidden: cfg.w_hidden,
        n_bits: cfg.n_bits,
        bias_bits: cfg.bias_bits,
        qrelu_shifts: theta.qrelu_shifts.clone(),
        fa_count_reduction: neurons.iter().map(|n| n.reduction_fas).sum(),
        fa_count_final_adder: neurons.iter().map(|n| n.final_fas).sum(),
        ha_count_final_adder: neurons.iter().map(|n| n.final_has).sum(),
        neurons,
    };
    let net = Netlist {
        version: NETLIST_VERSION,
        nodes: b.nodes,
        wires: b.wires,
        inputs,
        outputs,
        metadata,
    };
    net.validate()?;
    Ok(net)
}

impl Netlist {
    pub fn count(&self, kind: NodeKind, stage: Stage) -> usize {
        self.nodes
            .iter()
            .filter(|n| n.kind == kind && n.stage == stage)
            .count()
    }

    /// Reduction-tree full adders actually instantiated.
    pub fn reduction_fa_nodes(&self) -> usize {
        self.count(NodeKind::Fa, Stage::Reduction)
    }

    /// Checks arities, single drivers and acyclicity.
    pub fn validate(&self) -> Result<()> {
        let mut driven = vec![false; self.wires.len()];
        for (idx, node) in self.nodes.iter().enumerate() {
            if node.id != idx {
                return Err(Error::Netlist(format!("node {idx} carries id {}", node.id)));
            }
            let (ni, no) = node.kind.arity();
            if node.inputs.len() != ni || node.outputs.len() != no {
                return Err(Error::Netlist(format!(
                    "node {idx} ({:?}) has {} inputs and {} outputs",
                    node.kind,
                    node.inputs.len(),
                    node.outputs.len()
                )));
            }
            if let Some(&w) = node.inputs.iter().find(|&&w| w >= self.wires.len()) {
                return Err(Error::Netlist(format!("node {idx} reads unknown wire {w}")));
            }
            for &w in &node.outputs {
                if w >= self.wires.len() || self.wires[w].driver != idx {
                    return Err(Error::Netlist(format!(
                        "wire {w} does not name node {idx} as driver"
                    )));
                }
                if std::mem::replace(&mut driven[w], true) {
                    return Err(Error::Netlist(format!("wire {w} has more than one driver")));
                }
            }
        }
        if let Some(w) = driven.iter().position(|d| !d) {
            return Err(Error::Netlist(format!(
                "wire {} is undriven",
                self.wires[w].name
            )));
        }
        topo_order(self).map(|_| ())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Kahn's algorithm over node dependencies.
fn topo_order(net: &Netlist) -> Result<Vec<NodeId>> {
    let n = net.nodes.len();
    let mut indegree = vec![0usize; n];
    let mut consumers: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    for node in &net.nodes {
        for &w in &node.inputs {
            indegree[node.id] += 1;
            consumers[net.wires[w].driver].push(node.id);
        }
    }
    let mut ready: VecDeque<NodeId> = (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(id) = ready.pop_front() {
        order.push(id);
        for &c in &consumers[id] {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                ready.push_back(c);
            }
        }
    }
    if order.len() != n {
        return Err(Error::CombinationalLoop(n - order.len()));
    }
    Ok(order)
}

/// Evaluates a netlist many times without re-deriving the node order.
pub struct Simulator<'a> {
    net: &'a Netlist,
    order: Vec<NodeId>,
    values: Vec<bool>,
}

impl<'a> Simulator<'a> {
    pub fn new(net: &'a Netlist) -> Result<Self> {
        Ok(Simulator {
            order: topo_order(net)?,
            values: vec![false; net.wires.len()],
            net,
        })
    }

    /// Returns the signed value of every output port.
    pub fn run(&mut self, x: &[u32]) -> Result<Vec<i64>> {
        let net = self.net;
        if x.len() != net.inputs.len() {
            return Err(Error::DimensionMismatch {
                expected: net.inputs.len(),
                got: x.len(),
            });
        }
        for (port, &v) in net.inputs.iter().zip(x) {
            if port.wires.len() < 32 && v >> port.wires.len() != 0 {
                return Err(Error::Netlist(format!(
                    "input {v} does not fit {} ({} bits)",
                    port.name,
                    port.wires.len()
                )));
            }
            for (bit, &w) in port.wires.iter().enumerate() {
                self.values[w] = v >> bit & 1 == 1;
            }
        }
        for &id in &self.order {
            let node = &net.nodes[id];
            let val = |k: usize| self.values[node.inputs[k]];
            match node.kind {
                NodeKind::Input | NodeKind::Output => {}
                NodeKind::Const0 => self.values[node.outputs[0]] = false,
                NodeKind::Const1 => self.values[node.outputs[0]] = true,
                NodeKind::Not => self.values[node.outputs[0]] = !val(0),
                NodeKind::And => self.values[node.outputs[0]] = val(0) & val(1),
                NodeKind::Or => self.values[node.outputs[0]] = val(0) | val(1),
                NodeKind::Ha => {
                    let (a, b) = (val(0), val(1));
                    self.values[node.outputs[0]] = a ^ b;
                    self.values[node.outputs[1]] = a & b;
                }
                NodeKind::Fa => {
                    let (a, b, c) = (val(0), val(1), val(2));
                    self.values[node.outputs[0]] = a ^ b ^ c;
                    self.values[node.outputs[1]] = (a & b) | (c & (a ^ b));
                }
            }
        }
        Ok(net
            .outputs
            .iter()
            .map(|port| {
                let word = port.wires.iter().enumerate().fold(0u128, |acc, (bit, &w)| {
                    acc | (u128::from(self.values[w]) << bit)
                });
                if port.signed {
                    sign_extend(word, port.wires.len() as u32)
                } else {
                    word as i64
                }
            })
            .collect())
    }
}

/// One-shot topological evaluation; see [`Simulator`] for repeated use.
pub fn simulate(net: &Netlist, x: &[u32]) -> Result<Vec<i64>> {
    Simulator::new(net)?.run(x)
}

fn verilog_ident(name: &str) -> String {
    let mut s: String = name
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect();
    if !s.starts_with(|c: char| c.is_ascii_alphabetic() || c == '_') {
        s.insert(0, 'm');
    }
    s
}

/// Renders the netlist as structural Verilog-2001.
///
/// The output is one top module plus two private cell modules
/// (`<name>_fa`, `<name>_ha`) built from gate primitives, so each adder in
/// the netlist appears as exactly one cell instance in the text.
pub fn emit_hdl(net: &Netlist, module_name: &str) -> String {
    let top = verilog_ident(module_name);
    let md = &net.metadata;
    let join = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
    let topo = md
        .topology
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(",");
    let mut out = String::new();
    let _ = writeln!(
        out,
        "// {top}: approximate MLP, generated by axgen {}",
        env!("CARGO_PKG_VERSION")
    );
    let _ = writeln!(out, "// theta sha256: {}", md.theta_sha256);
    let _ = writeln!(out, "// topology: {topo}");
    let _ = writeln!(
        out,
        "// config: w_in={} w_hidden={} n_bits={} bias_bits={} qrelu_shifts=[{}]",
        md.w_in,
        md.w_hidden,
        md.n_bits,
        md.bias_bits,
        join(&md.qrelu_shifts)
    );
    let _ = writeln!(out, "// reduction full adders: {}", md.fa_count_reduction);
    let _ = writeln!(
        out,
        "// final adders: {} full, {} half",
        md.fa_count_final_adder, md.ha_count_final_adder
    );
    out.push('\n');

    let mut ports = Vec::new();
    for p in &net.inputs {
        ports.push(format!(
            "  input  wire [{}:0] {}",
            p.wires.len() - 1,
            verilog_ident(&p.name)
        ));
    }
    for p in &net.outputs {
        let signed = if p.signed { "signed " } else { "" };
        ports.push(format!(
            "  output wire {signed}[{}:0] {}",
            p.wires.len() - 1,
            verilog_ident(&p.name)
        ));
    }
    let _ = writeln!(out, "module {top} (\n{}\n);", ports.join(",\n"));

    for w in &net.wires {
        let _ = writeln!(out, "  wire {};", verilog_ident(&w.name));
    }
    out.push('\n');

    let mut input_bit = vec![None; net.wires.len()];
    for p in &net.inputs {
        for (bit, &w) in p.wires.iter().enumerate() {
            input_bit[w] = Some((verilog_ident(&p.name), bit));
        }
    }
    let wire = |w: WireId| verilog_ident(&net.wires[w].name);
    for node in &net.nodes {
        let id = node.id;
        match node.kind {
            NodeKind::Input => {
                let w = node.outputs[0];
                if let Some((port, bit)) = &input_bit[w] {
                    let _ = writeln!(out, "  assign {} = {port}[{bit}];", wire(w));
                }
            }
            NodeKind::Output => {}
            NodeKind::Const0 => {
                let _ = writeln!(out, "  assign {} = 1'b0;", wire(node.outputs[0]));
            }
            NodeKind::Const1 => {
                let _ = writeln!(out, "  assign {} = 1'b1;", wire(node.outputs[0]));
            }
            NodeKind::Not => {
                let _ = writeln!(
                    out,
                    "  not g{id} ({}, {});",
                    wire(node.outputs[0]),
                    wire(node.inputs[0])
                );
            }
            NodeKind::And | NodeKind::Or => {
                let gate = if node.kind == NodeKind::And {
                    "and"
                } else {
                    "or"
                };
                let _ = writeln!(
                    out,
                    "  {gate} g{id} ({}, {}, {});",
                    wire(node.outputs[0]),
                    wire(node.inputs[0]),
                    wire(node.inputs[1])
                );
            }
            NodeKind::Ha => {
                let _ = writeln!(
                    out,
                    "  {top}_ha u{id} (.a({}), .b({}), .s({}), .co({}));",
                    wire(node.inputs[0]),
                    wire(node.inputs[1]),
                    wire(node.outputs[0]),
                    wire(node.outputs[1])
                );
            }
            NodeKind::Fa => {
                let _ = writeln!(
                    out,
                    "  {top}_fa u{id} (.a({}), .b({}), .ci({}), .s({}), .co({}));",
                    wire(node.inputs[0]),
                    wire(node.inputs[1]),
                    wire(node.inputs[2]),
                    wire(node.outputs[0]),
                    wire(node.outputs[1])
                );
            }
        }
    }
    for p in &net.outputs {
        for (bit, &w) in p.wires.iter().enumerate() {
            let _ = writeln!(
                out,
                "  assign {}[{bit}] = {};",
                verilog_ident(&p.name),
                wire(w)
            );
        }
    }
    let _ = writeln!(out, "endmodule\n");

    let _ = writeln!(out, "module {top}_fa (input wire a, input wire b, input wire ci, output wire s, output wire co);");
    let _ = writeln!(out, "  wire t0, t1, t2;");
    let _ = writeln!(out, "  xor (t0, a, b);");
    let _ = writeln!(out, "  xor (s, t0, ci);");
    let _ = writeln!(out, "  and (t1, a, b);");
    let _ = writeln!(out, "  and (t2, t0, ci);");
    let _ = writeln!(out, "  or  (co, t1, t2);");
    let _ = writeln!(out, "endmodule\n");
    let _ = writeln!(
        out,
        "module {top}_ha (input wire a, input wire b, output wire s, output wire co);"
    );
    let _ = writeln!(out, "  xor (s, a, b);");
    let _ = writeln!(out, "  and (co, a, b);");
    let _ = writeln!(out, "endmodule");
    out
}
