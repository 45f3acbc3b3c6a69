// SPDX-License-Identifier: Apache-2.0

//! Constrained bi-objective NSGA-II over the discrete genome of masks,
//! signs, shift exponents and biases.
//!
//! The two objectives are training error and [`mlp_area`]. Individuals whose
//! training accuracy falls more than `max_accuracy_loss` below the baseline are
//! infeasible; feasibility is handled by constrained domination, so feasible
//! solutions always rank ahead and infeasible ones are ordered by how far they
//! miss the bound.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::areamodel::{dense_area, mlp_area};
use crate::datio::{round_half_up, QuantDataset, Split};
use crate::qarith::{self, full_mask, ApproxMlp, ApproxNeuron, MlpConfig, Sign};
use crate::rng::{self, Domain};
use crate::{Error, Result};

pub const ARCHIVE_VERSION: u32 = 1;

/// Baseline accuracies of the exact 8-bit reference MLPs, by dataset name.
pub const REFERENCE_BASELINES: &[(&str, f64)] = &[
    ("breast_cancer", 0.980),
    ("cardio", 0.881),
    ("pendigits", 0.937),
    ("red_wine", 0.564),
    ("white_wine", 0.537),
];

pub fn reference_baseline(dataset: &str) -> Option<f64> {
    let key = dataset.to_ascii_lowercase().replace(['-', ' '], "_");
    REFERENCE_BASELINES
        .iter()
        .find(|(name, _)| *name == key || name.replace('_', "") == key)
        .map(|&(_, acc)| acc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneKind {
    Mask,
    Sign,
    Shift,
    Bias,
    QreluShift,
}

impl GeneKind {
    fn name(self) -> &'static str {
        match self {
            GeneKind::Mask => "mask",
            GeneKind::Sign => "sign",
            GeneKind::Shift => "shift",
            GeneKind::Bias => "bias",
            GeneKind::QreluShift => "qrelu shift",
        }
    }
}

/// Kind and inclusive bounds of one gene.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GeneSpec {
    pub kind: GeneKind,
    pub lo: i64,
    pub hi: i64,
}

/// Gene positions and bounds for one topology and config.
///
/// Genes are grouped per weight as `(m, s, k)`, each neuron ending with its
/// bias, layer after layer. With `evolve_qrelu_shift` one extra gene per
/// hidden layer follows.
#[derive(Clone, Debug, PartialEq)]
pub struct Layout {
    topology: Vec<usize>,
    config: MlpConfig,
    specs: Vec<GeneSpec>,
    /// Start index of every group (weight triple, bias, or qrelu gene).
    group_starts: Vec<usize>,
}

impl Layout {
    pub fn new(topology: &[usize], config: &MlpConfig) -> Result<Self> {
        qarith::validate_topology(topology)?;
        config.validate()?;
        let (b_lo, b_hi) = config.bias_range();
        let max_k = i64::from(config.max_shift());
        let mut specs = Vec::new();
        let mut group_starts = Vec::new();
        for l in 0..topology.len() - 1 {
            let m_hi = i64::from(full_mask(config.act_width(l)));
            for _ in 0..topology[l + 1] {
                for _ in 0..topology[l] {
                    group_starts.push(specs.len());
                    specs.push(GeneSpec {
                        kind: GeneKind::Mask,
                        lo: 0,
                        hi: m_hi,
                    });
                    specs.push(GeneSpec {
                        kind: GeneKind::Sign,
                        lo: 0,
                        hi: 1,
                    });
                    specs.push(GeneSpec {
                        kind: GeneKind::Shift,
                        lo: 0,
                        hi: max_k,
                    });
                }
                group_starts.push(specs.len());
                specs.push(GeneSpec {
                    kind: GeneKind::Bias,
                    lo: b_lo,
                    hi: b_hi,
                });
            }
        }
        if config.evolve_qrelu_shift {
            for (l, &fan_in) in topology[..topology.len() - 2].iter().enumerate() {
                group_starts.push(specs.len());
                let hi = i64::from(config.worst_case_width(fan_in, l));
                specs.push(GeneSpec {
                    kind: GeneKind::QreluShift,
                    lo: 0,
                    hi,
                });
            }
        }
        Ok(Layout {
            topology: topology.to_vec(),
            config: config.clone(),
            specs,
            group_starts,
        })
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    pub fn specs(&self) -> &[GeneSpec] {
        &self.specs
    }

    pub fn topology(&self) -> &[usize] {
        &self.topology
    }

    pub fn config(&self) -> &MlpConfig {
        &self.config
    }

    /// Valid single-point crossover positions: every group start but the first.
    pub fn cut_points(&self) -> &[usize] {
        &self.group_starts[1..]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Chromosome {
    pub genes: Vec<i64>,
}

impl Chromosome {
    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }
}

pub fn encode(theta: &ApproxMlp) -> Result<Chromosome> {
    theta.validate()?;
    let mut genes = Vec::new();
    for layer in &theta.layers {
        for neuron in layer {
            for (m, s, k) in neuron.summands() {
                genes.push(i64::from(m));
                genes.push(i64::from(s.is_negative()));
                genes.push(i64::from(k));
            }
            genes.push(i64::from(neuron.bias));
        }
    }
    if theta.config.evolve_qrelu_shift {
        genes.extend(theta.qrelu_shifts.iter().map(|&r| i64::from(r)));
    }
    Ok(Chromosome { genes })
}

pub fn decode(chrom: &Chromosome, layout: &Layout) -> Result<ApproxMlp> {
    if chrom.len() != layout.len() {
        return Err(Error::LengthMismatch(chrom.len(), layout.len()));
    }
    for (index, (&value, spec)) in chrom.genes.iter().zip(&layout.specs).enumerate() {
        if value < spec.lo || value > spec.hi {
            return Err(Error::GeneOutOfBounds {
                index,
                kind: spec.kind.name(),
                value,
                lo: spec.lo,
                hi: spec.hi,
            });
        }
    }
    let topo = &layout.topology;
    let mut genes = chrom.genes.iter().copied();
    let mut next = || genes.next().expect("length checked");
    let mut layers = Vec::with_capacity(topo.len() - 1);
    for l in 0..topo.len() - 1 {
        let fan_in = topo[l];
        let mut layer = Vec::with_capacity(topo[l + 1]);
        for _ in 0..topo[l + 1] {
            let mut neuron = ApproxNeuron {
                masks: Vec::with_capacity(fan_in),
                signs: Vec::with_capacity(fan_in),
                shifts: Vec::with_capacity(fan_in),
                bias: 0,
            };
            for _ in 0..fan_in {
                neuron.masks.push(next() as u32);
                neuron
                    .signs
                    .push(if next() == 1 { Sign::Minus } else { Sign::Plus });
                neuron.shifts.push(next() as u32);
            }
            neuron.bias = next() as i32;
            layer.push(neuron);
        }
        layers.push(layer);
    }
    let qrelu_shifts = if layout.config.evolve_qrelu_shift {
        (0..topo.len() - 2).map(|_| next() as u32).collect()
    } else {
        layout.config.resolve_qrelu_shifts(topo)?
    };
    Ok(ApproxMlp {
        topology: topo.clone(),
        config: layout.config.clone(),
        qrelu_shifts,
        layers,
    })
}

/// Search parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaConfig {
    pub population: usize,
    pub generations: usize,
    /// Per-gene mutation probability.
    pub mutation_prob: f64,
    /// Per-pair crossover probability.
    pub crossover_prob: f64,
    /// Share of the initial population seeded with all-ones masks.
    pub dope_fraction: f64,
    pub seed: u64,
    /// Accuracy of the exact reference model; `None` disables the constraint.
    pub baseline_accuracy: Option<f64>,
    /// Largest tolerated drop below `baseline_accuracy`.
    pub max_accuracy_loss: f64,
    /// Evaluation threads; `None` lets rayon decide. Never affects results.
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population: 100,
            generations: 1000,
            mutation_prob: 0.2,
            crossover_prob: 0.7,
            dope_fraction: 0.10,
            seed: 0,
            baseline_accuracy: None,
            max_accuracy_loss: 0.10,
            threads: None,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be in [0, 1], got {v}")))
            }
        };
        if self.population < 2 {
            return Err(Error::Config(format!(
                "population must be at least 2, got {}",
                self.population
            )));
        }
        unit("mutation probability", self.mutation_prob)?;
        unit("crossover probability", self.crossover_prob)?;
        unit("dope fraction", self.dope_fraction)?;
        unit("max accuracy loss", self.max_accuracy_loss)?;
        if let Some(b) = self.baseline_accuracy {
            unit("baseline accuracy", b)?;
        }
        Ok(())
    }

    /// Lowest feasible training accuracy.
    pub fn accuracy_floor(&self) -> Option<f64> {
        self.baseline_accuracy.map(|b| b - self.max_accuracy_loss)
    }
}

fn random_gene(spec: &GeneSpec, rng: &mut impl Rng) -> i64 {
    rng.gen_range(spec.lo..=spec.hi)
}

/// Random valid chromosome with every gene uniform in its bounds.
pub fn random_chromosome(layout: &Layout, rng: &mut impl Rng) -> Chromosome {
    Chromosome {
        genes: layout.specs.iter().map(|s| random_gene(s, rng)).collect(),
    }
}

/// All masks full, everything else random: a nearly exact individual.
pub fn doped_chromosome(layout: &Layout, rng: &mut impl Rng) -> Chromosome {
    Chromosome {
        genes: layout
            .specs
            .iter()
            .map(|s| match s.kind {
                GeneKind::Mask => s.hi,
                _ => random_gene(s, rng),
            })
            .collect(),
    }
}

pub fn dope_count(cfg: &GaConfig) -> usize {
    (round_half_up(cfg.dope_fraction * cfg.population as f64) as usize).min(cfg.population)
}

/// Initial population; the first [`dope_count`] individuals are doped.
pub fn init_population(cfg: &GaConfig, layout: &Layout) -> Vec<Chromosome> {
    let doped = dope_count(cfg);
    (0..cfg.population)
        .map(|i| {
            let mut r = rng::stream(cfg.seed, Domain::Init, i as u64);
            if i < doped {
                doped_chromosome(layout, &mut r)
            } else {
                random_chromosome(layout, &mut r)
            }
        })
        .collect()
}

/// Each gene is altered with probability `p`: a mask flips one bit, a sign
/// flips, and shift/bias genes move to a different uniformly drawn value.
pub fn mutate(chrom: &Chromosome, layout: &Layout, p: f64, rng: &mut impl Rng) -> Chromosome {
    let mut out = chrom.clone();
    for (g, spec) in out.genes.iter_mut().zip(&layout.specs) {
        if p <= 0.0 || !rng.gen_bool(p) {
            continue;
        }
        match spec.kind {
            GeneKind::Mask => {
                let bits = 64 - spec.hi.leading_zeros();
                *g ^= 1 << rng.gen_range(0..bits);
            }
            GeneKind::Sign => *g = 1 - *g,
            GeneKind::Shift | GeneKind::Bias | GeneKind::QreluShift => {
                if spec.hi > spec.lo {
                    let v = rng.gen_range(spec.lo..spec.hi);
                    *g = if v >= *g { v + 1 } else { v };
                }
            }
        }
    }
    out
}

/// Single-point crossover at a group boundary, applied with probability `p`.
pub fn crossover(
    a: &Chromosome,
    b: &Chromosome,
    layout: &Layout,
    p: f64,
    rng: &mut impl Rng,
) -> Result<(Chromosome, Chromosome)> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let cuts = layout.cut_points();
    if cuts.is_empty() || p <= 0.0 || !rng.gen_bool(p) {
        return Ok((a.clone(), b.clone()));
    }
    let cut = cuts[rng.gen_range(0..cuts.len())];
    let splice = |x: &Chromosome, y: &Chromosome| Chromosome {
        genes: x.genes[..cut]
            .iter()
            .chain(&y.genes[cut..])
            .copied()
            .collect(),
    };
    Ok((splice(a, b), splice(b, a)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fitness {
    /// `1 - accuracy` on the training split.
    pub error: f64,
    pub accuracy: f64,
    pub area: u64,
    /// How far training accuracy falls below the floor; 0 when feasible.
    pub violation: f64,
    pub feasible: bool,
}

impl Fitness {
    pub fn new(accuracy: f64, area: u64, floor: Option<f64>) -> Self {
        let violation = match floor {
            // 1e-9 absorbs rounding in `baseline - loss`
            Some(f) if accuracy + 1e-9 < f => f - accuracy,
            _ => 0.0,
        };
        Fitness {
            error: 1.0 - accuracy,
            accuracy,
            area,
            violation,
            feasible: violation == 0.0,
        }
    }
}

/// Training-split fitness of a chromosome.
pub fn evaluate(
    chrom: &Chromosome,
    layout: &Layout,
    ds: &QuantDataset,
    cfg: &GaConfig,
) -> Result<Fitness> {
    let theta = decode(chrom, layout)?;
    let (correct, total) = qarith::correct_count(&theta, ds, Split::Train)?;
    let accuracy = if total == 0 {
        0.0
    } else {
        correct as f64 / total as f64
    };
    Ok(Fitness::new(
        accuracy,
        mlp_area(&theta),
        cfg.accuracy_floor(),
    ))
}

/// Plain Pareto dominance, both objectives minimized.
pub fn pareto_dominates(a: &Fitness, b: &Fitness) -> bool {
    a.error <= b.error && a.area <= b.area && (a.error < b.error || a.area < b.area)
}

/// Feasible beats infeasible; among infeasible, smaller violation wins.
pub fn constrained_dominates(a: &Fitness, b: &Fitness) -> bool {
    match (a.feasible, b.feasible) {
        (true, false) => true,
        (false, true) => false,
        (false, false) => a.violation < b.violation,
        (true, true) => pareto_dominates(a, b),
    }
}

/// Fast non-dominated sort under constrained domination. Fronts partition
/// the input and list indices in ascending order.
pub fn nondominated_sort(fits: &[Fitness]) -> Vec<Vec<usize>> {
    let n = fits.len();
    let mut dominated_by = vec![0usize; n];
    let mut dominates: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if constrained_dominates(&fits[i], &fits[j]) {
                dominates[i].push(j);
                dominated_by[j] += 1;
            } else if constrained_dominates(&fits[j], &fits[i]) {
                dominates[j].push(i);
                dominated_by[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates[i] {
                dominated_by[j] -= 1;
                if dominated_by[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// Crowding distance of each member of `front`, in the same order.
/// Boundary points of each objective get `f64::INFINITY`.
pub fn crowding_distance(front: &[usize], fits: &[Fitness]) -> Vec<f64> {
    let n = front.len();
    let mut dist = vec![0.0; n];
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let objectives: [fn(&Fitness) -> f64; 2] = [|f| f.error, |f| f.area as f64];
    for obj in objectives {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            obj(&fits[front[a]])
                .total_cmp(&obj(&fits[front[b]]))
                .then(a.cmp(&b))
        });
        let lo = obj(&fits[front[order[0]]]);
        let hi = obj(&fits[front[order[n - 1]]]);
        dist[order[0]] = f64::INFINITY;
        dist[order[n - 1]] = f64::INFINITY;
        if hi > lo {
            for w in 1..n - 1 {
                let prev = obj(&fits[front[order[w - 1]]]);
                let next = obj(&fits[front[order[w + 1]]]);
                dist[order[w]] += (next - prev) / (hi - lo);
            }
        }
    }
    dist
}

/// Rank (front number) and crowding distance of every individual.
fn rank_and_crowd(fits: &[Fitness]) -> (Vec<usize>, Vec<f64>, Vec<Vec<usize>>) {
    let fronts = nondominated_sort(fits);
    let mut rank = vec![0; fits.len()];
    let mut crowd = vec![0.0; fits.len()];
    for (r, front) in fronts.iter().enumerate() {
        for (&i, d) in front.iter().zip(crowding_distance(front, fits)) {
            rank[i] = r;
            crowd[i] = d;
        }
    }
    (rank, crowd, fronts)
}

/// Binary tournament: lower rank, then larger crowding distance, then
/// smaller area, then lower index.
fn tournament(rng: &mut impl Rng, rank: &[usize], crowd: &[f64], fits: &[Fitness]) -> usize {
    let a = rng.gen_range(0..rank.len());
    let b = rng.gen_range(0..rank.len());
    let order = rank[a]
        .cmp(&rank[b])
        .then(crowd[b].total_cmp(&crowd[a]))
        .then(fits[a].area.cmp(&fits[b].area))
        .then(a.cmp(&b));
    if order.is_le() {
        a
    } else {
        b
    }
}

/// Elitist environmental selection of `n` survivors, returned in rank order.
pub fn select_survivors(fits: &[Fitness], n: usize) -> Vec<usize> {
    let mut chosen = Vec::with_capacity(n);
    for front in nondominated_sort(fits) {
        if chosen.len() + front.len() <= n {
            chosen.extend_from_slice(&front);
        } else {
            let crowd = crowding_distance(&front, fits);
            let mut order: Vec<usize> = (0..front.len()).collect();
            order.sort_by(|&a, &b| crowd[b].total_cmp(&crowd[a]).then(front[a].cmp(&front[b])));
            chosen.extend(order.into_iter().take(n - chosen.len()).map(|k| front[k]));
        }
        if chosen.len() == n {
            break;
        }
    }
    chosen
}

/// 2-D hypervolume dominated by `points` (error, area) w.r.t. `(1, ref_area)`.
pub fn hypervolume(points: &[(f64, u64)], ref_area: u64) -> f64 {
    let mut pts: Vec<(f64, u64)> = points
        .iter()
        .copied()
        .filter(|&(e, a)| e < 1.0 && a < ref_area)
        .collect();
    pts.sort_by(|x, y| x.1.cmp(&y.1).then(x.0.total_cmp(&y.0)));
    let mut hv = 0.0;
    let mut best_err = 1.0;
    for (e, a) in pts {
        if e < best_err {
            hv += (ref_area - a) as f64 * (best_err - e);
            best_err = e;
        }
    }
    hv
}

#[derive(Clone, Debug)]
struct Elite {
    fitness: Fitness,
    chrom: Chromosome,
    generation: usize,
}

/// Running set of mutually non-dominated feasible individuals.
#[derive(Clone, Debug, Default)]
struct EliteSet {
    members: Vec<Elite>,
}

impl EliteSet {
    fn offer(&mut self, fitness: &Fitness, chrom: &Chromosome, generation: usize) {
        if !fitness.feasible {
            return;
        }
        let blocked = self.members.iter().any(|m| {
            pareto_dominates(&m.fitness, fitness)
                || (m.fitness.error == fitness.error && m.fitness.area == fitness.area)
        });
        if blocked {
            return;
        }
        self.members
            .retain(|m| !pareto_dominates(fitness, &m.fitness));
        self.members.push(Elite {
            fitness: *fitness,
            chrom: chrom.clone(),
            generation,
        });
    }

    fn points(&self) -> Vec<(f64, u64)> {
        self.members
            .iter()
            .map(|m| (m.fitness.error, m.fitness.area))
            .collect()
    }
}

/// One line of the progress log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    /// Lowest feasible training error seen so far.
    pub best_error: Option<f64>,
    pub min_area: Option<u64>,
    pub archive_size: usize,
    pub hypervolume: f64,
    pub feasible_in_population: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArchiveEntry {
    pub area: u64,
    pub train_error: f64,
    pub train_accuracy: f64,
    pub test_accuracy: f64,
    pub feasible: bool,
    pub violation: f64,
    pub generation: usize,
    pub theta: ApproxMlp,
}

/// Final Pareto set of a run, sorted by area ascending.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParetoArchive {
    pub version: u32,
    pub dataset: String,
    pub topology: Vec<usize>,
    pub mlp_config: MlpConfig,
    pub ga_config: GaConfig,
    /// Area of the unpruned model, the hypervolume reference.
    pub reference_area: u64,
    /// False when no feasible individual was ever found and the entries are
    /// the least-violating members of the final population instead.
    pub feasible: bool,
    pub entries: Vec<ArchiveEntry>,
}

impl ParetoArchive {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let archive: ParetoArchive = serde_json::from_str(text)?;
        if archive.version != ARCHIVE_VERSION {
            return Err(Error::Version {
                what: "archive",
                found: archive.version,
                expected: ARCHIVE_VERSION,
            });
        }
        for e in &archive.entries {
            e.theta.validate()?;
        }
        Ok(archive)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// (error, area) of every entry.
    pub fn points(&self) -> Vec<(f64, u64)> {
        self.entries
            .iter()
            .map(|e| (e.train_error, e.area))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct EvolveOutcome {
    pub archive: ParetoArchive,
    /// Stats for generation 0 (initial population) through the last one.
    pub history: Vec<GenerationStats>,
}

fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}

/// Runs generational NSGA-II and returns the archive of every feasible
/// non-dominated individual encountered. `observer` sees each generation's
/// stats as they are produced.
pub fn evolve(
    ds: &QuantDataset,
    topology: &[usize],
    mlp: &MlpConfig,
    ga: &GaConfig,
    mut observer: impl FnMut(&GenerationStats),
) -> Result<EvolveOutcome> {
    ga.validate()?;
    let layout = Layout::new(topology, mlp)?;
    if topology[0] != ds.num_features() {
        return Err(Error::DimensionMismatch {
            expected: ds.num_features(),
            got: topology[0],
        });
    }
    if mlp.w_in != ds.w_in {
        return Err(Error::Config(format!(
            "dataset is quantized to {} bits, config says {}",
            ds.w_in, mlp.w_in
        )));
    }
    if ds.num_classes() > *topology.last().unwrap() {
        return Err(Error::Topology(format!(
            "{} output neuron(s) for {} classes",
            topology.last().unwrap(),
            ds.num_classes()
        )));
    }
    let reference_area = dense_area(topology, mlp)?;
    let pool = thread_pool(ga.threads)?;
    let eval_all = |chroms: &[Chromosome]| -> Result<Vec<Fitness>> {
        pool.install(|| {
            chroms
                .par_iter()
                .map(|c| evaluate(c, &layout, ds, ga))
                .collect()
        })
    };

    let mut elites = EliteSet::default();
    let mut history = Vec::with_capacity(ga.generations + 1);
    let mut record = |generation: usize, elites: &EliteSet, fits: &[Fitness]| {
        let stats = GenerationStats {
            generation,
            best_error: elites
                .members
                .iter()
                .map(|m| m.fitness.error)
                .min_by(f64::total_cmp),
            min_area: elites.members.iter().map(|m| m.fitness.area).min(),
            archive_size: elites.members.len(),
            hypervolume: hypervolume(&elites.points(), reference_area),
            feasible_in_population: fits.iter().filter(|f| f.feasible).count(),
        };
        observer(&stats);
        history.push(stats);
    };

    let mut pop = init_population(ga, &layout);
    let mut fits = eval_all(&pop)?;
    for (c, f) in pop.iter().zip(&fits) {
        elites.offer(f, c, 0);
    }
    record(0, &elites, &fits);

    let n = ga.population;
    for generation in 1..=ga.generations {
        let (rank, crowd, _) = rank_and_crowd(&fits);
        let pairs = n.div_ceil(2);
        let children: Vec<(Chromosome, Chromosome)> = pool.install(|| {
            (0..pairs)
                .into_par_iter()
                .map(|slot| {
                    let mut r = rng::offspring_stream(ga.seed, generation as u64, slot as u64);
                    let a = tournament(&mut r, &rank, &crowd, &fits);
                    let b = tournament(&mut r, &rank, &crowd, &fits);
                    let (c1, c2) = crossover(&pop[a], &pop[b], &layout, ga.crossover_prob, &mut r)?;
                    Ok((
                        mutate(&c1, &layout, ga.mutation_prob, &mut r),
                        mutate(&c2, &layout, ga.mutation_prob, &mut r),
                    ))
                })
                .collect::<Result<_>>()
        })?;
        let offspring: Vec<Chromosome> = children
            .into_iter()
            .flat_map(|(a, b)| [a, b])
            .take(n)
            .collect();
        let off_fits = eval_all(&offspring)?;
        for (c, f) in offspring.iter().zip(&off_fits) {
            elites.offer(f, c, generation);
        }

        let mut merged = std::mem::take(&mut pop);
        merged.extend(offspring);
        let mut merged_fits = std::mem::take(&mut fits);
        merged_fits.extend(off_fits);
        let survivors = select_survivors(&merged_fits, n);
        pop = survivors.iter().map(|&i| merged[i].clone()).collect();
        fits = survivors.iter().map(|&i| merged_fits[i]).collect();
        record(generation, &elites, &fits);
    }

    let feasible = !elites.members.is_empty();
    let chosen: Vec<Elite> = if feasible {
        elites.members
    } else {
        // least-violating individuals of the final population, one per objective vector
        let front = nondominated_sort(&fits)
            .into_iter()
            .next()
            .unwrap_or_default();
        let mut seen: Vec<(u64, u64, u64)> = Vec::new();
        front
            .into_iter()
            .filter(|&i| {
                let key = (
                    fits[i].error.to_bits(),
                    fits[i].area,
                    fits[i].violation.to_bits(),
                );
                let fresh = !seen.contains(&key);
                seen.push(key);
                fresh
            })
            .map(|i| Elite {
                fitness: fits[i],
                chrom: pop[i].clone(),
                generation: ga.generations,
            })
            .collect()
    };

    let mut entries = pool.install(|| {
        chosen
            .par_iter()
            .map(|e| {
                let theta = decode(&e.chrom, &layout)?;
                let test_accuracy = qarith::accuracy(&theta, ds, Split::Test)?;
                Ok(ArchiveEntry {
                    area: e.fitness.area,
                    train_error: e.fitness.error,
                    train_accuracy: e.fitness.accuracy,
                    test_accuracy,
                    feasible: e.fitness.feasible,
                    violation: e.fitness.violation,
                    generation: e.generation,
                    theta,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    entries.sort_by(|a, b| {
        a.area
            .cmp(&b.area)
            .then(a.train_error.total_cmp(&b.train_error))
    });

    Ok(EvolveOutcome {
        archive: ParetoArchive {
            version: ARCHIVE_VERSION,
            dataset: ds.name.clone(),
            topology: topology.to_vec(),
            mlp_config: mlp.clone(),
            ga_config: ga.clone(),
            reference_area,
            feasible,
            entries,
        },
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fit(error: f64, area: u64) -> Fitness {
        Fitness {
            error,
            accuracy: 1.0 - error,
            area,
            violation: 0.0,
            feasible: true,
        }
    }

    #[test]
    fn chromosome_lengths() {
        let cfg = MlpConfig::default();
        assert_eq!(Layout::new(&[1, 1], &cfg).unwrap().len(), 4);
        // 3·(10·3) + 3·(3·2) + (3 + 2)
        let bc = Layout::new(&[10, 3, 2], &cfg).unwrap();
        assert_eq!(bc.len(), 3 * (10 * 3) + 3 * (3 * 2) + (3 + 2));
        assert_eq!(bc.len(), 113);
        let theta = ApproxMlp::dense(&[10, 3, 2], &cfg).unwrap();
        assert_eq!(encode(&theta).unwrap().len(), 113);
        let evolved = MlpConfig {
            evolve_qrelu_shift: true,
            ..cfg
        };
        assert_eq!(Layout::new(&[10, 3, 2], &evolved).unwrap().len(), 114);
    }

    #[test]
    fn gene_order_is_m_s_k_then_bias() {
        let cfg = MlpConfig::default();
        let mut theta = ApproxMlp::dense(&[2, 1], &cfg).unwrap();
        let n = &mut theta.layers[0][0];
        n.masks = vec![5, 9];
        n.signs = vec![Sign::Minus, Sign::Plus];
        n.shifts = vec![3, 6];
        n.bias = -4;
        assert_eq!(encode(&theta).unwrap().genes, vec![5, 1, 3, 9, 0, 6, -4]);
    }

    #[test]
    fn decode_rejects_out_of_bounds() {
        let layout = Layout::new(&[1, 1], &MlpConfig::default()).unwrap();
        let bad = Chromosome {
            genes: vec![16, 0, 0, 0],
        };
        assert!(matches!(
            decode(&bad, &layout),
            Err(Error::GeneOutOfBounds {
                index: 0,
                kind: "mask",
                ..
            })
        ));
        let bad = Chromosome {
            genes: vec![1, 0, 7, 0],
        };
        assert!(matches!(
            decode(&bad, &layout),
            Err(Error::GeneOutOfBounds { index: 2, .. })
        ));
        assert!(matches!(
            decode(&Chromosome { genes: vec![0; 3] }, &layout),
            Err(Error::LengthMismatch(3, 4))
        ));
    }

    #[test]
    fn dope_examples() {
        let layout = Layout::new(&[4, 3, 2], &MlpConfig::default()).unwrap();
        let cfg = GaConfig {
            population: 50,
            dope_fraction: 0.1,
            seed: 9,
            ..GaConfig::default()
        };
        let pop = init_population(&cfg, &layout);
        let full = |c: &Chromosome| {
            c.genes
                .iter()
                .zip(layout.specs())
                .filter(|(_, s)| s.kind == GeneKind::Mask)
                .all(|(&g, s)| g == s.hi)
        };
        assert_eq!(pop.iter().filter(|c| full(c)).count(), 5);
        assert!(pop[..5].iter().all(full));
        assert_eq!(pop, init_population(&cfg, &layout));
        let undoped = GaConfig {
            dope_fraction: 0.0,
            ..cfg
        };
        assert_eq!(dope_count(&undoped), 0);
        assert!(!init_population(&undoped, &layout).iter().all(full));
    }

    #[test]
    fn mutation_edge_cases() {
        let layout = Layout::new(&[3, 2], &MlpConfig::default()).unwrap();
        let mut r = rng::stream(1, Domain::Sampling, 0);
        let c = random_chromosome(&layout, &mut r);
        assert_eq!(mutate(&c, &layout, 0.0, &mut r), c);
        let m = mutate(&c, &layout, 1.0, &mut r);
        for ((&before, &after), spec) in c.genes.iter().zip(&m.genes).zip(layout.specs()) {
            assert_ne!(before, after, "{:?}", spec.kind);
            assert!(after >= spec.lo && after <= spec.hi);
            match spec.kind {
                GeneKind::Sign => assert_eq!(after, 1 - before),
                GeneKind::Mask => assert_eq!((before ^ after).count_ones(), 1),
                _ => {}
            }
        }
    }

    #[test]
    fn crossover_edge_cases() {
        let layout = Layout::new(&[3, 2], &MlpConfig::default()).unwrap();
        let mut r = rng::stream(2, Domain::Sampling, 0);
        let a = random_chromosome(&layout, &mut r);
        let b = random_chromosome(&layout, &mut r);
        assert_eq!(
            crossover(&a, &b, &layout, 0.0, &mut r).unwrap(),
            (a.clone(), b.clone())
        );
        assert_eq!(
            crossover(&a, &a, &layout, 1.0, &mut r).unwrap(),
            (a.clone(), a.clone())
        );
        let short = Chromosome { genes: vec![0; 3] };
        assert!(matches!(
            crossover(&a, &short, &layout, 1.0, &mut r),
            Err(Error::LengthMismatch(..))
        ));
    }

    #[test]
    fn sort_matches_brute_force() {
        let fits = [fit(0.1, 5), fit(0.2, 3), fit(0.3, 4)];
        assert_eq!(nondominated_sort(&fits), vec![vec![0, 1], vec![2]]);
        // brute force: peel off points no remaining point dominates
        let mut remaining: Vec<usize> = (0..fits.len()).collect();
        let mut fronts = Vec::new();
        while !remaining.is_empty() {
            let front: Vec<usize> = remaining
                .iter()
                .copied()
                .filter(|&i| {
                    !remaining
                        .iter()
                        .any(|&j| pareto_dominates(&fits[j], &fits[i]))
                })
                .collect();
            remaining.retain(|i| !front.contains(i));
            fronts.push(front);
        }
        assert_eq!(nondominated_sort(&fits), fronts);
    }

    #[test]
    fn single_individual_has_infinite_crowding() {
        let fits = [fit(0.4, 9)];
        let fronts = nondominated_sort(&fits);
        assert_eq!(fronts, vec![vec![0]]);
        assert_eq!(crowding_distance(&fronts[0], &fits), vec![f64::INFINITY]);
    }

    #[test]
    fn feasible_ranks_first() {
        let feasible = Fitness::new(0.7, 9, Some(0.5));
        let infeasible = Fitness::new(0.95, 1, Some(0.97));
        assert!(feasible.feasible && !infeasible.feasible);
        assert_eq!(
            nondominated_sort(&[infeasible, feasible]),
            vec![vec![1], vec![0]]
        );
        let worse = Fitness::new(0.90, 1, Some(0.97));
        assert!(constrained_dominates(&infeasible, &worse));
    }

    #[test]
    fn baseline_bound_example() {
        let cfg = GaConfig {
            baseline_accuracy: Some(0.980),
            ..GaConfig::default()
        };
        assert!(!Fitness::new(0.875, 10, cfg.accuracy_floor()).feasible);
        assert!(Fitness::new(0.88, 10, cfg.accuracy_floor()).feasible);
    }

    #[test]
    fn crowding_interior_points() {
        let fits = [fit(0.0, 10), fit(0.5, 5), fit(1.0, 0)];
        let d = crowding_distance(&[0, 1, 2], &fits);
        assert!(d[0].is_infinite() && d[2].is_infinite());
        assert!((d[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn survivors_fill_by_front_then_crowding() {
        let fits = [
            fit(0.0, 10),
            fit(0.5, 5),
            fit(1.0, 0),
            fit(0.6, 6),
            fit(0.9, 9),
        ];
        let s = select_survivors(&fits, 3);
        assert_eq!(s, vec![0, 1, 2]);
        let s = select_survivors(&fits, 4);
        assert_eq!(s.len(), 4);
        assert!(s.contains(&3));
    }

    #[test]
    fn hypervolume_staircase() {
        assert_eq!(hypervolume(&[], 10), 0.0);
        // one point: (10-4)*(1-0.5)
        assert!((hypervolume(&[(0.5, 4)], 10) - 3.0).abs() < 1e-12);
        // two points: (10-2)*(1-0.8) + (10-6)*(0.8-0.3)
        assert!((hypervolume(&[(0.3, 6), (0.8, 2)], 10) - 3.6).abs() < 1e-12);
        assert_eq!(hypervolume(&[(0.3, 12)], 10), 0.0);
    }

    #[test]
    fn elite_set_keeps_first_of_equal_points() {
        let mut set = EliteSet::default();
        let c = Chromosome { genes: vec![1] };
        set.offer(&fit(0.2, 5), &c, 0);
        set.offer(&fit(0.2, 5), &Chromosome { genes: vec![2] }, 1);
        set.offer(&fit(0.3, 6), &c, 1);
        assert_eq!(set.members.len(), 1);
        assert_eq!(set.members[0].chrom.genes, vec![1]);
        set.offer(&fit(0.1, 5), &c, 2);
        assert_eq!(set.points(), vec![(0.1, 5)]);
    }

    #[test]
    fn reference_baselines() {
        assert_eq!(reference_baseline("breast_cancer"), Some(0.980));
        assert_eq!(reference_baseline("RedWine"), Some(0.564));
        assert_eq!(reference_baseline("iris"), None);
    }
}
