// SPDX-License-Identifier: Apache-2.0

//! `axgen` command line: prepare data, train, report and emit.
//!
//! Exit codes: 0 success, 2 usage or data error, 3 no feasible solution.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::datio::{load_csv, LabelColumn, PrepareOptions, QuantDataset};
use crate::evolver::{self, reference_baseline, ArchiveEntry, GaConfig, ParetoArchive};
use crate::netlist;
use crate::qarith::MlpConfig;
use crate::{Error, Result};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INFEASIBLE: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "axgen",
    version,
    about = "Evolve approximate pow2 MLPs and emit bespoke adder-tree netlists"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normalize, split and quantize a CSV dataset.
    Prepare(PrepareArgs),
    /// Run the evolutionary search and write a Pareto archive.
    Train(TrainArgs),
    /// Tabulate an archive as CSV.
    Report(ReportArgs),
    /// Write Verilog and netlist JSON for archive entries.
    Emit(EmitArgs),
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct PrepareArgs {
    /// Input CSV with a header row.
    pub csv: PathBuf,
    /// Label column, by name or zero-based index.
    #[arg(long, default_value = "class")]
    #[serde(serialize_with = "display")]
    pub label: LabelColumn,
    /// Dataset name; defaults to the CSV file stem.
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long, default_value_t = 4)]
    pub w_in: u32,
    #[arg(long, default_value_t = 0.7)]
    pub train_fraction: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "run")]
    pub out_dir: PathBuf,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct TrainArgs {
    /// Dataset JSON written by `prepare`.
    pub dataset: PathBuf,
    /// Layer sizes, e.g. `10,3,2`.
    #[arg(long, value_parser = parse_topology)]
    pub topology: Option<::std::vec::Vec<usize>>,
    /// TOML or JSON file with optional `topology`, `[mlp]` and `[ga]` sections.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub pop: Option<usize>,
    #[arg(long)]
    pub gens: Option<usize>,
    /// Per-gene mutation probability.
    #[arg(long = "mut")]
    pub mutation: Option<f64>,
    /// Crossover probability.
    #[arg(long = "cx")]
    pub crossover: Option<f64>,
    /// Fraction of doped (all-ones mask) initial individuals.
    #[arg(long)]
    pub dope: Option<f64>,
    /// Exact-model accuracy; defaults to the built-in table for known datasets.
    #[arg(long)]
    pub baseline_acc: Option<f64>,
    /// Largest accepted accuracy drop below the baseline.
    #[arg(long)]
    pub max_loss: Option<f64>,
    /// Must match the dataset's quantization width when given.
    #[arg(long)]
    pub w_in: Option<u32>,
    #[arg(long)]
    pub w_hidden: Option<u32>,
    #[arg(long)]
    pub n_bits: Option<u32>,
    /// Also evolve the QReLU shift of every hidden layer.
    #[arg(long)]
    pub evolve_qrelu_shift: bool,
    #[arg(long, default_value = "run")]
    pub out_dir: PathBuf,
    /// Evaluation threads; results do not depend on it.
    #[arg(long, env = "AXGEN_THREADS")]
    #[serde(skip)]
    pub threads: Option<usize>,
    /// Suppress per-generation progress on stderr.
    #[arg(long, short)]
    #[serde(skip)]
    pub quiet: bool,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct ReportArgs {
    pub archive: PathBuf,
    /// Defaults to the archive's directory.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Also write a whitespace-separated `report.dat` for gnuplot.
    #[arg(long)]
    pub gnuplot: bool,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct EmitArgs {
    pub archive: PathBuf,
    /// `knee`, `all`, or an entry index.
    #[arg(long, default_value = "knee")]
    #[serde(serialize_with = "display")]
    pub select: Selection,
    /// Defaults to the archive's directory.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Selection {
    Index(usize),
    All,
    Knee,
}

impl FromStr for Selection {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "all" => Ok(Selection::All),
            "knee" => Ok(Selection::Knee),
            _ => s
                .parse()
                .map(Selection::Index)
                .map_err(|_| format!("expected `all`, `knee` or an index, got {s:?}")),
        }
    }
}

impl std::fmt::Display for Selection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Selection::Index(i) => write!(f, "{i}"),
            Selection::All => f.write_str("all"),
            Selection::Knee => f.write_str("knee"),
        }
    }
}

impl std::fmt::Display for LabelColumn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LabelColumn::Name(n) => f.write_str(n),
            LabelColumn::Index(i) => write!(f, "{i}"),
        }
    }
}

fn display<T: std::fmt::Display, S: serde::Serializer>(
    v: &T,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

pub fn parse_topology(s: &str) -> std::result::Result<Vec<usize>, String> {
    let layers: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    crate::qarith::validate_topology(&layers).map_err(|e| e.to_string())?;
    Ok(layers)
}

/// Hash and location of a file read or written by a command.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: PathBuf,
    pub sha256: String,
}

/// What a command was run with and what it produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    pub seed: Option<u64>,
    /// Command arguments and, for `train`, the resolved configurations.
    pub config: serde_json::Value,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub started_unix_ms: u64,
    pub elapsed_ms: u64,
}

struct ManifestBuilder {
    command: &'static str,
    seed: Option<u64>,
    config: serde_json::Value,
    inputs: Vec<FileDigest>,
    outputs: Vec<FileDigest>,
    started: SystemTime,
    clock: Instant,
}

impl ManifestBuilder {
    fn new(command: &'static str, config: serde_json::Value) -> Self {
        ManifestBuilder {
            command,
            seed: None,
            config,
            inputs: Vec::new(),
            outputs: Vec::new(),
            started: SystemTime::now(),
            clock: Instant::now(),
        }
    }

    fn input(&mut self, path: &Path, bytes: &[u8]) {
        self.inputs.push(digest(path, bytes));
    }

    fn write(&mut self, path: &Path, bytes: &[u8]) -> Result<()> {
        fs::write(path, bytes).map_err(|e| Error::io(path, e))?;
        self.outputs.push(digest(path, bytes));
        Ok(())
    }

    fn finish(self, out_dir: &Path) -> Result<PathBuf> {
        let manifest = RunManifest {
            command: self.command.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed: self.seed,
            config: self.config,
            inputs: self.inputs,
            outputs: self.outputs,
            started_unix_ms: self
                .started
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_millis() as u64)
                .unwrap_or(0),
            elapsed_ms: self.clock.elapsed().as_millis() as u64,
        };
        let path = out_dir.join(format!("manifest-{}.json", self.command));
        let text = serde_json::to_string_pretty(&manifest)?;
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}

fn digest(path: &Path, bytes: &[u8]) -> FileDigest {
    FileDigest {
        path: path.to_path_buf(),
        sha256: hex::encode(Sha256::digest(bytes)),
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn utf8(path: &Path, bytes: Vec<u8>) -> Result<String> {
    String::from_utf8(bytes).map_err(|e| {
        Error::io(
            path,
            std::io::Error::new(std::io::ErrorKind::InvalidData, e),
        )
    })
}

fn default_out_dir(archive: &Path, out_dir: &Option<PathBuf>) -> PathBuf {
    out_dir.clone().unwrap_or_else(|| {
        archive
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."))
    })
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Prepare(a) => cmd_prepare(&a).map(|_| EXIT_OK),
        Command::Train(a) => {
            let a = cmd_train(&a)?.archive;
            if !a.feasible {
                eprintln!(
                    "axgen: no feasible solution; archive holds the least-violating individuals"
                );
                return Ok(EXIT_INFEASIBLE);
            }
            let best = a
                .entries
                .iter()
                .map(|e| e.test_accuracy)
                .fold(0.0, f64::max);
            println!(
                "{} solution(s), areas {}..{} FA (dense {}), best test accuracy {best:.4}",
                a.len(),
                a.entries.first().map_or(0, |e| e.area),
                a.entries.last().map_or(0, |e| e.area),
                a.reference_area,
            );
            Ok(EXIT_OK)
        }
        Command::Report(a) => {
            let path = cmd_report(&a)?;
            let csv = read(&path)?;
            std::io::stdout()
                .write_all(&csv)
                .map_err(|e| Error::io("<stdout>", e))?;
            Ok(EXIT_OK)
        }
        Command::Emit(a) => {
            for v in cmd_emit(&a)? {
                println!("{}", v.display());
            }
            Ok(EXIT_OK)
        }
    }
}

/// Parses `args`, runs the command, reports errors on stderr and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("axgen: error: {e}");
            EXIT_USAGE
        }
    }
}

/// Writes `dataset.json`; returns its path.
pub fn cmd_prepare(args: &PrepareArgs) -> Result<PathBuf> {
    let mut manifest = ManifestBuilder::new("prepare", serde_json::to_value(args)?);
    manifest.seed = Some(args.seed);
    let bytes = read(&args.csv)?;
    manifest.input(&args.csv, &bytes);
    let raw = load_csv(&args.csv, &args.label)?;
    let name = args.name.clone().unwrap_or_else(|| {
        args.csv
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".to_string())
    });
    let ds = QuantDataset::prepare(
        &raw,
        &PrepareOptions {
            name,
            w_in: args.w_in,
            train_fraction: args.train_fraction,
            seed: args.seed,
        },
    )?;
    create_dir(&args.out_dir)?;
    let path = args.out_dir.join("dataset.json");
    manifest.write(&path, ds.to_json()?.as_bytes())?;
    manifest.finish(&args.out_dir)?;
    Ok(path)
}

/// Optional training config file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfigFile {
    pub topology: Option<::std::vec::Vec<usize>>,
    pub mlp: MlpConfig,
    pub ga: GaConfig,
}

impl TrainConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = utf8(path, read(path)?)?;
        if path.extension().is_some_and(|e| e == "json") {
            Ok(serde_json::from_str(&text)?)
        } else {
            Ok(toml::from_str(&text)?)
        }
    }
}

/// Resolved settings of a training run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrainPlan {
    pub topology: Vec<usize>,
    pub mlp: MlpConfig,
    pub ga: GaConfig,
}

/// Merges flags over the config file over defaults.
pub fn plan_training(args: &TrainArgs, ds: &QuantDataset) -> Result<TrainPlan> {
    let file = match &args.config {
        Some(p) => TrainConfigFile::load(p)?,
        None => TrainConfigFile {
            mlp: MlpConfig {
                w_in: ds.w_in,
                ..MlpConfig::default()
            },
            ..TrainConfigFile::default()
        },
    };
    let mut mlp = file.mlp;
    let mut ga = file.ga;
    if let Some(w) = args.w_in {
        if w != ds.w_in {
            return Err(Error::Config(format!(
                "--w-in {w} does not match the dataset's {}-bit inputs",
                ds.w_in
            )));
        }
    }
    mlp.w_in = ds.w_in;
    if let Some(v) = args.w_hidden {
        mlp.w_hidden = v;
    }
    if let Some(v) = args.n_bits {
        mlp.n_bits = v;
    }
    if args.evolve_qrelu_shift {
        mlp.evolve_qrelu_shift = true;
    }
    if let Some(v) = args.seed {
        ga.seed = v;
    }
    if let Some(v) = args.pop {
        ga.population = v;
    }
    if let Some(v) = args.gens {
        ga.generations = v;
    }
    if let Some(v) = args.mutation {
        ga.mutation_prob = v;
    }
    if let Some(v) = args.crossover {
        ga.crossover_prob = v;
    }
    if let Some(v) = args.dope {
        ga.dope_fraction = v;
    }
    if let Some(v) = args.max_loss {
        ga.max_accuracy_loss = v;
    }
    if args.baseline_acc.is_some() {
        ga.baseline_accuracy = args.baseline_acc;
    }
    if ga.baseline_accuracy.is_none() {
        ga.baseline_accuracy = reference_baseline(&ds.name);
    }
    ga.threads = args.threads;
    let topology = args.topology.clone().or(file.topology).ok_or_else(|| {
        Error::Config("no topology: pass --topology or set it in --config".into())
    })?;
    mlp.validate()?;
    ga.validate()?;
    Ok(TrainPlan { topology, mlp, ga })
}

/// Writes `archive.json` and `progress.jsonl`.
pub fn cmd_train(args: &TrainArgs) -> Result<evolver::EvolveOutcome> {
    let bytes = read(&args.dataset)?;
    let ds = QuantDataset::from_json(&utf8(&args.dataset, bytes.clone())?)?;
    let plan = plan_training(args, &ds)?;
    let mut manifest = ManifestBuilder::new(
        "train",
        serde_json::json!({ "args": args, "resolved": &plan }),
    );
    manifest.seed = Some(plan.ga.seed);
    manifest.input(&args.dataset, &bytes);
    if let Some(c) = &args.config {
        let cb = read(c)?;
        manifest.input(c, &cb);
    }
    if plan.ga.baseline_accuracy.is_none() {
        eprintln!(
            "axgen: no baseline accuracy known for {:?}; accuracy is unconstrained",
            ds.name
        );
    }
    create_dir(&args.out_dir)?;

    let mut progress = Vec::new();
    let quiet = args.quiet;
    let outcome = evolver::evolve(&ds, &plan.topology, &plan.mlp, &plan.ga, |s| {
        if let Ok(line) = serde_json::to_string(s) {
            progress.extend_from_slice(line.as_bytes());
            progress.push(b'\n');
        }
        if !quiet && (s.generation % 50 == 0 || s.generation == plan.ga.generations) {
            let best = s
                .best_error
                .map_or("-".to_string(), |e| format!("{:.4}", 1.0 - e));
            let area = s.min_area.map_or("-".to_string(), |a| a.to_string());
            eprintln!(
                "gen {:>5}  archive {:>3}  best train acc {best}  min area {area}  hv {:.2}",
                s.generation, s.archive_size, s.hypervolume
            );
        }
    })?;

    manifest.write(&args.out_dir.join("progress.jsonl"), &progress)?;
    manifest.write(
        &args.out_dir.join("archive.json"),
        outcome.archive.to_json()?.as_bytes(),
    )?;
    manifest.finish(&args.out_dir)?;
    Ok(outcome)
}

/// Rows of the report: index, area, accuracies and a flag marking test
/// accuracy below the previous (smaller-area) row.
pub fn report_csv(archive: &ParetoArchive) -> String {
    let mut out = String::from(
        "index,area_fa,area_ratio,train_acc,test_acc,generation,feasible,non_monotone\n",
    );
    let mut prev: Option<f64> = None;
    for (i, e) in archive.entries.iter().enumerate() {
        let ratio = if archive.reference_area == 0 {
            0.0
        } else {
            e.area as f64 / archive.reference_area as f64
        };
        let non_monotone = prev.is_some_and(|p| e.test_accuracy < p);
        let _ = writeln!(
            out,
            "{i},{},{ratio:.6},{:.6},{:.6},{},{},{}",
            e.area, e.train_accuracy, e.test_accuracy, e.generation, e.feasible, non_monotone
        );
        prev = Some(e.test_accuracy);
    }
    out
}

pub fn report_gnuplot(archive: &ParetoArchive) -> String {
    let mut out = format!(
        "# {} {:?}\n# area_fa train_acc test_acc\n",
        archive.dataset, archive.topology
    );
    for e in &archive.entries {
        let _ = writeln!(
            out,
            "{} {:.6} {:.6}",
            e.area, e.train_accuracy, e.test_accuracy
        );
    }
    out
}

/// Writes `report.csv` (and `report.dat`); returns the CSV path.
pub fn cmd_report(args: &ReportArgs) -> Result<PathBuf> {
    let mut manifest = ManifestBuilder::new("report", serde_json::to_value(args)?);
    let bytes = read(&args.archive)?;
    manifest.input(&args.archive, &bytes);
    let archive = ParetoArchive::from_json(&utf8(&args.archive, bytes)?)?;
    let dir = default_out_dir(&args.archive, &args.out_dir);
    create_dir(&dir)?;
    let path = dir.join("report.csv");
    manifest.write(&path, report_csv(&archive).as_bytes())?;
    if args.gnuplot {
        manifest.write(&dir.join("report.dat"), report_gnuplot(&archive).as_bytes())?;
    }
    manifest.finish(&dir)?;
    Ok(path)
}

/// Entry maximizing normalized test accuracy minus normalized area.
/// Ties go to the lower index.
pub fn knee_index(entries: &[ArchiveEntry]) -> Option<usize> {
    let span = |v: &mut dyn Iterator<Item = f64>| {
        v.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
            (lo.min(x), hi.max(x))
        })
    };
    let (acc_lo, acc_hi) = span(&mut entries.iter().map(|e| e.test_accuracy));
    let (area_lo, area_hi) = span(&mut entries.iter().map(|e| e.area as f64));
    let norm = |x: f64, lo: f64, hi: f64| if hi > lo { (x - lo) / (hi - lo) } else { 0.0 };
    let mut best: Option<(usize, f64)> = None;
    for (i, e) in entries.iter().enumerate() {
        let score = norm(e.test_accuracy, acc_lo, acc_hi) - norm(e.area as f64, area_lo, area_hi);
        if best.map_or(true, |(_, s)| score > s) {
            best = Some((i, score));
        }
    }
    best.map(|(i, _)| i)
}

/// `<dataset>_<areaFA>_<acc%>` with accuracy in percent to one decimal.
pub fn emit_stem(dataset: &str, entry: &ArchiveEntry) -> String {
    format!(
        "{dataset}_{}_{:.1}",
        entry.area,
        entry.test_accuracy * 100.0
    )
}

/// Writes one `.v` and one netlist `.json` per selected entry; returns the `.v` paths.
pub fn cmd_emit(args: &EmitArgs) -> Result<Vec<PathBuf>> {
    let mut manifest = ManifestBuilder::new("emit", serde_json::to_value(args)?);
    let bytes = read(&args.archive)?;
    manifest.input(&args.archive, &bytes);
    let archive = ParetoArchive::from_json(&utf8(&args.archive, bytes)?)?;
    let chosen: Vec<usize> =
        match args.select {
            Selection::All => (0..archive.len()).collect(),
            Selection::Knee => vec![knee_index(&archive.entries)
                .ok_or_else(|| Error::Config("archive is empty".into()))?],
            Selection::Index(i) if i < archive.len() => vec![i],
            Selection::Index(i) => {
                return Err(Error::Config(format!(
                    "index {i} out of range for an archive of {} entries",
                    archive.len()
                )))
            }
        };
    let dir = default_out_dir(&args.archive, &args.out_dir);
    create_dir(&dir)?;
    let mut written = Vec::new();
    for i in chosen {
        let entry = &archive.entries[i];
        let net = netlist::build(&entry.theta)?;
        let stem = emit_stem(&archive.dataset, entry);
        let module = stem.replace('.', "p");
        let v = dir.join(format!("{stem}.v"));
        manifest.write(&v, netlist::emit_hdl(&net, &module).as_bytes())?;
        manifest.write(&dir.join(format!("{stem}.json")), net.to_json()?.as_bytes())?;
        written.push(v);
    }
    manifest.finish(&dir)?;
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qarith::ApproxMlp;

    fn entry(area: u64, acc: f64) -> ArchiveEntry {
        ArchiveEntry {
            area,
            train_error: 1.0 - acc,
            train_accuracy: acc,
            test_accuracy: acc,
            feasible: true,
            violation: 0.0,
            generation: 0,
            theta: ApproxMlp::dense(&[1, 2], &MlpConfig::default()).unwrap(),
        }
    }

    #[test]
    fn selection_parsing() {
        assert_eq!("all".parse(), Ok(Selection::All));
        assert_eq!("knee".parse(), Ok(Selection::Knee));
        assert_eq!("3".parse(), Ok(Selection::Index(3)));
        assert!("-1".parse::<Selection>().is_err());
    }

    #[test]
    fn topology_parsing() {
        assert_eq!(parse_topology("10,3,2"), Ok(vec![10, 3, 2]));
        assert!(parse_topology("10").is_err());
        assert!(parse_topology("10,0,2").is_err());
        assert!(parse_topology("a,b").is_err());
    }

    #[test]
    fn knee_matches_brute_force() {
        let entries = vec![
            entry(10, 0.60),
            entry(20, 0.90),
            entry(60, 0.95),
            entry(100, 0.96),
        ];
        // scores: 0 - 0, 0.8333 - 0.1111, 0.9722 - 0.5556, 1 - 1
        assert_eq!(knee_index(&entries), Some(1));
        assert_eq!(knee_index(&[]), None);
        assert_eq!(knee_index(&[entry(5, 0.5), entry(5, 0.5)]), Some(0));
    }

    #[test]
    fn emit_file_stem() {
        assert_eq!(
            emit_stem("breast_cancer", &entry(123, 0.9474)),
            "breast_cancer_123_94.7"
        );
    }
}
