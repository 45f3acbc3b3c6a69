// SPDX-License-Identifier: Apache-2.0

//! Acceptance criteria. Runs every criterion, prints one PASS/FAIL line each
//! and exits non-zero if any failed.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use axgen::areamodel::{column_profile, dense_area, fa_count, mlp_area, ColumnProfile};
use axgen::cli::{cmd_emit, EmitArgs, Selection};
use axgen::datio::{load_csv, LabelColumn, PrepareOptions, QuantDataset};
use axgen::evolver::{
    decode, evolve, pareto_dominates, random_chromosome, EvolveOutcome, Fitness, GaConfig, Layout,
};
use axgen::netlist::{build, eval_folded, Simulator};
use axgen::qarith::{forward, neuron_preact, ApproxMlp, MlpConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn random_theta(rng: &mut ChaCha8Rng, topology: &[usize], config: &MlpConfig) -> ApproxMlp {
    let layout = Layout::new(topology, config).unwrap();
    decode(&random_chromosome(&layout, rng), &layout).unwrap()
}

fn dataset(file: &str, name: &str) -> QuantDataset {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(file);
    let raw = load_csv(path, &LabelColumn::default()).unwrap();
    QuantDataset::prepare(
        &raw,
        &PrepareOptions {
            name: name.into(),
            ..PrepareOptions::default()
        },
    )
    .unwrap()
}

fn inference_equivalence() -> Outcome {
    let cfg = MlpConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut vectors = 0u64;
    for t in 0..100 {
        let theta = random_theta(&mut rng, &[4, 3, 2], &cfg);
        let net = build(&theta).map_err(|e| e.to_string())?;
        let mut sim = Simulator::new(&net).map_err(|e| e.to_string())?;
        for _ in 0..4096 {
            let x: Vec<u32> = (0..4).map(|_| rng.gen_range(0..16)).collect();
            let want = forward(&theta, &x).unwrap();
            let got = sim.run(&x).unwrap();
            let class = axgen::qarith::argmax(&got);
            if got != want.scores || class != want.class {
                return Err(format!(
                    "theta {t}, x {x:?}: netlist {got:?}, forward {:?}",
                    want.scores
                ));
            }
            vectors += 1;
        }
    }
    Ok(format!(
        "100 models x 4096 inputs, {vectors} vectors identical"
    ))
}

fn area_structure_agreement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut total = 0u64;
    for i in 0..1000 {
        let fan_in = rng.gen_range(1..=21);
        let w_act = if rng.gen_bool(0.5) { 4 } else { 8 };
        let cfg = MlpConfig {
            w_in: w_act,
            ..MlpConfig::default()
        };
        let theta = random_theta(&mut rng, &[fan_in, 1], &cfg);
        let model = fa_count(&column_profile(&theta.layers[0][0], w_act));
        let net = build(&theta).map_err(|e| e.to_string())?;
        let nodes = net.reduction_fa_nodes() as u64;
        if model != nodes || mlp_area(&theta) != model {
            return Err(format!(
                "neuron {i} (fan-in {fan_in}, w {w_act}): model {model}, netlist {nodes}"
            ));
        }
        total += nodes;
    }
    Ok(format!(
        "1000 neurons, fan-in 1..21, {total} reduction FAs matched exactly"
    ))
}

fn single_column_reduction() -> Outcome {
    let mut mismatches = Vec::new();
    for c in 0..=64u32 {
        let got = fa_count(&ColumnProfile::new(vec![c]));
        let want = u64::from(c.saturating_sub(2));
        if got != want {
            mismatches.push(format!("[{c}]: {got} vs {want}"));
        }
    }
    if mismatches.is_empty() {
        Ok("fa_count([c]) = max(0, c - 2) for c in 0..=64".into())
    } else {
        Err(format!(
            "{} of 65 columns differ from max(0, c - 2), first: {}",
            mismatches.len(),
            mismatches[..3.min(mismatches.len())].join(", ")
        ))
    }
}

fn negation_folding() -> Outcome {
    let cfg = MlpConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut checked = 0u64;
    let mut neurons = 0;
    while neurons < 500 {
        let fan_in = rng.gen_range(1..=3);
        let theta = random_theta(&mut rng, &[fan_in, 1], &cfg);
        let n = &theta.layers[0][0];
        let negs = n.signs.iter().filter(|s| s.is_negative()).count();
        if fan_in > 1 && (negs == 0 || negs == fan_in) {
            continue;
        }
        let net = build(&theta).map_err(|e| e.to_string())?;
        let mut sim = Simulator::new(&net).map_err(|e| e.to_string())?;
        for code in 0..16u32.pow(fan_in as u32) {
            let x: Vec<u32> = (0..fan_in).map(|i| code >> (4 * i) & 15).collect();
            let exact = neuron_preact(n, &x).unwrap();
            let folded = eval_folded(n, &x, 4).unwrap();
            let hw = sim.run(&x).unwrap()[0];
            if folded != exact || hw != exact {
                return Err(format!(
                    "{n:?} x {x:?}: folded {folded}, netlist {hw}, exact {exact}"
                ));
            }
            checked += 1;
        }
        neurons += 1;
    }
    Ok(format!(
        "500 mixed-sign neurons, {checked} exhaustive inputs exact"
    ))
}

fn nsga_invariants() -> Outcome {
    let ds = dataset("breast_cancer.csv", "breast_cancer");
    let cfg = MlpConfig::default();
    let ga = GaConfig {
        population: 60,
        generations: 120,
        seed: 21,
        baseline_accuracy: Some(0.980),
        ..GaConfig::default()
    };
    let run = || evolve(&ds, &[10, 3, 2], &cfg, &ga, |_| {}).unwrap();
    let a: EvolveOutcome = run();
    let entries = &a.archive.entries;
    for x in entries {
        for y in entries {
            let fx = Fitness::new(x.train_accuracy, x.area, None);
            let fy = Fitness::new(y.train_accuracy, y.area, None);
            if !std::ptr::eq(x, y) && pareto_dominates(&fx, &fy) {
                return Err(format!(
                    "({}, {}) dominates ({}, {})",
                    x.train_error, x.area, y.train_error, y.area
                ));
            }
        }
    }
    if let Some(w) = a
        .history
        .windows(2)
        .find(|w| w[1].hypervolume < w[0].hypervolume)
    {
        return Err(format!(
            "hypervolume fell at generation {}",
            w[1].generation
        ));
    }
    let again = run();
    if a.archive.to_json().unwrap() != again.archive.to_json().unwrap() {
        return Err("same seed produced different archives".into());
    }
    Ok(format!(
        "{} archived points mutually non-dominated, hypervolume {:.1} -> {:.1} monotone, rerun byte-identical",
        entries.len(),
        a.history[0].hypervolume,
        a.history.last().unwrap().hypervolume
    ))
}

/// Per seed: best test accuracy among feasible entries no larger than
/// `max_area_ratio` of the dense area, with that entry's area.
fn desk_runs(
    ds: &QuantDataset,
    topology: &[usize],
    baseline: f64,
    max_area_ratio: Option<f64>,
) -> Vec<(u64, f64, u64, u64)> {
    let cfg = MlpConfig::default();
    let dense = dense_area(topology, &cfg).unwrap();
    (0..5u64)
        .map(|seed| {
            let ga = GaConfig {
                population: 100,
                generations: 500,
                seed,
                baseline_accuracy: Some(baseline),
                ..GaConfig::default()
            };
            let out = evolve(ds, topology, &cfg, &ga, |_| {}).unwrap();
            let best = out
                .archive
                .entries
                .iter()
                .filter(|e| e.feasible)
                .filter(|e| max_area_ratio.map_or(true, |r| e.area as f64 <= r * dense as f64))
                .max_by(|a, b| a.test_accuracy.total_cmp(&b.test_accuracy));
            (
                seed,
                best.map_or(0.0, |e| e.test_accuracy),
                best.map_or(0, |e| e.area),
                dense,
            )
        })
        .collect()
}

fn summarize(runs: &[(u64, f64, u64, u64)], target: f64) -> Outcome {
    let hits = runs.iter().filter(|r| r.1 >= target).count();
    let detail = runs
        .iter()
        .map(|(s, acc, area, dense)| format!("seed {s}: {acc:.4} @ {area}/{dense} FA"))
        .collect::<Vec<_>>()
        .join("; ");
    let line = format!("{hits}/5 seeds reach test accuracy >= {target} ({detail})");
    if hits >= 3 {
        Ok(line)
    } else {
        Err(line)
    }
}

fn breast_cancer_training() -> Outcome {
    let ds = dataset("breast_cancer.csv", "breast_cancer");
    summarize(&desk_runs(&ds, &[10, 3, 2], 0.980, Some(0.5)), 0.93)
}

fn red_wine_training() -> Outcome {
    let ds = dataset("red_wine.csv", "red_wine");
    summarize(&desk_runs(&ds, &[11, 2, 6], 0.564, None), 0.48)
}

fn emission_determinism() -> Outcome {
    let ds = dataset("breast_cancer.csv", "breast_cancer");
    let ga = GaConfig {
        population: 30,
        generations: 20,
        seed: 8,
        baseline_accuracy: Some(0.980),
        ..GaConfig::default()
    };
    let out = evolve(&ds, &[10, 3, 2], &MlpConfig::default(), &ga, |_| {}).unwrap();
    let tmp = tempfile::tempdir().unwrap();
    let archive = tmp.path().join("archive.json");
    std::fs::write(&archive, out.archive.to_json().unwrap()).unwrap();
    let emit = |dir: &str| {
        cmd_emit(&EmitArgs {
            archive: archive.clone(),
            select: Selection::All,
            out_dir: Some(tmp.path().join(dir)),
        })
        .unwrap()
    };
    let first = emit("a");
    let second = emit("b");
    let mut bytes = 0;
    for (a, b) in first.iter().zip(&second) {
        let (x, y) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
        if x != y {
            return Err(format!("{} differs between runs", a.display()));
        }
        bytes += x.len();
    }
    if first.is_empty() || first.len() != second.len() {
        return Err(format!(
            "emitted {} then {} files",
            first.len(),
            second.len()
        ));
    }
    Ok(format!(
        "{} entries emitted twice, {bytes} bytes of Verilog identical",
        first.len()
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        (
            "inference equivalence (netlist vs forward)",
            inference_equivalence,
        ),
        (
            "area model equals netlist FA count",
            area_structure_agreement,
        ),
        ("single-column reduction is c - 2", single_column_reduction),
        ("negation folding is exact", negation_folding),
        (
            "NSGA-II archive invariants and determinism",
            nsga_invariants,
        ),
        ("Breast Cancer desk-scale training", breast_cancer_training),
        ("RedWine desk-scale training", red_wine_training),
        ("emission determinism", emission_determinism),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let id = format!("C{}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| id == *f || name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("{id} PASS {name} [{secs:.1}s]: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("{id} FAIL {name} [{secs:.1}s]: {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
