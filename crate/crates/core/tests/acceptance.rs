//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.
//!
//! The MNIST criteria read the IDX files from `$MNIST_DIR`, falling back to
//! `data/mnist` at the workspace root. Missing data is a failure, not a skip.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use increlab::classify::{compute_scale, scaled_predict, ScaleVector};
use increlab::data::synth_blobs;
use increlab::harness::{
    execute_distill_bias, load_splits, random_classes, replay, run, run_incremental, AuditPoint, ClassifierKind,
    DatasetSpec, ExperimentConfig, MetricsReport, Protocol, ReplayOptions, METADATA_FILE,
};
use increlab::losses::{joint_loss, soft_targets, LossConfig, TargetBundle};
use increlab::memory::{herd_select, SelectionPolicy};
use increlab::netcore::{softmax_t, Network};
use increlab::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEEDS: [u64; 3] = [1, 2, 3];

// Criterion 1
const FD_STEP: f64 = 1e-5;
const FD_MAX_REL: f64 = 1e-4;
/// Denominator floor of the relative error, so that gradients that are zero
/// on both sides (dead ReLUs) compare as equal.
const FD_REL_FLOOR: f64 = 1e-6;
const FD_BUDGET: Duration = Duration::from_secs(10);
// Criterion 2
const HERDING_SETS: usize = 500;
const HERDING_BUDGET: Duration = Duration::from_secs(5);
// Criterion 3
const ADDITIVITY_TOL: f64 = 1e-9;
const ARGMAX_ROWS: usize = 1000;
// Criterion 4
const TEACHER_MIN_ACC: f64 = 0.97;
const TC_MIN_DROP: f64 = 0.10;
const SCALED_MIN_GAIN: f64 = 0.05;
const SCALED_NCM_MAX_GAP: f64 = 0.05;
const REMOVED_COUNT: usize = 5;
const DISTILL_BUDGET: Duration = Duration::from_secs(300);
// Criteria 6 to 8
const INCREMENT_SIZE: usize = 2;
const SMALL_BUDGET: usize = 200;
const PARITY_MAX_GAP: f64 = 0.02;
const PARITY_BUDGET: Duration = Duration::from_secs(600);
const NEM_TC_MAX_GAP: f64 = 0.02;

struct Outcome {
    name: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
}

fn mnist_dir() -> PathBuf {
    std::env::var_os("MNIST_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/mnist"))
}

fn mnist() -> DatasetSpec {
    DatasetSpec::Mnist {
        dir: mnist_dir(),
        train_limit: None,
    }
}

fn pts(x: f64) -> String {
    format!("{:.2}", 100.0 * x)
}

fn check<F>(name: &'static str, f: F) -> Outcome
where
    F: FnOnce() -> Result<(bool, String), String>,
{
    let t0 = Instant::now();
    let (pass, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
    let out = Outcome {
        name,
        pass,
        detail,
        elapsed: t0.elapsed(),
    };
    println!(
        "{} {} ({:.1}s): {}",
        if out.pass { "PASS" } else { "FAIL" },
        out.name,
        out.elapsed.as_secs_f64(),
        out.detail
    );
    out
}

fn s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

// ---------------------------------------------------------------- criterion 1

fn one_hot(labels: &[usize], k: usize) -> Matrix {
    let mut m = Matrix::zeros(labels.len(), k);
    for (r, &y) in labels.iter().enumerate() {
        m.row_mut(r)[y] = 1.0;
    }
    m
}

fn gradient_check() -> Result<(bool, String), String> {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 6;
    let x = Matrix::from_vec(n, 64, (0..n * 64).map(|_| rng.random_range(-1.0..1.0)).collect()).map_err(s)?;
    let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..4)).collect();
    let teacher_logits =
        Matrix::from_vec(n, 4, (0..n * 4).map(|_| rng.random_range(-3.0..3.0)).collect()).map_err(s)?;
    let mut worst = 0.0f64;
    let mut checked = 0usize;
    for t in [1.0, 2.0, 5.0] {
        let cfg = LossConfig::new(0.5, t).map_err(s)?;
        let targets = TargetBundle::new(one_hot(&labels, 4), Some(soft_targets(&teacher_logits, t).map_err(s)?))
            .map_err(s)?;
        let mut net = Network::new(&[64, 16, 4], 7).map_err(s)?;
        let (logits, _) = net.forward(&x).map_err(s)?;
        let (_, dlogits) = joint_loss(&logits, &targets, &cfg).map_err(s)?;
        net.backward(&dlogits).map_err(s)?;
        let loss_at = |net: &Network| -> Result<f64, String> {
            let logits = net.logits(&x).map_err(s)?;
            Ok(joint_loss(&logits, &targets, &cfg).map_err(s)?.0)
        };
        for li in 0..net.layers().len() {
            let (rows, cols) = net.layers()[li].weights().shape();
            for r in 0..rows {
                for c in 0..cols {
                    let analytic = net.layers()[li].grad_weights().row(r)[c];
                    let orig = net.layers()[li].weights().row(r)[c];
                    net.layers_mut()[li].weights_mut().row_mut(r)[c] = orig + FD_STEP;
                    let up = loss_at(&net)?;
                    net.layers_mut()[li].weights_mut().row_mut(r)[c] = orig - FD_STEP;
                    let down = loss_at(&net)?;
                    net.layers_mut()[li].weights_mut().row_mut(r)[c] = orig;
                    let numeric = (up - down) / (2.0 * FD_STEP);
                    worst = worst.max((analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(FD_REL_FLOOR));
                    checked += 1;
                }
            }
            for b in 0..net.layers()[li].biases().len() {
                let analytic = net.layers()[li].grad_biases()[b];
                let orig = net.layers()[li].biases()[b];
                net.layers_mut()[li].biases_mut()[b] = orig + FD_STEP;
                let up = loss_at(&net)?;
                net.layers_mut()[li].biases_mut()[b] = orig - FD_STEP;
                let down = loss_at(&net)?;
                net.layers_mut()[li].biases_mut()[b] = orig;
                let numeric = (up - down) / (2.0 * FD_STEP);
                worst = worst.max((analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(FD_REL_FLOOR));
                checked += 1;
            }
        }
    }
    let elapsed = t0.elapsed();
    Ok((
        worst <= FD_MAX_REL && elapsed < FD_BUDGET,
        format!("{checked} parameter checks over T in {{1,2,5}}, worst rel err {worst:.2e} (limit {FD_MAX_REL:.0e})"),
    ))
}

// ---------------------------------------------------------------- criterion 2

/// Greedy herding in exact integer arithmetic: the candidate minimising
/// ||n * (sum + x) - |set| * total||^2, lowest index on ties.
fn exact_greedy(rows: &[Vec<i64>], k: usize) -> Vec<usize> {
    let n = rows.len() as i64;
    let d = rows[0].len();
    let total: Vec<i64> = (0..d).map(|c| rows.iter().map(|r| r[c]).sum()).collect();
    let mut chosen: Vec<usize> = Vec::new();
    while chosen.len() < k.min(rows.len()) {
        let size = chosen.len() as i64 + 1;
        let mut best: Option<(usize, i64)> = None;
        for j in 0..rows.len() {
            if chosen.contains(&j) {
                continue;
            }
            let dist: i64 = (0..d)
                .map(|c| {
                    let s: i64 = chosen.iter().map(|&i| rows[i][c]).sum::<i64>() + rows[j][c];
                    let diff = n * s - size * total[c];
                    diff * diff
                })
                .sum();
            if best.is_none_or(|(_, b)| dist < b) {
                best = Some((j, dist));
            }
        }
        chosen.push(best.unwrap().0);
    }
    chosen
}

/// Same greedy rule evaluated on real-valued means recomputed from scratch.
fn float_greedy(rows: &[Vec<f64>], k: usize) -> Vec<usize> {
    let n = rows.len();
    let d = rows[0].len();
    let mu: Vec<f64> = (0..d).map(|c| rows.iter().map(|r| r[c]).sum::<f64>() / n as f64).collect();
    let mut chosen: Vec<usize> = Vec::new();
    while chosen.len() < k.min(n) {
        let mut best = (usize::MAX, f64::INFINITY);
        for j in (0..n).filter(|j| !chosen.contains(j)) {
            let members: Vec<usize> = chosen.iter().copied().chain([j]).collect();
            let dist: f64 = (0..d)
                .map(|c| {
                    let m = members.iter().map(|&i| rows[i][c]).sum::<f64>() / members.len() as f64;
                    (m - mu[c]).powi(2)
                })
                .sum();
            if dist < best.1 {
                best = (j, dist);
            }
        }
        chosen.push(best.0);
    }
    chosen
}

fn herding_oracle() -> Result<(bool, String), String> {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let mut mismatches = 0;
    for set in 0..HERDING_SETS {
        let n = rng.random_range(1..=8);
        let d = rng.random_range(1..=4);
        let k = rng.random_range(1..=n + 1);
        // Half the sets live on a small integer grid, where ties are common.
        let (got, want) = if set % 2 == 0 {
            let rows: Vec<Vec<i64>> = (0..n).map(|_| (0..d).map(|_| rng.random_range(-3..=3)).collect()).collect();
            let as_f: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect();
            (herd_select(&Matrix::from_rows(&as_f).map_err(s)?, k).map_err(s)?, exact_greedy(&rows, k))
        } else {
            let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
            (herd_select(&Matrix::from_rows(&rows).map_err(s)?, k).map_err(s)?, float_greedy(&rows, k))
        };
        if got != want {
            mismatches += 1;
        }
    }
    let elapsed = t0.elapsed();
    Ok((
        mismatches == 0 && elapsed < HERDING_BUDGET,
        format!("{mismatches} mismatches over {HERDING_SETS} feature sets"),
    ))
}

// ---------------------------------------------------------------- criterion 3

fn scale_algebra() -> Result<(bool, String), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let data = synth_blobs(6, 40, 8, 0.3, 5).map_err(s)?;
    let teacher = Network::new(&[8, 12, 6], 9).map_err(s)?.snapshot();
    let mut worst = 0.0f64;
    for trial in 0..20 {
        let cfg = LossConfig::new(rng.random_range(0.0..=1.0), rng.random_range(0.5..6.0)).map_err(s)?;
        let parts = 2 + trial % 3;
        let assign: Vec<usize> = (0..data.len()).map(|_| rng.random_range(0..parts)).collect();
        let whole = compute_scale(&teacher, &data, &cfg).map_err(s)?;
        let mut acc: Option<ScaleVector> = None;
        for p in 0..parts {
            let pos: Vec<usize> = (0..data.len()).filter(|&i| assign[i] == p).collect();
            if pos.is_empty() {
                continue;
            }
            let part = compute_scale(&teacher, &data.select(&pos), &cfg).map_err(s)?;
            acc = Some(match acc {
                None => part,
                Some(a) => a.add(&part).map_err(s)?,
            });
        }
        let acc = acc.expect("dataset is nonempty");
        for (a, b) in acc.values.iter().zip(&whole.values) {
            worst = worst.max((a - b).abs());
        }
    }

    let k = 7;
    let logits = Matrix::from_vec(ARGMAX_ROWS, k, (0..ARGMAX_ROWS * k).map(|_| rng.random_range(-4.0..4.0)).collect())
        .map_err(s)?;
    let probs = softmax_t(&logits, 1.0).map_err(s)?;
    let plain = probs.argmax_rows();
    let cfg = LossConfig::new(0.5, 2.0).map_err(s)?;
    let (_, uniform) = scaled_predict(&probs, &ScaleVector::new(vec![3.7; k], &cfg)).map_err(s)?;
    let base: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..50.0)).collect();
    let (_, skewed) = scaled_predict(&probs, &ScaleVector::new(base.clone(), &cfg)).map_err(s)?;
    let mut rescale_ok = true;
    for c in [1e-3, 0.5, 2.0, 1e4] {
        let (_, again) = scaled_predict(&probs, &ScaleVector::new(base.iter().map(|v| v * c).collect(), &cfg)).map_err(s)?;
        rescale_ok &= again == skewed;
    }
    let pass = worst <= ADDITIVITY_TOL && uniform == plain && rescale_ok;
    Ok((
        pass,
        format!(
            "additivity max err {worst:.1e}; uniform S keeps argmax: {}; rescaled S keeps labels: {rescale_ok}",
            uniform == plain
        ),
    ))
}

// ---------------------------------------------------------------- criteria 4-5

struct DistillSeed {
    teacher: f64,
    tc: f64,
    scaled: f64,
    ncm: f64,
    imbalance_t2: f64,
    imbalance_t5: f64,
}

fn distill_runs() -> Result<Vec<DistillSeed>, String> {
    let splits = load_splits(&mnist(), 0).map_err(s)?;
    let mut out = Vec::new();
    for seed in SEEDS {
        let removed = random_classes(10, REMOVED_COUNT, seed);
        let cfg = ExperimentConfig {
            classifiers: vec![ClassifierKind::Tc, ClassifierKind::TcScaled, ClassifierKind::Ncm],
            gamma: 0.5,
            temperature: 2.0,
            ..ExperimentConfig::new(Protocol::DistillBias { removed_classes: removed.clone() }, mnist(), seed, "unused")
        };
        cfg.validate().map_err(s)?;
        let r = execute_distill_bias(&cfg, &splits).map_err(s)?;
        let acc = |k| r.report.final_accuracy(k).unwrap();
        let t2 = r.report.scale.as_ref().ok_or("missing scale vector")?.imbalance();
        let t5 = compute_scale(&r.teacher, &r.student_train, &LossConfig::new(0.5, 5.0).map_err(s)?)
            .map_err(s)?
            .imbalance();
        let row = DistillSeed {
            teacher: r.report.teacher_accuracy.unwrap(),
            tc: acc(ClassifierKind::Tc),
            scaled: acc(ClassifierKind::TcScaled),
            ncm: acc(ClassifierKind::Ncm),
            imbalance_t2: t2,
            imbalance_t5: t5,
        };
        println!(
            "  distill-bias seed {seed} removed {removed:?}: teacher {} tc {} tc-scaled {} ncm {} | max/min S: T=2 {:.2}, T=5 {:.2}",
            pts(row.teacher),
            pts(row.tc),
            pts(row.scaled),
            pts(row.ncm),
            row.imbalance_t2,
            row.imbalance_t5
        );
        out.push(row);
    }
    Ok(out)
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = v.collect();
    v.iter().sum::<f64>() / v.len() as f64
}

fn distill_bias(rows: &[DistillSeed], elapsed: Duration) -> (bool, String) {
    let teacher = mean(rows.iter().map(|r| r.teacher));
    let tc = mean(rows.iter().map(|r| r.tc));
    let scaled = mean(rows.iter().map(|r| r.scaled));
    let ncm = mean(rows.iter().map(|r| r.ncm));
    let teacher_ok = rows.iter().all(|r| r.teacher >= TEACHER_MIN_ACC);
    let a = teacher - tc >= TC_MIN_DROP;
    let b = scaled - tc >= SCALED_MIN_GAIN;
    let c = (scaled - ncm).abs() <= SCALED_NCM_MAX_GAP;
    (
        teacher_ok && a && b && c && elapsed < DISTILL_BUDGET,
        format!(
            "3 seeds in {:.0}s; means: teacher {} tc {} tc-scaled {} ncm {}; teachers >= 97: {teacher_ok}; (a) drop {} (b) gain {} (c) |scaled-ncm| {}",
            elapsed.as_secs_f64(),
            pts(teacher),
            pts(tc),
            pts(scaled),
            pts(ncm),
            pts(teacher - tc),
            pts(scaled - tc),
            pts((scaled - ncm).abs())
        ),
    )
}

fn bias_monotone(rows: &[DistillSeed]) -> (bool, String) {
    let pass = rows.iter().all(|r| r.imbalance_t5 <= r.imbalance_t2);
    let pairs: Vec<String> = rows
        .iter()
        .map(|r| format!("{:.2} -> {:.2}", r.imbalance_t2, r.imbalance_t5))
        .collect();
    (pass, format!("max/min S from T=2 to T=5 per seed: {}", pairs.join(", ")))
}

// ---------------------------------------------------------------- criteria 6-9

fn incremental_cfg(seed: u64, policy: SelectionPolicy, temperature: f64, out: PathBuf) -> ExperimentConfig {
    ExperimentConfig {
        budget: SMALL_BUDGET,
        policy,
        temperature,
        ..ExperimentConfig::new(Protocol::Incremental { increment_size: INCREMENT_SIZE }, mnist(), seed, out)
    }
}

fn parity_runs(root: &std::path::Path) -> Result<Vec<(SelectionPolicy, u64, MetricsReport)>, String> {
    let mut out = Vec::new();
    for policy in [SelectionPolicy::Herding, SelectionPolicy::Random] {
        for seed in SEEDS {
            let dir = root.join(format!("{}-{seed}", policy.as_str()));
            let report = run_incremental(&incremental_cfg(seed, policy, 2.0, dir)).map_err(s)?;
            println!(
                "  incremental {} seed {seed}: final nem {} tc {} | {} increments",
                policy.as_str(),
                pts(report.final_accuracy(ClassifierKind::Nem).unwrap()),
                pts(report.final_accuracy(ClassifierKind::Tc).unwrap()),
                report.increments.len()
            );
            out.push((policy, seed, report));
        }
    }
    Ok(out)
}

fn parity(runs: &[(SelectionPolicy, u64, MetricsReport)], elapsed: Duration) -> (bool, String) {
    let avg = |p: SelectionPolicy, k: ClassifierKind| {
        mean(runs.iter().filter(|r| r.0 == p).map(|r| r.2.final_accuracy(k).unwrap()))
    };
    let herd = avg(SelectionPolicy::Herding, ClassifierKind::Nem);
    let rand = avg(SelectionPolicy::Random, ClassifierKind::Nem);
    let five_increments = runs.iter().all(|r| r.2.increments.len() == 5);
    let tc_gap = avg(SelectionPolicy::Herding, ClassifierKind::Tc) - avg(SelectionPolicy::Random, ClassifierKind::Tc);
    (
        (herd - rand).abs() <= PARITY_MAX_GAP && five_increments && elapsed < PARITY_BUDGET,
        format!(
            "6 runs in {:.0}s; mean final nem: herding {} random {} (|diff| {}, limit {}); tc diff for reference {}",
            elapsed.as_secs_f64(),
            pts(herd),
            pts(rand),
            pts((herd - rand).abs()),
            pts(PARITY_MAX_GAP),
            pts(tc_gap)
        ),
    )
}

fn memory_bound(runs: &[(SelectionPolicy, u64, MetricsReport)]) -> (bool, String) {
    let mut rebalances = 0;
    let mut worst = 0;
    let mut pass = true;
    for (_, _, r) in runs {
        for a in &r.memory_audit {
            worst = worst.max(a.stored);
            pass &= a.stored <= SMALL_BUDGET && a.budget == SMALL_BUDGET;
            if a.after == AuditPoint::Rebalance {
                rebalances += 1;
            }
        }
    }
    pass &= rebalances > 0;
    (
        pass,
        format!("{rebalances} rebalances audited, max stored {worst} (K = {SMALL_BUDGET})"),
    )
}

fn temperature_gap(root: &std::path::Path) -> Result<(bool, String), String> {
    let mut gaps = Vec::new();
    for seed in SEEDS {
        let report = run_incremental(&incremental_cfg(seed, SelectionPolicy::Herding, 3.0, root.join(format!("t3-{seed}"))))
            .map_err(s)?;
        let tc = report.final_accuracy(ClassifierKind::Tc).unwrap();
        let nem = report.final_accuracy(ClassifierKind::Nem).unwrap();
        println!("  incremental T=3 seed {seed}: final tc {} nem {}", pts(tc), pts(nem));
        gaps.push((tc - nem).abs());
    }
    let pass = gaps.iter().all(|&g| g <= NEM_TC_MAX_GAP);
    let text: Vec<String> = gaps.iter().map(|&g| pts(g)).collect();
    Ok((pass, format!("|tc - nem| per seed: {} (limit {})", text.join(", "), pts(NEM_TC_MAX_GAP))))
}

fn outputs_identical(a: &std::path::Path, b: &std::path::Path) -> Result<Vec<String>, String> {
    let mut names: Vec<String> = std::fs::read_dir(a)
        .map_err(s)?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n == "accuracy.csv" || n.starts_with("confusion_"))
        .collect();
    names.sort();
    if !names.iter().any(|n| n.starts_with("confusion_")) {
        return Err(format!("no confusion files in {}", a.display()));
    }
    let mut differing = Vec::new();
    for n in &names {
        if std::fs::read(a.join(n)).map_err(s)? != std::fs::read(b.join(n)).map_err(s)? {
            differing.push(n.clone());
        }
    }
    Ok(differing)
}

fn replay_determinism(root: &std::path::Path, mnist_run: &std::path::Path) -> Result<(bool, String), String> {
    let blobs_dir = root.join("blobs-distill");
    let blobs = ExperimentConfig {
        classifiers: vec![ClassifierKind::Tc, ClassifierKind::TcScaled, ClassifierKind::Ncm],
        train: increlab::netcore::TrainConfig { batch_size: 32, ..increlab::netcore::TrainConfig::mnist(4) },
        hidden_layers: vec![32],
        ..ExperimentConfig::new(
            Protocol::DistillBias { removed_classes: vec![2, 5, 7] },
            DatasetSpec::default_blobs(),
            4,
            &blobs_dir,
        )
    };
    run(&blobs).map_err(s)?;
    let mut checked = Vec::new();
    let mut differing = Vec::new();
    for dir in [blobs_dir.as_path(), mnist_run] {
        let out = dir.join("replayed");
        replay(
            dir.join(METADATA_FILE),
            &ReplayOptions {
                out_dir: Some(out.clone()),
                mnist_dir: None,
            },
        )
        .map_err(s)?;
        differing.extend(outputs_identical(dir, &out)?);
        checked.push(dir.file_name().unwrap().to_string_lossy().into_owned());
    }
    Ok((
        differing.is_empty(),
        format!("replayed {}; differing files: {differing:?}", checked.join(" and ")),
    ))
}

fn main() -> ExitCode {
    let root = tempfile::tempdir().expect("temp dir");
    let mut results = vec![
        check("1 gradient correctness", gradient_check),
        check("2 herding oracle equivalence", herding_oracle),
        check("3 scale-vector algebra", scale_algebra),
    ];

    let t0 = Instant::now();
    let distill = distill_runs();
    let elapsed = t0.elapsed();
    match &distill {
        Ok(rows) => {
            results.push(check("4 distill-bias reproduction", || Ok(distill_bias(rows, elapsed))));
            results.push(check("5 bias monotone in temperature", || Ok(bias_monotone(rows))));
        }
        Err(e) => {
            results.push(check("4 distill-bias reproduction", || Err(e.clone())));
            results.push(check("5 bias monotone in temperature", || Err(e.clone())));
        }
    }

    let t0 = Instant::now();
    let parity_result = parity_runs(root.path());
    let elapsed = t0.elapsed();
    match &parity_result {
        Ok(runs) => {
            results.push(check("6 herding vs random parity", || Ok(parity(runs, elapsed))));
            results.push(check("7 temperature closes tc-nem gap", || temperature_gap(root.path())));
            results.push(check("8 memory bound", || Ok(memory_bound(runs))));
        }
        Err(e) => {
            results.push(check("6 herding vs random parity", || Err(e.clone())));
            results.push(check("7 temperature closes tc-nem gap", || temperature_gap(root.path())));
            results.push(check("8 memory bound", || Err(e.clone())));
        }
    }
    let first_run = root.path().join(format!("herding-{}", SEEDS[0]));
    results.push(check("9 replay determinism", || replay_determinism(root.path(), &first_run)));

    let failed: Vec<&str> = results.iter().filter(|r| !r.pass).map(|r| r.name).collect();
    println!("acceptance: {} of {} criteria passed", results.len() - failed.len(), results.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed: {}", failed.join("; "));
        ExitCode::FAILURE
    }
}

