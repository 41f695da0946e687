//! Distillation bias and its removal by threshold moving on MNIST.
//!
//! A teacher learns all ten digits. A student sees only five of them directly
//! and learns the rest through the teacher's soft targets. The plain student
//! under-predicts the distilled digits; rescaling its outputs by the scale
//! vector recovers most of the loss. A sweep over the temperature shows the
//! scale vector flattening as targets soften.
//!
//! `cargo run --release --example threshold_moving [MNIST_DIR]`

use increlab::classify::compute_scale;
use increlab::harness::{
    execute_distill_bias, load_splits, random_classes, ClassifierKind, DatasetSpec, ExperimentConfig, Protocol,
};
use increlab::losses::LossConfig;

fn main() -> increlab::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .or_else(|| std::env::var("MNIST_DIR").ok())
        .unwrap_or_else(|| "data/mnist".into());
    let dataset = DatasetSpec::Mnist {
        dir: dir.into(),
        train_limit: None,
    };
    let seed = 1;
    let removed = random_classes(10, 5, seed);
    let cfg = ExperimentConfig {
        classifiers: vec![ClassifierKind::Tc, ClassifierKind::TcScaled, ClassifierKind::Ncm],
        ..ExperimentConfig::new(
            Protocol::DistillBias {
                removed_classes: removed.clone(),
            },
            dataset.clone(),
            seed,
            std::env::temp_dir().join("increlab-threshold-moving"),
        )
    };
    let splits = load_splits(&dataset, seed)?;
    let run = execute_distill_bias(&cfg, &splits)?;

    println!("removed from the student: {removed:?}");
    println!("teacher accuracy: {:.4}", run.report.teacher_accuracy.unwrap_or(f64::NAN));
    for k in &cfg.classifiers {
        println!("{:>10}: {:.4}", k.as_str(), run.report.final_accuracy(*k).unwrap());
    }

    println!("\nrecall per digit");
    println!("{:>5} {:>8} {:>9} {:>10}", "digit", "removed", "tc", "tc-scaled");
    let tc = &run.report.confusion[&ClassifierKind::Tc];
    let scaled = &run.report.confusion[&ClassifierKind::TcScaled];
    for c in 0..10 {
        let mark = if removed.contains(&c) { "yes" } else { "" };
        println!("{c:>5} {mark:>8} {:>9.3} {:>10.3}", tc.recall(c), scaled.recall(c));
    }

    println!("\nscale vector imbalance max(S)/min(S) against temperature");
    for t in [1.0, 2.0, 3.0, 5.0, 10.0] {
        let sv = compute_scale(&run.teacher, &run.student_train, &LossConfig::new(cfg.gamma, t)?)?;
        println!("T = {t:>4}: {:>10.2}", sv.imbalance());
    }
    Ok(())
}
