//! Herding against random exemplar selection in incremental MNIST, two
//! digits per increment with 200 stored exemplars.
//!
//! `cargo run --release --example herding_vs_random [MNIST_DIR] [SEEDS]`

use increlab::harness::{run_incremental, ClassifierKind, DatasetSpec, ExperimentConfig, Protocol};
use increlab::memory::SelectionPolicy;

fn main() -> increlab::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = args
        .next()
        .or_else(|| std::env::var("MNIST_DIR").ok())
        .unwrap_or_else(|| "data/mnist".into());
    let seeds: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(3);
    let dataset = DatasetSpec::Mnist {
        dir: dir.into(),
        train_limit: None,
    };

    println!("{:>8} {:>5} {:>8} {:>8} {:>10}", "policy", "seed", "nem", "tc", "tc-scaled");
    for policy in [SelectionPolicy::Herding, SelectionPolicy::Random] {
        let mut nem = 0.0;
        for seed in 1..=seeds {
            let out = std::env::temp_dir().join(format!("increlab-{}-{seed}", policy.as_str()));
            let cfg = ExperimentConfig {
                budget: 200,
                policy,
                ..ExperimentConfig::new(Protocol::Incremental { increment_size: 2 }, dataset.clone(), seed, out)
            };
            let r = run_incremental(&cfg)?;
            let acc = |k| r.final_accuracy(k).unwrap();
            nem += acc(ClassifierKind::Nem);
            println!(
                "{:>8} {seed:>5} {:>8.4} {:>8.4} {:>10.4}",
                policy.as_str(),
                acc(ClassifierKind::Nem),
                acc(ClassifierKind::Tc),
                acc(ClassifierKind::TcScaled)
            );
        }
        println!("{:>8} {:>5} {:>8.4}", policy.as_str(), "mean", nem / seeds as f64);
    }
    Ok(())
}
