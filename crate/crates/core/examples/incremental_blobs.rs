//! Class-incremental learning on synthetic blobs, two classes at a time,
//! with every classifier head reported after each increment.
//!
//! `cargo run --release --example incremental_blobs`

use increlab::harness::{run_incremental, ClassifierKind, DatasetSpec, ExperimentConfig, Protocol};
use increlab::netcore::TrainConfig;

fn main() -> increlab::Result<()> {
    let out = std::env::temp_dir().join("increlab-incremental-blobs");
    let cfg = ExperimentConfig {
        budget: 100,
        hidden_layers: vec![64],
        train: TrainConfig {
            batch_size: 32,
            ..TrainConfig::mnist(5)
        },
        ..ExperimentConfig::new(Protocol::Incremental { increment_size: 2 }, DatasetSpec::default_blobs(), 5, &out)
    };
    let report = run_incremental(&cfg)?;

    print!("{:>9} {:>7} {:>8}", "increment", "classes", "stored");
    for k in ClassifierKind::ALL {
        print!(" {:>9}", k.as_str());
    }
    println!();
    for m in &report.increments {
        print!("{:>9} {:>7} {:>8}", m.increment, m.classes_seen.len(), m.exemplars);
        for k in ClassifierKind::ALL {
            print!(" {:>9.3}", m.accuracy[&k]);
        }
        println!();
    }
    println!("largest memory footprint: {} of {}", report.max_stored(), cfg.budget);
    println!("outputs in {}", out.display());
    Ok(())
}
