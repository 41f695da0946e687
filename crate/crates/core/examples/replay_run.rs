//! Run an experiment, replay it from its metadata record and compare the
//! metric files byte for byte.
//!
//! `cargo run --release --example replay_run`

use increlab::harness::{replay, run, ClassifierKind, DatasetSpec, ExperimentConfig, Protocol, ReplayOptions, METADATA_FILE};
use increlab::netcore::TrainConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("increlab-replay-demo");
    let cfg = ExperimentConfig {
        classifiers: vec![ClassifierKind::Tc, ClassifierKind::TcScaled, ClassifierKind::Ncm],
        hidden_layers: vec![32],
        train: TrainConfig {
            batch_size: 32,
            ..TrainConfig::mnist(9)
        },
        ..ExperimentConfig::new(
            Protocol::DistillBias {
                removed_classes: vec![0, 3, 4],
            },
            DatasetSpec::default_blobs(),
            9,
            &dir,
        )
    };
    run(&cfg)?;
    println!("{}", std::fs::read_to_string(dir.join(METADATA_FILE))?);

    let again = dir.join("replay");
    replay(dir.join(METADATA_FILE), &ReplayOptions::default())?;
    let mut names: Vec<_> = std::fs::read_dir(&dir)
        ?
        .filter_map(|e| e.ok().map(|e| e.file_name().to_string_lossy().into_owned()))
        .filter(|n| n.ends_with(".csv"))
        .collect();
    names.sort();
    for n in names {
        let same = std::fs::read(dir.join(&n)).ok() == std::fs::read(again.join(&n)).ok();
        println!("{n:<24} {}", if same { "identical" } else { "DIFFERS" });
    }
    Ok(())
}
