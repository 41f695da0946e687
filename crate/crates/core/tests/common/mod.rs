#![allow(dead_code)]

use std::path::PathBuf;

use increlab::harness::{ClassifierKind, DatasetSpec, ExperimentConfig, Protocol};
use increlab::netcore::TrainConfig;

/// `$MNIST_DIR` or `data/mnist` at the workspace root.
pub fn mnist_dir() -> PathBuf {
    std::env::var_os("MNIST_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/mnist"))
}

/// A fast blobs configuration: one hidden layer, small batches.
pub fn blobs_config(protocol: Protocol, seed: u64, out: impl Into<PathBuf>) -> ExperimentConfig {
    let classifiers = match protocol {
        Protocol::Incremental { .. } => ClassifierKind::ALL.to_vec(),
        Protocol::DistillBias { .. } => vec![ClassifierKind::Tc, ClassifierKind::TcScaled, ClassifierKind::Ncm],
    };
    ExperimentConfig {
        hidden_layers: vec![32],
        budget: 100,
        classifiers,
        train: TrainConfig {
            batch_size: 32,
            ..TrainConfig::mnist(seed)
        },
        ..ExperimentConfig::new(protocol, DatasetSpec::default_blobs(), seed, out)
    }
}
