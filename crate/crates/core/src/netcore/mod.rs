//! Deterministic feedforward network: forward and backward passes,
//! tempered softmax, momentum SGD with a stepped schedule, and frozen
//! teacher snapshots.

mod config;
mod network;
mod softmax;
mod train;

pub use config::{LrDrop, TrainConfig};
pub use network::{Activation, DenseLayer, FrozenNetwork, Network};
pub use softmax::{log_softmax_t, softmax_t};
pub use train::{fit, predict_dataset};
