//! A desk-scale laboratory for class-incremental learning.
//!
//! The crate trains small dense networks on MNIST (or synthetic blobs) one
//! class group at a time, rehearsing a bounded exemplar memory and distilling
//! from a frozen copy of the previous model. It then compares four heads:
//!
//! * `tc`: argmax of the trained softmax classifier,
//! * `tc-scaled`: the same probabilities rescaled per class by `||S|| / S`,
//!   where `S` accumulates the training targets (dynamic threshold moving),
//! * `nem`: nearest exemplar mean in feature space,
//! * `ncm`: nearest class mean over the full training data (oracle).
//!
//! Runnable walkthroughs live in `examples/`; the `increlab` binary wraps
//! the [`harness`] protocols.

pub mod classify;
pub mod data;
pub mod error;
pub mod harness;
pub mod losses;
pub mod matrix;
pub mod memory;
pub mod netcore;
pub mod seed;

pub use error::{Error, Result};
pub use matrix::Matrix;
