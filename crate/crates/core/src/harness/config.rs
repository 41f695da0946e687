use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::losses::LossConfig;
use crate::memory::SelectionPolicy;
use crate::netcore::TrainConfig;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassifierKind {
    Tc,
    TcScaled,
    Nem,
    Ncm,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 4] = [Self::Tc, Self::TcScaled, Self::Nem, Self::Ncm];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Tc => "tc",
            Self::TcScaled => "tc-scaled",
            Self::Nem => "nem",
            Self::Ncm => "ncm",
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::param("classifiers", format!("unknown classifier `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DatasetSpec {
    /// The four standard IDX files in `dir`. `train_limit` keeps only the
    /// first N training samples.
    Mnist {
        dir: PathBuf,
        #[serde(default)]
        train_limit: Option<usize>,
    },
    /// Gaussian blobs; the first `train_per_class` samples of each class
    /// train, the rest test.
    Blobs {
        num_classes: usize,
        train_per_class: usize,
        test_per_class: usize,
        dim: usize,
        spread: f64,
    },
}

impl DatasetSpec {
    pub fn default_blobs() -> Self {
        DatasetSpec::Blobs {
            num_classes: 10,
            train_per_class: 200,
            test_per_class: 100,
            dim: 32,
            spread: 0.15,
        }
    }

    pub fn num_classes(&self) -> usize {
        match self {
            DatasetSpec::Mnist { .. } => 10,
            DatasetSpec::Blobs { num_classes, .. } => *num_classes,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Protocol {
    /// Classes arrive `increment_size` at a time.
    Incremental { increment_size: usize },
    /// Teacher on all classes, student on the rest with distillation only
    /// for `removed_classes`.
    DistillBias { removed_classes: Vec<usize> },
}

/// Everything needed to rerun an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub protocol: Protocol,
    pub dataset: DatasetSpec,
    /// Hidden layer widths between input and output.
    pub hidden_layers: Vec<usize>,
    /// Exemplar memory budget `K`.
    pub budget: usize,
    pub policy: SelectionPolicy,
    pub gamma: f64,
    pub temperature: f64,
    pub classifiers: Vec<ClassifierKind>,
    /// Schedule of every training phase. Its seed is the base of the
    /// shuffle streams; each phase mixes in its own counter.
    pub train: TrainConfig,
    /// L2-normalise features before herding and nearest-mean classification.
    #[serde(default)]
    pub normalize_features: bool,
    pub seed: u64,
    pub out_dir: PathBuf,
}

pub const DEFAULT_GAMMA: f64 = 0.5;
pub const DEFAULT_TEMPERATURE: f64 = 2.0;
pub const DEFAULT_BUDGET: usize = 2000;

impl ExperimentConfig {
    /// MNIST defaults: 256-128 hidden layers, 10 epochs at 0.1 with drops at 5
    /// and 8, momentum 0.9, budget 2000, herding, all four classifiers.
    pub fn new(protocol: Protocol, dataset: DatasetSpec, seed: u64, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            protocol,
            dataset,
            hidden_layers: vec![256, 128],
            budget: DEFAULT_BUDGET,
            policy: SelectionPolicy::Herding,
            gamma: DEFAULT_GAMMA,
            temperature: DEFAULT_TEMPERATURE,
            classifiers: ClassifierKind::ALL.to_vec(),
            train: TrainConfig::mnist(seed),
            normalize_features: false,
            seed,
            out_dir: out_dir.into(),
        }
    }

    pub fn loss(&self) -> LossConfig {
        LossConfig {
            gamma: self.gamma,
            temperature: self.temperature,
        }
    }

    pub fn num_classes(&self) -> usize {
        self.dataset.num_classes()
    }

    pub fn wants(&self, kind: ClassifierKind) -> bool {
        self.classifiers.contains(&kind)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Validation(m));
        self.loss().validate().or_else(|e| fail(e.to_string()))?;
        self.train.validate().or_else(|e| fail(e.to_string()))?;
        if self.hidden_layers.contains(&0) {
            return fail("hidden layer widths must be positive".into());
        }
        if self.classifiers.is_empty() {
            return fail("at least one classifier must be requested".into());
        }
        let kinds: BTreeSet<_> = self.classifiers.iter().collect();
        if kinds.len() != self.classifiers.len() {
            return fail("classifier list contains duplicates".into());
        }
        let k = self.num_classes();
        match &self.dataset {
            DatasetSpec::Blobs {
                num_classes,
                train_per_class,
                test_per_class,
                dim,
                spread,
            } => {
                if *num_classes < 2 || *train_per_class == 0 || *test_per_class == 0 || *dim == 0 {
                    return fail("blobs need >= 2 classes and positive sizes".into());
                }
                if !(*spread >= 0.0 && spread.is_finite()) {
                    return fail(format!("blob spread must be >= 0, got {spread}"));
                }
            }
            DatasetSpec::Mnist { train_limit, .. } => {
                if *train_limit == Some(0) {
                    return fail("train_limit must be positive".into());
                }
            }
        }
        match &self.protocol {
            Protocol::Incremental { increment_size } => {
                if *increment_size == 0 || *increment_size > k {
                    return fail(format!("increment size must lie in 1..={k}, got {increment_size}"));
                }
                if self.budget == 0 {
                    return fail("memory budget must be >= 1".into());
                }
            }
            Protocol::DistillBias { removed_classes } => {
                let set: BTreeSet<_> = removed_classes.iter().copied().collect();
                if set.is_empty() {
                    return fail("removed_classes must not be empty".into());
                }
                if set.len() != removed_classes.len() {
                    return fail("removed_classes contains duplicates".into());
                }
                if let Some(c) = set.iter().find(|&&c| c >= k) {
                    return fail(format!("removed class {c} does not exist"));
                }
                if set.len() == k {
                    return fail("cannot remove every class".into());
                }
                if self.wants(ClassifierKind::Nem) {
                    return fail("nem needs an exemplar memory; use it with the incremental protocol".into());
                }
            }
        }
        Ok(())
    }
}

/// `count` distinct classes drawn from `0..num_classes` with a seeded
/// shuffle, returned ascending.
pub fn random_classes(num_classes: usize, count: usize, seed: u64) -> Vec<usize> {
    let mut all: Vec<usize> = (0..num_classes).collect();
    all.shuffle(&mut seed::rng(seed, seed::stream::REMOVED));
    let mut picked: Vec<usize> = all.into_iter().take(count).collect();
    picked.sort_unstable();
    picked
}
