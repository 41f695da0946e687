//! Classification heads and the threshold-moving scale vector.
//!
//! The scale vector accumulates the training targets of the joint loss,
//!
//! ```text
//! S = sum_i (1 - gamma) * y_i + T^2 * gamma * softmax(teacher(x_i) / T)
//! ```
//!
//! and the bias-corrected prediction is `G(x) * ||S||_1 / S`, i.e. each class
//! score divided by its expected share of the targets.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::losses::LossConfig;
use crate::matrix::{argmax, Matrix};
use crate::netcore::{predict_dataset, softmax_t, FrozenNetwork, Network};

/// Per-class target mass, plus the loss settings it was accumulated under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleVector {
    pub values: Vec<f64>,
    pub gamma: f64,
    pub temperature: f64,
}

impl ScaleVector {
    pub fn new(values: Vec<f64>, cfg: &LossConfig) -> Self {
        Self {
            values,
            gamma: cfg.gamma,
            temperature: cfg.temperature,
        }
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum()
    }

    /// `||S||_1 / S` per class.
    pub fn factors(&self) -> Result<Vec<f64>> {
        if let Some((c, v)) = self.values.iter().enumerate().find(|(_, v)| **v <= 0.0) {
            return Err(Error::param(
                "scale_vector",
                format!("entry {c} is {v}; every entry must be positive"),
            ));
        }
        let norm = self.l1_norm();
        Ok(self.values.iter().map(|v| norm / v).collect())
    }

    /// `max(S) / min(S)`; 1 means no bias to correct.
    pub fn imbalance(&self) -> f64 {
        let max = self.values.iter().copied().fold(f64::MIN, f64::max);
        let min = self.values.iter().copied().fold(f64::MAX, f64::min);
        max / min
    }

    /// Restriction to the given classes, in that order.
    pub fn restrict(&self, classes: &[usize]) -> ScaleVector {
        ScaleVector {
            values: classes.iter().map(|&c| self.values[c]).collect(),
            gamma: self.gamma,
            temperature: self.temperature,
        }
    }

    pub fn add(&self, other: &ScaleVector) -> Result<ScaleVector> {
        if self.values.len() != other.values.len() {
            return Err(Error::shape("ScaleVector::add", self.values.len(), other.values.len()));
        }
        Ok(ScaleVector {
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
            gamma: self.gamma,
            temperature: self.temperature,
        })
    }
}

/// Accumulates the scale vector from labels and already-tempered teacher rows.
/// `soft` may be `None` only when `gamma == 0`.
pub fn scale_from_targets(labels: &[usize], soft: Option<&Matrix>, num_classes: usize, cfg: &LossConfig) -> Result<ScaleVector> {
    cfg.validate()?;
    let mut s = vec![0.0; num_classes];
    let hard_w = 1.0 - cfg.gamma;
    if hard_w > 0.0 {
        for &y in labels {
            if y >= num_classes {
                return Err(Error::param("labels", format!("label {y} out of range")));
            }
            s[y] += hard_w;
        }
    }
    if cfg.gamma > 0.0 {
        let soft = soft.ok_or_else(|| Error::param("soft", "gamma > 0 needs teacher outputs"))?;
        if soft.shape() != (labels.len(), num_classes) {
            return Err(Error::shape(
                "scale_from_targets",
                format!("{}x{num_classes}", labels.len()),
                format!("{:?}", soft.shape()),
            ));
        }
        let w = cfg.temperature * cfg.temperature * cfg.gamma;
        for (acc, col) in s.iter_mut().zip(soft.column_sums()) {
            *acc += w * col;
        }
    }
    Ok(ScaleVector::new(s, cfg))
}

/// Accumulates the scale vector over every sample of `data`, evaluating the
/// teacher at the configured temperature.
pub fn compute_scale(teacher: &FrozenNetwork, data: &Dataset, cfg: &LossConfig) -> Result<ScaleVector> {
    if data.is_empty() {
        return Err(Error::param("data", "scale vector needs a nonempty dataset"));
    }
    if teacher.num_classes() != data.num_classes() {
        return Err(Error::shape(
            "compute_scale",
            format!("teacher with {} outputs", data.num_classes()),
            teacher.num_classes(),
        ));
    }
    let soft = if cfg.gamma > 0.0 {
        let (logits, _) = predict_dataset(teacher.network(), data)?;
        Some(softmax_t(&logits, cfg.temperature)?)
    } else {
        None
    };
    scale_from_targets(&data.labels(), soft.as_ref(), data.num_classes(), cfg)
}

/// Rescales probability rows by `||S||_1 / S` and takes the per-row argmax.
pub fn scaled_predict(probs: &Matrix, sv: &ScaleVector) -> Result<(Matrix, Vec<usize>)> {
    if probs.cols() != sv.values.len() {
        return Err(Error::shape("scaled_predict", sv.values.len(), probs.cols()));
    }
    let factors = sv.factors()?;
    let mut scaled = probs.clone();
    for r in 0..scaled.rows() {
        for (v, f) in scaled.row_mut(r).iter_mut().zip(&factors) {
            *v *= f;
        }
    }
    let labels = scaled.argmax_rows();
    Ok((scaled, labels))
}

/// Argmax of the logits; ties go to the lowest class id.
pub fn tc_predict(net: &Network, batch: &Matrix) -> Result<Vec<usize>> {
    Ok(net.logits(batch)?.argmax_rows())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeanSource {
    Exemplar,
    FullData,
}

/// Class means in feature space.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassMeans {
    pub means: BTreeMap<usize, Vec<f64>>,
    pub source: MeanSource,
}

/// Scales each row to unit Euclidean length; zero rows are left alone.
pub fn l2_normalize_rows(m: &Matrix) -> Matrix {
    let mut out = m.clone();
    for r in 0..out.rows() {
        let row = out.row_mut(r);
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            row.iter_mut().for_each(|v| *v /= norm);
        }
    }
    out
}

impl ClassMeans {
    /// Means of `features` rows grouped by `labels`, restricted to `classes`.
    pub fn from_features(features: &Matrix, labels: &[usize], classes: &[usize], source: MeanSource) -> Result<Self> {
        if labels.len() != features.rows() {
            return Err(Error::shape("ClassMeans::from_features", features.rows(), labels.len()));
        }
        let mut means = BTreeMap::new();
        for &c in classes {
            let mut sum = vec![0.0; features.cols()];
            let mut count = 0usize;
            for (row, _) in features.iter_rows().zip(labels).filter(|(_, &l)| l == c) {
                for (s, v) in sum.iter_mut().zip(row) {
                    *s += v;
                }
                count += 1;
            }
            if count == 0 {
                return Err(Error::param("classes", format!("class {c} has no samples")));
            }
            sum.iter_mut().for_each(|s| *s /= count as f64);
            means.insert(c, sum);
        }
        Ok(Self { means, source })
    }

    pub fn dim(&self) -> Option<usize> {
        self.means.values().next().map(Vec::len)
    }
}

/// Means of the network's penultimate features for every class in `classes`.
pub fn class_means(
    net: &Network,
    data: &Dataset,
    classes: &[usize],
    source: MeanSource,
    normalize: bool,
) -> Result<ClassMeans> {
    let (_, mut features) = predict_dataset(net, data)?;
    if normalize {
        features = l2_normalize_rows(&features);
    }
    ClassMeans::from_features(&features, &data.labels(), classes, source)
}

/// Nearest mean by Euclidean distance; ties go to the lowest class id.
pub fn nearest_mean_predict(means: &ClassMeans, features: &Matrix) -> Result<Vec<usize>> {
    let dim = means
        .dim()
        .ok_or_else(|| Error::State("no class means registered".into()))?;
    if features.cols() != dim {
        return Err(Error::shape("nearest_mean_predict", dim, features.cols()));
    }
    let classes: Vec<usize> = means.means.keys().copied().collect();
    let centres: Vec<&Vec<f64>> = means.means.values().collect();
    Ok(features
        .iter_rows()
        .map(|row| {
            let neg_dist: Vec<f64> = centres
                .iter()
                .map(|m| -row.iter().zip(m.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
                .collect();
            classes[argmax(&neg_dist)]
        })
        .collect())
}
