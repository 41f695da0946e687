//! Joint classification and distillation objective.
//!
//! ```text
//! L = (1 - gamma) * CE(softmax(z), y) + T^2 * gamma * CE(softmax(z / T), q)
//! ```
//!
//! `y` are one-hot labels, `q` the teacher's tempered probabilities. The `T^2`
//! factor keeps the distillation gradient on the same scale as the
//! classification gradient as `T` grows. Losses are averaged over rows.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::netcore::{log_softmax_t, softmax_t};

/// Probabilities are floored here before taking logs.
pub const LOG_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossConfig {
    pub gamma: f64,
    pub temperature: f64,
}

impl LossConfig {
    pub fn new(gamma: f64, temperature: f64) -> Result<Self> {
        let cfg = Self { gamma, temperature };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Plain cross-entropy against the labels.
    pub fn classification_only() -> Self {
        Self {
            gamma: 0.0,
            temperature: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::param(
                "gamma",
                format!("must lie in [0, 1], got {}", self.gamma),
            ));
        }
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(Error::param(
                "temperature",
                format!("must be > 0, got {}", self.temperature),
            ));
        }
        Ok(())
    }
}

/// Hard one-hot labels plus, when distilling, the teacher's tempered outputs.
#[derive(Debug, Clone)]
pub struct TargetBundle {
    hard: Matrix,
    soft: Option<Matrix>,
}

impl TargetBundle {
    pub fn new(hard: Matrix, soft: Option<Matrix>) -> Result<Self> {
        for (r, row) in hard.iter_rows().enumerate() {
            let ones = row.iter().filter(|&&v| v == 1.0).count();
            let zeros = row.iter().filter(|&&v| v == 0.0).count();
            if ones != 1 || ones + zeros != row.len() {
                return Err(Error::param("hard_targets", format!("row {r} is not one-hot")));
            }
        }
        if let Some(soft) = &soft {
            if soft.shape() != hard.shape() {
                return Err(Error::shape(
                    "TargetBundle::new",
                    format!("{:?}", hard.shape()),
                    format!("{:?}", soft.shape()),
                ));
            }
            for (r, row) in soft.iter_rows().enumerate() {
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > 1e-9 || row.iter().any(|&v| v < 0.0) {
                    return Err(Error::param(
                        "soft_targets",
                        format!("row {r} is not a probability distribution (sum {sum})"),
                    ));
                }
            }
        }
        Ok(Self { hard, soft })
    }

    pub fn hard(&self) -> &Matrix {
        &self.hard
    }

    pub fn soft(&self) -> Option<&Matrix> {
        self.soft.as_ref()
    }
}

fn check_same_shape(op: &'static str, a: &Matrix, b: &Matrix) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::shape(
            op,
            format!("{:?}", a.shape()),
            format!("{:?}", b.shape()),
        ));
    }
    Ok(())
}

/// Mean over rows of `-sum_c target * ln(pred)`.
///
/// Entries of `pred` must be positive; values below [`LOG_FLOOR`] are floored.
pub fn cross_entropy(pred: &Matrix, target: &Matrix) -> Result<f64> {
    check_same_shape("cross_entropy", target, pred)?;
    if let Some(bad) = pred.data().iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::Numeric(format!(
            "cross_entropy needs strictly positive predictions, found {bad}"
        )));
    }
    if pred.rows() == 0 {
        return Ok(0.0);
    }
    let total: f64 = pred
        .data()
        .iter()
        .zip(target.data())
        .map(|(&p, &t)| -t * p.max(LOG_FLOOR).ln())
        .sum();
    Ok(total / pred.rows() as f64)
}

/// Mean row entropy of a probability matrix.
pub fn mean_entropy(probs: &Matrix) -> f64 {
    if probs.rows() == 0 {
        return 0.0;
    }
    let total: f64 = probs
        .data()
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum();
    total / probs.rows() as f64
}

/// Cross-entropy against `target` computed from log-probabilities, with the
/// same floor as [`cross_entropy`].
fn ce_from_log(log_probs: &Matrix, target: &Matrix) -> f64 {
    let floor = LOG_FLOOR.ln();
    let total: f64 = log_probs
        .data()
        .iter()
        .zip(target.data())
        .map(|(&lp, &t)| -t * lp.max(floor))
        .sum();
    total / log_probs.rows() as f64
}

/// Value and logit gradient of the joint objective.
///
/// The gradient is exact for the unfloored objective; the two differ only
/// where a probability falls below [`LOG_FLOOR`].
pub fn joint_loss(logits: &Matrix, targets: &TargetBundle, cfg: &LossConfig) -> Result<(f64, Matrix)> {
    cfg.validate()?;
    check_same_shape("joint_loss", targets.hard(), logits)?;
    let n = logits.rows();
    if n == 0 {
        return Ok((0.0, Matrix::zeros(0, logits.cols())));
    }
    let LossConfig {
        gamma,
        temperature: t,
    } = *cfg;
    let inv_n = 1.0 / n as f64;

    let mut loss = 0.0;
    let mut grad = Matrix::zeros(n, logits.cols());
    if gamma < 1.0 {
        let log_p = log_softmax_t(logits, 1.0)?;
        loss += (1.0 - gamma) * ce_from_log(&log_p, targets.hard());
        let k = (1.0 - gamma) * inv_n;
        for ((g, &lp), &y) in grad
            .data_mut()
            .iter_mut()
            .zip(log_p.data())
            .zip(targets.hard().data())
        {
            *g += k * (lp.exp() - y);
        }
    }
    if gamma > 0.0 {
        let soft = targets.soft().ok_or_else(|| {
            Error::param("targets", "gamma > 0 requires teacher soft targets")
        })?;
        let log_pt = log_softmax_t(logits, t)?;
        loss += t * t * gamma * ce_from_log(&log_pt, soft);
        // d/dz of T^2 * CE(softmax(z/T), q) is T * (softmax(z/T) - q).
        let k = t * gamma * inv_n;
        for ((g, &lp), &q) in grad.data_mut().iter_mut().zip(log_pt.data()).zip(soft.data()) {
            *g += k * (lp.exp() - q);
        }
    }
    Ok((loss, grad))
}

/// Teacher targets at temperature `t`.
pub fn soft_targets(teacher_logits: &Matrix, t: f64) -> Result<Matrix> {
    softmax_t(teacher_logits, t)
}
