use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::ClassifierKind;
use crate::classify::ScaleVector;
use crate::error::{Error, Result};

/// Rows are true classes, columns predicted classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn new(num_classes: usize) -> Self {
        Self {
            counts: vec![vec![0; num_classes]; num_classes],
        }
    }

    pub fn from_predictions(num_classes: usize, truth: &[usize], predicted: &[usize]) -> Result<Self> {
        if truth.len() != predicted.len() {
            return Err(Error::shape("ConfusionMatrix", truth.len(), predicted.len()));
        }
        let mut cm = Self::new(num_classes);
        for (&t, &p) in truth.iter().zip(predicted) {
            if t >= num_classes || p >= num_classes {
                return Err(Error::param("labels", format!("({t}, {p}) outside {num_classes} classes")));
            }
            cm.counts[t][p] += 1;
        }
        Ok(cm)
    }

    pub fn num_classes(&self) -> usize {
        self.counts.len()
    }

    pub fn get(&self, truth: usize, predicted: usize) -> u64 {
        self.counts[truth][predicted]
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn total(&self) -> u64 {
        self.row_sums().iter().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.counts.len()).map(|i| self.counts[i][i]).sum()
    }

    pub fn accuracy(&self) -> f64 {
        match self.total() {
            0 => 0.0,
            n => self.trace() as f64 / n as f64,
        }
    }

    /// Fraction of class `c` predicted correctly (0 for empty rows).
    pub fn recall(&self, c: usize) -> f64 {
        let n: u64 = self.counts[c].iter().sum();
        if n == 0 {
            0.0
        } else {
            self.counts[c][c] as f64 / n as f64
        }
    }

    /// Accuracy over the rows of the given classes only.
    pub fn accuracy_on(&self, classes: &[usize]) -> f64 {
        let correct: u64 = classes.iter().map(|&c| self.counts[c][c]).sum();
        let total: u64 = classes.iter().map(|&c| self.counts[c].iter().sum::<u64>()).sum();
        if total == 0 {
            0.0
        } else {
            correct as f64 / total as f64
        }
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        let mut header = vec!["true\\pred".to_string()];
        header.extend((0..self.num_classes()).map(|c| c.to_string()));
        w.write_record(&header)?;
        for (c, row) in self.counts.iter().enumerate() {
            let mut rec = vec![c.to_string()];
            rec.extend(row.iter().map(u64::to_string));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Memory usage observed right after a rebalance or a selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoryAudit {
    pub increment: usize,
    pub after: AuditPoint,
    pub stored: usize,
    pub budget: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AuditPoint {
    Rebalance,
    Selection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncrementMetrics {
    pub increment: usize,
    pub classes_seen: Vec<usize>,
    pub train_size: usize,
    pub exemplars: usize,
    pub accuracy: BTreeMap<ClassifierKind, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub classifiers: Vec<ClassifierKind>,
    pub increments: Vec<IncrementMetrics>,
    /// Confusion matrices after the final increment.
    pub confusion: BTreeMap<ClassifierKind, ConfusionMatrix>,
    /// Scale vector of the final increment.
    pub scale: Option<ScaleVector>,
    pub memory_audit: Vec<MemoryAudit>,
    /// Full-test accuracy of the teacher (distill-bias runs only).
    pub teacher_accuracy: Option<f64>,
    pub wall_time_secs: f64,
}

impl MetricsReport {
    pub fn final_accuracy(&self, kind: ClassifierKind) -> Option<f64> {
        self.increments.last().and_then(|m| m.accuracy.get(&kind).copied())
    }

    pub fn max_stored(&self) -> usize {
        self.memory_audit.iter().map(|a| a.stored).max().unwrap_or(0)
    }

    /// Writes `accuracy.csv`, `confusion_<kind>.csv` and `scale.csv`; these
    /// are byte-stable under replay. Wall time goes to `summary.json`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join("accuracy.csv");
        let mut w = csv::Writer::from_path(&path)?;
        let mut header = vec!["increment", "classes_seen", "train_size", "exemplars"];
        header.extend(self.classifiers.iter().map(|k| k.as_str()));
        w.write_record(&header)?;
        for m in &self.increments {
            let mut rec = vec![
                m.increment.to_string(),
                m.classes_seen.len().to_string(),
                m.train_size.to_string(),
                m.exemplars.to_string(),
            ];
            rec.extend(self.classifiers.iter().map(|k| m.accuracy[k].to_string()));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;

        for (kind, cm) in &self.confusion {
            cm.write_csv(&dir.join(format!("confusion_{kind}.csv")))?;
        }

        if let Some(sv) = &self.scale {
            let path = dir.join("scale.csv");
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(["class", "s", "norm_over_s"])?;
            let norm = sv.l1_norm();
            for (c, v) in sv.values.iter().enumerate() {
                let f = if *v > 0.0 { (norm / v).to_string() } else { "inf".into() };
                w.write_record([c.to_string(), v.to_string(), f])?;
            }
            w.flush().map_err(|e| Error::io(&path, e))?;
        }

        let path = dir.join("summary.json");
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
    }
}
