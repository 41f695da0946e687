//! Datasets, loaders and class-incremental scheduling.
//!
//! A [`Dataset`] is a view: an index list over shared, immutable storage.
//! Subsets, exemplar sets and concatenated training sets all point back into
//! the same buffer, so building a training set never copies pixels.

mod blobs;
mod idx;
mod schedule;

use std::sync::Arc;

pub use blobs::synth_blobs;
pub use idx::{load_idx, load_mnist_dir, MnistSplits, IDX_IMAGES_MAGIC, IDX_LABELS_MAGIC};
pub use schedule::{make_schedule, IncrementSchedule};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone)]
pub struct Dataset {
    inputs: Arc<Matrix>,
    labels: Arc<[usize]>,
    index: Arc<[usize]>,
    num_classes: usize,
}

impl Dataset {
    pub fn new(inputs: Matrix, labels: Vec<usize>, num_classes: usize) -> Result<Self> {
        if labels.len() != inputs.rows() {
            return Err(Error::shape(
                "Dataset::new",
                format!("{} labels", inputs.rows()),
                labels.len(),
            ));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= num_classes) {
            return Err(Error::param(
                "labels",
                format!("label {bad} is not below num_classes = {num_classes}"),
            ));
        }
        let index = (0..labels.len()).collect();
        Ok(Self {
            inputs: Arc::new(inputs),
            labels: labels.into(),
            index,
            num_classes,
        })
    }

    fn view(&self, index: Vec<usize>) -> Self {
        Self {
            inputs: Arc::clone(&self.inputs),
            labels: Arc::clone(&self.labels),
            index: index.into(),
            num_classes: self.num_classes,
        }
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.inputs.cols()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[self.index[i]]
    }

    pub fn labels(&self) -> Vec<usize> {
        self.index.iter().map(|&s| self.labels[s]).collect()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.inputs.row(self.index[i])
    }

    /// Position of sample `i` in the underlying storage.
    pub fn source_index(&self, i: usize) -> usize {
        self.index[i]
    }

    pub fn shares_storage(&self, other: &Dataset) -> bool {
        Arc::ptr_eq(&self.inputs, &other.inputs)
    }

    /// Copies the inputs at the given positions into a batch matrix.
    pub fn gather(&self, positions: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(positions.len() * self.dim());
        for &p in positions {
            data.extend_from_slice(self.row(p));
        }
        Matrix::from_vec_unchecked(positions.len(), self.dim(), data)
    }

    /// Materialises every input row.
    pub fn inputs(&self) -> Matrix {
        let all: Vec<usize> = (0..self.len()).collect();
        self.gather(&all)
    }

    /// One-hot label rows.
    pub fn one_hot(&self, positions: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(positions.len(), self.num_classes);
        for (r, &p) in positions.iter().enumerate() {
            m.set(r, self.label(p), 1.0);
        }
        m
    }

    /// View of the samples at the given positions, in that order.
    pub fn select(&self, positions: &[usize]) -> Self {
        self.view(positions.iter().map(|&p| self.index[p]).collect())
    }

    /// Samples whose label is in `classes`; label ids are preserved.
    pub fn subset(&self, classes: impl IntoIterator<Item = usize>) -> Self {
        let mut keep = vec![false; self.num_classes];
        for c in classes {
            if c < self.num_classes {
                keep[c] = true;
            }
        }
        self.view(
            self.index
                .iter()
                .copied()
                .filter(|&s| keep[self.labels[s]])
                .collect(),
        )
    }

    /// Positions of every sample of class `c`, in order.
    pub fn positions_of(&self, c: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.label(i) == c).collect()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_classes];
        for &s in self.index.iter() {
            counts[self.labels[s]] += 1;
        }
        counts
    }

    /// Classes with at least one sample, ascending.
    pub fn present_classes(&self) -> Vec<usize> {
        self.class_counts()
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .map(|(c, _)| c)
            .collect()
    }

    /// Appends `other`'s samples after `self`'s. Views over different storage
    /// are materialised into fresh storage.
    pub fn concat(&self, other: &Dataset) -> Result<Self> {
        if self.num_classes != other.num_classes {
            return Err(Error::Consistency(format!(
                "cannot concatenate datasets with {} and {} classes",
                self.num_classes, other.num_classes
            )));
        }
        if self.shares_storage(other) {
            let index = self.index.iter().chain(other.index.iter()).copied().collect();
            return Ok(self.view(index));
        }
        if self.dim() != other.dim() && !self.is_empty() && !other.is_empty() {
            return Err(Error::shape("Dataset::concat", self.dim(), other.dim()));
        }
        let inputs = self.inputs().vstack(&other.inputs())?;
        let mut labels = self.labels();
        labels.extend(other.labels());
        Dataset::new(inputs, labels, self.num_classes)
    }
}
