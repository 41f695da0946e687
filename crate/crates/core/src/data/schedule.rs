use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

/// Seeded class order split into consecutive groups of `increment_size`.
/// When the size does not divide the class count, the last group is short.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncrementSchedule {
    class_order: Vec<usize>,
    increment_size: usize,
}

pub fn make_schedule(num_classes: usize, increment_size: usize, seed: u64) -> Result<IncrementSchedule> {
    if increment_size == 0 || increment_size > num_classes {
        return Err(Error::param(
            "increment_size",
            format!("must lie in 1..={num_classes}, got {increment_size}"),
        ));
    }
    let mut class_order: Vec<usize> = (0..num_classes).collect();
    class_order.shuffle(&mut seed::rng(seed, seed::stream::SCHEDULE));
    Ok(IncrementSchedule {
        class_order,
        increment_size,
    })
}

impl IncrementSchedule {
    pub fn class_order(&self) -> &[usize] {
        &self.class_order
    }

    pub fn increment_size(&self) -> usize {
        self.increment_size
    }

    pub fn groups(&self) -> impl ExactSizeIterator<Item = &[usize]> + '_ {
        self.class_order.chunks(self.increment_size)
    }

    pub fn num_increments(&self) -> usize {
        self.groups().len()
    }

    /// Classes of groups `0..=increment`.
    pub fn seen_through(&self, increment: usize) -> &[usize] {
        let end = ((increment + 1) * self.increment_size).min(self.class_order.len());
        &self.class_order[..end]
    }
}
