//! Bounded exemplar memory.
//!
//! The store keeps, per class, an ordered list of sample positions into the
//! full training set. Order is selection order, so shrinking the per-class
//! quota `K / m` after new classes arrive keeps the best-ranked prefix.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionPolicy {
    Herding,
    Random,
}

impl SelectionPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            SelectionPolicy::Herding => "herding",
            SelectionPolicy::Random => "random",
        }
    }
}

impl std::str::FromStr for SelectionPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "herding" => Ok(Self::Herding),
            "random" => Ok(Self::Random),
            other => Err(Error::param("policy", format!("unknown policy `{other}`"))),
        }
    }
}

/// Greedy herding without replacement.
///
/// Each step adds the unselected row that brings the running mean of the
/// selection closest (Euclidean) to the mean of all rows. Ties go to the
/// lowest index. Returns `min(k, n)` indices in selection order.
pub fn herd_select(features: &Matrix, k: usize) -> Result<Vec<usize>> {
    let (n, d) = features.shape();
    if n == 0 {
        return Err(Error::param("features", "herding needs at least one row"));
    }
    if k == 0 {
        return Err(Error::param("k", "must be >= 1"));
    }
    // Distances are compared as ||n (s + x) - count * total||^2, the squared
    // mean distance scaled by (n * count)^2. Integer inputs stay exact.
    let total = features.column_sums();
    let nf = n as f64;
    let steps = k.min(n);
    let mut taken = vec![false; n];
    let mut sum = vec![0.0; d];
    let mut chosen = Vec::with_capacity(steps);
    for step in 0..steps {
        let count = (step + 1) as f64;
        let mut best: Option<(usize, f64)> = None;
        for (j, row) in features.iter_rows().enumerate() {
            if taken[j] {
                continue;
            }
            let dist: f64 = sum
                .iter()
                .zip(row)
                .zip(&total)
                .map(|((s, x), t)| {
                    let diff = nf * (s + x) - count * t;
                    diff * diff
                })
                .sum();
            if best.is_none_or(|(_, b)| dist < b) {
                best = Some((j, dist));
            }
        }
        let (j, _) = best.expect("an unselected row remains while step < n");
        taken[j] = true;
        for (s, x) in sum.iter_mut().zip(features.row(j)) {
            *s += x;
        }
        chosen.push(j);
    }
    Ok(chosen)
}

/// Seeded uniform sample of `min(k, n)` distinct indices from `0..n`.
pub fn random_select(n: usize, k: usize, seed: u64) -> Result<Vec<usize>> {
    if k == 0 {
        return Err(Error::param("k", "must be >= 1"));
    }
    let mut rng = seed::rng(seed, seed::stream::SELECTION);
    Ok(index::sample(&mut rng, n, k.min(n)).into_vec())
}

/// Per-class exemplar lists under a global budget `K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExemplarStore {
    budget: usize,
    policy: SelectionPolicy,
    per_class: BTreeMap<usize, Vec<usize>>,
    quota: Option<usize>,
}

impl ExemplarStore {
    pub fn new(budget: usize, policy: SelectionPolicy) -> Self {
        Self {
            budget,
            policy,
            per_class: BTreeMap::new(),
            quota: None,
        }
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn policy(&self) -> SelectionPolicy {
        self.policy
    }

    /// Quota set by the most recent rebalance.
    pub fn quota(&self) -> Option<usize> {
        self.quota
    }

    /// Per-class quota `floor(K / m)` for `m` seen classes.
    pub fn quota_for(&self, seen_classes: usize) -> usize {
        self.budget / seen_classes.max(1)
    }

    pub fn total(&self) -> usize {
        self.per_class.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.per_class.is_empty()
    }

    pub fn classes(&self) -> impl Iterator<Item = usize> + '_ {
        self.per_class.keys().copied()
    }

    pub fn exemplars(&self, class: usize) -> Option<&[usize]> {
        self.per_class.get(&class).map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &[usize])> + '_ {
        self.per_class.iter().map(|(&c, v)| (c, v.as_slice()))
    }

    /// Stores `indices` (positions in the full training set) for `class`,
    /// replacing anything stored before.
    pub fn insert(&mut self, class: usize, indices: Vec<usize>) -> Result<()> {
        let mut seen = indices.clone();
        seen.sort_unstable();
        if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Consistency(format!(
                "duplicate exemplar index {} for class {class}",
                w[0]
            )));
        }
        self.per_class.insert(class, indices);
        Ok(())
    }

    /// Picks exemplars for `class` from its candidate positions using the
    /// store's policy. `features` holds one row per candidate and is only
    /// read under herding.
    pub fn select_for_class(
        &mut self,
        class: usize,
        candidates: &[usize],
        features: &Matrix,
        k: usize,
        seed: u64,
    ) -> Result<()> {
        if candidates.is_empty() {
            return Err(Error::param(
                "candidates",
                format!("class {class} has no samples to select from"),
            ));
        }
        let picks = match self.policy {
            SelectionPolicy::Herding => {
                if features.rows() != candidates.len() {
                    return Err(Error::shape(
                        "ExemplarStore::select_for_class",
                        format!("{} feature rows", candidates.len()),
                        features.rows(),
                    ));
                }
                herd_select(features, k)?
            }
            SelectionPolicy::Random => random_select(candidates.len(), k, seed)?,
        };
        self.insert(class, picks.into_iter().map(|p| candidates[p]).collect())
    }

    /// Truncates every class to its first `floor(K / m)` exemplars.
    pub fn rebalance(&mut self, seen_classes: usize) -> Result<()> {
        if seen_classes == 0 {
            return Err(Error::param("m", "must be >= 1"));
        }
        let quota = self.quota_for(seen_classes);
        for v in self.per_class.values_mut() {
            v.truncate(quota);
        }
        self.quota = Some(quota);
        Ok(())
    }

    /// Exemplars as a view over `full`.
    pub fn as_dataset(&self, full: &Dataset) -> Result<Dataset> {
        let mut positions = Vec::with_capacity(self.total());
        for (&class, idx) in &self.per_class {
            for &p in idx {
                if p >= full.len() {
                    return Err(Error::Consistency(format!(
                        "exemplar index {p} of class {class} is outside a dataset of {} samples",
                        full.len()
                    )));
                }
                if full.label(p) != class {
                    return Err(Error::Consistency(format!(
                        "exemplar index {p} is stored under class {class} but labelled {}",
                        full.label(p)
                    )));
                }
                positions.push(p);
            }
        }
        Ok(full.select(&positions))
    }

    /// Flat-file form: a header comment, then one line per class holding the
    /// class id, the current quota and the stored indices in selection order.
    pub fn dump(&self) -> String {
        let quota = self.quota.unwrap_or(self.budget);
        let mut out = format!(
            "# exemplar-store budget={} policy={}\n",
            self.budget,
            self.policy.as_str()
        );
        for (c, idx) in &self.per_class {
            write!(out, "{c} {quota}").expect("writing to a String");
            for i in idx {
                write!(out, " {i}").expect("writing to a String");
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let bad = |detail: String| Error::Format {
            file: origin.to_path_buf(),
            field: "exemplar store",
            detail,
        };
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| bad("empty file".into()))?;
        let mut budget = None;
        let mut policy = None;
        for tok in header.trim_start_matches('#').split_whitespace() {
            if let Some(v) = tok.strip_prefix("budget=") {
                budget = Some(v.parse().map_err(|_| bad(format!("bad budget `{v}`")))?);
            } else if let Some(v) = tok.strip_prefix("policy=") {
                policy = Some(v.parse::<SelectionPolicy>().map_err(|e| bad(e.to_string()))?);
            }
        }
        let mut store = Self::new(
            budget.ok_or_else(|| bad("header lacks budget".into()))?,
            policy.ok_or_else(|| bad("header lacks policy".into()))?,
        );
        for (n, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let nums: Vec<usize> = line
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| bad(format!("line {}: bad number `{t}`", n + 2))))
                .collect::<Result<_>>()?;
            let [class, quota, rest @ ..] = nums.as_slice() else {
                return Err(bad(format!("line {}: needs class and quota", n + 2)));
            };
            store.quota = Some(*quota);
            store.insert(*class, rest.to_vec())?;
        }
        Ok(store)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.dump()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }
}

/// Training set for an increment: every sample of the new classes followed by
/// the stored exemplars of the old ones.
pub fn build_training_set(store: &ExemplarStore, new_data: &Dataset, full: &Dataset) -> Result<Dataset> {
    if store.is_empty() {
        return Ok(new_data.clone());
    }
    new_data.concat(&store.as_dataset(full)?)
}
