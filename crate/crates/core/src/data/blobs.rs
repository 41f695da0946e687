use rand::Rng as _;
use rand_distr::StandardNormal;

use super::Dataset;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::seed;

/// Isotropic Gaussian blobs, one per class, with seeded means drawn uniformly
/// from `[0, 1]^dim`. Samples are stored class by class.
///
/// Values are not clipped to `[0, 1]`.
pub fn synth_blobs(
    num_classes: usize,
    per_class: usize,
    dim: usize,
    spread: f64,
    seed: u64,
) -> Result<Dataset> {
    if num_classes == 0 || per_class == 0 || dim == 0 {
        return Err(Error::param("synth_blobs", "all counts must be >= 1"));
    }
    if !(spread >= 0.0 && spread.is_finite()) {
        return Err(Error::param("spread", format!("must be >= 0, got {spread}")));
    }
    let mut rng = seed::rng(seed, seed::stream::BLOBS);
    let means: Vec<Vec<f64>> = (0..num_classes)
        .map(|_| (0..dim).map(|_| rng.random::<f64>()).collect())
        .collect();
    let mut data = Vec::with_capacity(num_classes * per_class * dim);
    let mut labels = Vec::with_capacity(num_classes * per_class);
    for (c, mean) in means.iter().enumerate() {
        for _ in 0..per_class {
            data.extend(mean.iter().map(|m| {
                let z: f64 = rng.sample(StandardNormal);
                m + spread * z
            }));
            labels.push(c);
        }
    }
    Dataset::new(
        Matrix::from_vec_unchecked(num_classes * per_class, dim, data),
        labels,
        num_classes,
    )
}
