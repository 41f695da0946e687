use rand::seq::SliceRandom;

use super::{Network, TrainConfig};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::seed;

/// Minibatch momentum-SGD over `data`.
///
/// `loss` receives the batch logits and the batch positions within `data`,
/// and returns the batch loss with its gradient with respect to the logits.
/// Batch order is reshuffled each epoch from `cfg.seed`. Returns the mean
/// batch loss of every epoch.
pub fn fit<F>(net: &mut Network, cfg: &TrainConfig, data: &Dataset, mut loss: F) -> Result<Vec<f64>>
where
    F: FnMut(&Matrix, &[usize]) -> Result<(f64, Matrix)>,
{
    cfg.validate()?;
    if data.is_empty() {
        return Err(Error::param("data", "cannot train on an empty dataset"));
    }
    let mut rng = seed::rng(cfg.seed, seed::stream::SHUFFLE);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut history = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let lr = cfg.lr_at(epoch);
        let mut total = 0.0;
        let mut batches = 0usize;
        for batch in order.chunks(cfg.batch_size) {
            let (logits, _) = net.forward(&data.gather(batch))?;
            let (value, dlogits) = loss(&logits, batch)?;
            if !value.is_finite() {
                return Err(Error::Diverged { epoch, loss: value });
            }
            net.backward(&dlogits)?;
            net.sgd_step(lr, cfg.momentum);
            total += value;
            batches += 1;
        }
        let mean = total / batches as f64;
        log::debug!("epoch {epoch}: lr {lr}, loss {mean:.5}");
        history.push(mean);
    }
    Ok(history)
}

/// Runs inference over a whole dataset in chunks, returning `(logits, features)`.
pub fn predict_dataset(net: &Network, data: &Dataset) -> Result<(Matrix, Matrix)> {
    const CHUNK: usize = 2048;
    let mut logits = Vec::with_capacity(data.len() * net.num_classes());
    let mut features = Vec::with_capacity(data.len() * net.feature_dim());
    let positions: Vec<usize> = (0..data.len()).collect();
    for chunk in positions.chunks(CHUNK) {
        let (l, f) = net.predict(&data.gather(chunk))?;
        logits.extend_from_slice(l.data());
        features.extend_from_slice(f.data());
    }
    Ok((
        Matrix::from_vec_unchecked(data.len(), net.num_classes(), logits),
        Matrix::from_vec_unchecked(data.len(), net.feature_dim(), features),
    ))
}
