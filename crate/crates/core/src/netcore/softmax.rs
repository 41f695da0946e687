use crate::error::{Error, Result};
use crate::matrix::Matrix;

fn check_temperature(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::param("temperature", format!("must be > 0, got {t}")));
    }
    Ok(())
}

/// Row-wise softmax of `logits / t`.
pub fn softmax_t(logits: &Matrix, t: f64) -> Result<Matrix> {
    check_temperature(t)?;
    let mut out = logits.clone();
    for r in 0..out.rows() {
        let row = out.row_mut(r);
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for v in row.iter_mut() {
            *v = ((*v - max) / t).exp();
            sum += *v;
        }
        row.iter_mut().for_each(|v| *v /= sum);
    }
    Ok(out)
}

/// Row-wise log-softmax of `logits / t`, computed without forming the probabilities.
pub fn log_softmax_t(logits: &Matrix, t: f64) -> Result<Matrix> {
    check_temperature(t)?;
    let mut out = logits.clone();
    for r in 0..out.rows() {
        let row = out.row_mut(r);
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        row.iter_mut().for_each(|v| *v = (*v - max) / t);
        let lse = row.iter().map(|v| v.exp()).sum::<f64>().ln();
        row.iter_mut().for_each(|v| *v -= lse);
    }
    Ok(out)
}
