//! Central finite differences against backprop for the joint loss.
//!
//! `cargo run --release --example gradient_check`

use increlab::losses::{joint_loss, soft_targets, LossConfig, TargetBundle};
use increlab::netcore::Network;
use increlab::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> increlab::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let (n, d, k) = (5, 12, 3);
    let x = Matrix::from_vec(n, d, (0..n * d).map(|_| rng.random_range(-1.0..1.0)).collect())?;
    let mut hard = Matrix::zeros(n, k);
    for r in 0..n {
        hard.row_mut(r)[rng.random_range(0..k)] = 1.0;
    }
    let teacher = Matrix::from_vec(n, k, (0..n * k).map(|_| rng.random_range(-2.0..2.0)).collect())?;
    let h = 1e-5;

    for t in [1.0, 2.0, 5.0] {
        let cfg = LossConfig::new(0.5, t)?;
        let targets = TargetBundle::new(hard.clone(), Some(soft_targets(&teacher, t)?))?;
        let mut net = Network::new(&[d, 8, k], 3)?;
        let (logits, _) = net.forward(&x)?;
        let (loss, dlogits) = joint_loss(&logits, &targets, &cfg)?;
        net.backward(&dlogits)?;

        let mut worst = 0.0f64;
        for li in 0..net.layers().len() {
            let cols = net.layers()[li].weights().cols();
            for r in 0..net.layers()[li].weights().rows() {
                for c in 0..cols {
                    let analytic = net.layers()[li].grad_weights().row(r)[c];
                    let w0 = net.layers()[li].weights().row(r)[c];
                    let mut at = |w: f64| -> increlab::Result<f64> {
                        net.layers_mut()[li].weights_mut().row_mut(r)[c] = w;
                        Ok(joint_loss(&net.logits(&x)?, &targets, &cfg)?.0)
                    };
                    let numeric = (at(w0 + h)? - at(w0 - h)?) / (2.0 * h);
                    at(w0)?;
                    worst = worst.max((analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-6));
                }
            }
        }
        println!("T = {t}: loss {loss:.5}, worst relative error over weights {worst:.2e}");
    }
    Ok(())
}
