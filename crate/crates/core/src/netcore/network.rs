use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{gemm, Matrix};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
}

impl Activation {
    fn apply(self, m: &mut Matrix) {
        match self {
            Activation::Relu => m.map_inplace(|x| x.max(0.0)),
        }
    }

    /// Multiplies `grad` by the derivative, evaluated from the post-activation values.
    fn backprop(self, grad: &mut Matrix, activated: &Matrix) {
        match self {
            Activation::Relu => {
                for (g, &a) in grad.data_mut().iter_mut().zip(activated.data()) {
                    if a <= 0.0 {
                        *g = 0.0;
                    }
                }
            }
        }
    }
}

/// Fully connected layer, `y = x W^T + b`, with gradient and momentum buffers.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    weights: Matrix,
    biases: Vec<f64>,
    grad_weights: Matrix,
    grad_biases: Vec<f64>,
    momentum_weights: Matrix,
    momentum_biases: Vec<f64>,
}

impl DenseLayer {
    /// Glorot-uniform weights, zero biases.
    pub fn glorot(inputs: usize, outputs: usize, rng: &mut seed::Rng) -> Self {
        let limit = (6.0 / (inputs + outputs) as f64).sqrt();
        let data = (0..inputs * outputs)
            .map(|_| rng.random_range(-limit..=limit))
            .collect();
        Self::from_parts(
            Matrix::from_vec_unchecked(outputs, inputs, data),
            vec![0.0; outputs],
        )
        .expect("shapes are consistent by construction")
    }

    /// Builds a layer from an `out x in` weight matrix and `out` biases.
    pub fn from_parts(weights: Matrix, biases: Vec<f64>) -> Result<Self> {
        if biases.len() != weights.rows() {
            return Err(Error::shape(
                "DenseLayer::from_parts",
                format!("{} biases", weights.rows()),
                biases.len(),
            ));
        }
        let (o, i) = weights.shape();
        Ok(Self {
            grad_weights: Matrix::zeros(o, i),
            momentum_weights: Matrix::zeros(o, i),
            grad_biases: vec![0.0; o],
            momentum_biases: vec![0.0; o],
            weights,
            biases,
        })
    }

    pub fn inputs(&self) -> usize {
        self.weights.cols()
    }

    pub fn outputs(&self) -> usize {
        self.weights.rows()
    }

    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    pub fn grad_weights(&self) -> &Matrix {
        &self.grad_weights
    }

    pub fn grad_biases(&self) -> &[f64] {
        &self.grad_biases
    }

    pub fn weights_mut(&mut self) -> &mut Matrix {
        &mut self.weights
    }

    pub fn biases_mut(&mut self) -> &mut [f64] {
        &mut self.biases
    }

    fn apply(&self, x: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(x.rows(), self.outputs());
        gemm(1.0, x, false, &self.weights, true, 0.0, &mut out);
        out.add_row_vector(&self.biases)
            .expect("bias length equals output width");
        out
    }

    fn zero_grad(&mut self) {
        self.grad_weights.fill(0.0);
        self.grad_biases.iter_mut().for_each(|g| *g = 0.0);
    }
}

/// Activations kept from the most recent training forward pass.
#[derive(Debug, Clone)]
struct ForwardCache {
    /// `acts[i]` is the input fed to layer `i`.
    acts: Vec<Matrix>,
}

/// Feedforward network emitting raw logits.
///
/// Every layer but the last is followed by the hidden activation. The input of
/// the last layer is the feature embedding used by herding and the
/// nearest-mean classifiers.
#[derive(Debug, Clone)]
pub struct Network {
    layers: Vec<DenseLayer>,
    hidden_activation: Activation,
    cache: Option<ForwardCache>,
}

impl PartialEq for Network {
    fn eq(&self, other: &Self) -> bool {
        self.layers == other.layers && self.hidden_activation == other.hidden_activation
    }
}

impl Network {
    /// Seeded Glorot-initialised network with the given layer widths,
    /// e.g. `[784, 256, 128, 10]`.
    pub fn new(dims: &[usize], seed: u64) -> Result<Self> {
        if dims.len() < 2 || dims.contains(&0) {
            return Err(Error::param(
                "dims",
                format!("need at least two positive widths, got {dims:?}"),
            ));
        }
        let mut rng = seed::rng(seed, seed::stream::INIT);
        let layers = dims
            .windows(2)
            .map(|w| DenseLayer::glorot(w[0], w[1], &mut rng))
            .collect();
        Ok(Self {
            layers,
            hidden_activation: Activation::Relu,
            cache: None,
        })
    }

    pub fn from_layers(layers: Vec<DenseLayer>, hidden_activation: Activation) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::param("layers", "network needs at least one layer"));
        }
        for (i, w) in layers.windows(2).enumerate() {
            if w[0].outputs() != w[1].inputs() {
                return Err(Error::shape(
                    "Network::from_layers",
                    format!("layer {} input width {}", i + 1, w[0].outputs()),
                    w[1].inputs(),
                ));
            }
        }
        Ok(Self {
            layers,
            hidden_activation,
            cache: None,
        })
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [DenseLayer] {
        &mut self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs()
    }

    pub fn num_classes(&self) -> usize {
        self.layers[self.layers.len() - 1].outputs()
    }

    pub fn feature_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].inputs()
    }

    pub fn num_parameters(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.outputs() * (l.inputs() + 1))
            .sum()
    }

    fn check_input(&self, batch: &Matrix) -> Result<()> {
        if batch.cols() != self.input_dim() {
            return Err(Error::shape(
                "Network::forward",
                format!("{} input columns", self.input_dim()),
                batch.cols(),
            ));
        }
        Ok(())
    }

    /// Runs the layers, returning the activations fed to every layer plus the logits.
    fn run(&self, batch: &Matrix) -> (Vec<Matrix>, Matrix) {
        let mut acts = Vec::with_capacity(self.layers.len());
        acts.push(batch.clone());
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            let mut z = layer.apply(&acts[i]);
            if i == last {
                return (acts, z);
            }
            self.hidden_activation.apply(&mut z);
            acts.push(z);
        }
        unreachable!("network has at least one layer")
    }

    /// Training forward pass: returns `(logits, features)` and caches the
    /// activations for [`Network::backward`].
    pub fn forward(&mut self, batch: &Matrix) -> Result<(Matrix, Matrix)> {
        self.check_input(batch)?;
        let (acts, logits) = self.run(batch);
        let features = acts[acts.len() - 1].clone();
        self.cache = Some(ForwardCache { acts });
        Ok((logits, features))
    }

    /// Inference pass; leaves any training cache untouched.
    pub fn predict(&self, batch: &Matrix) -> Result<(Matrix, Matrix)> {
        self.check_input(batch)?;
        let (mut acts, logits) = self.run(batch);
        Ok((logits, acts.pop().expect("at least the input")))
    }

    pub fn logits(&self, batch: &Matrix) -> Result<Matrix> {
        self.predict(batch).map(|(l, _)| l)
    }

    /// Backpropagates `dlogits` through the cached forward pass, overwriting
    /// every layer's gradient buffers. The gradient with respect to the input
    /// is not computed.
    pub fn backward(&mut self, dlogits: &Matrix) -> Result<()> {
        let cache = self
            .cache
            .take()
            .ok_or_else(|| Error::State("backward called without a prior forward pass".into()))?;
        let batch = cache.acts[0].rows();
        if dlogits.shape() != (batch, self.num_classes()) {
            let shape = dlogits.shape();
            self.cache = Some(cache);
            return Err(Error::shape(
                "Network::backward",
                format!("{batch}x{}", self.num_classes()),
                format!("{}x{}", shape.0, shape.1),
            ));
        }
        let act = self.hidden_activation;
        let mut delta = dlogits.clone();
        for i in (0..self.layers.len()).rev() {
            let input = &cache.acts[i];
            let layer = &mut self.layers[i];
            gemm(1.0, &delta, true, input, false, 0.0, &mut layer.grad_weights);
            layer.grad_biases = delta.column_sums();
            if i > 0 {
                let mut upstream = Matrix::zeros(delta.rows(), layer.inputs());
                gemm(1.0, &delta, false, &layer.weights, false, 0.0, &mut upstream);
                act.backprop(&mut upstream, input);
                delta = upstream;
            }
        }
        Ok(())
    }

    /// Momentum SGD: `v <- momentum * v + g; p <- p - lr * v`, then clears the gradients.
    pub fn sgd_step(&mut self, lr: f64, momentum: f64) {
        for layer in &mut self.layers {
            let DenseLayer {
                weights,
                biases,
                grad_weights,
                grad_biases,
                momentum_weights,
                momentum_biases,
            } = layer;
            let params = weights
                .data_mut()
                .iter_mut()
                .zip(momentum_weights.data_mut())
                .zip(grad_weights.data())
                .chain(
                    biases
                        .iter_mut()
                        .zip(momentum_biases.iter_mut())
                        .zip(grad_biases.iter()),
                );
            for ((p, v), g) in params {
                *v = momentum * *v + g;
                *p -= lr * *v;
            }
            layer.zero_grad();
        }
    }

    pub fn zero_grad(&mut self) {
        self.layers.iter_mut().for_each(DenseLayer::zero_grad);
    }

    /// Deep copy that later training of `self` can never reach.
    pub fn snapshot(&self) -> FrozenNetwork {
        let mut copy = self.clone();
        copy.cache = None;
        copy.zero_grad();
        FrozenNetwork(copy)
    }
}

/// Read-only copy of a network, used as the distillation teacher.
#[derive(Debug, Clone, PartialEq)]
pub struct FrozenNetwork(Network);

impl FrozenNetwork {
    pub fn network(&self) -> &Network {
        &self.0
    }

    pub fn predict(&self, batch: &Matrix) -> Result<(Matrix, Matrix)> {
        self.0.predict(batch)
    }

    pub fn logits(&self, batch: &Matrix) -> Result<Matrix> {
        self.0.logits(batch)
    }

    pub fn num_classes(&self) -> usize {
        self.0.num_classes()
    }

    /// Returns a trainable copy.
    pub fn thaw(&self) -> Network {
        self.0.clone()
    }
}
