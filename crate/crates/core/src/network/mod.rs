//! Fully connected feedforward networks.
//!
//! Each neuron adds up its weighted inputs and a bias, then applies the
//! layer's activation. Sums are always accumulated in ascending input order so
//! that evaluation is bit-reproducible.

mod activation;
mod io;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};

pub use activation::{act, act_alpha_deriv, act_deriv, ActivationKind, ActivationSpec};
pub use io::{network_from_text, network_to_text};

#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    n_in: usize,
    /// Row-major `n_out x n_in`.
    weights: Vec<f64>,
    biases: Vec<f64>,
    pub activation: ActivationSpec,
}

impl Layer {
    pub fn new(
        n_in: usize,
        weights: Vec<f64>,
        biases: Vec<f64>,
        activation: ActivationSpec,
    ) -> Result<Self> {
        let n_out = biases.len();
        if n_in == 0 || n_out == 0 {
            return Err(Error::domain(
                "layer needs at least one input and one neuron",
            ));
        }
        if weights.len() != n_out * n_in {
            return Err(Error::domain(format!(
                "{} weights for a {n_out}x{n_in} layer",
                weights.len()
            )));
        }
        if weights.iter().chain(&biases).any(|v| !v.is_finite()) {
            return Err(Error::domain("layer parameters must be finite"));
        }
        activation.validate()?;
        Ok(Layer {
            n_in,
            weights,
            biases,
            activation,
        })
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_out(&self) -> usize {
        self.biases.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    /// Incoming weights of neuron `j`.
    pub fn row(&self, j: usize) -> &[f64] {
        &self.weights[j * self.n_in..(j + 1) * self.n_in]
    }

    pub(crate) fn params_mut(&mut self) -> (&mut [f64], &mut [f64], &mut ActivationSpec) {
        (&mut self.weights, &mut self.biases, &mut self.activation)
    }

    fn all_finite(&self) -> bool {
        self.weights
            .iter()
            .chain(&self.biases)
            .all(|v| v.is_finite())
            && self.activation.alpha.is_finite()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Network {
    input_arity: usize,
    layers: Vec<Layer>,
}

impl Network {
    pub fn new(input_arity: usize, layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::domain("network needs at least one layer"));
        }
        let mut width = input_arity;
        for (k, layer) in layers.iter().enumerate() {
            if layer.n_in != width {
                return Err(Error::domain(format!(
                    "layer {k} takes {} inputs but receives {width}",
                    layer.n_in
                )));
            }
            width = layer.n_out();
        }
        Ok(Network {
            input_arity,
            layers,
        })
    }

    pub fn input_arity(&self) -> usize {
        self.input_arity
    }

    pub fn output_arity(&self) -> usize {
        self.layers.last().map_or(0, Layer::n_out)
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub(crate) fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    /// Widths from input to output, e.g. `[2, 16, 16, 1]`.
    pub fn architecture(&self) -> Vec<usize> {
        std::iter::once(self.input_arity)
            .chain(self.layers.iter().map(Layer::n_out))
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.layers.iter().all(Layer::all_finite)
    }

    /// The sub-network made of the first `n` layers.
    pub fn truncated(&self, n: usize) -> Result<Network> {
        if n == 0 || n > self.layers.len() {
            return Err(Error::domain(format!(
                "cannot keep {n} of {} layers",
                self.layers.len()
            )));
        }
        Network::new(self.input_arity, self.layers[..n].to_vec())
    }

    pub fn forward(&self, input: &[f64]) -> Result<ForwardTrace> {
        let mut trace = ForwardTrace::for_network(self);
        self.forward_into(input, &mut trace)?;
        Ok(trace)
    }

    /// Like [`Network::forward`] but reuses the buffers of `trace`.
    pub fn forward_into(&self, input: &[f64], trace: &mut ForwardTrace) -> Result<()> {
        if input.len() != self.input_arity {
            return Err(Error::domain(format!(
                "network takes {} inputs, got {}",
                self.input_arity,
                input.len()
            )));
        }
        if input.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("network input must be finite"));
        }
        if trace.pre.len() != self.layers.len() {
            *trace = ForwardTrace::for_network(self);
        }
        trace.input.clear();
        trace.input.extend_from_slice(input);
        for (k, layer) in self.layers.iter().enumerate() {
            let (done, rest) = trace.post.split_at_mut(k);
            let x: &[f64] = if k == 0 { &trace.input } else { &done[k - 1] };
            let pre = &mut trace.pre[k];
            let post = &mut rest[0];
            pre.resize(layer.n_out(), 0.0);
            post.resize(layer.n_out(), 0.0);
            for j in 0..layer.n_out() {
                let mut acc = 0.0;
                for (w, xi) in layer.row(j).iter().zip(x) {
                    acc += w * xi;
                }
                let z = acc + layer.biases[j];
                pre[j] = z;
                post[j] = act(&layer.activation, z);
            }
        }
        Ok(())
    }

    /// Scalar output of a single-output network.
    pub fn output(&self, input: &[f64]) -> Result<f64> {
        let trace = self.forward(input)?;
        Ok(trace.output()[0])
    }
}

/// Pre- and post-activation values of every layer for one input.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ForwardTrace {
    pub input: Vec<f64>,
    pub pre: Vec<Vec<f64>>,
    pub post: Vec<Vec<f64>>,
}

impl ForwardTrace {
    pub fn for_network(net: &Network) -> Self {
        ForwardTrace {
            input: Vec::with_capacity(net.input_arity),
            pre: net.layers.iter().map(|l| vec![0.0; l.n_out()]).collect(),
            post: net.layers.iter().map(|l| vec![0.0; l.n_out()]).collect(),
        }
    }

    pub fn output(&self) -> &[f64] {
        self.post.last().map_or(&[], Vec::as_slice)
    }
}

/// Random network with every weight and bias of a layer drawn uniformly from
/// `[-1/sqrt(n_in), 1/sqrt(n_in)]`.
///
/// Draws come from the weight-init stream of `seed`, layer by layer, weights
/// in row-major order followed by biases.
pub fn init_network(arch: &[usize], acts: &[ActivationSpec], seed: u64) -> Result<Network> {
    if arch.len() < 2 {
        return Err(Error::domain(
            "architecture needs an input and an output width",
        ));
    }
    if arch.contains(&0) {
        return Err(Error::domain("layer widths must be positive"));
    }
    if acts.len() != arch.len() - 1 {
        return Err(Error::domain(format!(
            "{} activation specs for {} layers",
            acts.len(),
            arch.len() - 1
        )));
    }
    let mut rng = stream_rng(seed, Stream::WeightInit);
    let mut layers = Vec::with_capacity(arch.len() - 1);
    for (pair, spec) in arch.windows(2).zip(acts) {
        let (n_in, n_out) = (pair[0], pair[1]);
        let limit = 1.0 / (n_in as f64).sqrt();
        let mut draw = || limit * (2.0 * rng.random::<f64>() - 1.0);
        let weights: Vec<f64> = (0..n_in * n_out).map(|_| draw()).collect();
        let biases: Vec<f64> = (0..n_out).map(|_| draw()).collect();
        layers.push(Layer::new(n_in, weights, biases, *spec)?);
    }
    Network::new(arch[0], layers)
}

/// A network whose every weight and bias is zero.
pub fn zero_network(arch: &[usize], acts: &[ActivationSpec]) -> Result<Network> {
    if arch.len() < 2 || acts.len() != arch.len() - 1 {
        return Err(Error::domain("architecture and activation list disagree"));
    }
    let layers = arch
        .windows(2)
        .zip(acts)
        .map(|(p, spec)| Layer::new(p[0], vec![0.0; p[0] * p[1]], vec![0.0; p[1]], *spec))
        .collect::<Result<Vec<_>>>()?;
    Network::new(arch[0], layers)
}
