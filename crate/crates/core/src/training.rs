//! Online gradient descent with weight decay.
//!
//! One iteration draws a single training observation, backpropagates the
//! squared error through the network and applies
//! `w <- w * (1 - decay) - learning_rate * dL/dw` to every weight and bias.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Observation};
use crate::error::{Error, Result};
use crate::network::{act_alpha_deriv, act_deriv, ForwardTrace, Network};
use crate::rng::{stream_rng, Stream};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleOrder {
    /// Independent uniform draws with replacement.
    #[default]
    Uniform,
    /// A fresh permutation of the training set every epoch.
    EpochShuffle,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    /// Per-update multiplicative shrink rate.
    pub weight_decay: f64,
    pub total_iterations: u64,
    /// Iterations after whose update the checkpoint callback fires.
    pub checkpoint_iterations: Vec<u64>,
    pub sample_seed: u64,
    pub decay_biases: bool,
    pub sample_order: SampleOrder,
}

impl TrainConfig {
    pub fn new(learning_rate: f64, weight_decay: f64, total_iterations: u64) -> Self {
        TrainConfig {
            learning_rate,
            weight_decay,
            total_iterations,
            checkpoint_iterations: Vec::new(),
            sample_seed: 0,
            decay_biases: true,
            sample_order: SampleOrder::Uniform,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::domain(format!(
                "learning rate {} must be positive",
                self.learning_rate
            )));
        }
        if !(self.weight_decay >= 0.0 && self.weight_decay < 1.0) {
            return Err(Error::domain(format!(
                "weight decay {} outside [0, 1)",
                self.weight_decay
            )));
        }
        let cps = &self.checkpoint_iterations;
        if cps.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain("checkpoints must be strictly increasing"));
        }
        if cps.first().is_some_and(|&c| c < 1)
            || cps.last().is_some_and(|&c| c > self.total_iterations)
        {
            return Err(Error::domain(format!(
                "checkpoints must lie in [1, {}]",
                self.total_iterations
            )));
        }
        Ok(())
    }
}

/// Loss gradients, shaped like the network they came from.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradients {
    /// Per layer, row-major like [`crate::network::Layer::weights`].
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
    /// Per layer; `Some` only for blend layers with a trainable alpha.
    pub alphas: Vec<Option<f64>>,
}

impl Gradients {
    pub fn zeros(net: &Network) -> Self {
        Gradients {
            weights: net
                .layers()
                .iter()
                .map(|l| vec![0.0; l.weights().len()])
                .collect(),
            biases: net.layers().iter().map(|l| vec![0.0; l.n_out()]).collect(),
            alphas: net
                .layers()
                .iter()
                .map(|l| l.activation.learns_alpha().then_some(0.0))
                .collect(),
        }
    }

    fn matches(&self, net: &Network) -> bool {
        self.weights.len() == net.layers().len()
            && self.biases.len() == net.layers().len()
            && self.alphas.len() == net.layers().len()
            && net.layers().iter().enumerate().all(|(k, l)| {
                self.weights[k].len() == l.weights().len() && self.biases[k].len() == l.n_out()
            })
    }
}

fn check_single_output(net: &Network) -> Result<()> {
    if net.output_arity() != 1 {
        return Err(Error::domain(format!(
            "squared-error training needs one output, network has {}",
            net.output_arity()
        )));
    }
    Ok(())
}

/// Squared error of the network output against the observation target.
pub fn loss(net: &Network, obs: &Observation) -> Result<f64> {
    check_single_output(net)?;
    let e = net.output(&obs.input)? - obs.target;
    Ok(e * e)
}

/// Mean of [`loss`] over the training subset.
pub fn mean_training_error(net: &Network, ds: &Dataset) -> Result<f64> {
    mean_error(net, &ds.training)
}

pub fn mean_error(net: &Network, observations: &[Observation]) -> Result<f64> {
    if observations.is_empty() {
        return Err(Error::domain("no observations to average over"));
    }
    check_single_output(net)?;
    let mut trace = ForwardTrace::for_network(net);
    let mut sum = 0.0;
    for obs in observations {
        net.forward_into(&obs.input, &mut trace)?;
        let e = trace.output()[0] - obs.target;
        sum += e * e;
    }
    Ok(sum / observations.len() as f64)
}

/// Reusable buffers for repeated backpropagation on one network shape.
#[derive(Clone, Debug)]
pub struct Workspace {
    trace: ForwardTrace,
    grads: Gradients,
    upstream: Vec<f64>,
    next_upstream: Vec<f64>,
}

impl Workspace {
    pub fn new(net: &Network) -> Self {
        let widest = net.architecture().into_iter().max().unwrap_or(1);
        Workspace {
            trace: ForwardTrace::for_network(net),
            grads: Gradients::zeros(net),
            upstream: Vec::with_capacity(widest),
            next_upstream: Vec::with_capacity(widest),
        }
    }

    pub fn gradients(&self) -> &Gradients {
        &self.grads
    }

    /// Backpropagates into the workspace and returns the loss.
    pub fn backprop(&mut self, net: &Network, obs: &Observation) -> Result<f64> {
        check_single_output(net)?;
        if !self.grads.matches(net) {
            *self = Workspace::new(net);
        }
        net.forward_into(&obs.input, &mut self.trace)?;
        let err = self.trace.output()[0] - obs.target;

        // upstream[j] = dL / d(post-activation j) of the current layer
        self.upstream.clear();
        self.upstream.push(2.0 * err);
        for (k, layer) in net.layers().iter().enumerate().rev() {
            let pre = &self.trace.pre[k];
            let x: &[f64] = if k == 0 {
                &self.trace.input
            } else {
                &self.trace.post[k - 1]
            };
            let n_in = layer.n_in();
            let gw = &mut self.grads.weights[k];
            let gb = &mut self.grads.biases[k];

            let mut g_alpha = 0.0;
            for (j, &up) in self.upstream.iter().enumerate() {
                let delta = up * act_deriv(&layer.activation, pre[j]);
                gb[j] = delta;
                for (g, xi) in gw[j * n_in..(j + 1) * n_in].iter_mut().zip(x) {
                    *g = delta * xi;
                }
                if layer.activation.learns_alpha() {
                    g_alpha += up * act_alpha_deriv(pre[j]);
                }
            }
            if let Some(a) = self.grads.alphas[k].as_mut() {
                *a = g_alpha;
            }

            if k > 0 {
                self.next_upstream.clear();
                self.next_upstream.resize(n_in, 0.0);
                for (j, &delta) in gb.iter().enumerate() {
                    for (acc, w) in self.next_upstream.iter_mut().zip(layer.row(j)) {
                        *acc += delta * w;
                    }
                }
                std::mem::swap(&mut self.upstream, &mut self.next_upstream);
            }
        }
        Ok(err * err)
    }
}

/// Exact gradient of [`loss`] with respect to every parameter.
pub fn backprop(net: &Network, obs: &Observation) -> Result<Gradients> {
    let mut ws = Workspace::new(net);
    ws.backprop(net, obs)?;
    Ok(ws.grads)
}

/// Applies one descent step with decay. Returns `false` if any updated
/// parameter is non-finite.
fn apply_step(net: &mut Network, g: &Gradients, cfg: &TrainConfig) -> bool {
    let lr = cfg.learning_rate;
    let keep = 1.0 - cfg.weight_decay;
    let bias_keep = if cfg.decay_biases { keep } else { 1.0 };
    let mut finite = true;
    for (k, layer) in net.layers_mut().iter_mut().enumerate() {
        let (weights, biases, spec) = layer.params_mut();
        for (w, gw) in weights.iter_mut().zip(&g.weights[k]) {
            *w = *w * keep - lr * gw;
            finite &= w.is_finite();
        }
        for (b, gb) in biases.iter_mut().zip(&g.biases[k]) {
            *b = *b * bias_keep - lr * gb;
            finite &= b.is_finite();
        }
        if let (true, Some(ga)) = (spec.learns_alpha(), g.alphas[k]) {
            spec.alpha = (spec.alpha - lr * ga).clamp(0.0, 1.0);
            finite &= spec.alpha.is_finite();
        }
    }
    finite
}

/// `w <- w * (1 - weight_decay) - learning_rate * g` for every weight and
/// bias; a trainable alpha moves by `-learning_rate * g` and is clamped to
/// `[0, 1]`.
pub fn sgd_step(net: &mut Network, g: &Gradients, cfg: &TrainConfig) -> Result<()> {
    if !g.matches(net) {
        return Err(Error::domain("gradient shapes do not match the network"));
    }
    if !apply_step(net, g, cfg) {
        return Err(Error::NonFinite { iteration: 0 });
    }
    Ok(())
}

/// Runs `cfg.total_iterations` online updates on `ds.training`.
///
/// `on_checkpoint(iteration, net)` is called right after the update of each
/// configured checkpoint iteration.
pub fn train<F>(
    net: &mut Network,
    ds: &Dataset,
    cfg: &TrainConfig,
    mut on_checkpoint: F,
) -> Result<()>
where
    F: FnMut(u64, &Network),
{
    cfg.validate()?;
    check_single_output(net)?;
    if net.input_arity() != 2 {
        return Err(Error::domain("dataset observations have two inputs"));
    }
    let n = ds.training.len();
    if n == 0 {
        return Err(Error::domain("training subset is empty"));
    }

    let mut rng = stream_rng(cfg.sample_seed, Stream::SampleOrder);
    let mut order: Vec<usize> = (0..n).collect();
    let mut ws = Workspace::new(net);
    let mut checkpoints = cfg.checkpoint_iterations.iter().copied().peekable();

    for iteration in 1..=cfg.total_iterations {
        let idx = match cfg.sample_order {
            SampleOrder::Uniform => rng.random_range(0..n),
            SampleOrder::EpochShuffle => {
                let pos = ((iteration - 1) % n as u64) as usize;
                if pos == 0 {
                    order.shuffle(&mut rng);
                }
                order[pos]
            }
        };
        ws.backprop(net, &ds.training[idx])?;
        if !apply_step(net, &ws.grads, cfg) {
            return Err(Error::NonFinite { iteration });
        }
        if checkpoints.next_if_eq(&iteration).is_some() {
            on_checkpoint(iteration, net);
        }
    }
    Ok(())
}

/// `count` iterations spaced geometrically from `first` to `last` inclusive,
/// each rounded to the nearest integer.
pub fn geometric_checkpoints(first: u64, last: u64, count: usize) -> Result<Vec<u64>> {
    if first < 1 || first >= last {
        return Err(Error::domain(format!(
            "need 1 <= first < last, got {first} and {last}"
        )));
    }
    if count < 2 {
        return Err(Error::domain(format!(
            "need at least two checkpoints, got {count}"
        )));
    }
    let ratio = last as f64 / first as f64;
    let steps = (count - 1) as f64;
    let mut out: Vec<u64> = (0..count)
        .map(|i| (first as f64 * ratio.powf(i as f64 / steps)).round() as u64)
        .collect();
    out[0] = first;
    out[count - 1] = last;
    if out.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain(format!(
            "{count} checkpoints between {first} and {last} collide after rounding"
        )));
    }
    Ok(out)
}
