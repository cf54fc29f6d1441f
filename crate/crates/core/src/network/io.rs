//! Plain-text network files.
//!
//! ```text
//! fnn-network v1
//! input_arity = 2
//! layers = 3
//! layer.0.shape = 16 2
//! layer.0.activation = tanh
//! layer.0.alpha = 0e0
//! layer.0.trainable = false
//! layer.0.weights = <row-major values>
//! layer.0.biases = <values>
//! ...
//! ```
//!
//! Reals are written with 17 significant digits so reading a file back
//! reproduces every parameter bit for bit.

use std::collections::BTreeMap;
use std::fmt::Write;

use super::{ActivationKind, ActivationSpec, Layer, Network};
use crate::error::{Error, Result};

const HEADER: &str = "fnn-network v1";
const WHAT: &str = "network file";

fn reals(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| format!("{v:.16e}")).collect();
    parts.join(" ")
}

pub fn network_to_text(net: &Network) -> String {
    let mut out = String::new();
    writeln!(out, "{HEADER}").unwrap();
    writeln!(out, "input_arity = {}", net.input_arity()).unwrap();
    writeln!(out, "layers = {}", net.layers().len()).unwrap();
    for (k, layer) in net.layers().iter().enumerate() {
        let kind = match layer.activation.kind {
            ActivationKind::Tanh => "tanh",
            ActivationKind::Blend => "blend",
        };
        writeln!(out, "layer.{k}.shape = {} {}", layer.n_out(), layer.n_in()).unwrap();
        writeln!(out, "layer.{k}.activation = {kind}").unwrap();
        writeln!(out, "layer.{k}.alpha = {:.16e}", layer.activation.alpha).unwrap();
        writeln!(out, "layer.{k}.trainable = {}", layer.activation.trainable).unwrap();
        writeln!(out, "layer.{k}.weights = {}", reals(layer.weights())).unwrap();
        writeln!(out, "layer.{k}.biases = {}", reals(layer.biases())).unwrap();
    }
    out
}

fn parse_reals(key: &str, text: &str) -> Result<Vec<f64>> {
    text.split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|_| Error::format(WHAT, format!("{key}: bad number {t:?}")))
        })
        .collect()
}

fn parse_usize(key: &str, text: &str) -> Result<usize> {
    text.trim()
        .parse()
        .map_err(|_| Error::format(WHAT, format!("{key}: expected an integer, got {text:?}")))
}

pub fn network_from_text(text: &str) -> Result<Network> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == HEADER => {}
        other => {
            return Err(Error::format(
                WHAT,
                format!("expected header {HEADER:?}, found {other:?}"),
            ));
        }
    }
    let mut fields = BTreeMap::new();
    for line in lines
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
    {
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::format(WHAT, format!("line without '=': {line:?}")))?;
        fields.insert(key.trim().to_owned(), value.trim().to_owned());
    }
    let get = |key: &str| {
        fields
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| Error::format(WHAT, format!("missing key {key}")))
    };

    let input_arity = parse_usize("input_arity", get("input_arity")?)?;
    let count = parse_usize("layers", get("layers")?)?;
    let mut layers = Vec::with_capacity(count);
    for k in 0..count {
        let key = |name: &str| format!("layer.{k}.{name}");
        let shape: Vec<usize> = get(&key("shape"))?
            .split_whitespace()
            .map(|t| parse_usize(&key("shape"), t))
            .collect::<Result<_>>()?;
        let [n_out, n_in] = shape[..] else {
            return Err(Error::format(
                WHAT,
                format!("{} must hold two integers", key("shape")),
            ));
        };
        let kind = match get(&key("activation"))? {
            "tanh" => ActivationKind::Tanh,
            "blend" => ActivationKind::Blend,
            other => return Err(Error::format(WHAT, format!("unknown activation {other:?}"))),
        };
        let alpha = parse_reals(&key("alpha"), get(&key("alpha"))?)?;
        let [alpha] = alpha[..] else {
            return Err(Error::format(
                WHAT,
                format!("{} must hold one real", key("alpha")),
            ));
        };
        let trainable = match get(&key("trainable"))? {
            "true" => true,
            "false" => false,
            other => return Err(Error::format(WHAT, format!("bad boolean {other:?}"))),
        };
        let weights = parse_reals(&key("weights"), get(&key("weights"))?)?;
        let biases = parse_reals(&key("biases"), get(&key("biases"))?)?;
        if biases.len() != n_out || weights.len() != n_out * n_in {
            return Err(Error::format(
                WHAT,
                format!("layer {k} arrays disagree with shape {n_out}x{n_in}"),
            ));
        }
        let spec = ActivationSpec {
            kind,
            alpha,
            trainable,
        };
        layers.push(Layer::new(n_in, weights, biases, spec)?);
    }
    Network::new(input_arity, layers)
}
