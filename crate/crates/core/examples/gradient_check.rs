//! Compares backpropagated gradients with central finite differences of the
//! loss on a freshly initialised network.
//!
//! Plain f64 differences at step 1e-6 carry roughly 1e-10 of cancellation
//! noise, which is the floor visible in the output.
//!
//! ```text
//! cargo run --release --example gradient_check -- [seed]
//! ```

use fnn_interference::dataset::Observation;
use fnn_interference::network::{init_network, ActivationSpec, Layer, Network};
use fnn_interference::training::{backprop, loss};

fn shifted(net: &Network, layer: usize, index: usize, delta: f64) -> Network {
    let layers = net
        .layers()
        .iter()
        .enumerate()
        .map(|(k, l)| {
            let mut w = l.weights().to_vec();
            if k == layer {
                w[index] += delta;
            }
            Layer::new(l.n_in(), w, l.biases().to_vec(), l.activation).unwrap()
        })
        .collect();
    Network::new(net.input_arity(), layers).unwrap()
}

fn main() -> fnn_interference::Result<()> {
    let seed: u64 = std::env::args()
        .nth(1)
        .map_or(7, |s| s.parse().expect("seed"));
    let net = init_network(&[2, 16, 16, 1], &[ActivationSpec::tanh(); 3], seed)?;
    let obs = Observation {
        input: [0.2, -0.35],
        target: 0.5,
    };
    let g = backprop(&net, &obs)?;

    let h = 1e-6;
    let mut worst = 0.0f64;
    for (k, layer) in net.layers().iter().enumerate() {
        let mut layer_worst = 0.0f64;
        for i in 0..layer.weights().len() {
            let plus = loss(&shifted(&net, k, i, h), &obs)?;
            let minus = loss(&shifted(&net, k, i, -h), &obs)?;
            let numeric = (plus - minus) / (2.0 * h);
            layer_worst = layer_worst.max((numeric - g.weights[k][i]).abs());
        }
        println!(
            "layer {k}: {} weights, max |backprop - fd| = {layer_worst:.2e}",
            layer.weights().len()
        );
        worst = worst.max(layer_worst);
    }
    println!("overall max deviation {worst:.2e}");
    Ok(())
}
