//! Small feedforward networks trained online on image-defined 2-D regression
//! sets, with tools for looking at how the zero lines of first-hidden-layer
//! neurons spread through the input square.
//!
//! The crate is organised bottom-up:
//!
//! - [`dataset`]: grayscale images, training masks, the binary PGM codec and
//!   procedural line/ring datasets.
//! - [`network`]: fully connected layers with `tanh` or a tanh/Gaussian
//!   blend activation, plus a plain-text serialization.
//! - [`training`]: per-sample gradient descent with weight decay and
//!   checkpoint callbacks.
//! - [`geometry`]: zero lines of first-layer neurons, strong-propagation
//!   bands, crossing counts and cross-replicate variance.
//! - [`imaging`]: sampling the network function onto the pixel grid and
//!   rendering translucent zero-line diagrams.
//! - [`experiment`]: the config-driven replicate runner and run comparison.
//!
//! Runnable walkthroughs live in the crate's `examples/` directory.

pub mod dataset;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod imaging;
pub mod network;
pub mod rng;
pub mod training;

pub use error::{Error, Result};
