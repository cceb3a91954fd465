//! Statevector simulation of quantum perceptrons and the feed-forward
//! networks built from them, with readout-noise modelling and mitigation.

pub mod error;
pub mod experiment;
pub mod ffnn;
pub mod neuron;
pub mod noise;
pub mod parallel;
pub mod sim;

pub use error::{Error, Result};
