//! Quantum perceptron: ±1 vector encoding, sign-flip state synthesis and the
//! ancilla activation stage.

mod binary;
mod hsgs;
mod perceptron;

pub use binary::{BinaryVector, PatternLabel};
pub use hsgs::{hsgs, hsgs_on, SignSynthesis};
pub use perceptron::{
    build_activation, build_ui, build_uw, exact_activation_probability, neuron_circuit,
    neuron_gates, rew_state, simulate_activation, NeuronSpec,
};

pub(crate) use hsgs::support;
