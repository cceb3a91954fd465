//! Feed-forward networks of quantum perceptrons, run either with classical
//! feed-forward between layers or as one coherent circuit.

mod coherent;
mod hybrid;
mod network;
mod result;

pub use coherent::{
    coherent_circuit, coherent_output_density, coherent_run_exact, coherent_run_sampled,
    coherent_sample,
};
pub use hybrid::{
    conditional_output_probability, feed_forward_counts, feedforward_input,
    hidden_outcome_distribution, hidden_probabilities, hybrid_circuit, hybrid_run_exact,
    hybrid_run_sampled, hybrid_sample, HiddenOutcome, HybridSampling, SamplingOptions,
};
pub use network::{LayerDoc, LayerSpec, NetworkDoc, NetworkSpec, NeuronDoc, MAX_LAYER_WIDTH};
pub use result::{classify, Mode, RunResult, DEFAULT_THRESHOLD};
