use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{pattern_string, Evaluation, MAX_TABLE_INPUTS};
use crate::error::{Error, Result};
use crate::ffnn::{HybridSampling, SamplingOptions};
use crate::neuron::{
    exact_activation_probability, neuron_circuit, simulate_activation, BinaryVector, PatternLabel,
};
use crate::noise::ReadoutErrorModel;
use crate::parallel::Exec;
use crate::sim::{run_circuit_with, RunOptions};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NeuronOptions {
    pub evaluation: Evaluation,
    pub shots: u64,
    pub seed: u64,
    pub noise: Option<ReadoutErrorModel>,
    pub mitigate: bool,
    pub exec: Exec,
}

impl Default for NeuronOptions {
    fn default() -> Self {
        NeuronOptions {
            evaluation: Evaluation::Exact,
            shots: super::DEFAULT_SHOTS,
            seed: 0,
            noise: None,
            mitigate: false,
            exec: Exec::default(),
        }
    }
}

/// Activation probability of one node for one input.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NeuronReport {
    pub input: BinaryVector,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_label: Option<PatternLabel>,
    pub pattern: String,
    pub weight: BinaryVector,
    /// Simulated (exact mode) or estimated (sampled mode) probability.
    pub p: f64,
    /// `(i·w)² / m²`.
    pub closed_form: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counts: Option<BTreeMap<String, u64>>,
}

/// Runs the stand-alone node circuit. `stream` selects an independent
/// random stream under the same seed.
pub fn evaluate_neuron(
    input: &BinaryVector,
    weight: &BinaryVector,
    options: &NeuronOptions,
    stream: u64,
) -> Result<NeuronReport> {
    let closed_form = exact_activation_probability(input, weight)?;
    let (p, shots, counts) = match options.evaluation {
        Evaluation::Exact => (simulate_activation(input, weight)?, None, None),
        Evaluation::Sampled => {
            let sampling = SamplingOptions {
                shots: options.shots,
                readout: options.noise,
                mitigate: options.mitigate,
                hybrid: HybridSampling::Auto,
                exec: options.exec,
            };
            sampling.check()?;
            let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
            rng.set_stream(stream);
            let run = RunOptions {
                readout: options.noise,
                exec: options.exec,
            };
            let counts = run_circuit_with(
                &neuron_circuit(input, weight)?,
                options.shots,
                &mut rng,
                &run,
            )?;
            (
                sampling.estimate(&counts)?,
                Some(options.shots),
                Some(counts.to_bitstrings()),
            )
        }
    };
    let input_label = input.label();
    Ok(NeuronReport {
        input: input.clone(),
        input_label,
        pattern: input_label.map_or_else(String::new, |l| pattern_string(l.0, input.len())),
        weight: weight.clone(),
        p,
        closed_form,
        shots,
        counts,
    })
}

/// Every input label against one weight, in label order.
pub fn neuron_sweep(weight: &BinaryVector, options: &NeuronOptions) -> Result<Vec<NeuronReport>> {
    let len = weight.len();
    if len > MAX_TABLE_INPUTS {
        return Err(Error::InvalidConfig(format!(
            "sweeps cover inputs of at most {MAX_TABLE_INPUTS} entries, the weight has {len}"
        )));
    }
    options.exec.try_map(1 << len, |label| {
        let input = BinaryVector::from_label(PatternLabel(label as u64), len)?;
        evaluate_neuron(&input, weight, options, label as u64)
    })
}
