//! Hybrid execution: nodes are measured and their bits classically
//! condition the preparation of the next layer's inputs.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::network::NetworkSpec;
use super::result::{Mode, RunResult};
use crate::error::{Error, Result};
use crate::neuron::{
    build_activation, build_uw, neuron_circuit, neuron_gates, simulate_activation, BinaryVector,
    NeuronSpec,
};
use crate::noise::{build_calibration, mitigate, ReadoutErrorModel};
use crate::parallel::Exec;
use crate::sim::{run_circuit_with, Circuit, Counts, GateOp, RunOptions, StateVector};

const SHOT_BATCH: u64 = 4096;

/// Input vector for a node fed by classical bits: +1 for 0, −1 for 1.
pub fn feedforward_input(bits: &[bool]) -> Result<BinaryVector> {
    BinaryVector::from_bits(bits)
}

/// Z-type gates realizing the input preparation of a node whose `k`-th input
/// is `(-1)^{b_k}`, each tagged with the synapse `k` it is conditioned on.
///
/// Flipping the sign of basis state `|k⟩` equals the product of Z-type gates
/// on every qubit set that contains the bits of `k`. The empty set only
/// contributes a global phase and is skipped.
pub(crate) fn synapse_phases(spec: &NeuronSpec) -> Vec<(usize, GateOp)> {
    let m = spec.num_inputs();
    let mut out = Vec::new();
    for k in 0..m {
        for s in (1..m).filter(|s| s & k == k) {
            let qubits: Vec<usize> = crate::neuron::support(s)
                .into_iter()
                .map(|t| spec.encoding_qubits[t])
                .collect();
            out.push((k, GateOp::z_on(&qubits)));
        }
    }
    out
}

/// One layer's activation probabilities as a joint outcome table; bit `k` of
/// the key is neuron `k`.
fn product_distribution(probs: &[f64]) -> Vec<(u64, f64)> {
    (0..1u64 << probs.len())
        .map(|o| {
            let p = probs
                .iter()
                .enumerate()
                .map(|(k, &p)| if o >> k & 1 == 1 { p } else { 1.0 - p })
                .product();
            (o, p)
        })
        .collect()
}

/// Source of node activation probabilities.
pub(crate) trait NodeOracle {
    fn activation(&mut self, layer: usize, neuron: usize, input: &BinaryVector) -> Result<f64>;
}

/// Activation probabilities from exact simulation of each node circuit.
struct SimulatedNodes<'a> {
    net: &'a NetworkSpec,
    cache: HashMap<(usize, usize, Vec<i8>), f64>,
}

impl<'a> SimulatedNodes<'a> {
    fn new(net: &'a NetworkSpec) -> Self {
        SimulatedNodes {
            net,
            cache: HashMap::new(),
        }
    }
}

impl NodeOracle for SimulatedNodes<'_> {
    fn activation(&mut self, layer: usize, neuron: usize, input: &BinaryVector) -> Result<f64> {
        let key = (layer, neuron, input.entries().to_vec());
        if let Some(&p) = self.cache.get(&key) {
            return Ok(p);
        }
        let weight = &self.net.layer(layer).neurons[neuron].weight;
        let p = simulate_activation(input, weight)?;
        self.cache.insert(key, p);
        Ok(p)
    }
}

/// Pushes a distribution over layer-`start` outcomes through the remaining
/// layers (total law of probability) and returns P(output = 1).
fn propagate_from<O: NodeOracle>(
    net: &NetworkSpec,
    start: usize,
    mut dist: BTreeMap<u64, f64>,
    oracle: &mut O,
) -> Result<f64> {
    for l in start + 1..net.layers().len() {
        let mut next: BTreeMap<u64, f64> = BTreeMap::new();
        for (&bits, &p) in &dist {
            if p == 0.0 {
                continue;
            }
            let probs = (0..net.layer(l).neurons.len())
                .map(|h| {
                    let fed: Vec<bool> = net
                        .feeders(l, h)
                        .iter()
                        .map(|&k| bits >> k & 1 == 1)
                        .collect();
                    oracle.activation(l, h, &feedforward_input(&fed)?)
                })
                .collect::<Result<Vec<f64>>>()?;
            for (o, q) in product_distribution(&probs) {
                *next.entry(o).or_insert(0.0) += p * q;
            }
        }
        dist = next;
    }
    Ok(dist.get(&1).copied().unwrap_or(0.0))
}

fn propagate<O: NodeOracle>(
    net: &NetworkSpec,
    input: &BinaryVector,
    oracle: &mut O,
) -> Result<f64> {
    net.check_input(input)?;
    let first = (0..net.layer(0).neurons.len())
        .map(|k| oracle.activation(0, k, input))
        .collect::<Result<Vec<f64>>>()?;
    propagate_from(
        net,
        0,
        product_distribution(&first).into_iter().collect(),
        oracle,
    )
}

/// Exact output probability, combining per-node probabilities over every
/// intermediate outcome.
pub fn hybrid_run_exact(net: &NetworkSpec, input: &BinaryVector) -> Result<RunResult> {
    let mut oracle = SimulatedNodes::new(net);
    let p = propagate(net, input, &mut oracle)?;
    Ok(RunResult::new(input.label(), p, Mode::Hybrid, None))
}

/// One joint outcome `[b₁, …, b_ℓ]` of the first layer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HiddenOutcome {
    pub bits: Vec<bool>,
    pub probability: f64,
}

/// Exact activation probability of every first-layer node.
pub fn hidden_probabilities(net: &NetworkSpec, input: &BinaryVector) -> Result<Vec<f64>> {
    net.check_input(input)?;
    net.layer(0)
        .neurons
        .iter()
        .map(|n| simulate_activation(input, &n.weight))
        .collect()
}

/// Joint first-layer outcomes listed with `b₁` as the most significant
/// position: `[0,0], [0,1], [1,0], [1,1]` for two nodes.
pub fn hidden_outcome_distribution(
    net: &NetworkSpec,
    input: &BinaryVector,
) -> Result<Vec<HiddenOutcome>> {
    let probs = hidden_probabilities(net, input)?;
    let w = probs.len();
    Ok((0..1usize << w)
        .map(|idx| {
            let bits: Vec<bool> = (0..w).map(|k| idx >> (w - 1 - k) & 1 == 1).collect();
            let probability = bits
                .iter()
                .zip(&probs)
                .map(|(&b, &p)| if b { p } else { 1.0 - p })
                .product();
            HiddenOutcome { bits, probability }
        })
        .collect())
}

/// `p(output = 1 | first-layer bits)`.
pub fn conditional_output_probability(net: &NetworkSpec, hidden_bits: &[bool]) -> Result<f64> {
    let width = net.layer(0).neurons.len();
    if hidden_bits.len() != width {
        return Err(Error::DimensionMismatch {
            expected: width,
            found: hidden_bits.len(),
        });
    }
    let key = hidden_bits
        .iter()
        .enumerate()
        .fold(0u64, |acc, (k, &b)| acc | u64::from(b) << k);
    let mut oracle = SimulatedNodes::new(net);
    propagate_from(net, 0, BTreeMap::from([(key, 1.0)]), &mut oracle)
}

/// The whole network as one circuit with mid-circuit measurements: node `k`
/// is measured into `c<k>` and later layers are prepared by gates
/// conditioned on those bits.
pub fn hybrid_circuit(net: &NetworkSpec, input: &BinaryVector) -> Result<Circuit> {
    net.check_input(input)?;
    let size = net.register_size()?;
    let clbits = net.num_neurons();
    let mut c = Circuit::new(size, clbits).with_names(
        net.qubit_names(size),
        (1..=clbits).map(|k| format!("c{k}")).collect(),
    );
    for (l, layer) in net.layers().iter().enumerate() {
        for (h, spec) in layer.neurons.iter().enumerate() {
            if l == 0 {
                c.gates(neuron_gates(input, spec)?);
            } else {
                c.gates(spec.encoding_qubits.iter().map(|&q| GateOp::h(q)));
                for (k, gate) in synapse_phases(spec) {
                    let src = net.neuron_number(l - 1, net.feeders(l, h)[k]) - 1;
                    c.gate(gate.when(src, true));
                }
                c.gates(build_uw(spec));
                if spec.ancilla.is_some() {
                    c.gate(build_activation(spec)?);
                }
            }
        }
        for (h, spec) in layer.neurons.iter().enumerate() {
            c.measure(spec.readout(), net.neuron_number(l, h) - 1);
        }
    }
    Ok(c)
}

/// How sampled hybrid runs are organized.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HybridSampling {
    /// Per-node batches when a readout model is set, feed-forward
    /// otherwise. Readout flips on intermediate bits cannot be undone from
    /// output counts alone, so noisy runs are estimated node by node.
    #[default]
    Auto,
    /// Per shot: sample every node in turn, feeding its (possibly corrupted)
    /// bit forward; report the output frequency.
    FeedForward,
    /// Every node configuration runs as its own batch of shots; estimated
    /// (and optionally mitigated) node probabilities are combined by the
    /// total law.
    PerNode,
}

#[derive(Clone, Copy, Debug)]
pub struct SamplingOptions {
    pub shots: u64,
    pub readout: Option<ReadoutErrorModel>,
    /// Invert the readout model on measured counts.
    pub mitigate: bool,
    pub hybrid: HybridSampling,
    pub exec: Exec,
}

impl SamplingOptions {
    pub fn new(shots: u64) -> Self {
        SamplingOptions {
            shots,
            readout: None,
            mitigate: false,
            hybrid: HybridSampling::Auto,
            exec: Exec::default(),
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.shots == 0 {
            return Err(Error::ZeroShots);
        }
        Ok(())
    }

    /// P(1) from single-bit counts, mitigated when requested.
    pub fn estimate(&self, counts: &Counts) -> Result<f64> {
        match (self.readout, self.mitigate) {
            (Some(model), true) => Ok(mitigate(counts, &build_calibration(&model, 1)?)?.get(1)),
            _ => Ok(counts.frequencies().get(1)),
        }
    }
}

/// Per-node batches of shots through the circuit runner.
struct EstimatedNodes<'a, R> {
    net: &'a NetworkSpec,
    options: &'a SamplingOptions,
    rng: &'a mut R,
    cache: HashMap<(usize, usize, Vec<i8>), f64>,
}

impl<R: Rng> NodeOracle for EstimatedNodes<'_, R> {
    fn activation(&mut self, layer: usize, neuron: usize, input: &BinaryVector) -> Result<f64> {
        let key = (layer, neuron, input.entries().to_vec());
        if let Some(&p) = self.cache.get(&key) {
            return Ok(p);
        }
        let weight = &self.net.layer(layer).neurons[neuron].weight;
        let circuit = neuron_circuit(input, weight)?;
        let run = RunOptions {
            readout: self.options.readout,
            exec: self.options.exec,
        };
        let counts = run_circuit_with(&circuit, self.options.shots, self.rng, &run)?;
        let p = self.options.estimate(&counts)?;
        self.cache.insert(key, p);
        Ok(p)
    }
}

/// Pre-measurement node states, built on first use.
struct NodeStates<'a> {
    net: &'a NetworkSpec,
    cache: HashMap<(usize, usize, Vec<i8>), StateVector>,
}

impl NodeStates<'_> {
    fn sample<R: Rng + ?Sized>(
        &mut self,
        layer: usize,
        neuron: usize,
        input: &BinaryVector,
        readout: Option<&ReadoutErrorModel>,
        rng: &mut R,
    ) -> Result<bool> {
        let key = (layer, neuron, input.entries().to_vec());
        let state = match self.cache.get(&key) {
            Some(s) => s,
            None => {
                let weight = &self.net.layer(layer).neurons[neuron].weight;
                let s = neuron_circuit(input, weight)?.final_state()?;
                self.cache.entry(key).or_insert(s)
            }
        };
        let bit = state.clone().measure(input.num_qubits(), rng)?;
        Ok(match readout {
            Some(m) => m.corrupt(bit, rng),
            None => bit,
        })
    }
}

/// Shot-level estimate of the output probability.
pub fn hybrid_run_sampled<R: Rng + ?Sized>(
    net: &NetworkSpec,
    input: &BinaryVector,
    options: &SamplingOptions,
    rng: &mut R,
) -> Result<RunResult> {
    hybrid_sample(net, input, options, rng).map(|(r, _)| r)
}

/// Like [`hybrid_run_sampled`], also returning the output-bit counts when
/// the strategy produces them (feed-forward only).
pub fn hybrid_sample<R: Rng + ?Sized>(
    net: &NetworkSpec,
    input: &BinaryVector,
    options: &SamplingOptions,
    rng: &mut R,
) -> Result<(RunResult, Option<Counts>)> {
    options.check()?;
    net.check_input(input)?;
    let strategy = match options.hybrid {
        HybridSampling::Auto if options.readout.is_some() => HybridSampling::PerNode,
        HybridSampling::Auto => HybridSampling::FeedForward,
        s => s,
    };
    let (p, counts) = if strategy == HybridSampling::PerNode {
        let mut local = ChaCha8Rng::seed_from_u64(rng.next_u64());
        let mut oracle = EstimatedNodes {
            net,
            options,
            rng: &mut local,
            cache: HashMap::new(),
        };
        (propagate(net, input, &mut oracle)?, None)
    } else {
        let counts = feed_forward_counts(net, input, options, rng)?;
        (options.estimate(&counts)?, Some(counts))
    };
    let result = RunResult::new(input.label(), p, Mode::HybridSampled, Some(options.shots));
    Ok((result, counts))
}

/// Output-bit counts of `options.shots` feed-forward executions.
pub fn feed_forward_counts<R: Rng + ?Sized>(
    net: &NetworkSpec,
    input: &BinaryVector,
    options: &SamplingOptions,
    rng: &mut R,
) -> Result<Counts> {
    options.check()?;
    net.check_input(input)?;
    let shots = options.shots;
    let seeds: Vec<u64> = (0..shots.div_ceil(SHOT_BATCH))
        .map(|_| rng.next_u64())
        .collect();
    let readout = options.readout.as_ref();
    let partial = options.exec.try_map(seeds.len(), |b| {
        let n = SHOT_BATCH.min(shots - b as u64 * SHOT_BATCH);
        let mut rng = ChaCha8Rng::seed_from_u64(seeds[b]);
        let mut states = NodeStates {
            net,
            cache: HashMap::new(),
        };
        let mut counts = Counts::new(1);
        for _ in 0..n {
            let mut bits = 0u64;
            for (l, layer) in net.layers().iter().enumerate() {
                let mut next = 0u64;
                for h in 0..layer.neurons.len() {
                    let node_input = if l == 0 {
                        input.clone()
                    } else {
                        let fed: Vec<bool> = net
                            .feeders(l, h)
                            .iter()
                            .map(|&k| bits >> k & 1 == 1)
                            .collect();
                        feedforward_input(&fed)?
                    };
                    let bit = states.sample(l, h, &node_input, readout, &mut rng)?;
                    next |= u64::from(bit) << h;
                }
                bits = next;
            }
            counts.record(bits);
        }
        Ok::<_, Error>(counts)
    })?;
    let mut total = Counts::new(1);
    for c in &partial {
        total.merge(c);
    }
    Ok(total)
}
