//! Coherent execution: every classical condition of the hybrid scheme is
//! replaced by a quantum control from the feeding neuron's readout qubit, and
//! only the output is measured.

use rand::Rng;

use super::hybrid::{synapse_phases, SamplingOptions};
use super::network::NetworkSpec;
use super::result::{Mode, RunResult};
use crate::error::Result;
use crate::neuron::{build_activation, build_uw, neuron_gates, BinaryVector};
use crate::sim::{run_circuit_with, Circuit, Counts, DensityMatrix2, GateOp, RunOptions};

/// The network on one register with a single terminal measurement of the
/// output readout into `c<K>`, `K` being the output neuron's number.
pub fn coherent_circuit(net: &NetworkSpec, input: &BinaryVector) -> Result<Circuit> {
    let mut c = unmeasured_circuit(net, input)?;
    c.measure(net.output().readout(), 0);
    Ok(c)
}

fn unmeasured_circuit(net: &NetworkSpec, input: &BinaryVector) -> Result<Circuit> {
    net.check_input(input)?;
    let size = net.register_size()?;
    let mut c = Circuit::new(size, 1).with_names(
        net.qubit_names(size),
        vec![format!("c{}", net.num_neurons())],
    );
    for (l, layer) in net.layers().iter().enumerate() {
        for (h, spec) in layer.neurons.iter().enumerate() {
            if l == 0 {
                c.gates(neuron_gates(input, spec)?);
                continue;
            }
            c.gates(spec.encoding_qubits.iter().map(|&q| GateOp::h(q)));
            let prev = net.layer(l - 1);
            for (k, gate) in synapse_phases(spec) {
                let control = prev.neurons[net.feeders(l, h)[k]].readout();
                let mut qubits = vec![control];
                qubits.extend(gate.qubits());
                c.gate(GateOp::z_on(&qubits));
            }
            c.gates(build_uw(spec));
            if spec.ancilla.is_some() {
                c.gate(build_activation(spec)?);
            }
        }
    }
    Ok(c)
}

/// Reduced state of the output readout qubit before measurement.
pub fn coherent_output_density(net: &NetworkSpec, input: &BinaryVector) -> Result<DensityMatrix2> {
    unmeasured_circuit(net, input)?
        .final_state()?
        .reduced_density_matrix(net.output().readout())
}

/// Output probability read from the reduced density matrix.
pub fn coherent_run_exact(net: &NetworkSpec, input: &BinaryVector) -> Result<RunResult> {
    let rho = coherent_output_density(net, input)?;
    Ok(RunResult::new(
        input.label(),
        rho.p1(),
        Mode::Coherent,
        None,
    ))
}

/// Shot estimate from the terminal output measurement.
pub fn coherent_run_sampled<R: Rng + ?Sized>(
    net: &NetworkSpec,
    input: &BinaryVector,
    options: &SamplingOptions,
    rng: &mut R,
) -> Result<RunResult> {
    coherent_sample(net, input, options, rng).map(|(r, _)| r)
}

/// Like [`coherent_run_sampled`], also returning the output-bit counts.
pub fn coherent_sample<R: Rng + ?Sized>(
    net: &NetworkSpec,
    input: &BinaryVector,
    options: &SamplingOptions,
    rng: &mut R,
) -> Result<(RunResult, Counts)> {
    options.check()?;
    let circuit = coherent_circuit(net, input)?;
    let run = RunOptions {
        readout: options.readout,
        exec: options.exec,
    };
    let counts = run_circuit_with(&circuit, options.shots, rng, &run)?;
    let p = options.estimate(&counts)?;
    let result = RunResult::new(input.label(), p, Mode::CoherentSampled, Some(options.shots));
    Ok((result, counts))
}
