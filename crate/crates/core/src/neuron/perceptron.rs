use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::binary::BinaryVector;
use super::hsgs::hsgs_on;
use crate::error::{Error, Result};
use crate::sim::{Circuit, GateOp, StateVector};

/// One perceptron node: its weight vector and where it lives in a register.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeuronSpec {
    pub weight: BinaryVector,
    pub encoding_qubits: Vec<usize>,
    /// Target of the activation gate. Single-qubit neurons may omit it and
    /// be read out from their encoding qubit directly.
    pub ancilla: Option<usize>,
}

impl NeuronSpec {
    pub fn new(
        weight: BinaryVector,
        encoding_qubits: Vec<usize>,
        ancilla: Option<usize>,
    ) -> Result<Self> {
        if encoding_qubits.len() != weight.num_qubits() {
            return Err(Error::DimensionMismatch {
                expected: weight.num_qubits(),
                found: encoding_qubits.len(),
            });
        }
        let mut all = encoding_qubits.clone();
        all.extend(ancilla);
        for (i, q) in all.iter().enumerate() {
            if all[..i].contains(q) {
                return Err(Error::DuplicateQubit(*q));
            }
        }
        if ancilla.is_none() && encoding_qubits.len() != 1 {
            return Err(Error::MissingAncilla(encoding_qubits.len()));
        }
        Ok(NeuronSpec {
            weight,
            encoding_qubits,
            ancilla,
        })
    }

    /// Encoding qubits `0..N` and ancilla `N`.
    pub fn local(weight: BinaryVector) -> Self {
        let n = weight.num_qubits();
        NeuronSpec {
            weight,
            encoding_qubits: (0..n).collect(),
            ancilla: Some(n),
        }
    }

    pub fn num_inputs(&self) -> usize {
        self.weight.len()
    }

    /// Qubit holding the node's output after activation.
    pub fn readout(&self) -> usize {
        self.ancilla.unwrap_or(self.encoding_qubits[0])
    }

    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.encoding_qubits.iter().copied().chain(self.ancilla)
    }

    fn check_dim(&self, v: &BinaryVector) -> Result<()> {
        if v.len() != self.weight.len() {
            return Err(Error::DimensionMismatch {
                expected: self.weight.len(),
                found: v.len(),
            });
        }
        Ok(())
    }
}

/// `(1/√m) Σ_j v_j |j⟩`.
pub fn rew_state(v: &BinaryVector) -> Result<StateVector> {
    let scale = 1.0 / (v.len() as f64).sqrt();
    StateVector::from_amplitudes(
        v.entries()
            .iter()
            .map(|&e| Complex64::new(f64::from(e) * scale, 0.0))
            .collect(),
    )
}

/// Input preparation: Hadamards on the encoding register, then the sign
/// flips of `input`. Maps `|0…0⟩` to the encoded input up to global sign.
pub fn build_ui(input: &BinaryVector, spec: &NeuronSpec) -> Result<Vec<GateOp>> {
    spec.check_dim(input)?;
    let mut gates: Vec<GateOp> = spec.encoding_qubits.iter().map(|&q| GateOp::h(q)).collect();
    gates.extend(hsgs_on(input, &spec.encoding_qubits).gates);
    Ok(gates)
}

/// Weight stage: the (self-inverse) sign flips of the weight, then H and X on
/// every encoding qubit, so the encoded weight is sent to `|1…1⟩`.
pub fn build_uw(spec: &NeuronSpec) -> Vec<GateOp> {
    let mut gates = hsgs_on(&spec.weight, &spec.encoding_qubits).gates;
    gates.extend(spec.encoding_qubits.iter().map(|&q| GateOp::h(q)));
    gates.extend(spec.encoding_qubits.iter().map(|&q| GateOp::x(q)));
    gates
}

/// Multi-controlled NOT from the encoding register onto the ancilla.
pub fn build_activation(spec: &NeuronSpec) -> Result<GateOp> {
    let ancilla = spec
        .ancilla
        .ok_or(Error::MissingAncilla(spec.encoding_qubits.len()))?;
    Ok(GateOp::mcx(&spec.encoding_qubits, ancilla))
}

/// U_i, U_w and, if the node has an ancilla, the activation gate.
pub fn neuron_gates(input: &BinaryVector, spec: &NeuronSpec) -> Result<Vec<GateOp>> {
    let mut gates = build_ui(input, spec)?;
    gates.extend(build_uw(spec));
    if spec.ancilla.is_some() {
        gates.push(build_activation(spec)?);
    }
    Ok(gates)
}

/// Stand-alone node on `N + 1` qubits whose readout is measured into `c0`.
pub fn neuron_circuit(input: &BinaryVector, weight: &BinaryVector) -> Result<Circuit> {
    let spec = NeuronSpec::local(weight.clone());
    let n = spec.encoding_qubits.len();
    let names = (0..n)
        .map(|q| format!("q{q}"))
        .chain(std::iter::once("a".to_owned()))
        .collect();
    let mut c = Circuit::new(n + 1, 1).with_names(names, vec!["c0".into()]);
    c.gates(neuron_gates(input, &spec)?)
        .measure(spec.readout(), 0);
    Ok(c)
}

/// Ancilla excitation probability obtained by simulating the node circuit.
pub fn simulate_activation(input: &BinaryVector, weight: &BinaryVector) -> Result<f64> {
    let state = neuron_circuit(input, weight)?.final_state()?;
    Ok(state.exact_probabilities(&[weight.num_qubits()])?.get(1))
}

/// Closed form `(i·w)² / m²`.
pub fn exact_activation_probability(input: &BinaryVector, weight: &BinaryVector) -> Result<f64> {
    let d = input.dot(weight)? as f64;
    let m = input.len() as f64;
    Ok(d * d / (m * m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neuron::PatternLabel;

    const TOL: f64 = 1e-12;

    fn lab(l: u64, m: usize) -> BinaryVector {
        BinaryVector::from_label(PatternLabel(l), m).unwrap()
    }

    #[test]
    fn rew_examples() {
        let s = rew_state(&lab(0, 4)).unwrap();
        assert!(s.amplitudes().iter().all(|a| (a.re - 0.5).abs() < TOL));
        let s = rew_state(&lab(10, 4)).unwrap();
        let re: Vec<f64> = s.amplitudes().iter().map(|a| a.re).collect();
        assert_eq!(re, vec![0.5, -0.5, 0.5, -0.5]);
    }

    #[test]
    fn ui_examples() {
        let spec = NeuronSpec::local(lab(0, 4));
        let g = build_ui(&lab(0, 4), &spec).unwrap();
        assert_eq!(g, vec![GateOp::h(0), GateOp::h(1)]);

        let mut s = StateVector::new(2).unwrap();
        s.apply_all(&build_ui(&lab(12, 4), &spec).unwrap()).unwrap();
        let target = rew_state(&lab(12, 4)).unwrap();
        assert!(s.distance_up_to_phase(&target) < TOL);

        assert!(matches!(
            build_ui(&lab(3, 2), &spec),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn uw_for_uniform_weight() {
        let spec = NeuronSpec::local(lab(0, 4));
        assert_eq!(
            build_uw(&spec),
            vec![GateOp::h(0), GateOp::h(1), GateOp::x(0), GateOp::x(1)]
        );
    }

    #[test]
    fn activation_examples() {
        let spec = NeuronSpec::local(lab(12, 4));
        assert_eq!(build_activation(&spec).unwrap(), GateOp::mcx(&[0, 1], 2));
        for (i, expected) in [(12, 1.0), (10, 0.0), (8, 0.25)] {
            let p = simulate_activation(&lab(i, 4), &lab(12, 4)).unwrap();
            assert!((p - expected).abs() < TOL, "input {i}: {p}");
        }
    }

    #[test]
    fn closed_form_examples() {
        let w = lab(12, 4);
        assert_eq!(exact_activation_probability(&w, &w).unwrap(), 1.0);
        assert_eq!(exact_activation_probability(&-&w, &w).unwrap(), 1.0);
        assert_eq!(exact_activation_probability(&lab(1, 4), &w).unwrap(), 0.25);
        assert!(matches!(
            exact_activation_probability(&lab(1, 2), &w),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn spec_validation() {
        assert!(matches!(
            NeuronSpec::new(lab(0, 4), vec![0], Some(2)),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            NeuronSpec::new(lab(0, 4), vec![0, 1], Some(1)),
            Err(Error::DuplicateQubit(1))
        ));
        assert!(matches!(
            NeuronSpec::new(lab(0, 4), vec![0, 1], None),
            Err(Error::MissingAncilla(2))
        ));
        let out = NeuronSpec::new(lab(2, 2), vec![6], None).unwrap();
        assert_eq!(out.readout(), 6);
    }
}
