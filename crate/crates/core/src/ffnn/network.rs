use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::neuron::{BinaryVector, NeuronSpec, PatternLabel};
use crate::sim::MAX_QUBITS;

/// Widest layer whose joint outcomes are enumerated.
pub const MAX_LAYER_WIDTH: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerSpec {
    pub neurons: Vec<NeuronSpec>,
}

/// Layered network. `synapses[l][h]` lists, in order, the neurons of layer
/// `l` feeding neuron `h` of layer `l + 1`; the first layer reads the raw
/// input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkSpec {
    layers: Vec<LayerSpec>,
    synapses: Vec<Vec<Vec<usize>>>,
}

impl NetworkSpec {
    /// Validates topology. `synapses = None` connects every neuron to all
    /// neurons of the previous layer, in order.
    pub fn new(layers: Vec<LayerSpec>, synapses: Option<Vec<Vec<Vec<usize>>>>) -> Result<Self> {
        if layers.len() < 2 {
            return Err(Error::InvalidNetwork(
                "at least two layers are required".into(),
            ));
        }
        if layers.iter().any(|l| l.neurons.is_empty()) {
            return Err(Error::InvalidNetwork("layers must not be empty".into()));
        }
        if layers.last().unwrap().neurons.len() != 1 {
            return Err(Error::InvalidNetwork(
                "the output layer must hold exactly one neuron".into(),
            ));
        }
        if let Some(l) = layers
            .iter()
            .position(|l| l.neurons.len() > MAX_LAYER_WIDTH)
        {
            return Err(Error::InvalidNetwork(format!(
                "layer {l} is wider than {MAX_LAYER_WIDTH} neurons"
            )));
        }
        let input_len = layers[0].neurons[0].num_inputs();
        if let Some(n) = layers[0]
            .neurons
            .iter()
            .find(|n| n.num_inputs() != input_len)
        {
            return Err(Error::DimensionMismatch {
                expected: input_len,
                found: n.num_inputs(),
            });
        }
        for (l, layer) in layers.iter().enumerate() {
            let mut used = Vec::new();
            for n in &layer.neurons {
                for q in n.qubits() {
                    if used.contains(&q) {
                        return Err(Error::InvalidNetwork(format!(
                            "qubit {q} is assigned twice within layer {l}"
                        )));
                    }
                    used.push(q);
                }
            }
        }

        let synapses = synapses.unwrap_or_else(|| {
            layers
                .windows(2)
                .map(|w| vec![(0..w[0].neurons.len()).collect(); w[1].neurons.len()])
                .collect()
        });
        if synapses.len() != layers.len() - 1 {
            return Err(Error::InvalidNetwork(format!(
                "expected synapse lists for {} layers, found {}",
                layers.len() - 1,
                synapses.len()
            )));
        }
        for (l, links) in synapses.iter().enumerate() {
            let (prev, next) = (&layers[l], &layers[l + 1]);
            if links.len() != next.neurons.len() {
                return Err(Error::InvalidNetwork(format!(
                    "layer {} has {} neurons but {} synapse lists",
                    l + 1,
                    next.neurons.len(),
                    links.len()
                )));
            }
            for (h, feed) in links.iter().enumerate() {
                if let Some(&k) = feed.iter().find(|&&k| k >= prev.neurons.len()) {
                    return Err(Error::InvalidNetwork(format!(
                        "neuron {h} of layer {} is fed by missing neuron {k}",
                        l + 1
                    )));
                }
                let expected = next.neurons[h].num_inputs();
                if feed.len() != expected {
                    return Err(Error::SynapseArity {
                        layer: l + 1,
                        neuron: h,
                        expected,
                        found: feed.len(),
                    });
                }
            }
        }
        Ok(NetworkSpec { layers, synapses })
    }

    /// Two hidden 2-qubit nodes with ancillas on qubits 0–5 and a 1-qubit
    /// output node on qubit 6, fully connected.
    pub fn three_node(w1: BinaryVector, w2: BinaryVector, w3: BinaryVector) -> Result<Self> {
        Self::two_layer(vec![w1, w2], w3)
    }

    /// Fully connected hidden layer plus one output node, packed into
    /// consecutive qubits: each hidden node takes its encoding qubits then
    /// its ancilla; the output node follows, without an ancilla when it
    /// has a single qubit.
    pub fn two_layer(hidden: Vec<BinaryVector>, output: BinaryVector) -> Result<Self> {
        let mut next = 0;
        let mut take = |n: usize| {
            let qubits: Vec<usize> = (next..next + n).collect();
            next += n;
            qubits
        };
        let hidden = hidden
            .into_iter()
            .map(|w| {
                let qubits = take(w.num_qubits());
                let ancilla = take(1)[0];
                NeuronSpec::new(w, qubits, Some(ancilla))
            })
            .collect::<Result<Vec<_>>>()?;
        let n = output.num_qubits();
        let qubits = take(n);
        let ancilla = (n > 1).then(|| take(1)[0]);
        let output = NeuronSpec::new(output, qubits, ancilla)?;
        Self::new(
            vec![
                LayerSpec { neurons: hidden },
                LayerSpec {
                    neurons: vec![output],
                },
            ],
            None,
        )
    }

    /// The line-recognition network: weights 12 and 10 on the hidden nodes
    /// and (1, −1) on the output node.
    pub fn line_recognition() -> Self {
        let lab = |l, m| BinaryVector::from_label(PatternLabel(l), m).unwrap();
        Self::three_node(lab(12, 4), lab(10, 4), lab(2, 2)).unwrap()
    }

    pub fn layers(&self) -> &[LayerSpec] {
        &self.layers
    }

    pub fn layer(&self, l: usize) -> &LayerSpec {
        &self.layers[l]
    }

    /// Feeding list of neuron `h` in layer `l >= 1`.
    pub fn feeders(&self, l: usize, h: usize) -> &[usize] {
        &self.synapses[l - 1][h]
    }

    pub fn synapses(&self) -> &[Vec<Vec<usize>>] {
        &self.synapses
    }

    pub fn input_len(&self) -> usize {
        self.layers[0].neurons[0].num_inputs()
    }

    pub fn output(&self) -> &NeuronSpec {
        &self.layers.last().unwrap().neurons[0]
    }

    /// 1-based position of a neuron when counting layer by layer.
    pub fn neuron_number(&self, layer: usize, index: usize) -> usize {
        self.layers[..layer]
            .iter()
            .map(|l| l.neurons.len())
            .sum::<usize>()
            + index
            + 1
    }

    pub fn num_neurons(&self) -> usize {
        self.layers.iter().map(|l| l.neurons.len()).sum()
    }

    pub fn check_input(&self, input: &BinaryVector) -> Result<()> {
        if input.len() != self.input_len() {
            return Err(Error::DimensionMismatch {
                expected: self.input_len(),
                found: input.len(),
            });
        }
        Ok(())
    }

    /// Qubit count of the single register holding the whole network; every
    /// neuron must own distinct qubits.
    pub(crate) fn register_size(&self) -> Result<usize> {
        let mut used = 0u64;
        let mut size = 0;
        for n in self.layers.iter().flat_map(|l| &l.neurons) {
            for q in n.qubits() {
                if q >= MAX_QUBITS {
                    return Err(Error::QubitOutOfRange {
                        qubit: q,
                        num_qubits: MAX_QUBITS,
                    });
                }
                if used >> q & 1 == 1 {
                    return Err(Error::InvalidNetwork(format!(
                        "qubit {q} is shared between neurons; a single-register circuit needs disjoint assignments"
                    )));
                }
                used |= 1 << q;
                size = size.max(q + 1);
            }
        }
        Ok(size)
    }

    /// Qubit names: `n<k>.q<j>` for encoding qubits, `a<k>` for ancillas and
    /// `out` for the output readout; unused qubits keep `q<i>`.
    pub(crate) fn qubit_names(&self, size: usize) -> Vec<String> {
        let mut names: Vec<String> = (0..size).map(|q| format!("q{q}")).collect();
        let last = self.layers.len() - 1;
        for (l, layer) in self.layers.iter().enumerate() {
            for (i, n) in layer.neurons.iter().enumerate() {
                let k = self.neuron_number(l, i);
                for (j, &q) in n.encoding_qubits.iter().enumerate() {
                    names[q] = format!("n{k}.q{j}");
                }
                if let Some(a) = n.ancilla {
                    names[a] = format!("a{k}");
                }
                if l == last {
                    names[n.readout()] = "out".into();
                }
            }
        }
        names
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: NetworkDoc = serde_json::from_str(text)?;
        doc.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&NetworkDoc::from(self)).expect("network document serializes")
    }
}

/// On-disk form of a [`NetworkSpec`].
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkDoc {
    pub layers: Vec<LayerDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synapses: Option<Vec<Vec<Vec<usize>>>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerDoc {
    pub neurons: Vec<NeuronDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NeuronDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_label: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_entries: Option<Vec<i8>>,
    pub qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ancilla: Option<usize>,
}

impl TryFrom<NeuronDoc> for NeuronSpec {
    type Error = Error;

    fn try_from(doc: NeuronDoc) -> Result<Self> {
        let m = 1usize
            .checked_shl(doc.qubits.len() as u32)
            .filter(|_| !doc.qubits.is_empty())
            .ok_or_else(|| Error::InvalidNetwork("a neuron needs at least one qubit".into()))?;
        let weight = match (doc.weight_label, doc.weight_entries) {
            (Some(l), None) => BinaryVector::from_label(PatternLabel(l), m)?,
            (None, Some(e)) => BinaryVector::new(e)?,
            (Some(l), Some(e)) => {
                let w = BinaryVector::new(e)?;
                if w.label() != Some(PatternLabel(l)) {
                    return Err(Error::InvalidNetwork(format!(
                        "weight_label {l} disagrees with weight_entries"
                    )));
                }
                w
            }
            (None, None) => {
                return Err(Error::InvalidNetwork(
                    "a neuron needs weight_label or weight_entries".into(),
                ))
            }
        };
        NeuronSpec::new(weight, doc.qubits, doc.ancilla)
    }
}

impl TryFrom<NetworkDoc> for NetworkSpec {
    type Error = Error;

    fn try_from(doc: NetworkDoc) -> Result<Self> {
        let layers = doc
            .layers
            .into_iter()
            .map(|l| {
                Ok(LayerSpec {
                    neurons: l
                        .neurons
                        .into_iter()
                        .map(NeuronSpec::try_from)
                        .collect::<Result<_>>()?,
                })
            })
            .collect::<Result<_>>()?;
        NetworkSpec::new(layers, doc.synapses)
    }
}

impl From<&NetworkSpec> for NetworkDoc {
    fn from(net: &NetworkSpec) -> Self {
        NetworkDoc {
            layers: net
                .layers
                .iter()
                .map(|l| LayerDoc {
                    neurons: l
                        .neurons
                        .iter()
                        .map(|n| NeuronDoc {
                            weight_label: n.weight.label().map(|p| p.0),
                            weight_entries: Some(n.weight.entries().to_vec()),
                            qubits: n.encoding_qubits.clone(),
                            ancilla: n.ancilla,
                        })
                        .collect(),
                })
                .collect(),
            synapses: Some(net.synapses.clone()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lab(l: u64, m: usize) -> BinaryVector {
        BinaryVector::from_label(PatternLabel(l), m).unwrap()
    }

    #[test]
    fn fixture_layout() {
        let net = NetworkSpec::line_recognition();
        assert_eq!(net.input_len(), 4);
        assert_eq!(net.feeders(1, 0), &[0, 1]);
        assert_eq!(net.register_size().unwrap(), 7);
        assert_eq!(
            net.qubit_names(7),
            vec!["n1.q0", "n1.q1", "a1", "n2.q0", "n2.q1", "a2", "out"]
        );
        assert_eq!(net.output().weight.entries(), &[1, -1]);
    }

    #[test]
    fn synapse_arity_is_enforced() {
        let hidden = LayerSpec {
            neurons: vec![NeuronSpec::new(lab(12, 4), vec![0, 1], Some(2)).unwrap()],
        };
        let output = LayerSpec {
            neurons: vec![NeuronSpec::new(lab(2, 2), vec![3], None).unwrap()],
        };
        let err = NetworkSpec::new(vec![hidden, output], None).unwrap_err();
        assert!(matches!(
            err,
            Error::SynapseArity {
                expected: 2,
                found: 1,
                ..
            }
        ));
    }

    #[test]
    fn duplicate_feeding_is_allowed() {
        // one hidden neuron copied onto both inputs of the output node
        let hidden = LayerSpec {
            neurons: vec![NeuronSpec::new(lab(12, 4), vec![0, 1], Some(2)).unwrap()],
        };
        let output = LayerSpec {
            neurons: vec![NeuronSpec::new(lab(2, 2), vec![3], None).unwrap()],
        };
        assert!(NetworkSpec::new(vec![hidden, output], Some(vec![vec![vec![0, 0]]])).is_ok());
    }

    #[test]
    fn structural_errors() {
        let single = LayerSpec {
            neurons: vec![NeuronSpec::local(lab(0, 4))],
        };
        assert!(matches!(
            NetworkSpec::new(vec![single.clone()], None),
            Err(Error::InvalidNetwork(_))
        ));
        let clash = LayerSpec {
            neurons: vec![NeuronSpec::local(lab(0, 4)), NeuronSpec::local(lab(1, 4))],
        };
        assert!(matches!(
            NetworkSpec::new(vec![clash, single], None),
            Err(Error::InvalidNetwork(_))
        ));
    }

    #[test]
    fn json_round_trip_and_forms() {
        let net = NetworkSpec::line_recognition();
        let back = NetworkSpec::from_json(&net.to_json()).unwrap();
        assert_eq!(back, net);

        let text = r#"{
            "layers": [
                {"neurons": [
                    {"weight_label": 12, "qubits": [0, 1], "ancilla": 2},
                    {"weight_entries": [1, -1, 1, -1], "qubits": [3, 4], "ancilla": 5}
                ]},
                {"neurons": [{"weight_entries": [1, -1], "qubits": [6]}]}
            ]
        }"#;
        assert_eq!(NetworkSpec::from_json(text).unwrap(), net);

        let bad = r#"{"layers": [{"neurons": [{"weight_label": 1, "weight_entries": [1, 1], "qubits": [0]}]}]}"#;
        assert!(NetworkSpec::from_json(bad).is_err());
        let missing = r#"{"layers": [{"neurons": [{"qubits": [0]}]}]}"#;
        assert!(NetworkSpec::from_json(missing).is_err());
    }
}
