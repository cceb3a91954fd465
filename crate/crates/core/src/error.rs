use thiserror::Error;

use crate::sim::GateKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit {qubit} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error("qubit {0} appears more than once in the same operation")]
    DuplicateQubit(usize),
    #[error("{kind:?} gate cannot act on {targets} target(s) with {controls} control(s)")]
    GateArity {
        kind: GateKind,
        targets: usize,
        controls: usize,
    },
    #[error("register size {0} is outside the supported range 1..={max}", max = crate::sim::MAX_QUBITS)]
    RegisterSize(usize),
    #[error("amplitude vector of length {0} is not a power of two")]
    AmplitudeLength(usize),
    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),
    #[error("qubit list must not be empty")]
    EmptyQubitList,
    #[error("classical bit {clbit} out of range for {num_clbits} classical bit(s)")]
    ClbitOutOfRange { clbit: usize, num_clbits: usize },
    #[error("too many classical bits ({0}); at most {max} are supported", max = crate::sim::MAX_CLBITS)]
    TooManyClbits(usize),
    #[error("operation {op_index} is conditioned on classical bit {clbit}, which no earlier measurement writes")]
    UnwrittenClbit { clbit: usize, op_index: usize },
    #[error("classically conditioned gates must be executed through a circuit runner")]
    ConditionedGate,
    #[error(
        "operation {0} follows a measurement; the circuit has no single pre-measurement state"
    )]
    MidCircuitMeasurement(usize),
    #[error("operation {op_index} cannot be converted to a quantum-controlled gate: {reason}")]
    NotDeferrable { op_index: usize, reason: String },

    #[error("vector length {0} is not a power of two (>= 2)")]
    NotPowerOfTwo(usize),
    #[error("entry {0} is not +1 or -1")]
    InvalidEntry(i64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("label {label} out of range for vectors of length {len}")]
    LabelOutOfRange { label: u64, len: usize },
    #[error("neuron has no ancilla and {0} encoding qubits; only single-qubit neurons may be read out directly")]
    MissingAncilla(usize),

    #[error("invalid network: {0}")]
    InvalidNetwork(String),
    #[error(
        "neuron {neuron} of layer {layer} encodes {expected} inputs but is fed by {found} neurons"
    )]
    SynapseArity {
        layer: usize,
        neuron: usize,
        expected: usize,
        found: usize,
    },

    #[error("readout error probabilities must lie in [0, 0.5): p01 = {p01}, p10 = {p10}")]
    InvalidNoise { p01: f64, p10: f64 },
    #[error("calibration over {0} bits exceeds the dense limit of {max}", max = crate::noise::MAX_CALIBRATION_BITS)]
    CalibrationTooLarge(usize),
    #[error("calibration matrix is singular")]
    SingularCalibration,
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("shot count must be at least 1")]
    ZeroShots,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
