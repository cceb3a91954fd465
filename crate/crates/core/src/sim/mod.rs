//! Exact statevector engine: gates, measurement, classical control and
//! single-qubit reduced density matrices.

mod circuit;
mod density;
mod distribution;
mod gate;
pub mod listing;
mod state;

pub use circuit::{run_circuit, run_circuit_exact, run_circuit_with, Circuit, Op, RunOptions};
pub use density::DensityMatrix2;
pub use distribution::{bitstring, Counts, Distribution};
pub use gate::{Condition, GateKind, GateOp};
pub use state::StateVector;

/// Largest register the dense engine accepts.
pub const MAX_QUBITS: usize = 12;

/// Largest classical register; exact distributions are dense over it.
pub const MAX_CLBITS: usize = 20;

/// Absolute tolerance for normalization checks.
pub const NORM_TOLERANCE: f64 = 1e-12;
