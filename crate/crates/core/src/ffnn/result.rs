use std::fmt;

use serde::{Deserialize, Serialize};

use crate::neuron::PatternLabel;

pub const DEFAULT_THRESHOLD: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Hybrid,
    Coherent,
    HybridSampled,
    CoherentSampled,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Hybrid => "hybrid",
            Mode::Coherent => "coherent",
            Mode::HybridSampled => "hybrid-sampled",
            Mode::CoherentSampled => "coherent-sampled",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    /// Absent for inputs longer than 64 entries.
    pub input_label: Option<PatternLabel>,
    pub p_out: f64,
    pub mode: Mode,
    /// Shots per circuit execution, for sampled modes.
    pub shots: Option<u64>,
    pub classified_positive: bool,
}

impl RunResult {
    pub fn new(
        input_label: Option<PatternLabel>,
        p_out: f64,
        mode: Mode,
        shots: Option<u64>,
    ) -> Self {
        RunResult {
            input_label,
            p_out,
            mode,
            shots,
            classified_positive: p_out > DEFAULT_THRESHOLD,
        }
    }

    /// Re-evaluates the verdict against another threshold.
    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.classified_positive = classify(&self, threshold);
        self
    }
}

/// Strict comparison: `p_out == threshold` is negative.
pub fn classify(result: &RunResult, threshold: f64) -> bool {
    result.p_out > threshold
}
