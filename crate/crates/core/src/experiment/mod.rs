//! Experiment harness: the classification table over every input label,
//! single-neuron reports and sweeps, pixel rendering and argument parsing.

mod neuron;
mod table;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffnn::{HybridSampling, Mode, NetworkSpec, SamplingOptions, DEFAULT_THRESHOLD};
use crate::neuron::{BinaryVector, PatternLabel};
use crate::noise::ReadoutErrorModel;
use crate::parallel::Exec;

pub use neuron::{evaluate_neuron, neuron_sweep, NeuronOptions, NeuronReport};
pub use table::{
    run_network_table, ModeOutcome, ModeSummary, NetworkTable, Summary, TableRow, CSV_HEADER,
};

pub const DEFAULT_SHOTS: u64 = 8192;
/// Labels of the horizontal (12, 3) and vertical (10, 5) lines.
pub const LINE_TARGETS: [u64; 4] = [3, 5, 10, 12];
/// Largest input length whose labels are tabulated exhaustively.
pub const MAX_TABLE_INPUTS: usize = 8;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeSelection {
    Hybrid,
    Coherent,
    #[default]
    Both,
}

impl ModeSelection {
    /// Selected modes for the given evaluation, hybrid first.
    pub fn modes(self, evaluation: Evaluation) -> Vec<Mode> {
        let sampled = evaluation == Evaluation::Sampled;
        let hybrid = if sampled {
            Mode::HybridSampled
        } else {
            Mode::Hybrid
        };
        let coherent = if sampled {
            Mode::CoherentSampled
        } else {
            Mode::Coherent
        };
        match self {
            ModeSelection::Hybrid => vec![hybrid],
            ModeSelection::Coherent => vec![coherent],
            ModeSelection::Both => vec![hybrid, coherent],
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Evaluation {
    #[default]
    Exact,
    Sampled,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

/// Settings of a network experiment. Noise only affects sampled runs and
/// `mitigate` without noise changes nothing.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub mode: ModeSelection,
    pub evaluation: Evaluation,
    pub shots: u64,
    pub seed: u64,
    pub noise: Option<ReadoutErrorModel>,
    pub mitigate: bool,
    pub hybrid_sampling: HybridSampling,
    pub threshold: f64,
    /// Labels that should be classified positive.
    pub targets: Vec<u64>,
    #[serde(skip)]
    pub exec: Exec,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            mode: ModeSelection::Both,
            evaluation: Evaluation::Exact,
            shots: DEFAULT_SHOTS,
            seed: 0,
            noise: None,
            mitigate: false,
            hybrid_sampling: HybridSampling::Auto,
            threshold: DEFAULT_THRESHOLD,
            targets: LINE_TARGETS.to_vec(),
            exec: Exec::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.evaluation == Evaluation::Sampled && self.shots == 0 {
            return Err(Error::ZeroShots);
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::InvalidProbability(self.threshold));
        }
        Ok(())
    }

    pub fn sampling(&self) -> SamplingOptions {
        SamplingOptions {
            shots: self.shots,
            readout: self.noise,
            mitigate: self.mitigate,
            hybrid: self.hybrid_sampling,
            exec: self.exec,
        }
    }
}

/// Two-line picture of a 4-entry label. The top row shows entries 3 and 2,
/// the bottom row entries 1 and 0; `#` marks a −1 entry (set bit).
pub fn render(label: u64) -> Result<String> {
    if label >= 16 {
        return Err(Error::LabelOutOfRange { label, len: 4 });
    }
    let px = |k: u64| if label >> k & 1 == 1 { '#' } else { '.' };
    Ok(format!("{}{}\n{}{}", px(3), px(2), px(1), px(0)))
}

/// Single-line pattern: the rendered rows joined by `/` for 4 entries,
/// otherwise one glyph per entry from the highest index down.
pub fn pattern_string(label: u64, len: usize) -> String {
    if len == 4 {
        if let Ok(r) = render(label) {
            return r.replace('\n', "/");
        }
    }
    (0..len)
        .rev()
        .map(|k| if label >> k & 1 == 1 { '#' } else { '.' })
        .collect()
}

/// A vector given either as a label (`12`) or as `:`-separated entries
/// (`1:1:-1:-1`). Labels need the length; entry lists must match it.
pub fn parse_vector(token: &str, len: usize) -> Result<BinaryVector> {
    let token = token.trim();
    if token.contains(':') {
        let entries = token
            .split(':')
            .map(|e| {
                e.trim().parse::<i8>().map_err(|_| {
                    Error::InvalidConfig(format!("bad vector entry '{e}' in '{token}'"))
                })
            })
            .collect::<Result<Vec<i8>>>()?;
        let v = BinaryVector::new(entries)?;
        if v.len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                found: v.len(),
            });
        }
        Ok(v)
    } else {
        let label = token.parse::<u64>().map_err(|_| {
            Error::InvalidConfig(format!("'{token}' is neither a label nor an entry list"))
        })?;
        BinaryVector::from_label(PatternLabel(label), len)
    }
}

/// Length of a vector token: its entry count, or `default` for a label.
fn token_len(token: &str, default: usize) -> usize {
    if token.contains(':') {
        token.split(':').count()
    } else {
        default
    }
}

/// Comma-separated hidden weights followed by the output weight, e.g.
/// `12,10,2`. Hidden labels are read as 4-entry vectors unless an entry
/// list fixes another length; the output weight has one entry per hidden
/// node.
pub fn parse_weights(text: &str) -> Result<NetworkSpec> {
    let tokens: Vec<&str> = text.split(',').map(str::trim).collect();
    if tokens.len() < 3 {
        return Err(Error::InvalidConfig(format!(
            "expected at least two hidden weights and an output weight, got '{text}'"
        )));
    }
    let (out_token, hidden_tokens) = tokens.split_last().unwrap();
    let len = hidden_tokens
        .iter()
        .find(|t| t.contains(':'))
        .map_or(4, |t| token_len(t, 4));
    let hidden = hidden_tokens
        .iter()
        .map(|t| parse_vector(t, len))
        .collect::<Result<Vec<_>>>()?;
    let output = parse_vector(out_token, hidden.len())?;
    NetworkSpec::two_layer(hidden, output)
}

impl FromStr for ReadoutErrorModel {
    type Err = Error;

    /// `p01,p10`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [a, b] = parts.as_slice() else {
            return Err(Error::InvalidConfig(format!(
                "noise must be 'p01,p10', got '{s}'"
            )));
        };
        let num = |t: &str| {
            t.parse::<f64>()
                .map_err(|_| Error::InvalidConfig(format!("bad probability '{t}'")))
        };
        ReadoutErrorModel::new(num(a)?, num(b)?)
    }
}

impl fmt::Display for ModeSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModeSelection::Hybrid => "hybrid",
            ModeSelection::Coherent => "coherent",
            ModeSelection::Both => "both",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_examples() {
        assert_eq!(render(12).unwrap(), "##\n..");
        assert_eq!(render(0).unwrap(), "..\n..");
        assert_eq!(render(5).unwrap(), ".#\n.#");
        assert_eq!(render(3).unwrap(), "..\n##");
        assert_eq!(render(10).unwrap(), "#.\n#.");
        assert!(matches!(
            render(16),
            Err(Error::LabelOutOfRange { label: 16, len: 4 })
        ));
        assert_eq!(pattern_string(12, 4), "##/..");
        assert_eq!(pattern_string(1, 2), ".#");
    }

    #[test]
    fn vector_tokens() {
        assert_eq!(parse_vector("12", 4).unwrap().entries(), &[1, 1, -1, -1]);
        assert_eq!(parse_vector("1:-1", 2).unwrap().entries(), &[1, -1]);
        assert!(matches!(
            parse_vector("1:-1", 4),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            parse_vector("1:2", 2),
            Err(Error::InvalidEntry(2))
        ));
        assert!(matches!(parse_vector("x", 4), Err(Error::InvalidConfig(_))));
        assert!(matches!(
            parse_vector("16", 4),
            Err(Error::LabelOutOfRange { .. })
        ));
    }

    #[test]
    fn weights() {
        assert_eq!(
            parse_weights("12,10,2").unwrap(),
            NetworkSpec::line_recognition()
        );
        assert_eq!(
            parse_weights("1:1:-1:-1, 1:-1:1:-1, 1:-1").unwrap(),
            NetworkSpec::line_recognition()
        );
        let net = parse_weights("1:1:1:1:1:1:1:-1,0,3").unwrap();
        assert_eq!(net.input_len(), 8);
        assert!(parse_weights("12,10").is_err());
        assert!(parse_weights("12,10,6,2").is_err());
    }

    #[test]
    fn noise_flag() {
        let m: ReadoutErrorModel = "0.05,0.03".parse().unwrap();
        assert_eq!((m.p01, m.p10), (0.05, 0.03));
        assert!("0.05".parse::<ReadoutErrorModel>().is_err());
        assert!("0.6,0".parse::<ReadoutErrorModel>().is_err());
    }

    #[test]
    fn config_checks() {
        let mut c = ExperimentConfig::default();
        assert!(c.validate().is_ok());
        c.evaluation = Evaluation::Sampled;
        c.shots = 0;
        assert!(matches!(c.validate(), Err(Error::ZeroShots)));
        c.shots = 1;
        c.threshold = 1.5;
        assert!(c.validate().is_err());
        assert_eq!(
            ModeSelection::Both.modes(Evaluation::Sampled),
            vec![Mode::HybridSampled, Mode::CoherentSampled]
        );
    }
}
