use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use super::{pattern_string, ExperimentConfig, MAX_TABLE_INPUTS};
use crate::error::{Error, Result};
use crate::ffnn::{
    coherent_run_exact, coherent_sample, hidden_probabilities, hybrid_run_exact, hybrid_sample,
    Mode, NetworkDoc, NetworkSpec,
};
use crate::neuron::{BinaryVector, PatternLabel};

pub const CSV_HEADER: &str = "label,pattern,hidden,mode,p_out,shots,positive,target,correct";

/// One mode's result for one label.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModeOutcome {
    pub mode: Mode,
    pub p_out: f64,
    /// Exact value, reported next to sampled estimates.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_p_out: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    /// Output-bit counts, when the run produced them.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counts: Option<BTreeMap<String, u64>>,
    pub positive: bool,
    pub correct: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TableRow {
    pub label: u64,
    pub pattern: String,
    /// Exact activation probabilities of the first-layer nodes.
    pub hidden: Vec<f64>,
    pub outcomes: Vec<ModeOutcome>,
    pub target: bool,
}

impl TableRow {
    pub fn correct(&self) -> bool {
        self.outcomes.iter().all(|o| o.correct)
    }

    pub fn outcome(&self, mode: Mode) -> Option<&ModeOutcome> {
        self.outcomes.iter().find(|o| o.mode == mode)
    }
}

/// Fields in order: label, pattern, p1, p2, …, one entry per mode, target,
/// correct.
impl Serialize for TableRow {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(None)?;
        map.serialize_entry("label", &self.label)?;
        map.serialize_entry("pattern", &self.pattern)?;
        for (k, p) in self.hidden.iter().enumerate() {
            map.serialize_entry(&format!("p{}", k + 1), p)?;
        }
        for o in &self.outcomes {
            map.serialize_entry(&o.mode.to_string(), o)?;
        }
        map.serialize_entry("target", &self.target)?;
        map.serialize_entry("correct", &self.correct())?;
        map.end()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModeSummary {
    pub mode: Mode,
    /// Fraction of labels classified as intended.
    pub accuracy: f64,
    /// Lowest target `p_out` minus highest non-target `p_out`; positive
    /// when some threshold separates the classes.
    pub margin: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub modes: Vec<ModeSummary>,
    pub all_correct: bool,
}

#[derive(Debug, Serialize)]
pub struct NetworkTable {
    pub config: ExperimentConfig,
    pub network: NetworkDoc,
    pub rows: Vec<TableRow>,
    pub summary: Summary,
}

impl NetworkTable {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("table serializes");
        s.push('\n');
        s
    }

    /// One line per label and mode under [`CSV_HEADER`]. Hidden
    /// probabilities are joined by `;`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for row in &self.rows {
            let hidden: Vec<String> = row.hidden.iter().map(f64::to_string).collect();
            for o in &row.outcomes {
                let shots = o.shots.map(|n| n.to_string()).unwrap_or_default();
                writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{}",
                    row.label,
                    row.pattern,
                    hidden.join(";"),
                    o.mode,
                    o.p_out,
                    shots,
                    o.positive,
                    row.target,
                    o.correct
                )
                .unwrap();
            }
        }
        s
    }

    pub fn all_correct(&self) -> bool {
        self.summary.all_correct
    }
}

fn mode_index(mode: Mode) -> u64 {
    match mode {
        Mode::Hybrid => 0,
        Mode::Coherent => 1,
        Mode::HybridSampled => 2,
        Mode::CoherentSampled => 3,
    }
}

/// Independent generator for one (label, mode) cell, so results do not
/// depend on evaluation order.
fn cell_rng(seed: u64, label: u64, mode: Mode) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(label * 4 + mode_index(mode));
    rng
}

fn run_mode(
    net: &NetworkSpec,
    input: &BinaryVector,
    label: u64,
    mode: Mode,
    config: &ExperimentConfig,
) -> Result<ModeOutcome> {
    let (result, exact, counts) = match mode {
        Mode::Hybrid => (hybrid_run_exact(net, input)?, None, None),
        Mode::Coherent => (coherent_run_exact(net, input)?, None, None),
        Mode::HybridSampled => {
            let (r, c) = hybrid_sample(
                net,
                input,
                &config.sampling(),
                &mut cell_rng(config.seed, label, mode),
            )?;
            (r, Some(hybrid_run_exact(net, input)?.p_out), c)
        }
        Mode::CoherentSampled => {
            let (r, c) = coherent_sample(
                net,
                input,
                &config.sampling(),
                &mut cell_rng(config.seed, label, mode),
            )?;
            (r, Some(coherent_run_exact(net, input)?.p_out), Some(c))
        }
    };
    let result = result.with_threshold(config.threshold);
    Ok(ModeOutcome {
        mode,
        p_out: result.p_out,
        exact_p_out: exact,
        shots: result.shots,
        counts: counts.map(|c| c.to_bitstrings()),
        positive: result.classified_positive,
        correct: result.classified_positive == config.targets.contains(&label),
    })
}

fn summarize(rows: &[TableRow], modes: &[Mode]) -> Summary {
    let modes = modes
        .iter()
        .map(|&mode| {
            let cells: Vec<(bool, &ModeOutcome)> = rows
                .iter()
                .filter_map(|r| r.outcome(mode).map(|o| (r.target, o)))
                .collect();
            let correct = cells.iter().filter(|(_, o)| o.correct).count();
            let lowest_target = cells
                .iter()
                .filter(|(t, _)| *t)
                .map(|(_, o)| o.p_out)
                .reduce(f64::min);
            let highest_other = cells
                .iter()
                .filter(|(t, _)| !*t)
                .map(|(_, o)| o.p_out)
                .reduce(f64::max);
            ModeSummary {
                mode,
                accuracy: correct as f64 / cells.len() as f64,
                margin: lowest_target.zip(highest_other).map(|(a, b)| a - b),
            }
        })
        .collect();
    Summary {
        modes,
        all_correct: rows.iter().all(TableRow::correct),
    }
}

/// Evaluates every input label in the selected modes. Labels run through
/// `config.exec`; rows come back in label order.
pub fn run_network_table(net: &NetworkSpec, config: &ExperimentConfig) -> Result<NetworkTable> {
    config.validate()?;
    let len = net.input_len();
    if len > MAX_TABLE_INPUTS {
        return Err(Error::InvalidConfig(format!(
            "tables cover inputs of at most {MAX_TABLE_INPUTS} entries, the network reads {len}"
        )));
    }
    let modes = config.mode.modes(config.evaluation);
    let rows = config.exec.try_map(1 << len, |label| {
        let label = label as u64;
        let input = BinaryVector::from_label(PatternLabel(label), len)?;
        let outcomes = modes
            .iter()
            .map(|&mode| run_mode(net, &input, label, mode, config))
            .collect::<Result<Vec<_>>>()?;
        Ok::<_, Error>(TableRow {
            label,
            pattern: pattern_string(label, len),
            hidden: hidden_probabilities(net, &input)?,
            outcomes,
            target: config.targets.contains(&label),
        })
    })?;
    let summary = summarize(&rows, &modes);
    Ok(NetworkTable {
        config: config.clone(),
        network: NetworkDoc::from(net),
        rows,
        summary,
    })
}
