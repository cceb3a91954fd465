use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Formats `value` as a bitstring of `width` bits, highest bit first.
pub fn bitstring(value: u64, width: usize) -> String {
    (0..width)
        .rev()
        .map(|b| if value >> b & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Dense probability table over `num_bits`-bit outcomes. Index bit `t`
/// corresponds to the `t`-th bit (qubit or classical bit) the table was built
/// from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    num_bits: usize,
    probs: Vec<f64>,
}

impl Distribution {
    pub fn from_probs(num_bits: usize, probs: Vec<f64>) -> Self {
        assert_eq!(
            probs.len(),
            1 << num_bits,
            "table length must be 2^num_bits"
        );
        Distribution { num_bits, probs }
    }

    pub fn zeros(num_bits: usize) -> Self {
        Self::from_probs(num_bits, vec![0.0; 1 << num_bits])
    }

    pub fn num_bits(&self) -> usize {
        self.num_bits
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, outcome: u64) -> f64 {
        self.probs[outcome as usize]
    }

    pub(crate) fn add(&mut self, outcome: u64, p: f64) {
        self.probs[outcome as usize] += p;
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Probability that bit `bit` reads 1.
    pub fn bit_probability(&self, bit: usize) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .filter(|(j, _)| j >> bit & 1 == 1)
            .map(|(_, p)| p)
            .sum()
    }

    /// Largest absolute entry-wise difference.
    pub fn max_abs_diff(&self, other: &Distribution) -> f64 {
        assert_eq!(self.num_bits, other.num_bits);
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Aggregated shot outcomes keyed by classical-register value.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    num_bits: usize,
    counts: BTreeMap<u64, u64>,
    total_shots: u64,
}

impl Counts {
    pub fn new(num_bits: usize) -> Self {
        Counts {
            num_bits,
            counts: BTreeMap::new(),
            total_shots: 0,
        }
    }

    pub fn record(&mut self, outcome: u64) {
        self.record_n(outcome, 1);
    }

    pub fn record_n(&mut self, outcome: u64, n: u64) {
        if n == 0 {
            return;
        }
        *self.counts.entry(outcome).or_insert(0) += n;
        self.total_shots += n;
    }

    pub fn merge(&mut self, other: &Counts) {
        assert_eq!(self.num_bits, other.num_bits);
        for (&k, &v) in &other.counts {
            self.record_n(k, v);
        }
    }

    pub fn num_bits(&self) -> usize {
        self.num_bits
    }

    pub fn total_shots(&self) -> u64 {
        self.total_shots
    }

    pub fn get(&self, outcome: u64) -> u64 {
        self.counts.get(&outcome).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts.iter().map(|(&k, &v)| (k, v))
    }

    /// Number of shots in which bit `bit` read 1.
    pub fn ones(&self, bit: usize) -> u64 {
        self.iter()
            .filter(|(k, _)| k >> bit & 1 == 1)
            .map(|(_, v)| v)
            .sum()
    }

    /// Empirical frequencies as a dense table.
    pub fn frequencies(&self) -> Distribution {
        let mut d = Distribution::zeros(self.num_bits);
        if self.total_shots > 0 {
            for (k, v) in self.iter() {
                d.add(k, v as f64 / self.total_shots as f64);
            }
        }
        d
    }

    /// Counts keyed by bitstring (highest classical bit first).
    pub fn to_bitstrings(&self) -> BTreeMap<String, u64> {
        self.iter()
            .map(|(k, v)| (bitstring(k, self.num_bits), v))
            .collect()
    }
}

impl fmt::Display for Counts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        write!(f, "{{")?;
        for (k, v) in self.iter() {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            write!(f, "\"{}\": {}", bitstring(k, self.num_bits), v)?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitstrings_are_msb_first() {
        assert_eq!(bitstring(0b011, 3), "011");
        assert_eq!(bitstring(0, 0), "");
    }

    #[test]
    fn counts_sum_to_total() {
        let mut c = Counts::new(2);
        c.record(0b00);
        c.record_n(0b11, 3);
        let mut d = Counts::new(2);
        d.record(0b01);
        c.merge(&d);
        assert_eq!(c.total_shots(), 5);
        assert_eq!(c.iter().map(|(_, v)| v).sum::<u64>(), 5);
        assert_eq!(c.ones(0), 4);
        assert_eq!(c.ones(1), 3);
        assert!((c.frequencies().total() - 1.0).abs() < 1e-15);
        assert_eq!(c.to_string(), r#"{"00": 1, "01": 1, "11": 3}"#);
    }

    #[test]
    fn marginal_bit_probability() {
        let d = Distribution::from_probs(2, vec![0.1, 0.2, 0.3, 0.4]);
        assert!((d.bit_probability(0) - 0.6).abs() < 1e-15);
        assert!((d.bit_probability(1) - 0.7).abs() < 1e-15);
    }
}
