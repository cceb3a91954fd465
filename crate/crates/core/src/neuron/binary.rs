use std::fmt;
use std::ops::Neg;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer name of a ±1 vector: bit `k` set means entry `k` is −1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PatternLabel(pub u64);

impl fmt::Display for PatternLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A ±1-valued vector whose length is a power of two (at least 2).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct BinaryVector {
    entries: Vec<i8>,
}

impl BinaryVector {
    pub fn new(entries: Vec<i8>) -> Result<Self> {
        let len = entries.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(len));
        }
        if let Some(&bad) = entries.iter().find(|&&e| e != 1 && e != -1) {
            return Err(Error::InvalidEntry(bad as i64));
        }
        Ok(BinaryVector { entries })
    }

    /// Entry `k` is `(-1)^(bit k of label)`.
    pub fn from_label(label: PatternLabel, len: usize) -> Result<Self> {
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(len));
        }
        if len < 64 && label.0 >> len != 0 || len > 64 {
            return Err(Error::LabelOutOfRange {
                label: label.0,
                len,
            });
        }
        let entries = (0..len)
            .map(|k| if label.0 >> k & 1 == 1 { -1 } else { 1 })
            .collect();
        Ok(BinaryVector { entries })
    }

    /// Entry `k` is +1 for a 0 bit and −1 for a 1 bit.
    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        Self::new(bits.iter().map(|&b| if b { -1 } else { 1 }).collect())
    }

    pub fn all_ones(len: usize) -> Result<Self> {
        Self::new(vec![1; len])
    }

    /// The label, for vectors short enough to have one.
    pub fn label(&self) -> Option<PatternLabel> {
        (self.len() <= 64).then(|| {
            PatternLabel(
                self.entries
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e == -1)
                    .fold(0, |acc, (k, _)| acc | 1 << k),
            )
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `log2(len)`, the number of encoding qubits.
    pub fn num_qubits(&self) -> usize {
        self.entries.len().trailing_zeros() as usize
    }

    pub fn entries(&self) -> &[i8] {
        &self.entries
    }

    pub fn get(&self, k: usize) -> i8 {
        self.entries[k]
    }

    pub fn dot(&self, other: &BinaryVector) -> Result<i64> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| i64::from(a) * i64::from(b))
            .sum())
    }
}

impl Neg for &BinaryVector {
    type Output = BinaryVector;

    fn neg(self) -> BinaryVector {
        BinaryVector {
            entries: self.entries.iter().map(|e| -e).collect(),
        }
    }
}

impl TryFrom<Vec<i8>> for BinaryVector {
    type Error = Error;

    fn try_from(v: Vec<i8>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<BinaryVector> for Vec<i8> {
    fn from(v: BinaryVector) -> Self {
        v.entries
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn label_convention() {
        let v = BinaryVector::from_label(PatternLabel(10), 4).unwrap();
        assert_eq!(v.entries(), &[1, -1, 1, -1]);
        let v = BinaryVector::from_label(PatternLabel(12), 4).unwrap();
        assert_eq!(v.entries(), &[1, 1, -1, -1]);
        let v = BinaryVector::from_label(PatternLabel(2), 2).unwrap();
        assert_eq!(v.entries(), &[1, -1]);
    }

    #[test]
    fn validation() {
        assert!(matches!(
            BinaryVector::new(vec![1, 1, 1]),
            Err(Error::NotPowerOfTwo(3))
        ));
        assert!(matches!(
            BinaryVector::new(vec![1]),
            Err(Error::NotPowerOfTwo(1))
        ));
        assert!(matches!(
            BinaryVector::new(vec![1, 0]),
            Err(Error::InvalidEntry(0))
        ));
        assert!(matches!(
            BinaryVector::from_label(PatternLabel(16), 4),
            Err(Error::LabelOutOfRange { .. })
        ));
    }

    #[test]
    fn bits_map_to_signs() {
        let v = BinaryVector::from_bits(&[true, false]).unwrap();
        assert_eq!(v.entries(), &[-1, 1]);
    }

    #[test]
    fn serde_validates() {
        let v: BinaryVector = serde_json::from_str("[1,-1]").unwrap();
        assert_eq!(v.label(), Some(PatternLabel(2)));
        assert!(serde_json::from_str::<BinaryVector>("[1,2]").is_err());
    }

    proptest! {
        #[test]
        fn label_round_trip(len_pow in 1usize..=6, raw in any::<u64>()) {
            let len = 1usize << len_pow;
            let label = if len == 64 { raw } else { raw & ((1u64 << len) - 1) };
            let v = BinaryVector::from_label(PatternLabel(label), len).unwrap();
            prop_assert_eq!(v.label(), Some(PatternLabel(label)));
        }
    }
}
