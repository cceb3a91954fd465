//! Synthetic readout errors and their mitigation by calibration-matrix
//! inversion.
//!
//! Every measured bit passes independently through the same asymmetric
//! bit-flip channel. The confusion matrix over `b` bits is the `b`-fold
//! tensor power of the single-bit matrix
//!
//! ```text
//! [[1 - p01, p10],
//!  [p01,     1 - p10]]
//! ```
//!
//! (column = true value, row = value read). Mitigation solves
//! `cal · x = frequencies`, clips negative entries and renormalizes.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{Counts, Distribution};

/// Largest classical register a dense calibration matrix is built for.
pub const MAX_CALIBRATION_BITS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReadoutErrorModel {
    /// Probability that a true 0 is read as 1.
    pub p01: f64,
    /// Probability that a true 1 is read as 0.
    pub p10: f64,
}

impl ReadoutErrorModel {
    pub fn new(p01: f64, p10: f64) -> Result<Self> {
        let ok = |p: f64| (0.0..0.5).contains(&p);
        if !ok(p01) || !ok(p10) {
            return Err(Error::InvalidNoise { p01, p10 });
        }
        Ok(ReadoutErrorModel { p01, p10 })
    }

    pub fn noiseless() -> Self {
        ReadoutErrorModel { p01: 0.0, p10: 0.0 }
    }

    /// Probability of reading `read` when the true value is `truth`.
    pub fn transition(&self, truth: bool, read: bool) -> f64 {
        let flip = if truth { self.p10 } else { self.p01 };
        if truth == read {
            1.0 - flip
        } else {
            flip
        }
    }

    /// Passes one bit through the channel.
    pub fn corrupt<R: Rng + ?Sized>(&self, bit: bool, rng: &mut R) -> bool {
        let flip = if bit { self.p10 } else { self.p01 };
        if flip > 0.0 && rng.random::<f64>() < flip {
            !bit
        } else {
            bit
        }
    }
}

/// Flips each of the low `num_bits` bits of `bits` independently.
pub fn apply_readout_noise<R: Rng + ?Sized>(
    bits: u64,
    num_bits: usize,
    model: &ReadoutErrorModel,
    rng: &mut R,
) -> u64 {
    (0..num_bits).fold(0, |acc, t| {
        let b = model.corrupt(bits >> t & 1 == 1, rng);
        acc | (u64::from(b) << t)
    })
}

/// Column-stochastic confusion matrix: entry `(read, truth)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationMatrix {
    num_bits: usize,
    matrix: DMatrix<f64>,
}

impl CalibrationMatrix {
    pub fn num_bits(&self) -> usize {
        self.num_bits
    }

    pub fn dim(&self) -> usize {
        1 << self.num_bits
    }

    pub fn entry(&self, read: usize, truth: usize) -> f64 {
        self.matrix[(read, truth)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Forward model: distribution of readouts given the true distribution.
    pub fn apply(&self, truth: &Distribution) -> Distribution {
        assert_eq!(truth.num_bits(), self.num_bits);
        let x = DVector::from_column_slice(truth.probs());
        let y = &self.matrix * x;
        Distribution::from_probs(self.num_bits, y.iter().copied().collect())
    }

    /// Solves `cal · x = observed` exactly, without clipping.
    pub fn solve(&self, observed: &Distribution) -> Result<Vec<f64>> {
        assert_eq!(observed.num_bits(), self.num_bits);
        let rhs = DVector::from_column_slice(observed.probs());
        let x = self
            .matrix
            .clone()
            .lu()
            .solve(&rhs)
            .ok_or(Error::SingularCalibration)?;
        Ok(x.iter().copied().collect())
    }
}

pub fn build_calibration(model: &ReadoutErrorModel, num_bits: usize) -> Result<CalibrationMatrix> {
    if num_bits > MAX_CALIBRATION_BITS {
        return Err(Error::CalibrationTooLarge(num_bits));
    }
    let dim = 1usize << num_bits;
    let matrix = DMatrix::from_fn(dim, dim, |read, truth| {
        (0..num_bits)
            .map(|t| model.transition(truth >> t & 1 == 1, read >> t & 1 == 1))
            .product()
    });
    Ok(CalibrationMatrix { num_bits, matrix })
}

/// Corrected probability table from noisy counts.
pub fn mitigate(counts: &Counts, cal: &CalibrationMatrix) -> Result<Distribution> {
    if counts.num_bits() != cal.num_bits() {
        return Err(Error::DimensionMismatch {
            expected: cal.num_bits(),
            found: counts.num_bits(),
        });
    }
    mitigate_distribution(&counts.frequencies(), cal)
}

/// [`mitigate`] for an already normalized frequency table.
pub fn mitigate_distribution(
    observed: &Distribution,
    cal: &CalibrationMatrix,
) -> Result<Distribution> {
    let mut x = cal.solve(observed)?;
    for v in &mut x {
        *v = v.max(0.0);
    }
    let total: f64 = x.iter().sum();
    if total > 0.0 {
        for v in &mut x {
            *v /= total;
        }
    }
    Ok(Distribution::from_probs(cal.num_bits(), x))
}
