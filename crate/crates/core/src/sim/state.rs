use num_complex::Complex64;
use rand::Rng;

use super::density::DensityMatrix2;
use super::distribution::Distribution;
use super::gate::{GateKind, GateOp};
use super::{MAX_QUBITS, NORM_TOLERANCE};
use crate::error::{Error, Result};

/// Dense `n`-qubit register. Basis index `j` holds qubit `k` in bit `k`
/// (qubit 0 is the least significant bit).
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩` on `num_qubits` qubits.
    pub fn new(num_qubits: usize) -> Result<Self> {
        Self::basis(num_qubits, 0)
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(Error::RegisterSize(num_qubits));
        }
        let dim = 1usize << num_qubits;
        assert!(index < dim, "basis index {index} out of range");
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { num_qubits, amps })
    }

    /// Wraps an amplitude vector, which must already be normalized.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::AmplitudeLength(len));
        }
        let num_qubits = len.trailing_zeros() as usize;
        if num_qubits > MAX_QUBITS {
            return Err(Error::RegisterSize(num_qubits));
        }
        let s = StateVector { num_qubits, amps };
        let n = s.norm_sqr();
        if (n - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(n));
        }
        Ok(s)
    }

    /// Real amplitudes, normalized on the way in.
    pub fn from_real(values: &[f64]) -> Result<Self> {
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        let amps = values
            .iter()
            .map(|v| Complex64::new(v / norm, 0.0))
            .collect();
        Self::from_amplitudes(amps)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        assert_eq!(self.dim(), other.dim());
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Fidelity-based comparison that ignores global phase.
    pub fn equal_up_to_phase(&self, other: &StateVector, tol: f64) -> bool {
        self.dim() == other.dim() && (self.inner(other).norm() - 1.0).abs() <= tol
    }

    /// Entry-wise distance to `other` after removing the best global phase.
    pub fn distance_up_to_phase(&self, other: &StateVector) -> f64 {
        let ov = self.inner(other);
        let phase = if ov.norm() > 0.0 {
            ov / ov.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a * phase - b).norm())
            .fold(0.0, f64::max)
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.num_qubits {
            return Err(Error::QubitOutOfRange {
                qubit: q,
                num_qubits: self.num_qubits,
            });
        }
        Ok(())
    }

    /// Applies an unconditioned gate in place.
    pub fn apply(&mut self, gate: &GateOp) -> Result<()> {
        if gate.condition.is_some() {
            return Err(Error::ConditionedGate);
        }
        gate.validate(self.num_qubits)?;
        self.apply_unchecked(gate);
        Ok(())
    }

    pub fn apply_all<'a>(&mut self, gates: impl IntoIterator<Item = &'a GateOp>) -> Result<()> {
        for g in gates {
            self.apply(g)?;
        }
        Ok(())
    }

    /// Applies a validated gate, ignoring any classical condition.
    pub(crate) fn apply_unchecked(&mut self, gate: &GateOp) {
        match gate.kind {
            GateKind::H => {
                let bit = 1usize << gate.targets[0];
                let s = std::f64::consts::FRAC_1_SQRT_2;
                for j in 0..self.amps.len() {
                    if j & bit == 0 {
                        let (a, b) = (self.amps[j], self.amps[j | bit]);
                        self.amps[j] = (a + b) * s;
                        self.amps[j | bit] = (a - b) * s;
                    }
                }
            }
            GateKind::X | GateKind::MCX => {
                let bit = 1usize << gate.targets[0];
                let cmask = gate.control_mask();
                for j in 0..self.amps.len() {
                    if j & bit == 0 && j & cmask == cmask {
                        self.amps.swap(j, j | bit);
                    }
                }
            }
            GateKind::Z | GateKind::CZ | GateKind::MCZ => {
                let mask = gate.mask();
                for (j, a) in self.amps.iter_mut().enumerate() {
                    if j & mask == mask {
                        *a = -*a;
                    }
                }
            }
        }
    }

    fn prob_one(&self, q: usize) -> f64 {
        let bit = 1usize << q;
        self.amps
            .iter()
            .enumerate()
            .filter(|(j, _)| j & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Born-rule marginal over `qubits`; outcome bit `t` is `qubits[t]`.
    pub fn exact_probabilities(&self, qubits: &[usize]) -> Result<Distribution> {
        if qubits.is_empty() {
            return Err(Error::EmptyQubitList);
        }
        let mut seen = 0usize;
        for &q in qubits {
            self.check_qubit(q)?;
            if seen & (1 << q) != 0 {
                return Err(Error::DuplicateQubit(q));
            }
            seen |= 1 << q;
        }
        let mut dist = Distribution::zeros(qubits.len());
        for (j, a) in self.amps.iter().enumerate() {
            let outcome = qubits
                .iter()
                .enumerate()
                .fold(0u64, |acc, (t, &q)| acc | (((j >> q) & 1) as u64) << t);
            dist.add(outcome, a.norm_sqr());
        }
        Ok(dist)
    }

    /// Projects qubit `q` onto `outcome` and renormalizes. Returns the
    /// probability of that outcome before projection.
    pub fn collapse(&mut self, q: usize, outcome: bool) -> Result<f64> {
        self.check_qubit(q)?;
        let p1 = self.prob_one(q);
        let p = if outcome { p1 } else { 1.0 - p1 };
        self.project(q, outcome, p);
        Ok(p)
    }

    fn project(&mut self, q: usize, outcome: bool, p: f64) {
        let bit = 1usize << q;
        let scale = 1.0 / p.sqrt();
        for (j, a) in self.amps.iter_mut().enumerate() {
            if (j & bit != 0) == outcome {
                *a *= scale;
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// Measures qubit `q` in the computational basis, collapsing the state.
    pub fn measure<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> Result<bool> {
        self.check_qubit(q)?;
        let p1 = self.prob_one(q);
        let outcome = rng.random::<f64>() < p1;
        let p = if outcome { p1 } else { 1.0 - p1 };
        self.project(q, outcome, p);
        Ok(outcome)
    }

    /// Traces out every qubit except `keep`.
    pub fn reduced_density_matrix(&self, keep: usize) -> Result<DensityMatrix2> {
        self.check_qubit(keep)?;
        let bit = 1usize << keep;
        let zero = Complex64::new(0.0, 0.0);
        let (mut r00, mut r01, mut r11) = (zero, zero, zero);
        for j in (0..self.amps.len()).filter(|j| j & bit == 0) {
            let (a0, a1) = (self.amps[j], self.amps[j | bit]);
            r00 += a0 * a0.conj();
            r11 += a1 * a1.conj();
            r01 += a0 * a1.conj();
        }
        Ok(DensityMatrix2::new([[r00, r01], [r01.conj(), r11]]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = 1e-12;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn assert_amps(state: &StateVector, expected: &[f64]) {
        for (j, (a, e)) in state.amplitudes().iter().zip(expected).enumerate() {
            assert!((a - c(*e)).norm() < TOL, "amplitude {j}: {a} vs {e}");
        }
    }

    #[test]
    fn hadamard_on_zero() {
        let mut s = StateVector::new(1).unwrap();
        s.apply(&GateOp::h(0)).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_amps(&s, &[r, r]);
    }

    #[test]
    fn cz_on_plus_plus() {
        let mut s = StateVector::new(2).unwrap();
        s.apply_all(&[GateOp::h(0), GateOp::h(1), GateOp::cz(0, 1)])
            .unwrap();
        assert_amps(&s, &[0.5, 0.5, 0.5, -0.5]);
    }

    #[test]
    fn mcx_sets_ancilla_when_controls_are_one() {
        // q0 = q1 = 1, ancilla q2 = 0
        let mut s = StateVector::basis(3, 0b011).unwrap();
        s.apply(&GateOp::mcx(&[0, 1], 2)).unwrap();
        assert_eq!(s.amplitude(0b111), c(1.0));
        let mut off = StateVector::basis(3, 0b001).unwrap();
        off.apply(&GateOp::mcx(&[0, 1], 2)).unwrap();
        assert_eq!(off.amplitude(0b001), c(1.0));
    }

    #[test]
    fn mcz_flips_only_all_ones() {
        let mut s = StateVector::from_real(&[1.0; 8]).unwrap();
        s.apply(&GateOp::z_on(&[0, 1, 2])).unwrap();
        let r = 1.0 / 8f64.sqrt();
        assert_amps(&s, &[r, r, r, r, r, r, r, -r]);
    }

    #[test]
    fn gate_errors() {
        let mut s = StateVector::new(2).unwrap();
        assert!(matches!(
            s.apply(&GateOp::h(2)),
            Err(Error::QubitOutOfRange { .. })
        ));
        assert!(matches!(
            s.apply(&GateOp::cz(0, 0)),
            Err(Error::DuplicateQubit(0))
        ));
        assert!(matches!(
            s.apply(&GateOp::x(0).when(0, true)),
            Err(Error::ConditionedGate)
        ));
        assert!(matches!(StateVector::new(13), Err(Error::RegisterSize(13))));
    }

    #[test]
    fn probabilities() {
        let mut s = StateVector::new(1).unwrap();
        s.apply(&GateOp::h(0)).unwrap();
        let d = s.exact_probabilities(&[0]).unwrap();
        assert!((d.get(0) - 0.5).abs() < TOL && (d.get(1) - 0.5).abs() < TOL);

        let s = StateVector::basis(2, 0b11).unwrap();
        let d = s.exact_probabilities(&[0, 1]).unwrap();
        assert!((d.get(0b11) - 1.0).abs() < TOL);

        assert!(matches!(
            s.exact_probabilities(&[]),
            Err(Error::EmptyQubitList)
        ));
    }

    #[test]
    fn probabilities_respect_qubit_order() {
        // |q0=1, q1=0⟩ read as [q1, q0] puts q1 in outcome bit 0.
        let s = StateVector::basis(2, 0b01).unwrap();
        let d = s.exact_probabilities(&[1, 0]).unwrap();
        assert!((d.get(0b10) - 1.0).abs() < TOL);
    }

    #[test]
    fn measure_definite_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let mut s = StateVector::basis(1, 1).unwrap();
            assert!(s.measure(0, &mut rng).unwrap());
            assert_eq!(s, StateVector::basis(1, 1).unwrap());
        }
    }

    #[test]
    fn measure_plus_frequency_within_five_sigma() {
        let mut plus = StateVector::new(1).unwrap();
        plus.apply(&GateOp::h(0)).unwrap();
        let shots = 100_000u32;
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..shots)
                .map(|_| plus.clone().measure(0, &mut rng).unwrap())
                .collect::<Vec<_>>()
        };
        let a = run(7);
        assert_eq!(a, run(7), "same seed must reproduce the sequence");
        let ones = a.iter().filter(|&&b| b).count() as f64;
        let sigma = (0.25 / shots as f64).sqrt();
        assert!((ones / shots as f64 - 0.5).abs() < 5.0 * sigma);
    }

    #[test]
    fn collapse_bell_pair() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut s = StateVector::from_real(&[r, 0.0, 0.0, r]).unwrap();
        let p = s.collapse(0, true).unwrap();
        assert!((p - 0.5).abs() < TOL);
        assert_amps(&s, &[0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn reduced_density_examples() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        // (|0⟩+|1⟩)/√2 on q0, |0⟩ on q1
        let prod = StateVector::from_real(&[r, r, 0.0, 0.0]).unwrap();
        let rho = prod.reduced_density_matrix(1).unwrap();
        assert!((rho.p0() - 1.0).abs() < TOL && rho.coherence() < TOL);

        let bell = StateVector::from_real(&[r, 0.0, 0.0, r]).unwrap();
        let rho = bell.reduced_density_matrix(0).unwrap();
        assert!((rho.p0() - 0.5).abs() < TOL && (rho.p1() - 0.5).abs() < TOL);
        assert!(rho.coherence() < TOL);
        assert!(rho.is_valid(TOL));
    }
}
