//! Sign-flip synthesis of real equally weighted states.
//!
//! Every ±1 sign pattern over `m = 2^N` basis states is, up to a global
//! sign, a hypergraph state: it is reached from `|+⟩^⊗N` by Z-type gates
//! (Z, CZ, multi-controlled Z) on subsets of the register. Basis indices are
//! scanned in order of increasing Hamming weight (ties by index); whenever the
//! running sign at index `j` disagrees with the target, the Z-type gate on the
//! qubits set in `j` is appended, which flips every index whose bits contain
//! `j`. Lower-weight indices are never touched again, so at most `m − 1`
//! gates are emitted.

use super::binary::BinaryVector;
use crate::sim::GateOp;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignSynthesis {
    /// Z-type gates on local qubits `0..N`.
    pub gates: Vec<GateOp>,
    /// +1 or −1; the prepared state times this sign equals the target.
    pub global_sign: i8,
}

/// Basis indices `1..m` sorted by Hamming weight, then by value.
pub(crate) fn weight_order(m: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (1..m).collect();
    order.sort_by_key(|&j| (j.count_ones(), j));
    order
}

/// Qubits set in basis index `j`.
pub(crate) fn support(j: usize) -> Vec<usize> {
    (0..usize::BITS as usize)
        .filter(|b| j >> b & 1 == 1)
        .collect()
}

pub fn hsgs(signs: &BinaryVector) -> SignSynthesis {
    let m = signs.len();
    let global_sign = signs.get(0);
    let target: Vec<i8> = signs.entries().iter().map(|s| s * global_sign).collect();

    let mut current = vec![1i8; m];
    let mut gates = Vec::new();
    for j in weight_order(m) {
        if current[j] != target[j] {
            gates.push(GateOp::z_on(&support(j)));
            for (k, s) in current.iter_mut().enumerate() {
                if k & j == j {
                    *s = -*s;
                }
            }
        }
    }
    SignSynthesis { gates, global_sign }
}

/// [`hsgs`] with local qubit `t` relabelled to `qubits[t]`.
pub fn hsgs_on(signs: &BinaryVector, qubits: &[usize]) -> SignSynthesis {
    let mut s = hsgs(signs);
    for g in &mut s.gates {
        for q in g.targets.iter_mut().chain(g.controls.iter_mut()) {
            *q = qubits[*q];
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neuron::PatternLabel;
    use crate::sim::GateKind;

    fn v(e: &[i8]) -> BinaryVector {
        BinaryVector::new(e.to_vec()).unwrap()
    }

    #[test]
    fn identity_case() {
        let s = hsgs(&v(&[1, 1, 1, 1]));
        assert!(s.gates.is_empty());
        assert_eq!(s.global_sign, 1);
    }

    #[test]
    fn single_cz() {
        let s = hsgs(&v(&[1, 1, 1, -1]));
        assert_eq!(s.gates, vec![GateOp::cz(0, 1)]);
        assert_eq!(s.global_sign, 1);
    }

    #[test]
    fn negated_leading_entry() {
        let s = hsgs(&v(&[-1, 1, 1, 1]));
        assert_eq!(s.global_sign, -1);
        assert_eq!(s.gates, vec![GateOp::z(0), GateOp::z(1), GateOp::cz(0, 1)]);
    }

    #[test]
    fn weight_order_ties_by_index() {
        assert_eq!(weight_order(8), vec![1, 2, 4, 3, 5, 6, 7]);
    }

    #[test]
    fn three_qubit_top_index_uses_mcz() {
        let mut e = vec![1i8; 8];
        e[7] = -1;
        let s = hsgs(&v(&e));
        assert_eq!(s.gates.len(), 1);
        assert_eq!(s.gates[0].kind, GateKind::MCZ);
        assert_eq!(s.gates[0].mask(), 0b111);
    }

    #[test]
    fn relabelled_qubits() {
        let w = BinaryVector::from_label(PatternLabel(8), 4).unwrap();
        let s = hsgs_on(&w, &[3, 4]);
        assert_eq!(s.gates, vec![GateOp::cz(3, 4)]);
    }
}
