use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    H,
    X,
    Z,
    CZ,
    /// Multi-controlled Z: flips the sign where every participating qubit is 1.
    MCZ,
    /// Multi-controlled NOT.
    MCX,
}

impl GateKind {
    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Z => "Z",
            GateKind::CZ => "CZ",
            GateKind::MCZ => "MCZ",
            GateKind::MCX => "MCX",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "H" => GateKind::H,
            "X" => GateKind::X,
            "Z" => GateKind::Z,
            "CZ" => GateKind::CZ,
            "MCZ" => GateKind::MCZ,
            "MCX" => GateKind::MCX,
            _ => return None,
        })
    }

    /// True for gates that are diagonal in the computational basis.
    pub fn is_diagonal(self) -> bool {
        matches!(self, GateKind::Z | GateKind::CZ | GateKind::MCZ)
    }
}

/// Gate applies only when classical bit `clbit` holds `value`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Condition {
    pub clbit: usize,
    pub value: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GateOp {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub controls: Vec<usize>,
    pub condition: Option<Condition>,
}

impl GateOp {
    fn single(kind: GateKind, qubit: usize) -> Self {
        GateOp {
            kind,
            targets: vec![qubit],
            controls: Vec::new(),
            condition: None,
        }
    }

    pub fn h(qubit: usize) -> Self {
        Self::single(GateKind::H, qubit)
    }

    pub fn x(qubit: usize) -> Self {
        Self::single(GateKind::X, qubit)
    }

    pub fn z(qubit: usize) -> Self {
        Self::single(GateKind::Z, qubit)
    }

    pub fn cz(control: usize, target: usize) -> Self {
        GateOp {
            kind: GateKind::CZ,
            targets: vec![target],
            controls: vec![control],
            condition: None,
        }
    }

    /// The Z-type gate acting on exactly `qubits`: Z, CZ or MCZ depending on
    /// how many qubits participate. The last qubit is recorded as the target.
    pub fn z_on(qubits: &[usize]) -> Self {
        match qubits {
            [] => panic!("z_on requires at least one qubit"),
            [q] => Self::z(*q),
            [a, b] => Self::cz(*a, *b),
            [rest @ .., last] => GateOp {
                kind: GateKind::MCZ,
                targets: vec![*last],
                controls: rest.to_vec(),
                condition: None,
            },
        }
    }

    pub fn mcx(controls: &[usize], target: usize) -> Self {
        GateOp {
            kind: GateKind::MCX,
            targets: vec![target],
            controls: controls.to_vec(),
            condition: None,
        }
    }

    /// Attaches a classical condition.
    pub fn when(mut self, clbit: usize, value: bool) -> Self {
        self.condition = Some(Condition { clbit, value });
        self
    }

    /// Every qubit the gate touches, controls first.
    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.controls.iter().chain(self.targets.iter()).copied()
    }

    /// Checks arity, bounds and distinctness against a register size.
    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        let (t, c) = (self.targets.len(), self.controls.len());
        let arity_ok = match self.kind {
            GateKind::H | GateKind::X | GateKind::Z => t == 1 && c == 0,
            GateKind::CZ => t + c == 2 && t >= 1,
            GateKind::MCZ => t >= 1,
            GateKind::MCX => t == 1,
        };
        if !arity_ok {
            return Err(Error::GateArity {
                kind: self.kind,
                targets: t,
                controls: c,
            });
        }
        let mut seen = 0u64;
        for q in self.qubits() {
            if q >= num_qubits {
                return Err(Error::QubitOutOfRange {
                    qubit: q,
                    num_qubits,
                });
            }
            if seen & (1 << q) != 0 {
                return Err(Error::DuplicateQubit(q));
            }
            seen |= 1 << q;
        }
        Ok(())
    }

    /// Bit mask of all participating qubits.
    pub(crate) fn mask(&self) -> usize {
        self.qubits().fold(0, |m, q| m | (1 << q))
    }

    pub(crate) fn control_mask(&self) -> usize {
        self.controls.iter().fold(0, |m, q| m | (1 << q))
    }
}
