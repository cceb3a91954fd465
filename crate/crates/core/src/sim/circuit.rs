use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::distribution::{Counts, Distribution};
use super::gate::{GateKind, GateOp};
use super::state::StateVector;
use super::MAX_CLBITS;
use crate::error::{Error, Result};
use crate::noise::ReadoutErrorModel;
use crate::parallel::Exec;

/// Shots simulated per independently seeded batch.
const SHOT_BATCH: u64 = 4096;

/// Branches below this weight are dropped during exact enumeration.
const BRANCH_CUTOFF: f64 = 1e-15;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Op {
    Gate(GateOp),
    Measure { qubit: usize, clbit: usize },
}

/// Ordered gate and measurement list over a named register.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    num_qubits: usize,
    num_clbits: usize,
    qubit_names: Vec<String>,
    clbit_names: Vec<String>,
    ops: Vec<Op>,
}

impl Circuit {
    pub fn new(num_qubits: usize, num_clbits: usize) -> Self {
        Circuit {
            num_qubits,
            num_clbits,
            qubit_names: (0..num_qubits).map(|q| format!("q{q}")).collect(),
            clbit_names: (0..num_clbits).map(|c| format!("c{c}")).collect(),
            ops: Vec::new(),
        }
    }

    pub fn with_names(mut self, qubits: Vec<String>, clbits: Vec<String>) -> Self {
        assert_eq!(qubits.len(), self.num_qubits);
        assert_eq!(clbits.len(), self.num_clbits);
        self.qubit_names = qubits;
        self.clbit_names = clbits;
        self
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_clbits(&self) -> usize {
        self.num_clbits
    }

    pub fn qubit_names(&self) -> &[String] {
        &self.qubit_names
    }

    pub fn clbit_names(&self) -> &[String] {
        &self.clbit_names
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    pub fn gate(&mut self, gate: GateOp) -> &mut Self {
        self.ops.push(Op::Gate(gate));
        self
    }

    pub fn gates(&mut self, gates: impl IntoIterator<Item = GateOp>) -> &mut Self {
        self.ops.extend(gates.into_iter().map(Op::Gate));
        self
    }

    pub fn measure(&mut self, qubit: usize, clbit: usize) -> &mut Self {
        self.ops.push(Op::Measure { qubit, clbit });
        self
    }

    pub fn gate_ops(&self) -> impl Iterator<Item = &GateOp> {
        self.ops.iter().filter_map(|op| match op {
            Op::Gate(g) => Some(g),
            Op::Measure { .. } => None,
        })
    }

    /// Checks every op against the register sizes and requires each
    /// classical condition to read a bit written by an earlier measurement.
    pub fn validate(&self) -> Result<()> {
        if self.num_qubits == 0 || self.num_qubits > super::MAX_QUBITS {
            return Err(Error::RegisterSize(self.num_qubits));
        }
        if self.num_clbits > MAX_CLBITS {
            return Err(Error::TooManyClbits(self.num_clbits));
        }
        let mut written = 0u64;
        for (i, op) in self.ops.iter().enumerate() {
            match op {
                Op::Gate(g) => {
                    g.validate(self.num_qubits)?;
                    if let Some(c) = g.condition {
                        self.check_clbit(c.clbit)?;
                        if written >> c.clbit & 1 == 0 {
                            return Err(Error::UnwrittenClbit {
                                clbit: c.clbit,
                                op_index: i,
                            });
                        }
                    }
                }
                Op::Measure { qubit, clbit } => {
                    if *qubit >= self.num_qubits {
                        return Err(Error::QubitOutOfRange {
                            qubit: *qubit,
                            num_qubits: self.num_qubits,
                        });
                    }
                    self.check_clbit(*clbit)?;
                    written |= 1 << clbit;
                }
            }
        }
        Ok(())
    }

    fn check_clbit(&self, clbit: usize) -> Result<()> {
        if clbit >= self.num_clbits {
            return Err(Error::ClbitOutOfRange {
                clbit,
                num_clbits: self.num_clbits,
            });
        }
        Ok(())
    }

    /// True when no gate follows a measurement and nothing is conditioned.
    pub fn measurements_are_terminal(&self) -> bool {
        self.first_gate_after_measure().is_none() && self.gate_ops().all(|g| g.condition.is_none())
    }

    fn first_gate_after_measure(&self) -> Option<usize> {
        let first_measure = self
            .ops
            .iter()
            .position(|op| matches!(op, Op::Measure { .. }))?;
        self.ops[first_measure..]
            .iter()
            .position(|op| matches!(op, Op::Gate(_)))
            .map(|p| p + first_measure)
    }

    /// Pre-measurement state of a circuit whose measurements are all terminal.
    pub fn final_state(&self) -> Result<StateVector> {
        self.validate()?;
        if let Some(i) = self.first_gate_after_measure() {
            return Err(Error::MidCircuitMeasurement(i));
        }
        let mut state = StateVector::new(self.num_qubits)?;
        for g in self.gate_ops() {
            state.apply(g)?;
        }
        Ok(state)
    }

    /// Rewrites every classically conditioned gate as a quantum-controlled
    /// one and moves the measurements to the end, in their original order.
    ///
    /// A measured qubit may afterwards only appear through classical
    /// conditions, and conditioned gates must have a controlled form in the
    /// gate set (X, Z, CZ, MCZ, MCX). A condition on value 0 is realized by
    /// X-conjugating the control.
    pub fn defer_measurements(&self) -> Result<Circuit> {
        self.validate()?;
        let mut source: Vec<Option<usize>> = vec![None; self.num_clbits];
        let mut measured = 0u64;
        let mut out = Circuit {
            ops: Vec::with_capacity(self.ops.len()),
            ..self.clone()
        };
        let mut tail = Vec::new();
        for (i, op) in self.ops.iter().enumerate() {
            match op {
                Op::Measure { qubit, clbit } => {
                    if measured >> qubit & 1 == 1 {
                        return Err(Error::NotDeferrable {
                            op_index: i,
                            reason: format!("qubit {qubit} is measured twice"),
                        });
                    }
                    measured |= 1 << qubit;
                    source[*clbit] = Some(*qubit);
                    tail.push(op.clone());
                }
                Op::Gate(g) => {
                    if let Some(q) = g.qubits().find(|q| measured >> q & 1 == 1) {
                        return Err(Error::NotDeferrable {
                            op_index: i,
                            reason: format!("gate acts on already measured qubit {q}"),
                        });
                    }
                    let Some(cond) = g.condition else {
                        out.ops.push(op.clone());
                        continue;
                    };
                    let control = source[cond.clbit].expect("validated condition source");
                    let kind = match g.kind {
                        GateKind::Z | GateKind::CZ | GateKind::MCZ => {
                            if g.targets.len() + g.controls.len() == 1 {
                                GateKind::CZ
                            } else {
                                GateKind::MCZ
                            }
                        }
                        GateKind::X | GateKind::MCX => GateKind::MCX,
                        GateKind::H => {
                            return Err(Error::NotDeferrable {
                                op_index: i,
                                reason: "controlled-H is not in the gate set".into(),
                            })
                        }
                    };
                    let mut controls = vec![control];
                    controls.extend(&g.controls);
                    let controlled = GateOp {
                        kind,
                        targets: g.targets.clone(),
                        controls,
                        condition: None,
                    };
                    if !cond.value {
                        out.ops.push(Op::Gate(GateOp::x(control)));
                    }
                    out.ops.push(Op::Gate(controlled));
                    if !cond.value {
                        out.ops.push(Op::Gate(GateOp::x(control)));
                    }
                }
            }
        }
        out.ops.extend(tail);
        Ok(out)
    }
}

/// Options for sampled execution.
#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Classical bit-flip channel applied to every recorded measurement.
    pub readout: Option<ReadoutErrorModel>,
    pub exec: Exec,
}

/// Samples `shots` executions of `circuit` and aggregates the classical
/// register.
pub fn run_circuit<R: Rng + ?Sized>(circuit: &Circuit, shots: u64, rng: &mut R) -> Result<Counts> {
    run_circuit_with(circuit, shots, rng, &RunOptions::default())
}

pub fn run_circuit_with<R: Rng + ?Sized>(
    circuit: &Circuit,
    shots: u64,
    rng: &mut R,
    options: &RunOptions,
) -> Result<Counts> {
    circuit.validate()?;
    let batches = shots.div_ceil(SHOT_BATCH);
    let seeds: Vec<u64> = (0..batches).map(|_| rng.next_u64()).collect();
    let sampler = Sampler::new(circuit)?;

    let partial = options.exec.try_map(seeds.len(), |b| {
        let n = SHOT_BATCH.min(shots - b as u64 * SHOT_BATCH);
        let mut rng = ChaCha8Rng::seed_from_u64(seeds[b]);
        let mut counts = Counts::new(circuit.num_clbits);
        for _ in 0..n {
            counts.record(sampler.shot(circuit, options.readout.as_ref(), &mut rng)?);
        }
        Ok::<_, Error>(counts)
    })?;
    let mut total = Counts::new(circuit.num_clbits);
    for c in &partial {
        total.merge(c);
    }
    Ok(total)
}

/// Precomputed data for sampling. Circuits with only terminal measurements
/// are simulated once; anything else is re-simulated per shot.
enum Sampler {
    Terminal {
        measures: Vec<(usize, usize)>,
        qubits: Vec<usize>,
        cumulative: Vec<f64>,
    },
    PerShot,
}

impl Sampler {
    fn new(circuit: &Circuit) -> Result<Self> {
        if !circuit.measurements_are_terminal() {
            return Ok(Sampler::PerShot);
        }
        let measures: Vec<(usize, usize)> = circuit
            .ops
            .iter()
            .filter_map(|op| match op {
                Op::Measure { qubit, clbit } => Some((*qubit, *clbit)),
                Op::Gate(_) => None,
            })
            .collect();
        let mut qubits: Vec<usize> = Vec::new();
        for &(q, _) in &measures {
            if !qubits.contains(&q) {
                qubits.push(q);
            }
        }
        let cumulative = if qubits.is_empty() {
            Vec::new()
        } else {
            let dist = circuit.final_state()?.exact_probabilities(&qubits)?;
            dist.probs()
                .iter()
                .scan(0.0, |acc, p| {
                    *acc += p;
                    Some(*acc)
                })
                .collect()
        };
        Ok(Sampler::Terminal {
            measures,
            qubits,
            cumulative,
        })
    }

    fn shot<R: Rng + ?Sized>(
        &self,
        circuit: &Circuit,
        readout: Option<&ReadoutErrorModel>,
        rng: &mut R,
    ) -> Result<u64> {
        let mut creg = 0u64;
        let write = |creg: &mut u64, clbit: usize, value: bool, rng: &mut R| {
            let value = match readout {
                Some(m) => m.corrupt(value, rng),
                None => value,
            };
            *creg = (*creg & !(1 << clbit)) | (u64::from(value) << clbit);
        };
        match self {
            Sampler::Terminal {
                measures,
                qubits,
                cumulative,
            } => {
                if qubits.is_empty() {
                    return Ok(0);
                }
                let u = rng.random::<f64>() * cumulative.last().copied().unwrap_or(1.0);
                let outcome = cumulative
                    .partition_point(|&c| c <= u)
                    .min(cumulative.len() - 1);
                for &(q, c) in measures {
                    let t = qubits.iter().position(|&x| x == q).unwrap();
                    write(&mut creg, c, outcome >> t & 1 == 1, rng);
                }
            }
            Sampler::PerShot => {
                let mut state = StateVector::new(circuit.num_qubits)?;
                for op in &circuit.ops {
                    match op {
                        Op::Gate(g) => {
                            let active = g
                                .condition
                                .is_none_or(|c| (creg >> c.clbit & 1 == 1) == c.value);
                            if active {
                                state.apply_unchecked(g);
                            }
                        }
                        Op::Measure { qubit, clbit } => {
                            let bit = state.measure(*qubit, rng)?;
                            write(&mut creg, *clbit, bit, rng);
                        }
                    }
                }
            }
        }
        Ok(creg)
    }
}

/// Exact distribution over the classical register, enumerating measurement
/// branches instead of sampling them.
pub fn run_circuit_exact(circuit: &Circuit) -> Result<Distribution> {
    circuit.validate()?;
    struct Branch {
        state: StateVector,
        creg: u64,
        weight: f64,
    }
    let mut branches = vec![Branch {
        state: StateVector::new(circuit.num_qubits)?,
        creg: 0,
        weight: 1.0,
    }];
    for op in &circuit.ops {
        match op {
            Op::Gate(g) => {
                for b in &mut branches {
                    let active = g
                        .condition
                        .is_none_or(|c| (b.creg >> c.clbit & 1 == 1) == c.value);
                    if active {
                        b.state.apply_unchecked(g);
                    }
                }
            }
            Op::Measure { qubit, clbit } => {
                let mut next = Vec::with_capacity(branches.len() * 2);
                for b in branches {
                    for outcome in [false, true] {
                        let mut state = b.state.clone();
                        let p = state.collapse(*qubit, outcome)?;
                        // the complementary branch was already projected away
                        if p * b.weight < BRANCH_CUTOFF {
                            continue;
                        }
                        let creg = (b.creg & !(1 << clbit)) | (u64::from(outcome) << clbit);
                        next.push(Branch {
                            state,
                            creg,
                            weight: b.weight * p,
                        });
                    }
                }
                branches = next;
            }
        }
    }
    let mut dist = Distribution::zeros(circuit.num_clbits);
    for b in &branches {
        dist.add(b.creg, b.weight);
    }
    Ok(dist)
}
