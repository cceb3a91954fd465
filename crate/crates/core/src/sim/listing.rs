//! Line-oriented text form of a [`Circuit`].
//!
//! ```text
//! # comment
//! QUBITS n1.q0 n1.q1 a1 out
//! CLBITS c1 c3
//! H n1.q0
//! MCX n1.q0,n1.q1->a1
//! MEASURE a1 -> c1
//! Z out if c1=1
//! CZ a1->out
//! ```
//!
//! `QUBITS` and `CLBITS` declare register names in index order and must come
//! first. A gate line is `KIND [controls->]targets [if CLBIT=VALUE]` with
//! comma-separated qubit names; a measurement is `MEASURE QUBIT -> CLBIT`.
//! Blank lines and lines starting with `#` are ignored.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::circuit::{Circuit, Op};
use super::gate::{Condition, GateKind, GateOp};
use crate::error::{Error, Result};

pub fn to_listing(circuit: &Circuit) -> String {
    let q = circuit.qubit_names();
    let c = circuit.clbit_names();
    let mut out = String::new();
    for (head, names) in [("QUBITS", q), ("CLBITS", c)] {
        out.push_str(head);
        for n in names {
            out.push(' ');
            out.push_str(n);
        }
        out.push('\n');
    }
    for op in circuit.ops() {
        match op {
            Op::Measure { qubit, clbit } => {
                let _ = writeln!(out, "MEASURE {} -> {}", q[*qubit], c[*clbit]);
            }
            Op::Gate(g) => {
                let names = |idx: &[usize]| {
                    idx.iter()
                        .map(|&i| q[i].as_str())
                        .collect::<Vec<_>>()
                        .join(",")
                };
                out.push_str(g.kind.name());
                out.push(' ');
                if !g.controls.is_empty() {
                    out.push_str(&names(&g.controls));
                    out.push_str("->");
                }
                out.push_str(&names(&g.targets));
                if let Some(cond) = g.condition {
                    let _ = write!(out, " if {}={}", c[cond.clbit], u8::from(cond.value));
                }
                out.push('\n');
            }
        }
    }
    out
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn index_map(names: &[String], line: usize) -> Result<HashMap<String, usize>> {
    let mut map = HashMap::new();
    for (i, n) in names.iter().enumerate() {
        if map.insert(n.clone(), i).is_some() {
            return Err(parse_err(line, format!("duplicate name `{n}`")));
        }
    }
    Ok(map)
}

type Names = HashMap<String, usize>;

pub fn parse_listing(text: &str) -> Result<Circuit> {
    let mut qubits: Option<Vec<String>> = None;
    let mut clbits: Option<Vec<String>> = None;
    let mut circuit: Option<(Circuit, Names, Names)> = None;

    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let head = tokens.next().unwrap();
        match head {
            "QUBITS" | "CLBITS" => {
                if circuit.is_some() {
                    return Err(parse_err(
                        line_no,
                        "register declarations must precede operations",
                    ));
                }
                let names: Vec<String> = tokens.map(str::to_owned).collect();
                let slot = if head == "QUBITS" {
                    &mut qubits
                } else {
                    &mut clbits
                };
                if slot.replace(names).is_some() {
                    return Err(parse_err(line_no, format!("{head} declared twice")));
                }
                continue;
            }
            _ => {}
        }
        if circuit.is_none() {
            let q = qubits
                .clone()
                .ok_or_else(|| parse_err(line_no, "missing QUBITS declaration"))?;
            let c = clbits.clone().unwrap_or_default();
            let qmap = index_map(&q, line_no)?;
            let cmap = index_map(&c, line_no)?;
            let built = Circuit::new(q.len(), c.len()).with_names(q, c);
            circuit = Some((built, qmap, cmap));
        }
        let (circ, qmap, cmap) = circuit.as_mut().unwrap();
        let qubit = |name: &str| {
            qmap.get(name)
                .copied()
                .ok_or_else(|| parse_err(line_no, format!("unknown qubit `{name}`")))
        };
        let clbit = |name: &str| {
            cmap.get(name)
                .copied()
                .ok_or_else(|| parse_err(line_no, format!("unknown classical bit `{name}`")))
        };
        let rest: Vec<&str> = tokens.collect();

        if head == "MEASURE" {
            match rest.as_slice() {
                [q, "->", c] => {
                    circ.measure(qubit(q)?, clbit(c)?);
                }
                _ => return Err(parse_err(line_no, "expected `MEASURE QUBIT -> CLBIT`")),
            }
            continue;
        }

        let kind = GateKind::from_name(head)
            .ok_or_else(|| parse_err(line_no, format!("unknown operation `{head}`")))?;
        let (operands, condition) = match rest.as_slice() {
            [ops] => (*ops, None),
            [ops, "if", cond] => {
                let (name, value) = cond
                    .split_once('=')
                    .ok_or_else(|| parse_err(line_no, "condition must be `CLBIT=VALUE`"))?;
                let value = match value {
                    "0" => false,
                    "1" => true,
                    _ => return Err(parse_err(line_no, "condition value must be 0 or 1")),
                };
                (
                    *ops,
                    Some(Condition {
                        clbit: clbit(name)?,
                        value,
                    }),
                )
            }
            _ => {
                return Err(parse_err(
                    line_no,
                    "expected `KIND [controls->]targets [if CLBIT=VALUE]`",
                ))
            }
        };
        let list = |s: &str| s.split(',').map(qubit).collect::<Result<Vec<_>>>();
        let (controls, targets) = match operands.split_once("->") {
            Some((c, t)) => (list(c)?, list(t)?),
            None => (Vec::new(), list(operands)?),
        };
        let gate = GateOp {
            kind,
            targets,
            controls,
            condition,
        };
        gate.validate(circ.num_qubits())
            .map_err(|e| parse_err(line_no, e.to_string()))?;
        circ.gate(gate);
    }

    match circuit {
        Some((c, _, _)) => Ok(c),
        None => {
            let q = qubits.ok_or_else(|| parse_err(0, "missing QUBITS declaration"))?;
            let c = clbits.unwrap_or_default();
            index_map(&q, 0)?;
            index_map(&c, 0)?;
            Ok(Circuit::new(q.len(), c.len()).with_names(q, c))
        }
    }
}
