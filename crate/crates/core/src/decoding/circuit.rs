//! Boolean circuits over tuples of u-bit symbols: a DAG of gates with one
//! output bit, evaluated on assignments in ({0,1}^u)^t.

use super::GammaSym;
use crate::budget::Budget;
use crate::error::Error;
use crate::rng::ChaCha8Rng;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", content = "value", rename_all = "lowercase")]
pub enum GateOp {
    And,
    Or,
    Not,
    Xor,
    Const(bool),
}

/// Gate inputs index the wire list: first the t*u input bits (bit j of
/// symbol k at k*u + j), then previous gate outputs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    #[serde(flatten)]
    pub op: GateOp,
    pub inputs: Vec<usize>,
}

/// A circuit on t symbols of u bits each; the last gate is the output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    pub t: usize,
    pub u: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn input_bits(&self) -> usize {
        self.t * self.u
    }

    pub fn size(&self) -> usize {
        self.gates.len()
    }

    pub fn gamma_size(&self) -> u64 {
        1u64 << self.u
    }

    /// Evaluates on raw input bits.
    pub fn eval_bits(&self, bits: &[bool]) -> Result<bool, Error> {
        if bits.len() != self.input_bits() {
            return Err(Error::DimensionMismatch {
                expected: self.input_bits(),
                got: bits.len(),
            });
        }
        let mut wires: Vec<bool> = bits.to_vec();
        for (gi, gate) in self.gates.iter().enumerate() {
            let arg = |i: usize| -> Result<bool, Error> {
                wires
                    .get(gate.inputs[i])
                    .copied()
                    .ok_or_else(|| Error::Malformed(format!("gate {gi} reads a later wire")))
            };
            let out = match gate.op {
                GateOp::Const(b) => b,
                GateOp::Not => !arg(0)?,
                GateOp::And => arg(0)? & arg(1)?,
                GateOp::Or => arg(0)? | arg(1)?,
                GateOp::Xor => arg(0)? ^ arg(1)?,
            };
            wires.push(out);
        }
        wires.last().copied().ok_or_else(|| {
            Error::Malformed("circuit has no gates".into())
        })
    }

    /// Evaluates on a symbol tuple.
    pub fn eval(&self, x: &[GammaSym]) -> Result<bool, Error> {
        if x.len() != self.t {
            return Err(Error::DimensionMismatch {
                expected: self.t,
                got: x.len(),
            });
        }
        let bits = symbols_to_bits(x, self.u);
        self.eval_bits(&bits)
    }

    /// All satisfying symbol tuples, by enumeration over 2^(t*u) inputs.
    pub fn satisfying_assignments(&self, budget: &Budget) -> Result<Vec<Vec<GammaSym>>, Error> {
        budget.check(1u128 << self.input_bits())?;
        let mut out = Vec::new();
        for code in 0..(1u64 << self.input_bits()) {
            let x: Vec<GammaSym> = (0..self.t)
                .map(|k| (code >> (k * self.u)) & ((1 << self.u) - 1))
                .collect();
            if self.eval(&x)? {
                out.push(x);
            }
        }
        Ok(out)
    }

    /// Truth table over all inputs (for cross-checking evaluation).
    pub fn truth_table(&self, budget: &Budget) -> Result<Vec<bool>, Error> {
        budget.check(1u128 << self.input_bits())?;
        (0..(1u64 << self.input_bits()))
            .map(|code| {
                let bits: Vec<bool> = (0..self.input_bits()).map(|i| (code >> i) & 1 == 1).collect();
                self.eval_bits(&bits)
            })
            .collect()
    }
}

/// Bit j of symbol k lands at position k*u + j.
pub fn symbols_to_bits(x: &[GammaSym], u: usize) -> Vec<bool> {
    let mut bits = Vec::with_capacity(x.len() * u);
    for &sym in x {
        for j in 0..u {
            bits.push((sym >> j) & 1 == 1);
        }
    }
    bits
}

pub fn bits_to_symbols(bits: &[bool], u: usize) -> Vec<GammaSym> {
    bits.chunks(u)
        .map(|chunk| {
            chunk
                .iter()
                .enumerate()
                .fold(0u64, |acc, (j, &b)| acc | ((b as u64) << j))
        })
        .collect()
}

/// Random DAG circuit over t symbols of u bits, rebuilt until satisfiable;
/// returns a witness.
pub fn random_satisfiable_circuit(
    t: usize,
    u: usize,
    gate_count: usize,
    rng: &mut ChaCha8Rng,
    budget: &Budget,
) -> Result<(Circuit, Vec<GammaSym>), Error> {
    for _ in 0..crate::budget::RETRY_CAP {
        let mut gates = Vec::with_capacity(gate_count);
        let inputs = t * u;
        for gi in 0..gate_count {
            let wires = inputs + gi;
            let pick = |rng: &mut ChaCha8Rng| rng.gen_range(0..wires);
            let op = match rng.gen_range(0..5) {
                0 => GateOp::And,
                1 => GateOp::Or,
                2 => GateOp::Not,
                3 => GateOp::Xor,
                _ => GateOp::Const(rng.gen_bool(0.5)),
            };
            let arity = match op {
                GateOp::Not => 1,
                GateOp::Const(_) => 0,
                _ => 2,
            };
            gates.push(Gate {
                op,
                inputs: (0..arity).map(|_| pick(rng)).collect(),
            });
        }
        let circuit = Circuit { t, u, gates };
        let sats = circuit.satisfying_assignments(budget)?;
        if !sats.is_empty() {
            let witness = sats[rng.gen_range(0..sats.len())].clone();
            return Ok((circuit, witness));
        }
    }
    Err(Error::RetryCapExceeded {
        cap: crate::budget::RETRY_CAP,
        context: "random_satisfiable_circuit".into(),
    })
}
