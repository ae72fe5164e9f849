//! A toy proximity verifier and the uniquely-decodable decoder built on it.
//!
//! The toy verifier reads its whole input (no extra proof, no randomness) and
//! applies the circuit; it is a valid strong proximity verifier with
//! rejection ratio 1, and it exercises every downstream transformation
//! faithfully. The decoder emulates the verifier and then reads the u bits of
//! the requested symbol, rejecting when the verifier does.

use super::circuit::{symbols_to_bits, Circuit};
use super::GammaSym;
use crate::error::Error;

/// Proximity verifier interface: on randomness omega it emits query
/// positions into the (input ++ proof) bit string and decides on the
/// answers.
#[derive(Debug, Clone)]
pub struct PcppVerifier {
    /// Decision circuit over the input bits.
    pub circuit: Circuit,
    /// Randomness complexity (bits).
    pub r: usize,
    /// Query complexity.
    pub q: usize,
    /// Proof length (bits beyond the input).
    pub ell: usize,
    /// Decision complexity.
    pub s: usize,
    /// Rejection ratio: inputs epsilon-far from satisfying are rejected with
    /// probability at least rho * epsilon.
    pub rho: f64,
}

/// Toy verifier: r = 0, queries all t*u input bits, no proof, decision is
/// the circuit itself. Any epsilon-far input is rejected with probability 1,
/// so the rejection ratio is 1.
pub fn toy_pcpp(phi: &Circuit) -> PcppVerifier {
    PcppVerifier {
        circuit: phi.clone(),
        r: 0,
        q: phi.input_bits(),
        ell: 0,
        s: phi.size(),
        rho: 1.0,
    }
}

impl PcppVerifier {
    pub fn randomness_space(&self) -> u64 {
        1u64 << self.r
    }

    /// Query positions for coin tosses `omega`.
    pub fn queries(&self, _omega: u64) -> Vec<usize> {
        (0..self.q).collect()
    }

    /// Decision on the answers to `queries(omega)`.
    pub fn decide(&self, _omega: u64, answers: &[bool]) -> Result<bool, Error> {
        self.circuit.eval_bits(answers)
    }

    /// Acceptance probability on a full input-and-proof bit string.
    pub fn acceptance(&self, word: &[bool]) -> Result<f64, Error> {
        let mut accepted = 0u64;
        for omega in 0..self.randomness_space() {
            let answers: Vec<bool> = self.queries(omega).iter().map(|&i| word[i]).collect();
            if self.decide(omega, &answers)? {
                accepted += 1;
            }
        }
        Ok(accepted as f64 / self.randomness_space() as f64)
    }
}

/// A uniquely-decodable decoder obtained from a proximity verifier: on index
/// k it emulates the verifier and additionally queries the u bits of symbol
/// k; it outputs the symbol when the verifier accepts and rejects otherwise.
#[derive(Debug, Clone)]
pub struct PcpDecoder {
    pub verifier: PcppVerifier,
    pub t: usize,
    pub u: usize,
    /// Query complexity: verifier queries + u.
    pub q: usize,
    /// Randomness complexity, inherited from the verifier.
    pub r: usize,
    /// Proof length in bits: input bits + verifier proof bits.
    pub ell: usize,
    /// Decoding complexity.
    pub s: usize,
    /// Rejection ratio: verifier's ratio divided by u.
    pub rho: f64,
}

pub fn pcpp_to_udpcp(verifier: PcppVerifier, t: usize, u: usize) -> PcpDecoder {
    let q = verifier.q + u;
    let ell = t * u + verifier.ell;
    let s = verifier.s + u;
    let rho = verifier.rho / u as f64;
    PcpDecoder {
        verifier,
        t,
        u,
        q,
        r: 0,
        ell,
        s,
        rho,
    }
}

impl PcpDecoder {
    pub fn randomness_space(&self) -> u64 {
        1u64 << self.r
    }

    /// Query positions for decoding index k under coin tosses omega: the
    /// verifier's queries followed by the u bits of symbol k.
    pub fn queries(&self, k: usize, omega: u64) -> Vec<usize> {
        let mut qs = self.verifier.queries(omega);
        qs.extend((0..self.u).map(|j| k * self.u + j));
        qs
    }

    /// Decoding decision: reject when the emulated verifier rejects,
    /// otherwise assemble the symbol from the trailing u answers.
    pub fn decode(&self, _k: usize, omega: u64, answers: &[bool]) -> Result<Option<GammaSym>, Error> {
        if answers.len() != self.q {
            return Err(Error::DimensionMismatch {
                expected: self.q,
                got: answers.len(),
            });
        }
        let (v_answers, sym_bits) = answers.split_at(self.verifier.q);
        if !self.verifier.decide(omega, v_answers)? {
            return Ok(None);
        }
        Ok(Some(
            sym_bits
                .iter()
                .enumerate()
                .fold(0u64, |acc, (j, &b)| acc | ((b as u64) << j)),
        ))
    }

    /// The honest proof for a witness: the witness itself as bits (the toy
    /// verifier needs no extra proof part).
    pub fn honest_proof(&self, x: &[GammaSym]) -> Vec<bool> {
        symbols_to_bits(x, self.u)
    }

    /// Runs one invocation against a proof string.
    pub fn run(&self, proof: &[bool], k: usize, omega: u64) -> Result<Option<GammaSym>, Error> {
        let answers: Vec<bool> = self
            .queries(k, omega)
            .iter()
            .map(|&i| proof.get(i).copied().unwrap_or(false))
            .collect();
        self.decode(k, omega, &answers)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::budget::Budget;
    use crate::decoding::circuit::random_satisfiable_circuit;
    use crate::rng;

    #[test]
    fn toy_verifier_parameters_and_completeness() {
        let mut r = rng::root(1);
        let (phi, witness) = random_satisfiable_circuit(3, 2, 15, &mut r, &Budget::default()).unwrap();
        let v = toy_pcpp(&phi);
        assert_eq!((v.r, v.q, v.ell, v.rho), (0, 6, 0, 1.0));
        assert_eq!(v.s, phi.size());
        let word = symbols_to_bits(&witness, phi.u);
        assert_eq!(v.acceptance(&word).unwrap(), 1.0);
    }

    #[test]
    fn far_inputs_are_rejected_outright() {
        let mut r = rng::root(2);
        let (phi, _) = random_satisfiable_circuit(3, 2, 15, &mut r, &Budget::default()).unwrap();
        let v = toy_pcpp(&phi);
        // any non-satisfying input is rejected with probability 1 >= rho * eps
        for code in 0..(1u64 << phi.input_bits()) {
            let bits: Vec<bool> = (0..phi.input_bits()).map(|i| (code >> i) & 1 == 1).collect();
            let acc = v.acceptance(&bits).unwrap();
            if !phi.eval_bits(&bits).unwrap() {
                assert_eq!(acc, 0.0);
            }
        }
    }

    #[test]
    fn decoder_decodes_every_index_of_honest_proofs() {
        let mut r = rng::root(3);
        let (phi, witness) = random_satisfiable_circuit(4, 2, 15, &mut r, &Budget::default()).unwrap();
        let d = pcpp_to_udpcp(toy_pcpp(&phi), phi.t, phi.u);
        assert_eq!(d.q, phi.input_bits() + phi.u);
        assert_eq!(d.ell, phi.input_bits());
        assert_eq!(d.rho, 1.0 / phi.u as f64);
        let proof = d.honest_proof(&witness);
        for k in 0..phi.t {
            for omega in 0..d.randomness_space() {
                assert_eq!(d.run(&proof, k, omega).unwrap(), Some(witness[k]));
            }
        }
    }

    #[test]
    fn corrupted_proofs_are_rejected() {
        let mut r = rng::root(4);
        let (phi, witness) = random_satisfiable_circuit(3, 2, 15, &mut r, &Budget::default()).unwrap();
        let d = pcpp_to_udpcp(toy_pcpp(&phi), phi.t, phi.u);
        let mut proof = d.honest_proof(&witness);
        // flip bits until the input is no longer satisfying
        let mut corrupted = None;
        'outer: for flip in 0..proof.len() {
            proof[flip] = !proof[flip];
            if !phi.eval_bits(&proof).unwrap() {
                corrupted = Some(proof.clone());
                break 'outer;
            }
        }
        let proof = corrupted.expect("some flip breaks satisfaction");
        for k in 0..phi.t {
            assert_eq!(d.run(&proof, k, 0).unwrap(), None);
        }
    }
}
