//! Finite fields of order q, for q a prime below 2^16 or 2^k with k <= 16.
//!
//! Binary extension fields use log/antilog tables built from a fixed primitive
//! polynomial per degree, so multiplication and inversion are table lookups.
//! Prime fields use plain modular arithmetic. Elements are integers in [0, q).

use crate::error::Error;

/// Primitive polynomials over GF(2), one per degree k = 1..=16, encoded with
/// the leading bit included. x is a multiplicative generator modulo each.
const PRIMITIVE_POLY: [u32; 16] = [
    0b11,                // k=1:  x + 1
    0b111,               // k=2:  x^2 + x + 1
    0b1011,              // k=3:  x^3 + x + 1
    0b10011,             // k=4:  x^4 + x + 1
    0b100101,            // k=5:  x^5 + x^2 + 1
    0b1000011,           // k=6:  x^6 + x + 1
    0b10001001,          // k=7:  x^7 + x^3 + 1
    0b100011101,         // k=8:  x^8 + x^4 + x^3 + x^2 + 1
    0b1000010001,        // k=9:  x^9 + x^4 + 1
    0b10000001001,       // k=10: x^10 + x^3 + 1
    0b100000000101,      // k=11: x^11 + x^2 + 1
    0b1000001010011,     // k=12: x^12 + x^6 + x^4 + x + 1
    0b10000000011011,    // k=13: x^13 + x^4 + x^3 + x + 1
    0b100010001000011,   // k=14: x^14 + x^10 + x^6 + x + 1
    0b1000000000000011,  // k=15: x^15 + x + 1
    0b10001000000001011, // k=16: x^16 + x^12 + x^3 + x + 1
];

#[derive(Debug, Clone, PartialEq, Eq)]
enum Repr {
    Prime,
    Binary {
        k: u32,
        log: Vec<u16>,    // log[a] for a in 1..q, base x
        antilog: Vec<u32>, // antilog[e] = x^e for e in 0..q-1
    },
}

/// A finite field of order `q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Field {
    q: u32,
    repr: Repr,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    pub fn new(q: u64) -> Result<Field, Error> {
        if q >= 2 && q.is_power_of_two() && q <= (1 << 16) {
            let k = q.trailing_zeros();
            let poly = PRIMITIVE_POLY[(k - 1) as usize];
            let q = q as u32;
            let mut antilog = vec![0u32; (q - 1) as usize];
            let mut log = vec![0u16; q as usize];
            let mut acc: u32 = 1;
            for e in 0..(q - 1) as usize {
                antilog[e] = acc;
                log[acc as usize] = e as u16;
                acc <<= 1;
                if acc & q != 0 {
                    acc ^= poly;
                }
            }
            debug_assert_eq!(acc, 1, "polynomial is not primitive");
            Ok(Field {
                q,
                repr: Repr::Binary { k, log, antilog },
            })
        } else if q < (1 << 16) && is_prime(q) {
            Ok(Field {
                q: q as u32,
                repr: Repr::Prime,
            })
        } else {
            Err(Error::UnsupportedField(q))
        }
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    /// Field characteristic: 2 for binary fields, q for prime fields.
    pub fn characteristic(&self) -> u32 {
        match self.repr {
            Repr::Prime => self.q,
            Repr::Binary { .. } => 2,
        }
    }

    pub fn contains(&self, a: u32) -> bool {
        a < self.q
    }

    fn check(&self, a: u32) -> Result<(), Error> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(Error::NotInField(a as u64, self.q as u64))
        }
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        debug_assert!(self.contains(a) && self.contains(b));
        match self.repr {
            Repr::Prime => ((a as u64 + b as u64) % self.q as u64) as u32,
            Repr::Binary { .. } => a ^ b,
        }
    }

    pub fn neg(&self, a: u32) -> u32 {
        debug_assert!(self.contains(a));
        match self.repr {
            Repr::Prime => {
                if a == 0 {
                    0
                } else {
                    self.q - a
                }
            }
            Repr::Binary { .. } => a,
        }
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        debug_assert!(self.contains(a) && self.contains(b));
        match &self.repr {
            Repr::Prime => ((a as u64 * b as u64) % self.q as u64) as u32,
            Repr::Binary { log, antilog, .. } => {
                if a == 0 || b == 0 {
                    0
                } else {
                    let e = log[a as usize] as u32 + log[b as usize] as u32;
                    antilog[(e % (self.q - 1)) as usize]
                }
            }
        }
    }

    pub fn inv(&self, a: u32) -> Result<u32, Error> {
        self.check(a)?;
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        match &self.repr {
            Repr::Prime => {
                // extended Euclid
                let (mut r0, mut r1) = (self.q as i64, a as i64);
                let (mut t0, mut t1) = (0i64, 1i64);
                while r1 != 0 {
                    let d = r0 / r1;
                    (r0, r1) = (r1, r0 - d * r1);
                    (t0, t1) = (t1, t0 - d * t1);
                }
                Ok(t0.rem_euclid(self.q as i64) as u32)
            }
            Repr::Binary { log, antilog, .. } => {
                let e = log[a as usize] as u32;
                Ok(antilog[((self.q - 1 - e) % (self.q - 1)) as usize])
            }
        }
    }

    pub fn div(&self, a: u32, b: u32) -> Result<u32, Error> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Uniform element of the field.
    pub fn sample(&self, rng: &mut impl rand::Rng) -> u32 {
        rng.gen_range(0..self.q)
    }
}

/// Binary field arithmetic op selector for the generic entry point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Mul,
    Inv,
    Neg,
}

/// Generic arithmetic dispatch; `b` is ignored for Inv and Neg.
pub fn field_arith(field: &Field, a: u32, b: u32, op: ArithOp) -> Result<u32, Error> {
    match op {
        ArithOp::Add => Ok(field.add(a, b)),
        ArithOp::Mul => Ok(field.mul(a, b)),
        ArithOp::Inv => field.inv(a),
        ArithOp::Neg => Ok(field.neg(a)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gf2_addition_is_xor() {
        let f = Field::new(2).unwrap();
        assert_eq!(f.add(1, 1), 0);
        assert_eq!(f.mul(1, 1), 1);
    }

    #[test]
    fn gf4_multiplication_reduces_by_modulus() {
        // GF(4) with x^2 = x + 1: elements 0, 1, x=2, x+1=3.
        let f = Field::new(4).unwrap();
        assert_eq!(f.mul(2, 2), 3);
        assert_eq!(f.mul(2, 3), 1);
        assert_eq!(f.add(2, 3), 1);
    }

    #[test]
    fn inverses_hold_in_all_supported_orders() {
        for q in [2u64, 3, 4, 5, 7, 8, 11, 13, 16, 251, 256, 65521, 65536] {
            let f = Field::new(q).unwrap();
            for a in 1..f.order().min(200) {
                let inv = f.inv(a).unwrap();
                assert_eq!(f.mul(a, inv), 1, "q={q} a={a}");
            }
            assert!(matches!(f.inv(0), Err(Error::ZeroInverse)));
        }
    }

    #[test]
    fn rejects_unsupported_orders() {
        assert!(Field::new(6).is_err());
        assert!(Field::new(1).is_err());
        assert!(Field::new(65537).is_err()); // prime but >= 2^16
        assert!(Field::new(1 << 17).is_err());
        assert!(Field::new(9).is_err()); // odd prime powers are out of scope
    }

    #[test]
    fn field_axioms_spot_checks() {
        for q in [8u64, 13] {
            let f = Field::new(q).unwrap();
            let n = f.order();
            for a in 0..n {
                for b in 0..n {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in 0..n.min(11) {
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                    }
                }
            }
        }
    }
}
