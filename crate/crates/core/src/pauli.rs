//! Pauli operators in the symplectic (additive GF(4)) picture.
//!
//! An n-qubit Pauli `X^v Z^u` is stored, up to phase, as the pair `(u, v)`
//! of binary vectors; `u` is the Z part and `v` the X part.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::BinaryVector;

/// Single-qubit Pauli. The declaration order `X < Y < Z` is the enumeration
/// order used by every exhaustive search in the crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const NON_IDENTITY: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    /// `(has_z, has_x)`.
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (false, true),
            Pauli::Y => (true, true),
            Pauli::Z => (true, false),
        }
    }

    pub fn from_bits(z: bool, x: bool) -> Self {
        match (z, x) {
            (false, false) => Pauli::I,
            (false, true) => Pauli::X,
            (true, true) => Pauli::Y,
            (true, false) => Pauli::Z,
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        };
        write!(f, "{c}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliVector {
    /// Z part.
    u: BinaryVector,
    /// X part.
    v: BinaryVector,
}

impl PauliVector {
    pub fn identity(n: usize) -> Self {
        Self { u: BinaryVector::zeros(n), v: BinaryVector::zeros(n) }
    }

    pub fn new(u: BinaryVector, v: BinaryVector) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::DimensionMismatch { expected: u.len(), found: v.len() });
        }
        Ok(Self { u, v })
    }

    pub fn x_type(v: BinaryVector) -> Self {
        Self { u: BinaryVector::zeros(v.len()), v }
    }

    pub fn z_type(u: BinaryVector) -> Self {
        Self { v: BinaryVector::zeros(u.len()), u }
    }

    /// Builds an operator from `(qubit, pauli)` pairs; later entries on the
    /// same qubit multiply into earlier ones.
    pub fn from_paulis(n: usize, ops: &[(usize, Pauli)]) -> Result<Self> {
        let mut z = vec![false; n];
        let mut x = vec![false; n];
        for &(q, p) in ops {
            if q >= n {
                return Err(Error::IndexOutOfRange { index: q, len: n });
            }
            let (pz, px) = p.bits();
            z[q] ^= pz;
            x[q] ^= px;
        }
        Ok(Self { u: BinaryVector::from_bits(&z), v: BinaryVector::from_bits(&x) })
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    pub fn z_part(&self) -> &BinaryVector {
        &self.u
    }

    pub fn x_part(&self) -> &BinaryVector {
        &self.v
    }

    pub fn get(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.u.get(q), self.v.get(q))
    }

    /// Qubits acted on non-trivially, sorted.
    pub fn support(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.u.support().iter().chain(self.v.support()).copied().collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    pub fn weight(&self) -> usize {
        self.u.weight() + self.v.weight() - crate::gf2::sorted_intersection_len(self.u.support(), self.v.support())
    }

    pub fn is_identity(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    /// Non-identity entries as `(qubit, pauli)`, by qubit.
    pub fn entries(&self) -> Vec<(usize, Pauli)> {
        self.support().into_iter().map(|q| (q, self.get(q))).collect()
    }

    /// Operator product, up to phase.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        Ok(Self { u: self.u.add(&other.u)?, v: self.v.add(&other.v)? })
    }

    /// `a.u·b.v + a.v·b.u` over GF(2); zero iff the operators commute.
    pub fn trace_inner_product(&self, other: &Self) -> Result<bool> {
        Ok(self.u.dot(&other.v)? ^ self.v.dot(&other.u)?)
    }
}

/// Convenience alias of [`PauliVector::trace_inner_product`].
pub fn trace_inner_product(a: &PauliVector, b: &PauliVector) -> Result<bool> {
    a.trace_inner_product(b)
}

impl fmt::Display for PauliVector {
    /// Sparse form, e.g. `X0 Z5 Y7`; the identity prints as `I`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let entries = self.entries();
        if entries.is_empty() {
            return write!(f, "I");
        }
        for (i, (q, p)) in entries.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{p}{q}")?;
        }
        Ok(())
    }
}

/// Sparse Pauli list such as `"X0 Z5 Y7"` or `"X0,Z5"`. `"I"` or an empty
/// string is the identity. The qubit count is supplied separately.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliSpec(pub Vec<(usize, Pauli)>);

impl FromStr for PauliSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut ops = Vec::new();
        for tok in s.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            if tok == "I" {
                continue;
            }
            let mut chars = tok.chars();
            let p = match chars.next() {
                Some('X' | 'x') => Pauli::X,
                Some('Y' | 'y') => Pauli::Y,
                Some('Z' | 'z') => Pauli::Z,
                _ => return Err(Error::Parse { line: 1, msg: format!("bad Pauli token {tok:?}") }),
            };
            let q: usize = chars
                .as_str()
                .parse()
                .map_err(|_| Error::Parse { line: 1, msg: format!("bad qubit index in {tok:?}") })?;
            ops.push((q, p));
        }
        Ok(PauliSpec(ops))
    }
}

impl PauliSpec {
    pub fn to_vector(&self, n: usize) -> Result<PauliVector> {
        PauliVector::from_paulis(n, &self.0)
    }
}
