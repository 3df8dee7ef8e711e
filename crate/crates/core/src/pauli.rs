//! Pauli strings and their behavior under Hadamard frame changes.

use crate::bits::BitString;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PauliOp {
    I,
    X,
    Y,
    Z,
}

impl PauliOp {
    /// Conjugation by a Hadamard swaps X and Z and fixes Y up to sign.
    pub fn hadamard_conjugate(self) -> PauliOp {
        match self {
            PauliOp::I => PauliOp::I,
            PauliOp::X => PauliOp::Z,
            PauliOp::Y => PauliOp::Y,
            PauliOp::Z => PauliOp::X,
        }
    }

    pub fn flips_bit(self) -> bool {
        matches!(self, PauliOp::X | PauliOp::Y)
    }

    pub fn flips_phase(self) -> bool {
        matches!(self, PauliOp::Z | PauliOp::Y)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString {
    ops: Vec<PauliOp>,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString { ops: vec![PauliOp::I; n] }
    }

    pub fn new(ops: Vec<PauliOp>) -> Self {
        PauliString { ops }
    }

    /// Parses a string such as `IXZY`.
    pub fn parse(text: &str) -> Result<Self> {
        let ops = text
            .chars()
            .map(|c| match c.to_ascii_uppercase() {
                'I' => Ok(PauliOp::I),
                'X' => Ok(PauliOp::X),
                'Y' => Ok(PauliOp::Y),
                'Z' => Ok(PauliOp::Z),
                other => Err(Error::parameter(format!("invalid Pauli letter '{other}'"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if ops.is_empty() {
            return Err(Error::parameter("empty Pauli string"));
        }
        Ok(PauliString { ops })
    }

    /// Builds the single-qubit operator `op` at `pos` on `n` qubits.
    pub fn single(n: usize, pos: usize, op: PauliOp) -> Self {
        let mut ops = vec![PauliOp::I; n];
        ops[pos] = op;
        PauliString { ops }
    }

    /// String with X on `x_part` support and Z on `z_part` support;
    /// overlaps become Y.
    pub fn from_xz(x_part: &BitString, z_part: &BitString) -> Result<Self> {
        if x_part.len() != z_part.len() {
            return Err(Error::parameter("X and Z supports differ in length"));
        }
        let ops = (0..x_part.len())
            .map(|i| match (x_part.get(i), z_part.get(i)) {
                (false, false) => PauliOp::I,
                (true, false) => PauliOp::X,
                (false, true) => PauliOp::Z,
                (true, true) => PauliOp::Y,
            })
            .collect();
        Ok(PauliString { ops })
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn ops(&self) -> &[PauliOp] {
        &self.ops
    }

    pub fn op(&self, i: usize) -> PauliOp {
        self.ops[i]
    }

    pub fn is_identity(&self) -> bool {
        self.ops.iter().all(|&p| p == PauliOp::I)
    }

    pub fn weight(&self) -> usize {
        self.ops.iter().filter(|&&p| p != PauliOp::I).count()
    }

    /// Positions acting on the bit value (X or Y).
    pub fn x_support(&self) -> BitString {
        BitString::from_bits(&self.ops.iter().map(|p| p.flips_bit()).collect::<Vec<_>>())
    }

    /// Positions acting on the phase (Z or Y).
    pub fn z_support(&self) -> BitString {
        BitString::from_bits(&self.ops.iter().map(|p| p.flips_phase()).collect::<Vec<_>>())
    }

    /// Count of pure-X positions.
    pub fn x_weight(&self) -> usize {
        self.ops.iter().filter(|&&p| p == PauliOp::X).count()
    }

    /// Conjugates by Hadamards on the positions where `pattern` is 1.
    pub fn hadamard_conjugate(&self, pattern: &BitString) -> Result<PauliString> {
        if pattern.len() != self.ops.len() {
            return Err(Error::parameter("Hadamard pattern length mismatch"));
        }
        let ops = self
            .ops
            .iter()
            .enumerate()
            .map(|(i, &p)| if pattern.get(i) { p.hadamard_conjugate() } else { p })
            .collect();
        Ok(PauliString { ops })
    }

    /// Enumerates all 4^n strings on n qubits in base-4 order (I, X, Y, Z).
    pub fn enumerate(n: usize) -> impl Iterator<Item = PauliString> {
        let total = 1u64 << (2 * n);
        (0..total).map(move |code| {
            let ops = (0..n)
                .map(|q| match (code >> (2 * q)) & 3 {
                    0 => PauliOp::I,
                    1 => PauliOp::X,
                    2 => PauliOp::Y,
                    _ => PauliOp::Z,
                })
                .collect();
            PauliString { ops }
        })
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for op in &self.ops {
            let c = match op {
                PauliOp::I => 'I',
                PauliOp::X => 'X',
                PauliOp::Y => 'Y',
                PauliOp::Z => 'Z',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let p = PauliString::parse("IXZY").unwrap();
        assert_eq!(p.to_string(), "IXZY");
        assert_eq!(p.weight(), 3);
        assert!(PauliString::parse("IXQ").is_err());
    }

    #[test]
    fn hadamard_conjugation_swaps_xz() {
        let p = PauliString::parse("XZYI").unwrap();
        let all = BitString::parse_binary("1111").unwrap();
        assert_eq!(p.hadamard_conjugate(&all).unwrap().to_string(), "ZXYI");
        let none = BitString::zeros(4);
        assert_eq!(p.hadamard_conjugate(&none).unwrap(), p);
        // Hadamards hit positions 0 and 2: X -> Z, Y stays Y
        let some = BitString::parse_binary("1010").unwrap();
        assert_eq!(p.hadamard_conjugate(&some).unwrap().to_string(), "ZZYI");
    }

    #[test]
    fn supports() {
        let p = PauliString::parse("XYZI").unwrap();
        assert_eq!(p.x_support().to_string(), "1100");
        assert_eq!(p.z_support().to_string(), "0110");
        assert_eq!(p.x_weight(), 1);
    }

    #[test]
    fn enumeration_count() {
        assert_eq!(PauliString::enumerate(2).count(), 16);
        assert!(PauliString::enumerate(2).next().unwrap().is_identity());
    }
}
