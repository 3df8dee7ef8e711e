//! Per-qubit sampled engine for Monte Carlo at large block lengths.
//!
//! Each qubit is a classical record (bit value, Hadamard-frame flag):
//! the physical state is H^flag |value>. This covers product-state
//! preparations, Pauli errors, and per-qubit basis measurements; any
//! entangling operation is out of range by construction. Global phases
//! picked up by Y errors are unobservable for product states and are
//! dropped.

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::pauli::{PauliOp, PauliString};
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampledQubit {
    pub value: bool,
    pub hadamard: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampledState {
    qubits: Vec<SampledQubit>,
}

impl SampledState {
    pub fn prepare(values: &BitString, bases: &BitString) -> Result<Self> {
        if values.len() != bases.len() {
            return Err(Error::parameter("value and basis strings differ in length"));
        }
        let qubits = (0..values.len())
            .map(|i| SampledQubit { value: values.get(i), hadamard: bases.get(i) })
            .collect();
        Ok(SampledState { qubits })
    }

    pub fn n_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn qubits(&self) -> &[SampledQubit] {
        &self.qubits
    }

    /// Measures every qubit, qubit `i` in the Z basis when `bases[i]` is
    /// 0 and in the X basis otherwise. A frame mismatch is a fair coin;
    /// the post-measurement record collapses into the measured frame.
    pub fn measure<R: Rng + ?Sized>(&self, bases: &BitString, rng: &mut R) -> Result<(BitString, SampledState)> {
        if bases.len() != self.qubits.len() {
            return Err(Error::parameter("basis string length mismatch"));
        }
        let mut outcome = BitString::zeros(self.qubits.len());
        let mut post = Vec::with_capacity(self.qubits.len());
        for (i, q) in self.qubits.iter().enumerate() {
            let measure_x = bases.get(i);
            let bit = if q.hadamard == measure_x { q.value } else { rng.gen::<bool>() };
            outcome.set(i, bit);
            post.push(SampledQubit { value: bit, hadamard: measure_x });
        }
        Ok((outcome, SampledState { qubits: post }))
    }

    /// Deterministic Pauli application in the transmitted frame.
    ///
    /// In the qubit's own frame: X flips the value of a Z-frame qubit,
    /// Z flips the value of an X-frame qubit, Y flips in both frames.
    pub fn apply_pauli(&mut self, pauli: &PauliString) -> Result<()> {
        if pauli.len() != self.qubits.len() {
            return Err(Error::parameter("Pauli string length mismatch"));
        }
        for (q, &op) in self.qubits.iter_mut().zip(pauli.ops()) {
            let flips = match op {
                PauliOp::I => false,
                PauliOp::X => !q.hadamard,
                PauliOp::Z => q.hadamard,
                PauliOp::Y => true,
            };
            if flips {
                q.value = !q.value;
            }
        }
        Ok(())
    }

    /// Samples one Pauli error per qubit with probabilities (px, py, pz).
    pub fn apply_pauli_channel<R: Rng + ?Sized>(&mut self, px: f64, py: f64, pz: f64, rng: &mut R) {
        for q in &mut self.qubits {
            let draw: f64 = rng.gen();
            let op = if draw < px {
                PauliOp::X
            } else if draw < px + py {
                PauliOp::Y
            } else if draw < px + py + pz {
                PauliOp::Z
            } else {
                PauliOp::I
            };
            let flips = match op {
                PauliOp::I => false,
                PauliOp::X => !q.hadamard,
                PauliOp::Z => q.hadamard,
                PauliOp::Y => true,
            };
            if flips {
                q.value = !q.value;
            }
        }
    }

    /// The values and frame flags as bit strings.
    pub fn records(&self) -> (BitString, BitString) {
        let values: Vec<bool> = self.qubits.iter().map(|q| q.value).collect();
        let frames: Vec<bool> = self.qubits.iter().map(|q| q.hadamard).collect();
        (BitString::from_bits(&values), BitString::from_bits(&frames))
    }
}
