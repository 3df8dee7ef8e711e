//! Quantum engines: an exact amplitude/density engine for verification
//! at small block lengths and a per-qubit sampled engine for Monte Carlo
//! at large ones.

mod exact;
mod sampled;

pub use exact::{
    bad_subspace_mass, fidelity, hermitian_eigenvalues, pauli_unitary, trace_distance,
    trace_norm, CMat, CVec, DensityMatrix, PureState, MAX_EXACT_QUBITS,
};
pub use num_complex::Complex64;
pub use sampled::{SampledQubit, SampledState};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::pauli::PauliString;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Engine selection for preparation. `Auto` picks the exact engine up to
/// [`MAX_EXACT_QUBITS`] qubits and the sampled engine beyond.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EngineMode {
    Auto,
    Exact,
    Sampled,
}

/// Per-qubit probabilities of X, Y, Z errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PauliChannel {
    pub px: f64,
    pub py: f64,
    pub pz: f64,
}

impl PauliChannel {
    pub fn new(px: f64, py: f64, pz: f64) -> Result<Self> {
        if px < 0.0 || py < 0.0 || pz < 0.0 || px + py + pz > 1.0 + 1e-12 {
            return Err(Error::parameter(
                "channel probabilities must be nonnegative with sum at most 1",
            ));
        }
        Ok(PauliChannel { px, py, pz })
    }

    pub fn noiseless() -> Self {
        PauliChannel { px: 0.0, py: 0.0, pz: 0.0 }
    }

    pub fn is_noiseless(&self) -> bool {
        self.px == 0.0 && self.py == 0.0 && self.pz == 0.0
    }

    /// Bit-flip rate seen by a Z-frame qubit (X or Y errors).
    pub fn bit_flip_rate(&self) -> f64 {
        self.px + self.py
    }

    /// Phase-flip rate (Y or Z errors).
    pub fn phase_flip_rate(&self) -> f64 {
        self.py + self.pz
    }
}

/// A register in one of the three representations.
#[derive(Debug, Clone)]
pub enum QuantumRegister {
    Pure(PureState),
    Density(DensityMatrix),
    Sampled(SampledState),
}

impl QuantumRegister {
    pub fn n_qubits(&self) -> usize {
        match self {
            QuantumRegister::Pure(s) => s.n_qubits(),
            QuantumRegister::Density(d) => d.n_qubits(),
            QuantumRegister::Sampled(s) => s.n_qubits(),
        }
    }

    pub fn is_sampled(&self) -> bool {
        matches!(self, QuantumRegister::Sampled(_))
    }

    pub fn as_density(&self) -> Result<DensityMatrix> {
        match self {
            QuantumRegister::Pure(s) => Ok(s.to_density()),
            QuantumRegister::Density(d) => Ok(d.clone()),
            QuantumRegister::Sampled(_) => Err(Error::capability(
                "sampled registers have no density-matrix form",
            )),
        }
    }
}

/// Product-state preparation: qubit i carries bit z_i, in the Z basis
/// where b_i = 0 and the X basis where b_i = 1.
pub fn prepare(z: &BitString, b: &BitString, mode: EngineMode) -> Result<QuantumRegister> {
    if z.len() != b.len() {
        return Err(Error::parameter("value and basis strings differ in length"));
    }
    let n = z.len();
    let use_exact = match mode {
        EngineMode::Auto => n <= MAX_EXACT_QUBITS,
        EngineMode::Exact => {
            if n > MAX_EXACT_QUBITS {
                return Err(Error::capability(format!(
                    "exact engine capped at {MAX_EXACT_QUBITS} qubits, got {n}"
                )));
            }
            true
        }
        EngineMode::Sampled => false,
    };
    if use_exact {
        let mut state = PureState::basis(n, z.word() as usize);
        state.hadamard_pattern(b)?;
        Ok(QuantumRegister::Pure(state))
    } else {
        Ok(QuantumRegister::Sampled(SampledState::prepare(z, b)?))
    }
}

/// Measures every qubit, in the Z basis where b_i = 0 and X where
/// b_i = 1. Returns the outcome and the collapsed register.
pub fn measure_in_bases<R: Rng + ?Sized>(
    reg: &QuantumRegister,
    b: &BitString,
    rng: &mut R,
) -> Result<(BitString, QuantumRegister)> {
    if b.len() != reg.n_qubits() {
        return Err(Error::parameter("basis string length mismatch"));
    }
    match reg {
        QuantumRegister::Pure(s) => {
            let (z, _) = s.measure_prefix(s.n_qubits(), b, rng)?;
            Ok((z, prepare(&z, b, EngineMode::Exact)?))
        }
        QuantumRegister::Density(d) => {
            let probs = d.outcome_distribution(b)?;
            let z = sample_index(&probs, rng);
            let z = BitString::from_word(z as u128, d.n_qubits());
            Ok((z, prepare(&z, b, EngineMode::Exact)?))
        }
        QuantumRegister::Sampled(s) => {
            let (z, post) = s.measure(b, rng)?;
            Ok((z, QuantumRegister::Sampled(post)))
        }
    }
}

/// Deterministic Pauli application.
pub fn apply_pauli(reg: &QuantumRegister, pauli: &PauliString) -> Result<QuantumRegister> {
    match reg {
        QuantumRegister::Pure(s) => {
            let mut s = s.clone();
            s.apply_pauli(pauli)?;
            Ok(QuantumRegister::Pure(s))
        }
        QuantumRegister::Density(d) => {
            let mut d = d.clone();
            d.apply_pauli(pauli)?;
            Ok(QuantumRegister::Density(d))
        }
        QuantumRegister::Sampled(s) => {
            let mut s = s.clone();
            s.apply_pauli(pauli)?;
            Ok(QuantumRegister::Sampled(s))
        }
    }
}

/// Pauli noise. Sampled registers draw per-qubit errors from `rng`;
/// exact registers apply the mixing superoperator (promoting a pure
/// state to a density matrix when the channel is nontrivial).
pub fn apply_pauli_channel<R: Rng + ?Sized>(
    reg: &QuantumRegister,
    ch: &PauliChannel,
    rng: &mut R,
) -> Result<QuantumRegister> {
    if ch.is_noiseless() {
        return Ok(reg.clone());
    }
    match reg {
        QuantumRegister::Pure(s) => {
            let mut d = s.to_density();
            d.apply_pauli_channel(ch.px, ch.py, ch.pz);
            Ok(QuantumRegister::Density(d))
        }
        QuantumRegister::Density(d) => {
            let mut d = d.clone();
            d.apply_pauli_channel(ch.px, ch.py, ch.pz);
            Ok(QuantumRegister::Density(d))
        }
        QuantumRegister::Sampled(s) => {
            let mut s = s.clone();
            s.apply_pauli_channel(ch.px, ch.py, ch.pz, rng);
            Ok(QuantumRegister::Sampled(s))
        }
    }
}

/// Exact Born distribution over full measurement outcomes in the given
/// bases; the oracle side of engine-equivalence checks.
pub fn outcome_distribution(reg: &QuantumRegister, b: &BitString) -> Result<Vec<f64>> {
    match reg {
        QuantumRegister::Pure(s) => s.outcome_distribution(b),
        QuantumRegister::Density(d) => d.outcome_distribution(b),
        QuantumRegister::Sampled(_) => Err(Error::capability(
            "sampled registers carry no exact distribution",
        )),
    }
}

pub(crate) fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let draw: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if draw < acc {
            return i;
        }
    }
    probs.len() - 1
}
