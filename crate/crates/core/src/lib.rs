//! Simulation and verification laboratory for uncloneable encryption.
//!
//! Classical messages are encrypted into product states of qubits so
//! that an eavesdropper cannot copy the ciphertext without disturbing
//! it: the receiver's authentication check catches tampering with high
//! probability, even if the key is published afterwards. This crate
//! implements the full prepare-and-measure pipeline (field-based
//! authentication tag, one-time pad, nested-code coset encoding, basis
//! shuffling), a catalog of eavesdropper attacks, exact and sampled
//! quantum engines, and estimators that certify the scheme's security
//! definitions on enumerable instances.

pub mod adversary;
pub mod analysis;
pub mod bits;
pub mod codes;
pub mod error;
pub mod field;
pub mod gf2;
pub mod pauli;
pub mod presets;
pub mod protocol;
pub mod qkd;
pub mod qsim;
pub mod tag;

pub use bits::BitString;
pub use error::{Error, Result};
