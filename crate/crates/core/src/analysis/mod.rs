//! Executable security definitions and verification harnesses: secrecy
//! and uncloneability estimators, the purity-testing sweep, pipeline
//! equivalence, and the key-stream distinguisher.

pub mod coherent;
pub mod definitions;
pub mod distinguish;
pub mod equivalence;
pub mod sweep;

pub use coherent::{CoherentDecoder, OutcomeDistribution};
pub use definitions::{
    encryption_error, epsilon_empirical, transmitted_average, uncloneability_scan,
    AnalysisReport, EncryptionErrorReport, KeyRow,
};
pub use distinguish::{
    binomial_survival, distinguisher, repetition_probe_attack, DistinguisherReport,
    KeySourceSpec, KeyStream,
};
pub use equivalence::{shor_preskill_check, EquivalenceReport};
pub use sweep::{
    basis_mixing_stats, canonical_messages, pauli_sweep, predict_verdict, quantum_handled,
    BasisMixingReport, PauliSweepReport, SweepRow,
};
