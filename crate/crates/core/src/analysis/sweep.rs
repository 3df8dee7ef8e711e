//! Purity-testing sweep: which Pauli errors does the keyed code family
//! detect or correct?
//!
//! For every non-identity Pauli string the sweep runs the coherent
//! encode / tamper / decode channel for each (tag key, basis pattern)
//! pair and scores the error "handled" when the accepted-but-wrong mass
//! stays below tolerance for both canonical inputs (one basis state,
//! one two-message superposition). A classical stabilizer-flow
//! predictor computes the same verdicts independently: bit residues
//! must be caught by the tag unless their label vanishes, and phase
//! residues must land inside the dual of C1 or flip the superposition.

use crate::analysis::coherent::CoherentDecoder;
use crate::bits::BitString;
use crate::codes::ProtocolParams;
use crate::error::{Error, Result};
use crate::field::{self, FieldElem};
use crate::pauli::PauliString;
use crate::protocol::{coherent_encode_superposition, CoherentKeyExtras, KeyMaterial};
use crate::qsim::{bad_subspace_mass, CVec};
use crate::tag::TaggedMessage;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

/// Largest block length for the full sweep (4^N strings).
pub const MAX_SWEEP_N: usize = 4;

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub pauli: String,
    pub handled_fraction: f64,
    pub unhandled_keys: u64,
    /// Unhandled via an accepted bit residue (tag evasion).
    pub tag_evasion_fraction: f64,
    /// Unhandled via an undetected logical phase.
    pub phase_failure_fraction: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PauliSweepReport {
    pub rows: Vec<SweepRow>,
    pub tolerance: f64,
    pub keys_per_string: u64,
    pub min_handled_fraction: f64,
    pub config_digest: String,
}

impl PauliSweepReport {
    pub fn fingerprint(&self) -> u64 {
        let mut text = String::new();
        for row in &self.rows {
            text.push_str(&format!(
                "{}:{:.9}:{:.9}:{:.9};",
                row.pauli, row.handled_fraction, row.tag_evasion_fraction, row.phase_failure_fraction
            ));
        }
        crate::codes::fnv1a64(text.as_bytes())
    }
}

/// Canonical sweep inputs: the zero message and the uniform
/// superposition of the zero message with the unit message.
pub fn canonical_messages(params: &ProtocolParams) -> (BitString, BitString) {
    (BitString::zeros(params.n), BitString::from_word(1, params.n))
}

/// Quantum-channel verdict for one Pauli string under one key pair.
pub fn quantum_handled(
    params: &ProtocolParams,
    error: &PauliString,
    k: FieldElem,
    b: &BitString,
    tolerance: f64,
) -> Result<bool> {
    let key = KeyMaterial::new(
        k,
        BitString::zeros(params.n + params.s as usize),
        BitString::zeros(params.c1_len()),
        *b,
        params,
    )?;
    let c2 = BitString::zeros(params.private_random_bits());
    let extras = CoherentKeyExtras::new(c2, params)?;
    let decoder = CoherentDecoder::new(params, &key, c2)?;
    let (m0, m1) = canonical_messages(params);
    let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let inputs: [(Vec<(BitString, Complex64)>, CVec); 2] = [
        (vec![(m0, one)], {
            let mut psi = CVec::zeros(1 << params.n);
            psi[m0.word() as usize] = one;
            psi
        }),
        (vec![(m0, amp), (m1, amp)], {
            let mut psi = CVec::zeros(1 << params.n);
            psi[m0.word() as usize] = amp;
            psi[m1.word() as usize] = amp;
            psi
        }),
    ];
    for (terms, psi) in &inputs {
        let reg = coherent_encode_superposition(terms, &key, &extras, params)?;
        let mut rho = reg.as_density()?;
        rho.apply_pauli(error)?;
        let out = decoder.flag_message_density(&rho)?;
        if bad_subspace_mass(&out, psi)? > tolerance {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PredictedVerdict {
    pub handled: bool,
    pub tag_evasion: bool,
    pub phase_failure: bool,
}

/// Stabilizer-flow predictor: the independent classical route to the
/// same verdict as [`quantum_handled`].
pub fn predict_verdict(
    params: &ProtocolParams,
    error: &PauliString,
    k: FieldElem,
    b: &BitString,
) -> Result<PredictedVerdict> {
    let pair = params.pair();
    let field = params.field();
    let conj = error.hadamard_conjugate(b)?;
    let u = conj.x_support();
    let v = conj.z_support();
    // bit flow: residue after syndrome correction, then its label
    let syn_u = pair.c1().syndrome(&u)?;
    let residue = u.xor(&pair.c1().coset_leader(&syn_u)?)?;
    let delta_y = pair.coset_label(&residue)?;
    let delta_tagged = TaggedMessage::from_bits(&delta_y, field).ok();
    let accepted = match &delta_tagged {
        Some(t) => field::poly_eval(t.registers(), k)?.is_zero(),
        // degenerate label widths cannot occur for valid parameters
        None => return Err(Error::invariant("label width is not a register multiple")),
    };
    let delta_m = delta_y.slice(0, params.n);
    // phase flow: residue after dual-syndrome correction; logical when
    // outside the dual of C1
    let syn_v = pair.c2().syndrome(&v)?;
    let vbar = v.xor(&pair.c2().coset_leader(&syn_v)?)?;
    let logical_phase = !in_rowspace(pair.c1().parity_check(), vbar.word());
    // relative phase between the two canonical branches
    let (m0, m1) = canonical_messages(params);
    let t0 = crate::tag::append_tag(&m0, k)?.to_bits();
    let t1 = crate::tag::append_tag(&m1, k)?.to_bits();
    let delta_branches = t0.xor(&t1)?;
    let zeta = pair.coset_representative(&BitString::zeros(params.c1_len()), &delta_branches)?;
    let flips_superposition = logical_phase && vbar.dot(&zeta);
    let delta_m01 = m0.xor(&m1)?;

    let bad_basis = accepted && !delta_m.is_zero();
    let swaps = delta_m == delta_m01;
    let bad_super = accepted
        && if delta_m.is_zero() || swaps {
            flips_superposition
        } else {
            true
        };
    let handled = !bad_basis && !bad_super;
    Ok(PredictedVerdict {
        handled,
        tag_evasion: !handled && accepted && !delta_y.is_zero(),
        phase_failure: !handled && accepted && delta_y.is_zero(),
    })
}

fn in_rowspace(m: &crate::gf2::BitMatrix, v: u128) -> bool {
    if v == 0 {
        return true;
    }
    let mut rows: Vec<u128> = m.rows().to_vec();
    let base_rank = m.rank();
    rows.push(v);
    crate::gf2::BitMatrix::new(rows, m.n_cols()).rank() == base_rank
}

/// Full sweep over every non-identity Pauli string, scoring each against
/// all (tag key, basis pattern) pairs with the pad, syndromes, and phase
/// syndrome fixed at zero (they shift labels linearly and cannot change
/// a verdict).
pub fn pauli_sweep(params: &ProtocolParams, tolerance: f64) -> Result<PauliSweepReport> {
    let big_n = params.big_n();
    if big_n > MAX_SWEEP_N {
        return Err(Error::capability(format!(
            "sweep enumerates 4^N strings; N must be <= {MAX_SWEEP_N}"
        )));
    }
    let field = params.field();
    let keys_per_string = (field.order() as u64) * (1u64 << big_n);
    let mut rows = Vec::new();
    for error in PauliString::enumerate(big_n) {
        if error.is_identity() {
            continue;
        }
        let mut unhandled = 0u64;
        let mut tag_evasion = 0u64;
        let mut phase_failure = 0u64;
        for k in field.iter_all()? {
            for b_word in 0..1u128 << big_n {
                let b = BitString::from_word(b_word, big_n);
                let handled = quantum_handled(params, &error, k, &b, tolerance)?;
                if !handled {
                    unhandled += 1;
                    let predicted = predict_verdict(params, &error, k, &b)?;
                    if predicted.tag_evasion {
                        tag_evasion += 1;
                    }
                    if predicted.phase_failure {
                        phase_failure += 1;
                    }
                }
            }
        }
        rows.push(SweepRow {
            pauli: error.to_string(),
            handled_fraction: 1.0 - unhandled as f64 / keys_per_string as f64,
            unhandled_keys: unhandled,
            tag_evasion_fraction: tag_evasion as f64 / keys_per_string as f64,
            phase_failure_fraction: phase_failure as f64 / keys_per_string as f64,
        });
    }
    let min_handled = rows
        .iter()
        .map(|r| r.handled_fraction)
        .fold(1.0, f64::min);
    Ok(PauliSweepReport {
        rows,
        tolerance,
        keys_per_string,
        min_handled_fraction: min_handled,
        config_digest: format!("{:016X}", params.digest()),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BasisMixingReport {
    /// Counts of the pure-X weight of the conjugated string.
    pub histogram: Vec<u64>,
    pub trials: u64,
    /// Positions that can toggle between X and Z roles.
    pub non_y_support: usize,
    pub expected_mean: f64,
}

/// Distribution of the X-part weight of a Pauli string conjugated by a
/// uniformly random Hadamard pattern: each non-Y support position tosses
/// a fair coin between the X and Z roles.
pub fn basis_mixing_stats<R: Rng + ?Sized>(
    error: &PauliString,
    trials: u64,
    rng: &mut R,
) -> BasisMixingReport {
    let n = error.len();
    let non_y = error
        .ops()
        .iter()
        .filter(|op| matches!(op, crate::pauli::PauliOp::X | crate::pauli::PauliOp::Z))
        .count();
    let mut histogram = vec![0u64; n + 1];
    for _ in 0..trials {
        let b = BitString::random(n, rng);
        let conj = error.hadamard_conjugate(&b).expect("matching length");
        histogram[conj.x_weight()] += 1;
    }
    BasisMixingReport {
        histogram,
        trials,
        non_y_support: non_y,
        expected_mean: non_y as f64 / 2.0,
    }
}
