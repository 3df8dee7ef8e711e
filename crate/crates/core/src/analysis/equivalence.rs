//! Equivalence of the coherent and measured pipelines.
//!
//! The coherent sender encodes into a dual-coset superposition with a
//! phase syndrome; the measured sender samples a coset element with
//! private randomness. Averaging the first over the phase syndrome and
//! the second over the private randomness must give the receiver the
//! same joint (verdict, message) distribution under any fixed attack:
//! phase correction never touches the computational outcome, and
//! measuring before sending commutes with everything downstream.

use crate::adversary::{attack_kraus, Attack};
use crate::analysis::coherent::{CoherentDecoder, OutcomeDistribution};
use crate::bits::BitString;
use crate::codes::ProtocolParams;
use crate::error::{Error, Result};
use crate::protocol::{
    classical_decode, coherent_encode, CoherentKeyExtras, KeyMaterial,
};
use crate::qsim::{self, EngineMode};
use rand::Rng;
use serde::Serialize;

/// Block-length cap: the check enumerates cosets and syndromes.
pub const MAX_EQUIVALENCE_N: usize = 6;

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub attack: String,
    pub tv_distance: f64,
    pub config_digest: String,
    pub seed: Option<u64>,
}

/// Total-variation distance between the receiver outcome distributions
/// of the two pipelines, same key, same message, same attack channel.
pub fn shor_preskill_check<R: Rng + ?Sized>(
    attack: &Attack,
    params: &ProtocolParams,
    rng: &mut R,
) -> Result<EquivalenceReport> {
    let big_n = params.big_n();
    if big_n > MAX_EQUIVALENCE_N {
        return Err(Error::capability(format!(
            "equivalence check capped at N <= {MAX_EQUIVALENCE_N}"
        )));
    }
    let key = KeyMaterial::random(params, rng);
    let message = BitString::random(params.n, rng);
    let channel = attack_kraus(attack, big_n, rng)?;
    let n_outcomes = 1 + (1 << params.n);

    let Some((kraus, _eve_qubits)) = channel else {
        // stolen on both sides: identical all-reject distributions
        return Ok(EquivalenceReport {
            attack: attack.name(),
            tv_distance: 0.0,
            config_digest: format!("{:016X}", params.digest()),
            seed: None,
        });
    };

    let t = params.private_random_bits();
    let bob_qubits: Vec<usize> = (0..big_n).collect();

    // coherent side, averaged over the phase syndrome
    let mut coherent_avg = vec![0.0f64; n_outcomes];
    for c2_word in 0..1u128 << t {
        let c2 = BitString::from_word(c2_word, t);
        let extras = CoherentKeyExtras::new(c2, params)?;
        let reg = coherent_encode(&message, &key, &extras, params)?;
        let joint = reg.as_density()?.apply_kraus(&kraus)?;
        let bob = joint.partial_trace(&bob_qubits)?;
        let decoder = CoherentDecoder::new(params, &key, c2)?;
        let dist = decoder.outcome_distribution(&bob)?;
        for (i, p) in dist.0.iter().enumerate() {
            coherent_avg[i] += p / (1u64 << t) as f64;
        }
    }

    // measured side, averaged over the coset randomness
    let tagged = crate::tag::append_tag(&message, key.k)?;
    let y = tagged.to_bits().xor(&key.e)?;
    let elements = params.pair().coset_elements(&key.c1, &y)?;
    let mut measured_avg = vec![0.0f64; n_outcomes];
    let weight = 1.0 / elements.len() as f64;
    for z in elements {
        let reg = qsim::prepare(&z, &key.b, EngineMode::Exact)?;
        let joint = reg.as_density()?.apply_kraus(&kraus)?;
        let bob = joint.partial_trace(&bob_qubits)?;
        let born = bob.outcome_distribution(&key.b)?;
        for (outcome, p) in born.iter().enumerate() {
            if *p <= 0.0 {
                continue;
            }
            let z_bits = BitString::from_word(outcome as u128, big_n);
            let decoded = classical_decode(&z_bits, &key, params)?;
            let slot = if decoded.accepted() {
                1 + decoded.message.unwrap().word() as usize
            } else {
                0
            };
            measured_avg[slot] += p * weight;
        }
    }

    let tv = OutcomeDistribution(coherent_avg)
        .total_variation(&OutcomeDistribution(measured_avg));
    Ok(EquivalenceReport {
        attack: attack.name(),
        tv_distance: tv,
        config_digest: format!("{:016X}", params.digest()),
        seed: None,
    })
}
