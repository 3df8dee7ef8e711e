//! Key distribution built on the encryption primitive.
//!
//! Direct mode: Alice encrypts a fresh random string under fresh key
//! material; Bob acknowledges receipt on the classical channel, only
//! then is the key announced, and Bob validates. An accepted run leaves
//! both sides holding the same string. Sifted mode: Alice sends random
//! bits in random bases, Bob measures in his own random bases, matching
//! positions are kept, and the correction/label/tag pipeline runs on the
//! sifted string with the announced key parts derived from it.
//!
//! The classical channel is assumed authenticated; the tag layer already
//! authenticates the payload. Reusable-key schedules are deliberately
//! not accepted here: announcing the pad would leak the reusable part.

use crate::bits::BitString;
use crate::codes::ProtocolParams;
use crate::adversary::{apply_attack, Attack};
use crate::error::{Error, Result};
use crate::protocol::{
    classical_decode, decrypt, encrypt, KeyMaterial, TransmissionDescriptor, Verdict,
};
use crate::qsim::{self, EngineMode};
use crate::tag;
use rand::Rng;
use serde::Serialize;

/// Ordered record of protocol events; the announcement must come after
/// the acknowledgment for the reduction to encryption to make sense.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum TranscriptEvent {
    KeyDraw,
    Transmission,
    Attack(String),
    BobAcknowledged,
    KeyAnnounced,
    Verdict(String),
}

#[derive(Debug, Clone, Serialize)]
pub struct SiftStats {
    pub transmitted: usize,
    pub kept: usize,
    pub sift_fraction: f64,
    /// Disagreement rate between the two sides over all kept positions.
    pub kept_error_rate: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct QkdTranscript {
    pub events: Vec<TranscriptEvent>,
    pub accepted: bool,
    /// Alice's draw of the prospective key.
    pub alice_key: String,
    /// Present exactly when the run accepted.
    pub shared_key: Option<String>,
    pub attack: String,
    pub abort_reason: Option<String>,
    pub sift: Option<SiftStats>,
    /// The key material consumed by the run, for draw-uniqueness audits.
    #[serde(skip)]
    pub draws: Option<KeyMaterial>,
}

impl QkdTranscript {
    pub fn announcement_follows_ack(&self) -> bool {
        let ack = self.events.iter().position(|e| *e == TranscriptEvent::BobAcknowledged);
        let ann = self.events.iter().position(|e| *e == TranscriptEvent::KeyAnnounced);
        match (ack, ann) {
            (Some(a), Some(n)) => a < n,
            // no announcement without an acknowledgment
            (None, None) | (Some(_), None) => true,
            (None, Some(_)) => false,
        }
    }
}

/// Direct mode: one uncloneable transmission carrying a fresh key.
pub fn run_direct<R: Rng + ?Sized>(
    params: &ProtocolParams,
    attack: &Attack,
    mode: EngineMode,
    rng: &mut R,
) -> Result<QkdTranscript> {
    let mut events = vec![TranscriptEvent::KeyDraw];
    let key = KeyMaterial::random(params, rng);
    let x = BitString::random(params.n, rng);

    let tx = encrypt(&x, &key, params, mode, rng)?;
    events.push(TranscriptEvent::Transmission);

    let outcome = apply_attack(attack, &tx, rng)?;
    events.push(TranscriptEvent::Attack(attack.name()));

    let mut accepted = false;
    let mut shared = None;
    if outcome.to_bob.is_some() {
        events.push(TranscriptEvent::BobAcknowledged);
        events.push(TranscriptEvent::KeyAnnounced);
        let verdict = decrypt(outcome.to_bob.as_ref(), &key, params, rng)?;
        if verdict.verdict == Verdict::Accept {
            accepted = true;
            shared = verdict.message;
        }
    }
    events.push(TranscriptEvent::Verdict(
        if accepted { "ACC" } else { "REJ" }.to_string(),
    ));
    Ok(QkdTranscript {
        events,
        accepted,
        alice_key: x.to_string(),
        shared_key: shared.map(|s| {
            debug_assert_eq!(s, x, "accepted run must agree on the key");
            s.to_string()
        }),
        attack: attack.name(),
        abort_reason: None,
        sift: None,
        draws: Some(key),
    })
}

/// Sifted mode: `transmitted` qubits of random bits in random bases;
/// kept positions are truncated to the code length of `params`, Alice
/// derives the announced parts (syndrome of her kept string, pad solving
/// the tag relation for a fresh random key), and both sides decode.
pub fn run_sifted<R: Rng + ?Sized>(
    transmitted: usize,
    params: &ProtocolParams,
    attack: &Attack,
    rng: &mut R,
) -> Result<QkdTranscript> {
    if !attack.supports_sampled() {
        return Err(Error::capability(format!(
            "attack {} needs the exact engine; sifted mode is sampled",
            attack.name()
        )));
    }
    let big_n = params.big_n();
    let mut events = vec![TranscriptEvent::KeyDraw];
    let alice_bits = BitString::random(transmitted, rng);
    let alice_bases = BitString::random(transmitted, rng);
    let reg = qsim::prepare(&alice_bits, &alice_bases, EngineMode::Sampled)?;
    let tx = TransmissionDescriptor {
        register: reg,
        bob_qubits: transmitted,
        params_digest: params.digest(),
    };
    events.push(TranscriptEvent::Transmission);

    let outcome = apply_attack(attack, &tx, rng)?;
    events.push(TranscriptEvent::Attack(attack.name()));

    let Some(forwarded) = outcome.to_bob else {
        events.push(TranscriptEvent::Verdict("REJ".into()));
        return Ok(QkdTranscript {
            events,
            accepted: false,
            alice_key: String::new(),
            shared_key: None,
            attack: attack.name(),
            abort_reason: Some("transmission missing".into()),
            sift: None,
            draws: None,
        });
    };

    let bob_bases = BitString::random(transmitted, rng);
    let (bob_bits, _) = qsim::measure_in_bases(&forwarded.register, &bob_bases, rng)?;
    events.push(TranscriptEvent::BobAcknowledged);

    // sifting: keep positions where the bases agree
    let mut kept_alice = Vec::new();
    let mut kept_bob = Vec::new();
    for i in 0..transmitted {
        if alice_bases.get(i) == bob_bases.get(i) {
            kept_alice.push(alice_bits.get(i));
            kept_bob.push(bob_bits.get(i));
        }
    }
    let kept = kept_alice.len();
    let errors = kept_alice
        .iter()
        .zip(&kept_bob)
        .filter(|(a, b)| a != b)
        .count();
    let sift = SiftStats {
        transmitted,
        kept,
        sift_fraction: kept as f64 / transmitted as f64,
        kept_error_rate: if kept == 0 { 0.0 } else { errors as f64 / kept as f64 },
    };
    if kept < big_n {
        events.push(TranscriptEvent::Verdict("REJ".into()));
        return Ok(QkdTranscript {
            events,
            accepted: false,
            alice_key: String::new(),
            shared_key: None,
            attack: attack.name(),
            abort_reason: Some(format!("insufficient sift: kept {kept} of {transmitted}, need {big_n}")),
            sift: Some(sift),
            draws: None,
        });
    }
    let z_alice = BitString::from_bits(&kept_alice[..big_n]);
    let z_bob = BitString::from_bits(&kept_bob[..big_n]);

    // Alice derives the announced key parts from her kept string: the
    // syndrome is read off, the pad is solved so her own decode of
    // z_alice yields the fresh key x with a passing tag
    let field = params.field();
    let k_bits = BitString::random(field.s() as usize, rng);
    let k = field.elem(k_bits.word() as u64).expect("s-bit value");
    let x = BitString::random(params.n, rng);
    let c1 = params.pair().c1().syndrome(&z_alice)?;
    let y_alice = params.pair().coset_label(&z_alice)?;
    let t = tag::append_tag(&x, k)?.to_bits();
    let e = y_alice.xor(&t)?;
    let key = KeyMaterial::new(k, e, c1, BitString::zeros(big_n), params)?;
    events.push(TranscriptEvent::KeyAnnounced);

    // both sides run the same decode; Alice's own run always accepts
    let alice_out = classical_decode(&z_alice, &key, params)?;
    debug_assert!(alice_out.accepted());
    debug_assert_eq!(alice_out.message.as_ref(), Some(&x));
    let bob_out = classical_decode(&z_bob, &key, params)?;
    let accepted = bob_out.accepted();
    events.push(TranscriptEvent::Verdict(
        if accepted { "ACC" } else { "REJ" }.to_string(),
    ));
    Ok(QkdTranscript {
        events,
        accepted,
        alice_key: x.to_string(),
        shared_key: bob_out.message.map(|m| m.to_string()),
        attack: attack.name(),
        abort_reason: None,
        sift: Some(sift),
        draws: Some(key),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn direct_honest_runs_agree() {
        let params = presets::trivial4();
        let mut rng = ChaCha8Rng::seed_from_u64(100);
        for _ in 0..100 {
            let t = run_direct(&params, &Attack::Identity, EngineMode::Exact, &mut rng).unwrap();
            assert!(t.accepted);
            assert_eq!(t.shared_key.as_ref(), Some(&t.alice_key));
            assert!(t.announcement_follows_ack());
        }
    }

    #[test]
    fn direct_steal_rejects_without_announcement() {
        let params = presets::trivial4();
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let t = run_direct(&params, &Attack::Steal, EngineMode::Exact, &mut rng).unwrap();
        assert!(!t.accepted);
        assert!(t.shared_key.is_none());
        assert!(!t.events.contains(&TranscriptEvent::KeyAnnounced));
        assert!(t.announcement_follows_ack());
    }

    #[test]
    fn fresh_draws_every_run() {
        let params = presets::distinguisher8();
        let mut rng = ChaCha8Rng::seed_from_u64(102);
        let mut seen = Vec::new();
        for _ in 0..100 {
            let t = run_direct(&params, &Attack::Identity, EngineMode::Exact, &mut rng).unwrap();
            let draw = t.draws.unwrap();
            assert!(!seen.contains(&draw), "key material reused across runs");
            seen.push(draw);
        }
    }

    #[test]
    fn sifted_honest_statistics() {
        let params = presets::distinguisher8();
        let mut rng = ChaCha8Rng::seed_from_u64(103);
        let mut kept_total = 0usize;
        let mut runs = 0usize;
        for _ in 0..200 {
            let t = run_sifted(64, &params, &Attack::Identity, &mut rng).unwrap();
            assert!(t.accepted, "honest sifted run must accept: {:?}", t.abort_reason);
            assert_eq!(t.shared_key.as_ref(), Some(&t.alice_key));
            let sift = t.sift.unwrap();
            assert_eq!(sift.kept_error_rate, 0.0);
            kept_total += sift.kept;
            runs += 1;
        }
        // sift fraction 1/2 within 5 sigma
        let total = (runs * 64) as f64;
        let sigma = (total * 0.25).sqrt();
        assert!((kept_total as f64 - total / 2.0).abs() < 5.0 * sigma);
    }

    #[test]
    fn sifted_insufficient_sift_aborts() {
        let params = presets::distinguisher8();
        let mut rng = ChaCha8Rng::seed_from_u64(104);
        // 8 transmitted qubits keep ~4, below the code length 8
        let t = run_sifted(8, &params, &Attack::Identity, &mut rng).unwrap();
        assert!(!t.accepted);
        assert!(t.abort_reason.unwrap().contains("insufficient sift"));
    }

    #[test]
    fn sifted_intercept_resend_error_rate() {
        let params = presets::distinguisher8();
        let mut rng = ChaCha8Rng::seed_from_u64(105);
        let mut kept = 0usize;
        let mut errors = 0usize;
        for _ in 0..300 {
            let t = run_sifted(64, &params, &Attack::InterceptResendZ, &mut rng).unwrap();
            let sift = t.sift.unwrap();
            errors += (sift.kept_error_rate * sift.kept as f64).round() as usize;
            kept += sift.kept;
        }
        // kept-qubit error rate 1/4 within 5 sigma
        let expect = kept as f64 * 0.25;
        let sigma = (kept as f64 * 0.25 * 0.75).sqrt();
        assert!(
            (errors as f64 - expect).abs() < 5.0 * sigma,
            "errors {errors} vs expected {expect}"
        );
    }
}
