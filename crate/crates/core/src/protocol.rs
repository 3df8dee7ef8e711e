//! The end-to-end encryption pipelines.
//!
//! Sender side: tag the message, XOR with the one-time pad, pick a coset
//! vector matching the key's syndrome with the tagged string as label,
//! transmit each bit in the Z or X basis according to the basis key.
//! Receiver side: measure in the shared bases, syndrome-correct toward
//! the key's syndrome, read the coset label, strip the pad, check the
//! tag. A reusable-key variant pads the transmitted vector itself, and a
//! coherent variant encodes the tagged string into a superposition over
//! a dual-code coset for equivalence checking.

use crate::bits::BitString;
use crate::codes::ProtocolParams;
use crate::error::{Error, Result};
use crate::field::FieldElem;
use crate::qsim::{
    self, CVec, EngineMode, PureState, QuantumRegister, MAX_EXACT_QUBITS,
};
use crate::tag::{self, TaggedMessage};
use num_complex::Complex64;
use rand::Rng;

/// The four-part classical key: tag key k (s bits), pad e (n+s bits),
/// syndrome c1 (N-K bits), bases b (N bits).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyMaterial {
    pub k: FieldElem,
    pub e: BitString,
    pub c1: BitString,
    pub b: BitString,
}

impl KeyMaterial {
    pub fn new(k: FieldElem, e: BitString, c1: BitString, b: BitString, params: &ProtocolParams) -> Result<Self> {
        if k.params() != params.field() {
            return Err(Error::parameter("tag key from a different field"));
        }
        if e.len() != params.n + params.s as usize {
            return Err(Error::parameter("pad length must be n + s"));
        }
        if c1.len() != params.c1_len() {
            return Err(Error::parameter("syndrome key length must be N - K"));
        }
        if b.len() != params.big_n() {
            return Err(Error::parameter("basis key length must be N"));
        }
        Ok(KeyMaterial { k, e, c1, b })
    }

    /// Fresh uniform key. Draw order is fixed (k, e, c1, b) so seeded
    /// runs and stream-fed keys agree.
    pub fn random<R: Rng + ?Sized>(params: &ProtocolParams, rng: &mut R) -> Self {
        let field = params.field();
        let k_bits = BitString::random(field.s() as usize, rng);
        let k = field.elem(k_bits.word() as u64).expect("s-bit value");
        let e = BitString::random(params.n + params.s as usize, rng);
        let c1 = BitString::random(params.c1_len(), rng);
        let b = BitString::random(params.big_n(), rng);
        KeyMaterial { k, e, c1, b }
    }

    /// Total classical key bits in the draw order (k, e, c1, b).
    pub fn total_bits(params: &ProtocolParams) -> usize {
        params.s as usize + params.n + params.s as usize + params.c1_len() + params.big_n()
    }

    /// Key number `index` under the fixed bit layout; the inverse of
    /// enumeration. `index` must be below 2^total_bits.
    pub fn from_index(params: &ProtocolParams, index: u64) -> Result<Self> {
        let total = Self::total_bits(params);
        if total > 63 {
            return Err(Error::capability(format!(
                "key space of {total} bits is not enumerable"
            )));
        }
        if index >= 1u64 << total {
            return Err(Error::parameter("key index out of range"));
        }
        let field = params.field();
        let s = params.s as usize;
        let mut cursor = 0usize;
        let mut take = |len: usize| {
            let part = BitString::from_word((index as u128) >> cursor, len);
            cursor += len;
            part
        };
        let k_bits = take(s);
        let e = take(params.n + s);
        let c1 = take(params.c1_len());
        let b = take(params.big_n());
        let k = field.elem(k_bits.word() as u64)?;
        Ok(KeyMaterial { k, e, c1, b })
    }

    /// Number of distinct keys, when enumerable.
    pub fn enumeration_size(params: &ProtocolParams) -> Option<u64> {
        let total = Self::total_bits(params);
        if total > 63 {
            None
        } else {
            Some(1u64 << total)
        }
    }
}

/// N transmitted qubits, possibly entangled with eavesdropper ancillas
/// appended above them; `bob_qubits` marks the receiver's share. The
/// digest binds the transmission to its parameter set.
#[derive(Debug, Clone)]
pub struct TransmissionDescriptor {
    pub register: QuantumRegister,
    pub bob_qubits: usize,
    pub params_digest: u64,
}

/// Plaintext-equivalent intermediates of one encryption, for test
/// oracles and the transmission file format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncryptRecord {
    /// Tagged-and-padded string, the coset label.
    pub y: BitString,
    /// Transmitted bit values before basis encoding.
    pub z: BitString,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RejectReason {
    /// The transmission never arrived (stolen or lost).
    Missing,
    /// The authentication polynomial did not vanish at the key.
    TagMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecryptionOutcome {
    pub verdict: Verdict,
    pub message: Option<BitString>,
    pub reject_reason: Option<RejectReason>,
}

impl DecryptionOutcome {
    pub fn accepted(&self) -> bool {
        self.verdict == Verdict::Accept
    }

    fn accept(message: BitString) -> Self {
        DecryptionOutcome {
            verdict: Verdict::Accept,
            message: Some(message),
            reject_reason: None,
        }
    }

    fn reject(reason: RejectReason) -> Self {
        DecryptionOutcome {
            verdict: Verdict::Reject,
            message: None,
            reject_reason: Some(reason),
        }
    }
}

/// Encrypts an n-bit message, returning the transmission and the
/// plaintext-equivalent trace.
pub fn encrypt_traced<R: Rng + ?Sized>(
    message: &BitString,
    key: &KeyMaterial,
    params: &ProtocolParams,
    mode: EngineMode,
    rng: &mut R,
) -> Result<(TransmissionDescriptor, EncryptRecord)> {
    if message.len() != params.n {
        return Err(Error::parameter(format!(
            "message length {} does not match n = {}",
            message.len(),
            params.n
        )));
    }
    let tagged = tag::append_tag(message, key.k)?;
    let y = tagged.to_bits().xor(&key.e)?;
    let z = params.pair().sample_coset(&key.c1, &y, rng)?;
    let register = qsim::prepare(&z, &key.b, mode)?;
    Ok((
        TransmissionDescriptor {
            register,
            bob_qubits: params.big_n(),
            params_digest: params.digest(),
        },
        EncryptRecord { y, z },
    ))
}

pub fn encrypt<R: Rng + ?Sized>(
    message: &BitString,
    key: &KeyMaterial,
    params: &ProtocolParams,
    mode: EngineMode,
    rng: &mut R,
) -> Result<TransmissionDescriptor> {
    Ok(encrypt_traced(message, key, params, mode, rng)?.0)
}

/// Decrypts a (possibly absent) transmission. An absent transmission is
/// a rejection with reason `Missing`, never an error.
pub fn decrypt<R: Rng + ?Sized>(
    tx: Option<&TransmissionDescriptor>,
    key: &KeyMaterial,
    params: &ProtocolParams,
    rng: &mut R,
) -> Result<DecryptionOutcome> {
    let Some(tx) = tx else {
        return Ok(DecryptionOutcome::reject(RejectReason::Missing));
    };
    if tx.bob_qubits != params.big_n() {
        return Err(Error::parameter("transmission qubit count does not match N"));
    }
    let z = measure_bob_share(tx, &key.b, rng)?;
    classical_decode(&z, key, params)
}

/// The classical half of decryption: correct toward the key syndrome,
/// extract the label, strip the pad, check the tag.
pub fn classical_decode(
    z: &BitString,
    key: &KeyMaterial,
    params: &ProtocolParams,
) -> Result<DecryptionOutcome> {
    let corrected = params.pair().c1().decode(z, &key.c1)?;
    let y = params.pair().coset_label(&corrected)?;
    let t = y.xor(&key.e)?;
    let tagged = TaggedMessage::from_bits(&t, params.field())?;
    if tag::verify_tag(&tagged, key.k)? {
        Ok(DecryptionOutcome::accept(tagged.message_bits()))
    } else {
        Ok(DecryptionOutcome::reject(RejectReason::TagMismatch))
    }
}

/// Measures the receiver's qubits of a transmission in the key bases.
pub fn measure_bob_share<R: Rng + ?Sized>(
    tx: &TransmissionDescriptor,
    b: &BitString,
    rng: &mut R,
) -> Result<BitString> {
    if b.len() != tx.bob_qubits {
        return Err(Error::parameter("basis key length does not match the receiver share"));
    }
    match &tx.register {
        QuantumRegister::Pure(s) => {
            let (z, _) = s.measure_prefix(tx.bob_qubits, b, rng)?;
            Ok(z)
        }
        QuantumRegister::Density(d) => {
            let blocks = d.prefix_outcome_blocks(tx.bob_qubits, b)?;
            let probs: Vec<f64> = blocks.iter().map(|(p, _)| *p).collect();
            let idx = qsim::sample_index(&probs, rng);
            Ok(BitString::from_word(idx as u128, tx.bob_qubits))
        }
        QuantumRegister::Sampled(s) => {
            if s.n_qubits() != tx.bob_qubits {
                return Err(Error::parameter("sampled register size mismatch"));
            }
            let (z, _) = s.measure(b, rng)?;
            Ok(z)
        }
    }
}

/// Reusable key (k, b) plus a log of spent one-time pads. The pad e' of
/// length N must be fresh for every message; reuse is a usage error.
#[derive(Debug, Clone)]
pub struct ReusableKeySchedule {
    pub k: FieldElem,
    pub b: BitString,
    spent_pads: Vec<BitString>,
}

impl ReusableKeySchedule {
    pub fn new(k: FieldElem, b: BitString, params: &ProtocolParams) -> Result<Self> {
        if k.params() != params.field() {
            return Err(Error::parameter("tag key from a different field"));
        }
        if b.len() != params.big_n() {
            return Err(Error::parameter("basis key length must be N"));
        }
        Ok(ReusableKeySchedule { k, b, spent_pads: Vec::new() })
    }

    pub fn random<R: Rng + ?Sized>(params: &ProtocolParams, rng: &mut R) -> Self {
        let field = params.field();
        let k_bits = BitString::random(field.s() as usize, rng);
        let k = field.elem(k_bits.word() as u64).expect("s-bit value");
        let b = BitString::random(params.big_n(), rng);
        ReusableKeySchedule { k, b, spent_pads: Vec::new() }
    }

    pub fn messages_sent(&self) -> usize {
        self.spent_pads.len()
    }

    fn spend(&mut self, pad: &BitString) -> Result<()> {
        if self.spent_pads.contains(pad) {
            return Err(Error::usage("one-time pad e' reused across messages"));
        }
        self.spent_pads.push(*pad);
        Ok(())
    }
}

/// Reusable-key encryption: the tagged string is placed in the zero-
/// syndrome coset and the chosen vector is padded with e' before basis
/// encoding. The receiver strips e', corrects toward the zero syndrome,
/// and checks the tag; the transmitted average over uniform e' is the
/// maximally mixed state, which is what lets (k, b) be reused.
pub fn encrypt_reusable<R: Rng + ?Sized>(
    message: &BitString,
    schedule: &mut ReusableKeySchedule,
    e_prime: &BitString,
    params: &ProtocolParams,
    mode: EngineMode,
    rng: &mut R,
) -> Result<(TransmissionDescriptor, EncryptRecord)> {
    if message.len() != params.n {
        return Err(Error::parameter("message length mismatch"));
    }
    if e_prime.len() != params.big_n() {
        return Err(Error::parameter("one-time pad e' must have length N"));
    }
    schedule.spend(e_prime)?;
    let tagged = tag::append_tag(message, schedule.k)?;
    let label = tagged.to_bits();
    let zero_syndrome = BitString::zeros(params.c1_len());
    let z0 = params.pair().sample_coset(&zero_syndrome, &label, rng)?;
    let w = z0.xor(e_prime)?;
    let register = qsim::prepare(&w, &schedule.b, mode)?;
    Ok((
        TransmissionDescriptor {
            register,
            bob_qubits: params.big_n(),
            params_digest: params.digest(),
        },
        EncryptRecord { y: label, z: w },
    ))
}

pub fn decrypt_reusable<R: Rng + ?Sized>(
    tx: Option<&TransmissionDescriptor>,
    schedule: &ReusableKeySchedule,
    e_prime: &BitString,
    params: &ProtocolParams,
    rng: &mut R,
) -> Result<DecryptionOutcome> {
    let Some(tx) = tx else {
        return Ok(DecryptionOutcome::reject(RejectReason::Missing));
    };
    if e_prime.len() != params.big_n() {
        return Err(Error::parameter("one-time pad e' must have length N"));
    }
    let w = measure_bob_share(tx, &schedule.b, rng)?;
    let u = w.xor(e_prime)?;
    let zero_syndrome = BitString::zeros(params.c1_len());
    let corrected = params.pair().c1().decode(&u, &zero_syndrome)?;
    let y = params.pair().coset_label(&corrected)?;
    let tagged = TaggedMessage::from_bits(&y, params.field())?;
    if tag::verify_tag(&tagged, schedule.k)? {
        Ok(DecryptionOutcome::accept(tagged.message_bits()))
    } else {
        Ok(DecryptionOutcome::reject(RejectReason::TagMismatch))
    }
}

/// Syndromes for the coherent variant: c2 selects the dual-coset phase
/// pattern. The companion zpad field names the per-message private
/// randomness of the measured variant; it is never part of the key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoherentKeyExtras {
    pub c2: BitString,
}

impl CoherentKeyExtras {
    pub fn new(c2: BitString, params: &ProtocolParams) -> Result<Self> {
        if c2.len() != params.private_random_bits() {
            return Err(Error::parameter("c2 length must be N - K'"));
        }
        Ok(CoherentKeyExtras { c2 })
    }
}

/// Coherent encoding of a classical message: the tagged-and-padded
/// string labels a superposition over its dual-code coset, with phases
/// set by c2, then bases are shuffled by b.
pub fn coherent_encode(
    message: &BitString,
    key: &KeyMaterial,
    extras: &CoherentKeyExtras,
    params: &ProtocolParams,
) -> Result<QuantumRegister> {
    let one = Complex64::new(1.0, 0.0);
    coherent_encode_superposition(&[(*message, one)], key, extras, params)
}

/// Coherent encoding extended linearly to superpositions of messages.
/// Terms are (message, amplitude) with amplitudes normalized by the
/// caller to unit total weight.
pub fn coherent_encode_superposition(
    terms: &[(BitString, Complex64)],
    key: &KeyMaterial,
    extras: &CoherentKeyExtras,
    params: &ProtocolParams,
) -> Result<QuantumRegister> {
    let big_n = params.big_n();
    if big_n > MAX_EXACT_QUBITS {
        return Err(Error::capability(format!(
            "coherent encoding needs the exact engine (N <= {MAX_EXACT_QUBITS})"
        )));
    }
    if terms.is_empty() {
        return Err(Error::parameter("empty message superposition"));
    }
    let t = params.private_random_bits();
    let mut amps = CVec::zeros(1 << big_n);
    let scale = Complex64::new(1.0 / (1u64 << t) as f64, 0.0).sqrt();
    for (message, amp) in terms {
        if message.len() != params.n {
            return Err(Error::parameter("message length mismatch"));
        }
        let tagged = tag::append_tag(message, key.k)?;
        let y = tagged.to_bits().xor(&key.e)?;
        let base = params.pair().coset_representative(&key.c1, &y)?;
        let gens = params.pair().c2().parity_check();
        for combo in 0u64..1 << t {
            let mut z = base;
            for (i, row) in gens.rows().iter().enumerate() {
                if (combo >> i) & 1 == 1 {
                    z = z.xor(&BitString::from_word(*row, big_n))?;
                }
            }
            let phase_bits = (combo as u128 & extras.c2.word()).count_ones();
            let sign = if phase_bits % 2 == 0 { 1.0 } else { -1.0 };
            amps[z.word() as usize] += *amp * scale * Complex64::new(sign, 0.0);
        }
    }
    let norm2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if norm2 < 1e-12 {
        return Err(Error::parameter("superposition cancels to the zero vector"));
    }
    let norm = Complex64::new(norm2.sqrt(), 0.0);
    for a in amps.iter_mut() {
        *a /= norm;
    }
    let mut state = PureState::new(big_n, amps)?;
    state.hadamard_pattern(&key.b)?;
    Ok(QuantumRegister::Pure(state))
}

/// Key-length bookkeeping for one parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct KeyAccounting {
    /// Tag key k.
    pub tag_bits: usize,
    /// One-time pad e.
    pub pad_bits: usize,
    /// Syndrome key c1.
    pub syndrome_bits: usize,
    /// Basis key b.
    pub basis_bits: usize,
    /// k + e + c1 = n + 2s + (N - K).
    pub primary_key_bits: usize,
    /// Everything including the basis string.
    pub total_bits: usize,
    /// Reusable-variant split: (k, b) kept across messages.
    pub reusable_bits: usize,
    /// Reusable-variant split: fresh pad e' per message.
    pub one_time_bits: usize,
    /// Fresh private randomness per message (N - K'), not key material.
    pub private_random_bits: usize,
}

pub fn key_accounting(params: &ProtocolParams) -> KeyAccounting {
    let s = params.s as usize;
    let n = params.n;
    let big_n = params.big_n();
    let c1 = params.c1_len();
    KeyAccounting {
        tag_bits: s,
        pad_bits: n + s,
        syndrome_bits: c1,
        basis_bits: big_n,
        primary_key_bits: n + 2 * s + c1,
        total_bits: n + 2 * s + c1 + big_n,
        reusable_bits: s + big_n,
        one_time_bits: big_n,
        private_random_bits: params.private_random_bits(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use crate::qsim::{trace_distance, DensityMatrix};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn zero_key(params: &ProtocolParams) -> KeyMaterial {
        KeyMaterial::new(
            params.field().zero(),
            BitString::zeros(params.n + params.s as usize),
            BitString::zeros(params.c1_len()),
            BitString::zeros(params.big_n()),
            params,
        )
        .unwrap()
    }

    #[test]
    fn zero_propagation_trivial_config() {
        let params = presets::trivial4();
        let key = zero_key(&params);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let m = BitString::zeros(2);
        let (tx, rec) = encrypt_traced(&m, &key, &params, EngineMode::Exact, &mut rng).unwrap();
        assert!(rec.y.is_zero());
        assert!(rec.z.is_zero());
        if let QuantumRegister::Pure(s) = &tx.register {
            assert!((s.amps()[0].re - 1.0).abs() < 1e-12);
        } else {
            panic!("expected pure register");
        }
    }

    #[test]
    fn pad_layer_shows_in_label() {
        let params = presets::trivial4();
        let mut key = zero_key(&params);
        key.e = BitString::parse_binary("1111").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let m = BitString::zeros(2);
        let (_, rec) = encrypt_traced(&m, &key, &params, EngineMode::Exact, &mut rng).unwrap();
        assert_eq!(rec.y.to_string(), "1111");
    }

    #[test]
    fn round_trip_100_random_pairs() {
        for params in [presets::trivial4(), presets::hamming74_config()] {
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            for _ in 0..100 {
                let key = KeyMaterial::random(&params, &mut rng);
                let m = BitString::random(params.n, &mut rng);
                let tx = encrypt(&m, &key, &params, EngineMode::Exact, &mut rng).unwrap();
                let out = decrypt(Some(&tx), &key, &params, &mut rng).unwrap();
                assert!(out.accepted());
                assert_eq!(out.message.unwrap(), m);
            }
        }
    }

    #[test]
    fn missing_transmission_rejects() {
        let params = presets::trivial4();
        let key = zero_key(&params);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let out = decrypt(None, &key, &params, &mut rng).unwrap();
        assert_eq!(out.verdict, Verdict::Reject);
        assert_eq!(out.reject_reason, Some(RejectReason::Missing));
    }

    #[test]
    fn single_flip_corrected_by_hamming_config() {
        let params = presets::hamming74_config();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for flip_pos in 0..7 {
            let key = KeyMaterial::random(&params, &mut rng);
            let m = BitString::random(2, &mut rng);
            let tx = encrypt(&m, &key, &params, EngineMode::Exact, &mut rng).unwrap();
            let pauli = crate::pauli::PauliString::single(
                7,
                flip_pos,
                // flip the measured bit regardless of frame: X in the Z
                // frame, Z in the X frame
                if key.b.get(flip_pos) {
                    crate::pauli::PauliOp::Z
                } else {
                    crate::pauli::PauliOp::X
                },
            );
            let tampered = TransmissionDescriptor {
                register: qsim::apply_pauli(&tx.register, &pauli).unwrap(),
                ..tx
            };
            let out = decrypt(Some(&tampered), &key, &params, &mut rng).unwrap();
            assert!(out.accepted(), "flip at {flip_pos}");
            assert_eq!(out.message.unwrap(), m);
        }
    }

    #[test]
    fn tamper_rejected_when_tag_polynomial_nonvanishing() {
        // trivial pair: a bit flip lands directly in the label; the run
        // is accepted exactly when the induced tamper polynomial kills
        // the key, matching the forgery oracle
        let params = presets::trivial4();
        let field = params.field();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for z_flip in 1u128..16 {
            for k_val in 0..4u64 {
                let key = KeyMaterial::new(
                    field.elem(k_val).unwrap(),
                    BitString::random(4, &mut rng),
                    BitString::zeros(0),
                    BitString::random(4, &mut rng),
                    &params,
                )
                .unwrap();
                let m = BitString::random(2, &mut rng);
                let tx = encrypt(&m, &key, &params, EngineMode::Exact, &mut rng).unwrap();
                // flip measured bits via frame-aware Pauli
                let mut ops = Vec::new();
                for q in 0..4 {
                    ops.push(if (z_flip >> q) & 1 == 0 {
                        crate::pauli::PauliOp::I
                    } else if key.b.get(q) {
                        crate::pauli::PauliOp::Z
                    } else {
                        crate::pauli::PauliOp::X
                    });
                }
                let pauli = crate::pauli::PauliString::new(ops);
                let tampered = TransmissionDescriptor {
                    register: qsim::apply_pauli(&tx.register, &pauli).unwrap(),
                    bob_qubits: tx.bob_qubits,
                    params_digest: tx.params_digest,
                };
                let out = decrypt(Some(&tampered), &key, &params, &mut rng).unwrap();
                // oracle: delta-y = L * flip, tamper passes iff its
                // polynomial vanishes at k
                let delta_y = params
                    .pair()
                    .coset_label(&BitString::from_word(z_flip, 4))
                    .unwrap();
                let delta = TaggedMessage::from_bits(&delta_y, field).unwrap();
                let vanishes = crate::field::poly_eval(delta.registers(), key.k)
                    .unwrap()
                    .is_zero();
                assert_eq!(out.accepted(), vanishes, "flip {z_flip:04b} k {k_val}");
            }
        }
    }

    #[test]
    fn reusable_round_trip_and_reuse_guard() {
        let params = presets::hamming74_config();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut schedule = ReusableKeySchedule::random(&params, &mut rng);
        let pad1 = BitString::random(7, &mut rng);
        let pad2 = BitString::random(7, &mut rng);
        let m1 = BitString::random(2, &mut rng);
        let m2 = BitString::random(2, &mut rng);
        let (tx1, _) =
            encrypt_reusable(&m1, &mut schedule, &pad1, &params, EngineMode::Exact, &mut rng)
                .unwrap();
        let out1 = decrypt_reusable(Some(&tx1), &schedule, &pad1, &params, &mut rng).unwrap();
        assert!(out1.accepted());
        assert_eq!(out1.message.unwrap(), m1);
        // second message under the same (k, b) with a fresh pad
        let (tx2, _) =
            encrypt_reusable(&m2, &mut schedule, &pad2, &params, EngineMode::Exact, &mut rng)
                .unwrap();
        let out2 = decrypt_reusable(Some(&tx2), &schedule, &pad2, &params, &mut rng).unwrap();
        assert!(out2.accepted());
        assert_eq!(out2.message.unwrap(), m2);
        // pad reuse is refused
        let err = encrypt_reusable(&m1, &mut schedule, &pad1, &params, EngineMode::Exact, &mut rng)
            .unwrap_err();
        assert!(matches!(err, Error::Usage(_)));
    }

    #[test]
    fn reusable_transmission_averages_to_identity() {
        // averaging the transmitted density over all pads e' gives the
        // maximally mixed state (trivial config, N = 4)
        let params = presets::trivial4();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let m = BitString::parse_binary("10").unwrap();
        let base = ReusableKeySchedule::random(&params, &mut rng);
        let mut parts = Vec::new();
        for pad_word in 0..16u128 {
            let mut schedule = base.clone();
            let pad = BitString::from_word(pad_word, 4);
            let (tx, _) =
                encrypt_reusable(&m, &mut schedule, &pad, &params, EngineMode::Exact, &mut rng)
                    .unwrap();
            parts.push(tx.register.as_density().unwrap());
        }
        let avg = DensityMatrix::average(&parts).unwrap();
        let mixed = DensityMatrix::maximally_mixed(4);
        assert!(trace_distance(&avg, &mixed).unwrap() < 1e-10);
    }

    #[test]
    fn perfect_encryption_over_pad() {
        // with e uniform and everything else fixed, the trivial-config
        // transmission averages to the maximally mixed state
        let params = presets::trivial4();
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let field = params.field();
        let m = BitString::parse_binary("01").unwrap();
        let k = field.elem(3).unwrap();
        let b = BitString::random(4, &mut rng);
        let mut parts = Vec::new();
        for e_word in 0..16u128 {
            let key = KeyMaterial::new(
                k,
                BitString::from_word(e_word, 4),
                BitString::zeros(0),
                b,
                &params,
            )
            .unwrap();
            let tx = encrypt(&m, &key, &params, EngineMode::Exact, &mut rng).unwrap();
            parts.push(tx.register.as_density().unwrap());
        }
        let avg = DensityMatrix::average(&parts).unwrap();
        assert!(trace_distance(&avg, &DensityMatrix::maximally_mixed(4)).unwrap() < 1e-10);
    }

    #[test]
    fn coherent_trivial_pair_is_basis_preparation() {
        let params = presets::trivial4();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let key = KeyMaterial::random(&params, &mut rng);
        let extras = CoherentKeyExtras::new(BitString::zeros(0), &params).unwrap();
        let m = BitString::parse_binary("10").unwrap();
        let coherent = coherent_encode(&m, &key, &extras, &params).unwrap();
        let (_, rec) = encrypt_traced(&m, &key, &params, EngineMode::Exact, &mut rng).unwrap();
        let direct = qsim::prepare(&rec.z, &key.b, EngineMode::Exact).unwrap();
        let d = trace_distance(
            &coherent.as_density().unwrap(),
            &direct.as_density().unwrap(),
        )
        .unwrap();
        assert!(d < 1e-10);
    }

    #[test]
    fn coherent_codeword_normalized() {
        let params = presets::nontrivial4();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let key = KeyMaterial::random(&params, &mut rng);
        let extras = CoherentKeyExtras::new(BitString::random(1, &mut rng), &params).unwrap();
        let m = BitString::parse_binary("1").unwrap();
        let reg = coherent_encode(&m, &key, &extras, &params).unwrap();
        if let QuantumRegister::Pure(s) = reg {
            let norm2: f64 = s.amps().iter().map(|a| a.norm_sqr()).sum();
            assert!((norm2 - 1.0).abs() < 1e-10);
        } else {
            panic!("expected pure register");
        }
    }

    #[test]
    fn coherent_average_matches_measured_average() {
        // averaging the coherent encoding over the phase syndrome equals
        // averaging the measured encoding over its private randomness
        let params = presets::nontrivial4();
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let key = KeyMaterial::random(&params, &mut rng);
        let m = BitString::parse_binary("0").unwrap();
        let mut coherent_parts = Vec::new();
        for c2_word in 0..2u128 {
            let extras =
                CoherentKeyExtras::new(BitString::from_word(c2_word, 1), &params).unwrap();
            let reg = coherent_encode(&m, &key, &extras, &params).unwrap();
            coherent_parts.push(reg.as_density().unwrap());
        }
        // the measured side: enumerate the coset directly
        let tagged = tag::append_tag(&m, key.k).unwrap();
        let y = tagged.to_bits().xor(&key.e).unwrap();
        let mut measured_parts = Vec::new();
        for z in params.pair().coset_elements(&key.c1, &y).unwrap() {
            let reg = qsim::prepare(&z, &key.b, EngineMode::Exact).unwrap();
            measured_parts.push(reg.as_density().unwrap());
        }
        let a = DensityMatrix::average(&coherent_parts).unwrap();
        let b = DensityMatrix::average(&measured_parts).unwrap();
        assert!(trace_distance(&a, &b).unwrap() < 1e-10);
    }

    #[test]
    fn accounting_trivial_and_asymptotic() {
        let acc = key_accounting(&presets::trivial4());
        assert_eq!(acc.primary_key_bits, 6);
        assert_eq!(acc.basis_bits, 4);
        assert_eq!(acc.total_bits, 10);
        assert_eq!(acc.private_random_bits, 0);
        assert_eq!(acc.reusable_bits, 2 + 4);
        assert_eq!(acc.one_time_bits, 4);

        // n = 64, s = 8, delta = 0: the full-space pair at N = 72 gives
        // a total within 5 percent of 2n + 3s = 152
        let pair = crate::codes::full_space_pair(72).unwrap();
        let params = ProtocolParams::new(64, 8, 0.0, 0.0, pair).unwrap();
        let acc = key_accounting(&params);
        let target = 2 * 64 + 3 * 8;
        assert!((acc.total_bits as f64 - target as f64).abs() / target as f64 <= 0.05);
    }

    #[test]
    fn key_enumeration_layout() {
        let params = presets::trivial4();
        assert_eq!(KeyMaterial::total_bits(&params), 10);
        assert_eq!(KeyMaterial::enumeration_size(&params), Some(1024));
        let key = KeyMaterial::from_index(&params, 0b10_0101_11_01 << 0).unwrap();
        // layout from the low end: k (2), e (4), c1 (0), b (4)
        assert_eq!(key.k.value(), 0b01);
        assert_eq!(key.e.word(), 0b0111);
        assert_eq!(key.b.word(), 0b1001);
    }
}
