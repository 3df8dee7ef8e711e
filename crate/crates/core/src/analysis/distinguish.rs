//! Key-stream distinguisher: turning a break of the scheme under
//! structured keys into a test separating a generator from true
//! randomness.
//!
//! Each trial simulates a sender transmitting the canonical two-message
//! superposition through the coherent pipeline with key material drawn
//! from the candidate stream, applies the caller's attack, decodes, and
//! measures in a basis containing the reference state. The distinguishing
//! event is "accepted but orthogonal to the reference". Against a
//! calibrated null rate, the verdict is a one-sided binomial test; with
//! a zero null rate this reduces to flagging any event at all.

use crate::adversary::{attack_kraus, Attack};
use crate::analysis::coherent::CoherentDecoder;
use crate::bits::BitString;
use crate::codes::ProtocolParams;
use crate::error::{Error, Result};
use crate::pauli::{PauliOp, PauliString};
use crate::protocol::{coherent_encode_superposition, CoherentKeyExtras, KeyMaterial};
use crate::qsim::{bad_subspace_mass, CVec};
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

/// Specification of where a trial's key bits come from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum KeySourceSpec {
    TrueRandom,
    /// The block repeated forever; period = block length.
    RepeatingBlock { block: BitString },
    /// 16-bit linear feedback register, taps at 16, 14, 13, 11.
    Lfsr16 { seed: u16 },
}

impl KeySourceSpec {
    pub fn name(&self) -> String {
        match self {
            KeySourceSpec::TrueRandom => "true-random".into(),
            KeySourceSpec::RepeatingBlock { block } => format!("block:{}", block),
            KeySourceSpec::Lfsr16 { seed } => format!("lfsr16:{seed:04X}"),
        }
    }
}

/// Stateful bit stream over a source specification.
pub struct KeyStream {
    spec: KeySourceSpec,
    cursor: usize,
    lfsr: u16,
}

impl KeyStream {
    pub fn new(spec: KeySourceSpec) -> Result<Self> {
        match &spec {
            KeySourceSpec::RepeatingBlock { block } if block.is_empty() => {
                return Err(Error::parameter("repeating block must be nonempty"));
            }
            KeySourceSpec::Lfsr16 { seed } if *seed == 0 => {
                return Err(Error::parameter("feedback register seed must be nonzero"));
            }
            _ => {}
        }
        let lfsr = match &spec {
            KeySourceSpec::Lfsr16 { seed } => *seed,
            _ => 0,
        };
        Ok(KeyStream { spec, cursor: 0, lfsr })
    }

    fn next_bit<R: Rng + ?Sized>(&mut self, rng: &mut R) -> bool {
        match &self.spec {
            KeySourceSpec::TrueRandom => rng.gen::<bool>(),
            KeySourceSpec::RepeatingBlock { block } => {
                let bit = block.get(self.cursor % block.len());
                self.cursor += 1;
                bit
            }
            KeySourceSpec::Lfsr16 { .. } => {
                // Fibonacci register, taps 16, 14, 13, 11 (counting from
                // 1 at the output end)
                let out = self.lfsr & 1 == 1;
                let feedback =
                    (self.lfsr ^ (self.lfsr >> 2) ^ (self.lfsr >> 3) ^ (self.lfsr >> 5)) & 1;
                self.lfsr = (self.lfsr >> 1) | (feedback << 15);
                out
            }
        }
    }

    pub fn next_bits<R: Rng + ?Sized>(&mut self, len: usize, rng: &mut R) -> BitString {
        let bits: Vec<bool> = (0..len).map(|_| self.next_bit(rng)).collect();
        BitString::from_bits(&bits)
    }

    /// One trial's key material in the fixed draw order (k, e, c1, b),
    /// then the phase syndrome.
    pub fn draw_key<R: Rng + ?Sized>(
        &mut self,
        params: &ProtocolParams,
        rng: &mut R,
    ) -> Result<(KeyMaterial, BitString)> {
        let field = params.field();
        let s = field.s() as usize;
        let k_bits = self.next_bits(s, rng);
        let k = field.elem(k_bits.word() as u64)?;
        let e = self.next_bits(params.n + s, rng);
        let c1 = self.next_bits(params.c1_len(), rng);
        let b = self.next_bits(params.big_n(), rng);
        let c2 = self.next_bits(params.private_random_bits(), rng);
        Ok((KeyMaterial::new(k, e, c1, b, params)?, c2))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DistinguisherReport {
    pub source: String,
    pub attack: String,
    pub trials: u64,
    pub events: u64,
    pub event_rate: f64,
    pub null_rate: f64,
    /// One-sided binomial tail of seeing at least this many events
    /// under the null rate.
    pub p_value: f64,
    pub verdict: String,
    pub ci_low: f64,
    pub ci_high: f64,
    pub config_digest: String,
    pub seed: Option<u64>,
}

impl DistinguisherReport {
    pub fn says_pseudorandom(&self) -> bool {
        self.verdict == "pseudorandom"
    }
}

/// Runs `trials` simulated transmissions with keys from the source and
/// reports the accept-and-orthogonal event count. The verdict is
/// "pseudorandom" when the count is inconsistent with the null rate at
/// the 5 percent level; a null rate of zero flags any event.
pub fn distinguisher<R: Rng + ?Sized>(
    attack: &Attack,
    source: KeySourceSpec,
    params: &ProtocolParams,
    trials: u64,
    null_rate: f64,
    rng: &mut R,
) -> Result<DistinguisherReport> {
    if trials == 0 {
        return Err(Error::parameter("trial count must be positive"));
    }
    let mut stream = KeyStream::new(source.clone())?;
    let (m0, m1) = super::sweep::canonical_messages(params);
    let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut psi = CVec::zeros(1 << params.n);
    psi[m0.word() as usize] = amp;
    psi[m1.word() as usize] = amp;
    let bob_qubits: Vec<usize> = (0..params.big_n()).collect();
    let mut events = 0u64;
    for _ in 0..trials {
        let (key, c2) = stream.draw_key(params, rng)?;
        let extras = CoherentKeyExtras::new(c2, params)?;
        let reg = coherent_encode_superposition(
            &[(m0, amp), (m1, amp)],
            &key,
            &extras,
            params,
        )?;
        let rho = reg.as_density()?;
        // ancilla-free attacks act in place; anything else goes through
        // its channel form and the receiver marginal
        let attacked = match attack {
            Attack::Identity => rho,
            Attack::PauliTamper(p) => {
                let mut rho = rho;
                rho.apply_pauli(p)?;
                rho
            }
            _ => match attack_kraus(attack, params.big_n(), rng)? {
                None => continue, // stolen: the simulated receiver never accepts
                Some((kraus, _)) => rho.apply_kraus(&kraus)?.partial_trace(&bob_qubits)?,
            },
        };
        let decoder = CoherentDecoder::new(params, &key, c2)?;
        let out = decoder.flag_message_density(&attacked)?;
        let event_probability = bad_subspace_mass(&out, &psi)?.clamp(0.0, 1.0);
        if rng.gen::<f64>() < event_probability {
            events += 1;
        }
    }
    let rate = events as f64 / trials as f64;
    let p_value = binomial_survival(trials, null_rate, events);
    let verdict = if p_value < 0.05 { "pseudorandom" } else { "random" };
    let half_width = 1.96 * (rate * (1.0 - rate) / trials as f64).sqrt();
    Ok(DistinguisherReport {
        source: source.name(),
        attack: attack.name(),
        trials,
        events,
        event_rate: rate,
        null_rate,
        p_value,
        verdict: verdict.into(),
        ci_low: (rate - half_width).max(0.0),
        ci_high: (rate + half_width).min(1.0),
        config_digest: format!("{:016X}", params.digest()),
        seed: None,
    })
}

/// P(X >= k) for X ~ Binomial(n, p), by stable forward accumulation of
/// the probability mass.
pub fn binomial_survival(n: u64, p: f64, k: u64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return if k <= n { 1.0 } else { 0.0 };
    }
    if k > n {
        return 0.0;
    }
    let ln_p = p.ln();
    let ln_q = (1.0 - p).ln();
    let mut ln_pmf = n as f64 * ln_q;
    let mut cdf = ln_pmf.exp();
    for i in 0..k - 1 {
        ln_pmf += ((n - i) as f64).ln() - ((i + 1) as f64).ln() + ln_p - ln_q;
        cdf += ln_pmf.exp();
    }
    (1.0 - cdf).clamp(0.0, 1.0)
}

/// The repetition probe: a two-position phase string Z at 0 and at
/// `period`. Under a period-p block stream both positions share one
/// stream bit, so the probe is either an invisible pure-phase error
/// (which flips the canonical superposition whenever the adjacent key
/// bits differ) or an all-X error landing entirely in the tag register,
/// where the induced tamper polynomial is a nonzero constant and is
/// always caught. Two positions keep the flip parity a two-bit function
/// of the stream, which stays non-constant for every non-constant
/// block; a wider probe would see only the block's total parity.
pub fn repetition_probe_attack(params: &ProtocolParams, period: usize) -> Result<Attack> {
    if period == 0 {
        return Err(Error::parameter("period must be positive"));
    }
    let big_n = params.big_n();
    if period >= big_n {
        return Err(Error::parameter(format!(
            "period {period} places no second probe position below N = {big_n}"
        )));
    }
    let mut ops = vec![PauliOp::I; big_n];
    ops[0] = PauliOp::Z;
    ops[period] = PauliOp::Z;
    Ok(Attack::PauliTamper(PauliString::new(ops)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn lfsr_has_long_period() {
        let mut stream = KeyStream::new(KeySourceSpec::Lfsr16 { seed: 0xACE1 }).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let first: Vec<bool> = (0..64).map(|_| stream.next_bit(&mut rng)).collect();
        // state must not cycle within a few thousand steps
        let mut seen_repeat = false;
        for _ in 0..4096 {
            let next: Vec<bool> = (0..64).map(|_| stream.next_bit(&mut rng)).collect();
            if next == first {
                seen_repeat = true;
                break;
            }
        }
        assert!(!seen_repeat);
        assert!(KeyStream::new(KeySourceSpec::Lfsr16 { seed: 0 }).is_err());
    }

    #[test]
    fn repeating_block_repeats() {
        let block = BitString::parse_binary("001").unwrap();
        let mut stream = KeyStream::new(KeySourceSpec::RepeatingBlock { block }).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let bits = stream.next_bits(9, &mut rng);
        assert_eq!(bits.to_string(), "001001001");
    }

    #[test]
    fn binomial_survival_sane() {
        assert_eq!(binomial_survival(10, 0.0, 1), 0.0);
        assert_eq!(binomial_survival(10, 0.5, 0), 1.0);
        // P(X >= 1) = 1 - 0.5^10
        let p = binomial_survival(10, 0.5, 1);
        assert!((p - (1.0 - 0.5f64.powi(10))).abs() < 1e-12);
        // symmetric median: P(X >= 5 | n=9, p=0.5) = 0.5
        let p = binomial_survival(9, 0.5, 5);
        assert!((p - 0.5).abs() < 1e-9);
    }

    #[test]
    fn deterministic_given_seeds() {
        let params = presets::distinguisher8();
        let attack = repetition_probe_attack(&params, 3).unwrap();
        let block = BitString::parse_binary("001").unwrap();
        let run = |seed: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            distinguisher(
                &attack,
                KeySourceSpec::RepeatingBlock { block },
                &params,
                50,
                0.2,
                &mut rng,
            )
            .unwrap()
            .events
        };
        assert_eq!(run(7), run(7));
    }

    #[test]
    fn period_deficient_block_fires_events() {
        // every non-constant period-3 block has exactly one cyclic
        // 0 -> 1 transition, so events fire on one of three trial
        // offsets: rate exactly 1/3
        let params = presets::distinguisher8();
        let attack = repetition_probe_attack(&params, 3).unwrap();
        for block_text in ["001", "010", "100", "011", "101", "110"] {
            let block = BitString::parse_binary(block_text).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(91);
            let report = distinguisher(
                &attack,
                KeySourceSpec::RepeatingBlock { block },
                &params,
                300,
                0.17,
                &mut rng,
            )
            .unwrap();
            assert!(
                (report.event_rate - 1.0 / 3.0).abs() < 0.05,
                "block {block_text}: rate {}",
                report.event_rate
            );
            assert!(report.says_pseudorandom(), "block {block_text}");
        }
    }

    #[test]
    fn true_random_stays_quiet() {
        let params = presets::distinguisher8();
        let attack = repetition_probe_attack(&params, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(92);
        let report = distinguisher(
            &attack,
            KeySourceSpec::TrueRandom,
            &params,
            400,
            0.17,
            &mut rng,
        )
        .unwrap();
        // benign rate: probe bases both Z with probability 1/4, then a
        // fair-coin phase flip: 1/8
        assert!((report.event_rate - 0.125).abs() < 0.08, "rate {}", report.event_rate);
        assert!(!report.says_pseudorandom());
    }
}
