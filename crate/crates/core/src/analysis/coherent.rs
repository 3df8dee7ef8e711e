//! Exact receiver-side decoding channel for the coherent variant.
//!
//! The decode sequence: undo the basis shuffle, measure the C1 (bit)
//! syndrome and correct toward the key syndrome, measure the C2-dual
//! (phase) syndrome and correct toward c2, then read the coset label
//! register, strip the pad, and project onto the tag-passing subspace.
//! Everything is carried out as an explicit channel on density matrices
//! so superposition inputs survive where they should.

use crate::bits::BitString;
use crate::codes::ProtocolParams;
use crate::error::{Error, Result};
use crate::protocol::{classical_decode, KeyMaterial};
use crate::qsim::{CMat, DensityMatrix};
use crate::tag::TaggedMessage;
use num_complex::Complex64;

pub struct CoherentDecoder<'a> {
    params: &'a ProtocolParams,
    key: &'a KeyMaterial,
    c2: BitString,
}

/// Bob's classical outcome distribution: slot 0 is rejection, slot
/// 1 + m is acceptance with message m.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution(pub Vec<f64>);

impl OutcomeDistribution {
    pub fn reject_mass(&self) -> f64 {
        self.0[0]
    }

    pub fn total_variation(&self, other: &OutcomeDistribution) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            / 2.0
    }
}

impl<'a> CoherentDecoder<'a> {
    pub fn new(params: &'a ProtocolParams, key: &'a KeyMaterial, c2: BitString) -> Result<Self> {
        if c2.len() != params.private_random_bits() {
            return Err(Error::parameter("c2 length must be N - K'"));
        }
        Ok(CoherentDecoder { params, key, c2 })
    }

    /// Syndrome measurements and corrections, still on N qubits in the
    /// computational frame.
    pub fn corrected_density(&self, attacked: &DensityMatrix) -> Result<DensityMatrix> {
        let big_n = self.params.big_n();
        if attacked.n_qubits() != big_n {
            return Err(Error::parameter("decoder expects the receiver's N qubits"));
        }
        let mut rho = attacked.clone();
        rho.hadamard_pattern(&self.key.b)?;
        let rho = self.bit_syndrome_correct(&rho)?;
        let rho = self.phase_syndrome_correct(&rho)?;
        Ok(rho)
    }

    fn bit_syndrome_correct(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let c1_code = self.params.pair().c1();
        let n_syn = c1_code.syndrome_len();
        if n_syn == 0 {
            return Ok(rho.clone());
        }
        let dim = rho.dim();
        let h1 = c1_code.parity_check();
        let synd_of: Vec<usize> = (0..dim).map(|i| h1.mul_word(i as u128) as usize).collect();
        let mut out = CMat::zeros(dim, dim);
        for syn in 0..1usize << n_syn {
            let offset = BitString::from_word(syn as u128, n_syn).xor(&self.key.c1)?;
            let corr = c1_code.coset_leader(&offset)?.word() as usize;
            for i in 0..dim {
                if synd_of[i] != syn {
                    continue;
                }
                for j in 0..dim {
                    if synd_of[j] == syn {
                        out[(i ^ corr, j ^ corr)] += rho.matrix()[(i, j)];
                    }
                }
            }
        }
        let mut dm = DensityMatrix::new_unchecked(rho.n_qubits(), out);
        dm.rehermitize();
        Ok(dm)
    }

    fn phase_syndrome_correct(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let c2_code = self.params.pair().c2();
        let h2 = c2_code.parity_check();
        let t = h2.n_rows();
        if t == 0 {
            return Ok(rho.clone());
        }
        let dim = rho.dim();
        // dual-coset shifts g(tau)
        let shifts: Vec<usize> = (0..1usize << t)
            .map(|tau| {
                let mut g = 0u128;
                for (i, row) in h2.rows().iter().enumerate() {
                    if (tau >> i) & 1 == 1 {
                        g ^= row;
                    }
                }
                g as usize
            })
            .collect();
        let scale = 1.0 / (1usize << t) as f64;
        let mut out = CMat::zeros(dim, dim);
        for mu in 0..1usize << t {
            // projector onto the X-type syndrome pattern mu
            let mut q = CMat::zeros(dim, dim);
            for (tau, &g) in shifts.iter().enumerate() {
                let sign = if ((mu & tau).count_ones()) % 2 == 0 { scale } else { -scale };
                for z in 0..dim {
                    q[(z ^ g, z)] += Complex64::new(sign, 0.0);
                }
            }
            let branch = &q * rho.matrix() * &q;
            // phase correction toward c2
            let offset = BitString::from_word(mu as u128, t).xor(&self.c2)?;
            let v = c2_code.coset_leader(&offset)?.word() as usize;
            for i in 0..dim {
                for j in 0..dim {
                    let sign_i = (i & v).count_ones() % 2 == 1;
                    let sign_j = (j & v).count_ones() % 2 == 1;
                    let mut val = branch[(i, j)];
                    if sign_i != sign_j {
                        val = -val;
                    }
                    out[(i, j)] += val;
                }
            }
        }
        let mut dm = DensityMatrix::new_unchecked(rho.n_qubits(), out);
        dm.rehermitize();
        Ok(dm)
    }

    /// Classical outcome distribution of the full decode followed by a
    /// computational measurement.
    pub fn outcome_distribution(&self, attacked: &DensityMatrix) -> Result<OutcomeDistribution> {
        let corrected = self.corrected_density(attacked)?;
        let n = self.params.n;
        let mut dist = vec![0.0f64; 1 + (1 << n)];
        for (z, prob) in corrected.matrix().diagonal().iter().enumerate() {
            let p = prob.re.max(0.0);
            if p == 0.0 {
                continue;
            }
            let z_bits = BitString::from_word(z as u128, self.params.big_n());
            let out = classical_decode(&z_bits, self.key, self.params)?;
            if out.accepted() {
                dist[1 + out.message.unwrap().word() as usize] += p;
            } else {
                dist[0] += p;
            }
        }
        Ok(OutcomeDistribution(dist))
    }

    /// The decoded (flag, message) density: flag is the top qubit with
    /// acceptance at 0, the message register holds n qubits. Rejected
    /// mass is parked on the zero message under the rejection flag.
    pub fn flag_message_density(&self, attacked: &DensityMatrix) -> Result<DensityMatrix> {
        let corrected = self.corrected_density(attacked)?;
        let params = self.params;
        let pair = params.pair();
        let label_len = pair.label_len();
        let t = pair.c2().parity_check().n_rows();
        let field = params.field();
        // z(y, tau) = representative(c1, y) + dual shift tau
        let shifts: Vec<usize> = (0..1usize << t)
            .map(|tau| {
                let mut g = 0u128;
                for (i, row) in pair.c2().parity_check().rows().iter().enumerate() {
                    if (tau >> i) & 1 == 1 {
                        g ^= row;
                    }
                }
                g as usize
            })
            .collect();
        let mut rep = vec![0usize; 1 << label_len];
        for y in 0..1usize << label_len {
            let y_bits = BitString::from_word(y as u128, label_len);
            rep[y] = pair.coset_representative(&self.key.c1, &y_bits)?.word() as usize;
        }
        // label-register density, tracing the intra-coset coordinate
        let ydim = 1usize << label_len;
        let mut rho_y = CMat::zeros(ydim, ydim);
        for y1 in 0..ydim {
            for y2 in 0..ydim {
                let mut acc = Complex64::new(0.0, 0.0);
                for &g in &shifts {
                    acc += corrected.matrix()[(rep[y1] ^ g, rep[y2] ^ g)];
                }
                rho_y[(y1, y2)] = acc;
            }
        }
        // strip the pad and project onto the tag-passing subspace
        let e = self.key.e.word() as usize;
        let n = params.n;
        let msg_dim = 1usize << n;
        let accepts: Vec<bool> = (0..ydim)
            .map(|t_idx| {
                let bits = BitString::from_word(t_idx as u128, label_len);
                let tagged = TaggedMessage::from_bits(&bits, field).expect("register split");
                crate::tag::verify_tag(&tagged, self.key.k).expect("same field")
            })
            .collect();
        let mut out = CMat::zeros(2 * msg_dim, 2 * msg_dim);
        let mut acc_trace = 0.0f64;
        for t1 in 0..ydim {
            if !accepts[t1] {
                continue;
            }
            let m1 = t1 & (msg_dim - 1);
            for t2 in 0..ydim {
                if !accepts[t2] {
                    continue;
                }
                let m2 = t2 & (msg_dim - 1);
                out[(m1, m2)] += rho_y[(t1 ^ e, t2 ^ e)];
            }
            acc_trace += rho_y[(t1 ^ e, t1 ^ e)].re;
        }
        // rejected mass sits under the rejection flag (top qubit = 1)
        let total: f64 = rho_y.diagonal().iter().map(|c| c.re).sum();
        let rej = (total - acc_trace).max(0.0);
        out[(msg_dim, msg_dim)] += Complex64::new(rej, 0.0);
        let mut dm = DensityMatrix::new_unchecked(n + 1, out);
        dm.rehermitize();
        Ok(dm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use crate::protocol::{coherent_encode, CoherentKeyExtras};
    use crate::qsim::bad_subspace_mass;
    use crate::qsim::CVec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn honest_coherent_round_trip_trivial() {
        let params = presets::trivial4();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..20 {
            let key = KeyMaterial::random(&params, &mut rng);
            let c2 = BitString::zeros(0);
            let extras = CoherentKeyExtras::new(c2, &params).unwrap();
            let m = BitString::random(2, &mut rng);
            let reg = coherent_encode(&m, &key, &extras, &params).unwrap();
            let decoder = CoherentDecoder::new(&params, &key, c2).unwrap();
            let dist = decoder.outcome_distribution(&reg.as_density().unwrap()).unwrap();
            assert!(dist.reject_mass() < 1e-10);
            assert!((dist.0[1 + m.word() as usize] - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn honest_coherent_round_trip_nontrivial() {
        let params = presets::nontrivial4();
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for c2_word in 0..2u128 {
            let key = KeyMaterial::random(&params, &mut rng);
            let c2 = BitString::from_word(c2_word, 1);
            let extras = CoherentKeyExtras::new(c2, &params).unwrap();
            let m = BitString::random(1, &mut rng);
            let reg = coherent_encode(&m, &key, &extras, &params).unwrap();
            let decoder = CoherentDecoder::new(&params, &key, c2).unwrap();
            let dist = decoder.outcome_distribution(&reg.as_density().unwrap()).unwrap();
            assert!(dist.reject_mass() < 1e-10, "c2 {c2_word}");
            assert!((dist.0[1 + m.word() as usize] - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn superposition_survives_honest_decode() {
        // an undisturbed two-message superposition decodes with zero
        // bad-subspace mass
        let params = presets::nontrivial4();
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let key = KeyMaterial::random(&params, &mut rng);
        let c2 = BitString::from_word(1, 1);
        let extras = CoherentKeyExtras::new(c2, &params).unwrap();
        let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let m0 = BitString::zeros(1);
        let m1 = BitString::from_word(1, 1);
        let reg = crate::protocol::coherent_encode_superposition(
            &[(m0, amp), (m1, amp)],
            &key,
            &extras,
            &params,
        )
        .unwrap();
        let decoder = CoherentDecoder::new(&params, &key, c2).unwrap();
        let out = decoder.flag_message_density(&reg.as_density().unwrap()).unwrap();
        let mut psi = CVec::zeros(2);
        psi[0] = amp;
        psi[1] = amp;
        let bad = bad_subspace_mass(&out, &psi).unwrap();
        assert!(bad < 1e-10, "bad mass {bad}");
        // and the acceptance mass is full
        let acc: f64 = (0..2).map(|i| out.matrix()[(i, i)].re).sum();
        assert!((acc - 1.0).abs() < 1e-10);
    }

    #[test]
    fn phase_error_detected_by_phase_syndrome() {
        // a single Z error on a Z-basis qubit is invisible classically
        // but the phase syndrome of the nontrivial pair catches it when
        // it lands outside the dual of C1
        let params = presets::nontrivial4();
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let field = params.field();
        let key = KeyMaterial::new(
            field.zero(),
            BitString::zeros(2),
            BitString::zeros(1),
            BitString::zeros(4),
            &params,
        )
        .unwrap();
        let c2 = BitString::zeros(1);
        let extras = CoherentKeyExtras::new(c2, &params).unwrap();
        let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let m0 = BitString::zeros(1);
        let m1 = BitString::from_word(1, 1);
        let reg = crate::protocol::coherent_encode_superposition(
            &[(m0, amp), (m1, amp)],
            &key,
            &extras,
            &params,
        )
        .unwrap();
        let mut rho = reg.as_density().unwrap();
        rho.apply_pauli(&crate::pauli::PauliString::parse("ZIII").unwrap()).unwrap();
        let decoder = CoherentDecoder::new(&params, &key, c2).unwrap();
        let out = decoder.flag_message_density(&rho).unwrap();
        let mut psi = CVec::zeros(2);
        psi[0] = amp;
        psi[1] = amp;
        // weight-1 phase error has a nonzero dual syndrome and is
        // corrected exactly, so the superposition still survives
        let bad = bad_subspace_mass(&out, &psi).unwrap();
        assert!(bad < 1e-10, "bad mass {bad}");
        let _ = rng;
    }
}
