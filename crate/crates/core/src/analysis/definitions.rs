//! Executable forms of the secrecy and uncloneability definitions.
//!
//! Secrecy: averaging the transmitted density over the whole key space
//! must wash out the message; the estimator reports the trace distance
//! between two message averages. Uncloneability: for every key, run the
//! full encrypt/attack/decode pipeline as an exact channel, extract the
//! acceptance probability and the eavesdropper's accepted residual, and
//! tabulate the distance between the weighted residuals of two
//! messages. The empirical error is the smallest epsilon such that at
//! least a 1 - epsilon fraction of keys sit at distance at most epsilon.

use crate::adversary::{attack_kraus, Attack};
use crate::bits::BitString;
use crate::codes::ProtocolParams;
use crate::error::{Error, Result};
use crate::protocol::{classical_decode, KeyMaterial};
use crate::qsim::{self, trace_norm, CMat, DensityMatrix, EngineMode};
use rand::Rng;
use serde::Serialize;

/// Enumeration ceiling for exact key-space averages.
pub const MAX_ENUMERABLE_KEYS: u64 = 1 << 22;

#[derive(Debug, Clone, Serialize)]
pub struct EncryptionErrorReport {
    pub distance: f64,
    /// True when the whole key space was enumerated; false for a
    /// sampled estimate.
    pub exact: bool,
    pub keys_averaged: u64,
    pub config_digest: String,
}

/// The transmitted density for one key, averaged over the per-message
/// private randomness.
fn transmitted_density(
    message: &BitString,
    key: &KeyMaterial,
    params: &ProtocolParams,
) -> Result<DensityMatrix> {
    let tagged = crate::tag::append_tag(message, key.k)?;
    let y = tagged.to_bits().xor(&key.e)?;
    let elements = params.pair().coset_elements(&key.c1, &y)?;
    let mut parts = Vec::with_capacity(elements.len());
    for z in elements {
        let reg = qsim::prepare(&z, &key.b, EngineMode::Exact)?;
        parts.push(reg.as_density()?);
    }
    DensityMatrix::average(&parts)
}

/// Average transmitted density over an explicit key collection.
pub fn transmitted_average<'a>(
    message: &BitString,
    keys: impl Iterator<Item = &'a KeyMaterial>,
    params: &ProtocolParams,
) -> Result<DensityMatrix> {
    let mut acc: Option<CMat> = None;
    let mut count = 0usize;
    for key in keys {
        let d = transmitted_density(message, key, params)?;
        match &mut acc {
            None => acc = Some(d.matrix().clone()),
            Some(m) => *m += d.matrix(),
        }
        count += 1;
    }
    let m = acc.ok_or_else(|| Error::parameter("empty key collection"))?;
    let scaled = m / num_complex::Complex64::new(count as f64, 0.0);
    let mut dm = DensityMatrix::new_unchecked(params.big_n(), scaled);
    dm.rehermitize();
    Ok(dm)
}

/// Secrecy estimator: trace distance between the key-averaged
/// transmissions of two messages. Enumerates the key space when it
/// fits, otherwise falls back to a sampled average of `samples` keys.
pub fn encryption_error<R: Rng + ?Sized>(
    params: &ProtocolParams,
    m_a: &BitString,
    m_b: &BitString,
    samples: u64,
    rng: &mut R,
) -> Result<EncryptionErrorReport> {
    if params.big_n() > qsim::MAX_EXACT_QUBITS {
        return Err(Error::capability("secrecy estimator needs the exact engine"));
    }
    let (keys, exact): (Vec<KeyMaterial>, bool) = match KeyMaterial::enumeration_size(params) {
        Some(total) if total <= MAX_ENUMERABLE_KEYS => (
            (0..total)
                .map(|i| KeyMaterial::from_index(params, i))
                .collect::<Result<_>>()?,
            true,
        ),
        _ => (
            (0..samples).map(|_| KeyMaterial::random(params, rng)).collect(),
            false,
        ),
    };
    let avg_a = transmitted_average(m_a, keys.iter(), params)?;
    let avg_b = transmitted_average(m_b, keys.iter(), params)?;
    let distance = qsim::trace_distance(&avg_a, &avg_b)?;
    Ok(EncryptionErrorReport {
        distance,
        exact,
        keys_averaged: keys.len() as u64,
        config_digest: format!("{:016X}", params.digest()),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct KeyRow {
    pub key_index: u64,
    pub p_accept_a: f64,
    pub p_accept_b: f64,
    /// D(P_a rho_a, P_b rho_b) for this key.
    pub distance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub attack: String,
    pub rows: Vec<KeyRow>,
    pub epsilon_empirical: f64,
    pub mean_accept_a: f64,
    pub mean_accept_b: f64,
    pub mean_distance: f64,
    pub max_distance: f64,
    pub config_digest: String,
    pub seed: Option<u64>,
}

impl AnalysisReport {
    /// Message independence of acceptance, averaged over keys.
    pub fn acceptance_gap(&self) -> f64 {
        (self.mean_accept_a - self.mean_accept_b).abs()
    }

    /// Compact fingerprint of the full table for drift detection.
    pub fn table_fingerprint(&self) -> u64 {
        let mut text = String::new();
        for row in &self.rows {
            text.push_str(&format!(
                "{}:{:.9}:{:.9}:{:.9};",
                row.key_index, row.p_accept_a, row.p_accept_b, row.distance
            ));
        }
        crate::codes::fnv1a64(text.as_bytes())
    }
}

/// Smallest epsilon with at least a (1 - epsilon) fraction of rows at
/// distance <= epsilon. The minimum is attained either at an observed
/// distance or at a fraction threshold 1 - i/m, so scanning both
/// candidate families is exact.
pub fn epsilon_empirical(distances: &[f64]) -> f64 {
    let m = distances.len();
    assert!(m > 0, "empty distance table");
    let feasible = |eps: f64| {
        let covered = distances.iter().filter(|&&d| d <= eps + 1e-15).count();
        covered as f64 / m as f64 >= 1.0 - eps - 1e-15
    };
    let mut candidates: Vec<f64> = distances.iter().map(|d| d.clamp(0.0, 1.0)).collect();
    candidates.extend((0..=m).map(|i| 1.0 - i as f64 / m as f64));
    candidates
        .into_iter()
        .filter(|&eps| feasible(eps))
        .fold(1.0, f64::min)
        .clamp(0.0, 1.0)
}

/// Per-key pipeline: encrypt, attack as an exact channel, decode as an
/// exact measurement, and condition the eavesdropper's residual on
/// acceptance. Requires an enumerable key space and the exact engine.
pub fn uncloneability_scan<R: Rng + ?Sized>(
    attack: &Attack,
    params: &ProtocolParams,
    m_a: &BitString,
    m_b: &BitString,
    rng: &mut R,
) -> Result<AnalysisReport> {
    if params.big_n() > qsim::MAX_EXACT_QUBITS {
        return Err(Error::capability("uncloneability scan needs the exact engine"));
    }
    let total = KeyMaterial::enumeration_size(params)
        .filter(|&t| t <= MAX_ENUMERABLE_KEYS)
        .ok_or_else(|| Error::capability("key space too large to enumerate"))?;
    if m_a.len() != params.n || m_b.len() != params.n {
        return Err(Error::parameter("message length mismatch"));
    }
    // the attack channel is drawn once and reused for every key: the
    // adversary cannot adapt to key material
    let channel = attack_kraus(attack, params.big_n(), rng)?;
    let mut rows = Vec::with_capacity(total as usize);
    for key_index in 0..total {
        let key = KeyMaterial::from_index(params, key_index)?;
        let (p_a, acc_a) = accepted_residual(&channel, m_a, &key, params)?;
        let (p_b, acc_b) = accepted_residual(&channel, m_b, &key, params)?;
        let mut diff = acc_a;
        diff -= &acc_b;
        let distance = trace_norm(&diff) / 2.0;
        rows.push(KeyRow { key_index, p_accept_a: p_a, p_accept_b: p_b, distance });
    }
    let distances: Vec<f64> = rows.iter().map(|r| r.distance).collect();
    let eps = epsilon_empirical(&distances);
    let mean_a = rows.iter().map(|r| r.p_accept_a).sum::<f64>() / rows.len() as f64;
    let mean_b = rows.iter().map(|r| r.p_accept_b).sum::<f64>() / rows.len() as f64;
    let mean_d = distances.iter().sum::<f64>() / distances.len() as f64;
    let max_d = distances.iter().cloned().fold(0.0, f64::max);
    Ok(AnalysisReport {
        attack: attack.name(),
        rows,
        epsilon_empirical: eps,
        mean_accept_a: mean_a,
        mean_accept_b: mean_b,
        mean_distance: mean_d,
        max_distance: max_d,
        config_digest: format!("{:016X}", params.digest()),
        seed: None,
    })
}

/// Returns (acceptance probability, unnormalized accepted residual of
/// the eavesdropper), i.e. P and P * rho in one matrix.
fn accepted_residual(
    channel: &Option<(Vec<CMat>, usize)>,
    message: &BitString,
    key: &KeyMaterial,
    params: &ProtocolParams,
) -> Result<(f64, CMat)> {
    let Some((kraus, eve_qubits)) = channel else {
        // stolen: nothing reaches the receiver, acceptance is zero and
        // the weighted residual vanishes
        return Ok((0.0, CMat::zeros(1, 1)));
    };
    let sigma = transmitted_density(message, key, params)?;
    let joint = sigma.apply_kraus(kraus)?;
    let blocks = joint.prefix_outcome_blocks(params.big_n(), &key.b)?;
    let eve_dim = 1usize << eve_qubits;
    let mut p_accept = 0.0f64;
    let mut residual = CMat::zeros(eve_dim, eve_dim);
    for (z, (p, block)) in blocks.into_iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        let z_bits = BitString::from_word(z as u128, params.big_n());
        let out = classical_decode(&z_bits, key, params)?;
        if out.accepted() {
            p_accept += p;
            residual += block;
        }
    }
    Ok((p_accept, residual))
}
