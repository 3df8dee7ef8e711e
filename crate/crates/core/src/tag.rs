//! Polynomial authentication tag over GF(2^s).
//!
//! An n-bit message (n = r*s) is split into r field registers
//! m_0..m_{r-1}, read as the leading coefficients of a degree-r
//! polynomial f. The appended register m_r forces f(k) = 0 for the
//! secret evaluation point k; the receiver re-evaluates and accepts only
//! on zero. An additive tamper passes exactly when its own polynomial
//! vanishes at k, which caps the pass fraction at r/2^s.
//!
//! Register packing: m_0 occupies positions [0, s) of the (n+s)-bit
//! string, m_r the final s positions; within a register, position
//! `i*s + j` carries the coefficient of z^j (constant term first).

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::field::{self, FieldElem, FieldParams, MAX_EXHAUSTIVE_S};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedMessage {
    registers: Vec<FieldElem>,
    params: FieldParams,
}

impl TaggedMessage {
    pub fn from_registers(registers: Vec<FieldElem>, params: FieldParams) -> Result<Self> {
        if registers.len() < 2 {
            return Err(Error::parameter("tagged message needs at least r+1 = 2 registers"));
        }
        if registers.iter().any(|e| e.params() != params) {
            return Err(Error::parameter("register field parameters differ"));
        }
        Ok(TaggedMessage { registers, params })
    }

    pub fn registers(&self) -> &[FieldElem] {
        &self.registers
    }

    /// Degree of the tag polynomial; the message is r*s bits.
    pub fn r(&self) -> usize {
        self.registers.len() - 1
    }

    pub fn params(&self) -> FieldParams {
        self.params
    }

    /// Packs the r+1 registers into an (n+s)-bit string.
    pub fn to_bits(&self) -> BitString {
        let s = self.params.s() as usize;
        let mut out = BitString::zeros(self.registers.len() * s);
        for (i, reg) in self.registers.iter().enumerate() {
            for j in 0..s {
                if (reg.value() >> j) & 1 == 1 {
                    out.set(i * s + j, true);
                }
            }
        }
        out
    }

    /// Inverse of [`TaggedMessage::to_bits`].
    pub fn from_bits(bits: &BitString, params: FieldParams) -> Result<Self> {
        let s = params.s() as usize;
        if bits.len() % s != 0 || bits.len() / s < 2 {
            return Err(Error::parameter(format!(
                "bit string of length {} does not hold r+1 registers of {s} bits",
                bits.len()
            )));
        }
        let registers = (0..bits.len() / s)
            .map(|i| {
                let mut v = 0u64;
                for j in 0..s {
                    if bits.get(i * s + j) {
                        v |= 1 << j;
                    }
                }
                params.elem(v)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TaggedMessage { registers, params })
    }

    /// The message part: the first r registers as an n-bit string.
    pub fn message_bits(&self) -> BitString {
        let bits = self.to_bits();
        bits.slice(0, self.r() * self.params.s() as usize)
    }
}

/// Splits an n-bit message into field registers and appends the register
/// that forces the tag polynomial to vanish at `k`.
pub fn append_tag(message: &BitString, k: FieldElem) -> Result<TaggedMessage> {
    let params = k.params();
    let s = params.s() as usize;
    if message.len() % s != 0 {
        return Err(Error::parameter(format!(
            "message length {} not divisible by s = {s}",
            message.len()
        )));
    }
    let r = message.len() / s;
    if r == 0 {
        return Err(Error::parameter("empty message"));
    }
    let mut registers = Vec::with_capacity(r + 1);
    for i in 0..r {
        let mut v = 0u64;
        for j in 0..s {
            if message.get(i * s + j) {
                v |= 1 << j;
            }
        }
        registers.push(params.elem(v)?);
    }
    // sum_{i<r} m_i k^{r-i}: evaluate the leading registers with a zero
    // constant term, then use that value as the constant term itself
    let mut with_zero = registers.clone();
    with_zero.push(params.zero());
    let m_r = field::poly_eval(&with_zero, k)?;
    registers.push(m_r);
    Ok(TaggedMessage { registers, params })
}

/// True when the tag polynomial vanishes at `k`. Total: any register
/// list of matching parameters yields a verdict.
pub fn verify_tag(tagged: &TaggedMessage, k: FieldElem) -> Result<bool> {
    if k.params() != tagged.params {
        return Err(Error::parameter("verification key from a different field"));
    }
    Ok(field::poly_eval(&tagged.registers, k)?.is_zero())
}

/// Fraction of keys accepting an additive tamper, as an exact count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ForgeryFraction {
    pub vanishing_keys: u64,
    pub total_keys: u64,
}

impl ForgeryFraction {
    pub fn value(&self) -> f64 {
        self.vanishing_keys as f64 / self.total_keys as f64
    }

    /// Exact comparison of count/total <= r/total.
    pub fn at_most_r_over_field(&self, r: u64) -> bool {
        self.vanishing_keys <= r
    }
}

/// Enumerates every key and counts those where the tamper polynomial
/// `delta` evaluates to zero. The all-zero delta vanishes everywhere;
/// callers must treat it as "no forgery".
pub fn forgery_fraction(delta: &[FieldElem], params: FieldParams) -> Result<ForgeryFraction> {
    if params.s() > MAX_EXHAUSTIVE_S {
        return Err(Error::capability(format!(
            "key enumeration requires s <= {MAX_EXHAUSTIVE_S}, got {}",
            params.s()
        )));
    }
    if delta.is_empty() {
        return Err(Error::parameter("empty tamper polynomial"));
    }
    if delta.iter().any(|e| e.params() != params) {
        return Err(Error::parameter("tamper registers from a different field"));
    }
    let mut vanishing = 0u64;
    for k in params.iter_all()? {
        if field::poly_eval(delta, k)?.is_zero() {
            vanishing += 1;
        }
    }
    Ok(ForgeryFraction {
        vanishing_keys: vanishing,
        total_keys: params.order() as u64,
    })
}
