//! Arithmetic in GF(2^s).
//!
//! Elements are coefficient vectors of polynomials over GF(2), packed
//! with the least significant bit as the constant term. Multiplication
//! is a carry-less product reduced modulo a fixed irreducible polynomial
//! of degree `s`. The default modulus for each `s` is the
//! lexicographically smallest irreducible polynomial of that degree
//! (s=2: x^2+x+1, s=3: x^3+x+1, s=8: x^8+x^4+x^3+x+1, ...), so all
//! derived values are reproducible.
//!
//! This is simulator arithmetic: no constant-time guarantees.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Largest field size with exhaustively verified irreducibility.
pub const MAX_EXHAUSTIVE_S: u32 = 16;
/// Largest supported field size.
pub const MAX_S: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldParams {
    s: u32,
    /// Reduction polynomial including the leading x^s term.
    poly: u128,
}

impl FieldParams {
    /// Field of size 2^s with the built-in reduction polynomial.
    pub fn new(s: u32) -> Result<Self> {
        if s == 0 || s > MAX_S {
            return Err(Error::parameter(format!("field size s={s} outside 1..={MAX_S}")));
        }
        Ok(FieldParams { s, poly: default_poly(s) })
    }

    /// Field with a caller-supplied reduction polynomial, which must have
    /// degree exactly `s` and be irreducible. Irreducibility is verified
    /// by exhaustive factor search for s <= 16 and by the standard
    /// x^(2^s) = x criterion above that.
    pub fn with_poly(s: u32, poly: u128) -> Result<Self> {
        if s == 0 || s > MAX_S {
            return Err(Error::parameter(format!("field size s={s} outside 1..={MAX_S}")));
        }
        if poly_degree(poly) != Some(s) {
            return Err(Error::parameter(format!(
                "reduction polynomial {poly:#x} does not have degree {s}"
            )));
        }
        let irreducible = if s <= MAX_EXHAUSTIVE_S {
            is_irreducible_exhaustive(poly)
        } else {
            is_irreducible_rabin(poly)
        };
        if !irreducible {
            return Err(Error::parameter(format!("reduction polynomial {poly:#x} is reducible")));
        }
        Ok(FieldParams { s, poly })
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn poly(&self) -> u128 {
        self.poly
    }

    pub fn order(&self) -> u128 {
        1u128 << self.s
    }

    pub fn elem(&self, value: u64) -> Result<FieldElem> {
        if self.s < 64 && value >= 1u64 << self.s {
            return Err(Error::parameter(format!(
                "value {value} too large for GF(2^{})",
                self.s
            )));
        }
        Ok(FieldElem { value, params: *self })
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem { value: 0, params: *self }
    }

    pub fn one(&self) -> FieldElem {
        FieldElem { value: 1, params: *self }
    }

    /// Iterates every element of the field; only for s <= 16.
    pub fn iter_all(&self) -> Result<impl Iterator<Item = FieldElem> + '_> {
        if self.s > MAX_EXHAUSTIVE_S {
            return Err(Error::capability(format!(
                "cannot enumerate GF(2^{}); s must be <= {MAX_EXHAUSTIVE_S}",
                self.s
            )));
        }
        let params = *self;
        Ok((0..self.order() as u64).map(move |v| FieldElem { value: v, params }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldElem {
    value: u64,
    params: FieldParams,
}

impl FieldElem {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn params(&self) -> FieldParams {
        self.params
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}", self.value)
    }
}

fn check_same(a: &FieldElem, b: &FieldElem) -> Result<()> {
    if a.params != b.params {
        return Err(Error::parameter(
            "field elements belong to different field parameterizations",
        ));
    }
    Ok(())
}

/// Addition: coefficient-wise XOR.
pub fn add(a: FieldElem, b: FieldElem) -> Result<FieldElem> {
    check_same(&a, &b)?;
    Ok(FieldElem { value: a.value ^ b.value, params: a.params })
}

/// Multiplication: carry-less product reduced modulo the field polynomial.
pub fn mul(a: FieldElem, b: FieldElem) -> Result<FieldElem> {
    check_same(&a, &b)?;
    let wide = clmul(a.value as u128, b.value as u128);
    let reduced = poly_mod(wide, a.params.poly);
    Ok(FieldElem { value: reduced as u64, params: a.params })
}

/// Horner evaluation of sum_i coeffs[i] * k^(r-i), leading coefficient first.
pub fn poly_eval(coeffs: &[FieldElem], k: FieldElem) -> Result<FieldElem> {
    let first = coeffs
        .first()
        .ok_or_else(|| Error::parameter("empty coefficient list"))?;
    let mut acc = *first;
    for c in &coeffs[1..] {
        acc = add(mul(acc, k)?, *c)?;
    }
    Ok(acc)
}

/// a^n by square and multiply.
pub fn pow(a: FieldElem, mut n: u128) -> FieldElem {
    let mut base = a;
    let mut acc = a.params.one();
    while n > 0 {
        if n & 1 == 1 {
            acc = mul(acc, base).expect("same params");
        }
        base = mul(base, base).expect("same params");
        n >>= 1;
    }
    acc
}

/// Multiplicative inverse via a^(2^s - 2); panics on zero.
pub fn inverse(a: FieldElem) -> FieldElem {
    assert!(!a.is_zero(), "zero has no inverse");
    pow(a, a.params.order() - 2)
}

// --- polynomial arithmetic over GF(2) on raw words ---

fn clmul(a: u128, b: u128) -> u128 {
    debug_assert!(a < 1 << 64 && b < 1 << 64);
    let mut acc = 0u128;
    let mut a = a;
    let mut shift = 0;
    while a != 0 {
        let tz = a.trailing_zeros();
        shift += tz;
        acc ^= b << shift;
        a >>= tz + 1;
        shift += 1;
    }
    acc
}

fn poly_degree(p: u128) -> Option<u32> {
    if p == 0 {
        None
    } else {
        Some(127 - p.leading_zeros())
    }
}

fn poly_mod(mut a: u128, m: u128) -> u128 {
    let dm = poly_degree(m).expect("nonzero modulus");
    while let Some(da) = poly_degree(a) {
        if da < dm {
            break;
        }
        a ^= m << (da - dm);
    }
    a
}

fn poly_gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let r = poly_mod(a, b);
        a = b;
        b = r;
    }
    a
}

/// Trial division by every polynomial of degree 1..=deg/2.
fn is_irreducible_exhaustive(p: u128) -> bool {
    let deg = match poly_degree(p) {
        Some(d) if d >= 1 => d,
        _ => return false,
    };
    for d in 1..=deg / 2 {
        for low in 0..(1u128 << d) {
            let candidate = (1u128 << d) | low;
            if poly_mod(p, candidate) == 0 {
                return false;
            }
        }
    }
    true
}

/// x^(2^deg) = x mod p, and x^(2^(deg/q)) - x coprime to p for prime q | deg.
fn is_irreducible_rabin(p: u128) -> bool {
    let deg = match poly_degree(p) {
        Some(d) if d >= 1 => d,
        _ => return false,
    };
    // repeated squaring of x modulo p
    let sq = |v: u128| poly_mod(clmul_wide(v, v), p);
    let x_to_2k = |k: u32| {
        let mut v = poly_mod(0b10, p);
        for _ in 0..k {
            v = sq(v);
        }
        v
    };
    if x_to_2k(deg) != poly_mod(0b10, p) {
        return false;
    }
    let mut n = deg;
    let mut primes = Vec::new();
    let mut q = 2;
    while q * q <= n {
        if n % q == 0 {
            primes.push(q);
            while n % q == 0 {
                n /= q;
            }
        }
        q += 1;
    }
    if n > 1 {
        primes.push(n);
    }
    for q in primes {
        let v = x_to_2k(deg / q) ^ 0b10;
        if poly_gcd(p, v) != 1 {
            return false;
        }
    }
    true
}

/// Carry-less multiply for operands up to 127 bits (used only inside the
/// Rabin test where intermediate values stay below the modulus degree).
fn clmul_wide(a: u128, b: u128) -> u128 {
    let mut acc = 0u128;
    for i in 0..128 {
        if (a >> i) & 1 == 1 {
            acc ^= b << i;
        }
    }
    acc
}

/// Lexicographically smallest irreducible polynomial of the given degree.
fn default_poly(s: u32) -> u128 {
    if s == 1 {
        return 0b10; // x itself; reduction is a no-op on single-bit values
    }
    // constant term must be 1, otherwise x divides
    let mut low = 1u128;
    loop {
        let candidate = (1u128 << s) | low;
        let ok = if s <= MAX_EXHAUSTIVE_S {
            is_irreducible_exhaustive(candidate)
        } else {
            is_irreducible_rabin(candidate)
        };
        if ok {
            return candidate;
        }
        low += 2;
        assert!(low < 1 << s, "no irreducible polynomial found for degree {s}");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_polys_match_classics() {
        assert_eq!(default_poly(2), 0b111); // x^2+x+1
        assert_eq!(default_poly(3), 0b1011); // x^3+x+1
        assert_eq!(default_poly(8), 0x11B); // x^8+x^4+x^3+x+1
    }

    #[test]
    fn add_is_xor() {
        let f = FieldParams::new(4).unwrap();
        let a = f.elem(5).unwrap();
        assert_eq!(add(a, a).unwrap(), f.zero());
        assert_eq!(add(a, f.zero()).unwrap(), a);
        let b = f.elem(3).unwrap();
        let c = f.elem(6).unwrap();
        assert_eq!(add(b, c).unwrap().value(), 5);
    }

    #[test]
    fn mismatched_params_rejected() {
        let f2 = FieldParams::new(2).unwrap();
        let f3 = FieldParams::new(3).unwrap();
        assert!(add(f2.one(), f3.one()).is_err());
        assert!(mul(f2.one(), f3.one()).is_err());
    }

    /// Schoolbook multiplication table for GF(4) with x^2+x+1, built by
    /// repeated addition of shifted operands with manual reduction.
    fn gf4_table_oracle() -> [[u64; 4]; 4] {
        let mut t = [[0u64; 4]; 4];
        for a in 0..4u64 {
            for b in 0..4u64 {
                // carry-less product of 2-bit values
                let mut wide = 0u64;
                for i in 0..2 {
                    if (a >> i) & 1 == 1 {
                        wide ^= b << i;
                    }
                }
                // reduce x^2 -> x+1 and x^3 -> x^2+x -> (x+1)+x = 1
                let mut v = wide;
                if (v >> 3) & 1 == 1 {
                    v ^= 0b1000 ^ 0b0110; // x^3 = x^2 + x
                }
                if (v >> 2) & 1 == 1 {
                    v ^= 0b100 ^ 0b011; // x^2 = x + 1
                }
                t[a as usize][b as usize] = v;
            }
        }
        t
    }

    #[test]
    fn gf4_mul_matches_schoolbook_oracle() {
        let f = FieldParams::new(2).unwrap();
        let table = gf4_table_oracle();
        for a in 0..4 {
            for b in 0..4 {
                let got = mul(f.elem(a).unwrap(), f.elem(b).unwrap()).unwrap().value();
                assert_eq!(got, table[a as usize][b as usize], "{a} * {b}");
            }
        }
        // frozen values from the oracle
        assert_eq!(table[3][2], 1);
        assert_eq!(mul(f.elem(2).unwrap(), f.one()).unwrap().value(), 2);
        assert_eq!(mul(f.zero(), f.elem(3).unwrap()).unwrap().value(), 0);
    }

    #[test]
    fn poly_eval_examples() {
        let f = FieldParams::new(2).unwrap();
        // constant polynomial
        let c = f.elem(2).unwrap();
        assert_eq!(poly_eval(&[c], f.elem(3).unwrap()).unwrap(), c);
        // identity polynomial f(z) = z
        let coeffs = [f.one(), f.zero()];
        assert_eq!(poly_eval(&coeffs, f.elem(3).unwrap()).unwrap().value(), 3);
        // 3*2 + 1 = 1 + 1 = 0 in GF(4)
        let coeffs = [f.elem(3).unwrap(), f.one()];
        assert_eq!(poly_eval(&coeffs, f.elem(2).unwrap()).unwrap(), f.zero());
        // empty list is a parameter error
        assert!(poly_eval(&[], f.one()).is_err());
    }

    #[test]
    fn distributivity_exhaustive_small_fields() {
        for s in 1..=4 {
            let f = FieldParams::new(s).unwrap();
            let all: Vec<_> = f.iter_all().unwrap().collect();
            for &a in &all {
                for &b in &all {
                    for &c in &all {
                        let lhs = mul(a, add(b, c).unwrap()).unwrap();
                        let rhs = add(mul(a, b).unwrap(), mul(a, c).unwrap()).unwrap();
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn multiplication_by_nonzero_is_bijective() {
        for s in 1..=4 {
            let f = FieldParams::new(s).unwrap();
            let all: Vec<_> = f.iter_all().unwrap().collect();
            for &a in all.iter().filter(|e| !e.is_zero()) {
                let mut seen = vec![false; 1 << s];
                for &x in &all {
                    let y = mul(a, x).unwrap().value() as usize;
                    assert!(!seen[y], "collision for a={}", a.value());
                    seen[y] = true;
                }
                // inverse really inverts
                assert_eq!(mul(a, inverse(a)).unwrap(), f.one());
            }
        }
    }

    #[test]
    fn distributivity_randomized_larger_fields() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for &s in &[8u32, 16, 24, 48, 64] {
            let f = FieldParams::new(s).unwrap();
            let rand_elem = |rng: &mut rand_chacha::ChaCha8Rng| {
                let m = if s == 64 { u64::MAX } else { (1u64 << s) - 1 };
                f.elem(rng.gen::<u64>() & m).unwrap()
            };
            for _ in 0..200 {
                let a = rand_elem(&mut rng);
                let b = rand_elem(&mut rng);
                let c = rand_elem(&mut rng);
                let lhs = mul(a, add(b, c).unwrap()).unwrap();
                let rhs = add(mul(a, b).unwrap(), mul(a, c).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
                assert_eq!(mul(a, b).unwrap(), mul(b, a).unwrap());
            }
        }
    }

    #[test]
    fn eval_linearity_in_coefficients() {
        let f = FieldParams::new(3).unwrap();
        let all: Vec<_> = f.iter_all().unwrap().collect();
        for &k in &all {
            for a0 in 0..8u64 {
                for b0 in 0..8u64 {
                    let ca = [f.elem(a0).unwrap(), f.elem(a0 ^ 5).unwrap()];
                    let cb = [f.elem(b0).unwrap(), f.elem(b0 ^ 3).unwrap()];
                    let cx: Vec<_> = ca
                        .iter()
                        .zip(&cb)
                        .map(|(x, y)| add(*x, *y).unwrap())
                        .collect();
                    let lhs = poly_eval(&cx, k).unwrap();
                    let rhs = add(poly_eval(&ca, k).unwrap(), poly_eval(&cb, k).unwrap()).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn bad_custom_polys_rejected() {
        // degree mismatch
        assert!(FieldParams::with_poly(3, 0b111).is_err());
        // reducible: x^2 + 1 = (x+1)^2
        assert!(FieldParams::with_poly(2, 0b101).is_err());
        // the classic degree-8 polynomial is accepted
        assert!(FieldParams::with_poly(8, 0x11B).is_ok());
    }

    #[test]
    fn rabin_agrees_with_exhaustive_on_degree_12() {
        let mut count = 0;
        for low in (1..1u128 << 12).step_by(2) {
            let p = (1u128 << 12) | low;
            let a = is_irreducible_exhaustive(p);
            let b = is_irreducible_rabin(p);
            assert_eq!(a, b, "{p:#x}");
            if a {
                count += 1;
            }
        }
        // number of monic irreducible degree-12 polynomials over GF(2)
        assert_eq!(count, 335);
    }
}
