//! Fixed-length bit strings, the classical currency of the protocol.
//!
//! A [`BitString`] holds up to 128 bits. Position 0 is the first bit in
//! transmission order and is stored in the least significant bit of the
//! backing word. Hex serialization walks positions 0, 1, 2, ... grouping
//! four at a time, with position 0 as the most significant bit of the
//! first hex digit; the final nibble is zero-padded on the right. The bit
//! length is always carried alongside so leading zeros survive a round
//! trip.

use crate::error::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt;

pub const MAX_BITS: usize = 128;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitString {
    word: u128,
    len: usize,
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        assert!(len <= MAX_BITS, "bit string length {len} exceeds {MAX_BITS}");
        BitString { word: 0, len }
    }

    /// Builds a string from a word whose bit `i` is position `i`.
    pub fn from_word(word: u128, len: usize) -> Self {
        assert!(len <= MAX_BITS);
        let mask = if len == 128 { u128::MAX } else { (1u128 << len) - 1 };
        BitString { word: word & mask, len }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut word = 0u128;
        for (i, &b) in bits.iter().enumerate() {
            if b {
                word |= 1 << i;
            }
        }
        BitString { word, len: bits.len() }
    }

    /// Parses a string of `0`/`1` characters, position 0 first.
    pub fn parse_binary(text: &str) -> Result<Self> {
        let mut word = 0u128;
        let mut len = 0;
        for ch in text.chars() {
            match ch {
                '0' => {}
                '1' => word |= 1 << len,
                '_' | ' ' => continue,
                _ => return Err(Error::parameter(format!("invalid bit character '{ch}'"))),
            }
            len += 1;
            if len > MAX_BITS {
                return Err(Error::parameter("bit string longer than 128 bits"));
            }
        }
        Ok(BitString { word, len })
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut word = 0u128;
        for i in 0..len {
            if rng.gen::<bool>() {
                word |= 1 << i;
            }
        }
        BitString { word, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_zero(&self) -> bool {
        self.word == 0
    }

    pub fn word(&self) -> u128 {
        self.word
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.word >> i) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len);
        if value {
            self.word |= 1 << i;
        } else {
            self.word &= !(1 << i);
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len);
        self.word ^= 1 << i;
    }

    pub fn weight(&self) -> u32 {
        self.word.count_ones()
    }

    pub fn xor(&self, other: &BitString) -> Result<BitString> {
        if self.len != other.len {
            return Err(Error::parameter(format!(
                "length mismatch in xor: {} vs {}",
                self.len, other.len
            )));
        }
        Ok(BitString { word: self.word ^ other.word, len: self.len })
    }

    /// Concatenates `self` followed by `other`.
    pub fn concat(&self, other: &BitString) -> BitString {
        assert!(self.len + other.len <= MAX_BITS);
        BitString {
            word: self.word | (other.word << self.len),
            len: self.len + other.len,
        }
    }

    /// Extracts positions `[start, start+len)`.
    pub fn slice(&self, start: usize, len: usize) -> BitString {
        assert!(start + len <= self.len);
        BitString::from_word(self.word >> start, len)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Dot product over GF(2).
    pub fn dot(&self, other: &BitString) -> bool {
        debug_assert_eq!(self.len, other.len);
        (self.word & other.word).count_ones() % 2 == 1
    }

    /// Uppercase hex, position 0 as the MSB of the first digit, final
    /// nibble right-padded with zeros.
    pub fn to_hex(&self) -> String {
        let mut out = String::new();
        let mut i = 0;
        while i < self.len {
            let mut nibble = 0u8;
            for j in 0..4 {
                nibble <<= 1;
                if i + j < self.len && self.get(i + j) {
                    nibble |= 1;
                }
            }
            out.push(char::from_digit(nibble as u32, 16).unwrap().to_ascii_uppercase());
            i += 4;
        }
        out
    }

    /// Inverse of [`BitString::to_hex`]; `len` restores trailing padding.
    pub fn from_hex(hex: &str, len: usize) -> Result<Self> {
        if len > MAX_BITS {
            return Err(Error::parameter("bit string longer than 128 bits"));
        }
        let expected_digits = len.div_ceil(4);
        if hex.len() != expected_digits {
            return Err(Error::parameter(format!(
                "hex field has {} digits, expected {} for {} bits",
                hex.len(),
                expected_digits,
                len
            )));
        }
        let mut bs = BitString::zeros(len);
        for (d, ch) in hex.chars().enumerate() {
            let nibble = ch
                .to_digit(16)
                .ok_or_else(|| Error::parameter(format!("invalid hex digit '{ch}'")))?
                as u8;
            for j in 0..4 {
                let pos = d * 4 + j;
                let bit = (nibble >> (3 - j)) & 1 == 1;
                if pos < len {
                    if bit {
                        bs.set(pos, true);
                    }
                } else if bit {
                    return Err(Error::parameter("nonzero padding bits in hex field"));
                }
            }
        }
        Ok(bs)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", if self.get(i) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hex_round_trip_known() {
        let bs = BitString::parse_binary("1101110010").unwrap();
        assert_eq!(bs.to_hex(), "DC8");
        let back = BitString::from_hex("DC8", 10).unwrap();
        assert_eq!(back, bs);
    }

    #[test]
    fn hex_preserves_leading_zeros() {
        let bs = BitString::parse_binary("0001").unwrap();
        assert_eq!(bs.to_hex(), "1");
        assert_eq!(BitString::from_hex("1", 4).unwrap(), bs);
    }

    #[test]
    fn padding_bits_rejected() {
        assert!(BitString::from_hex("DC9", 10).is_err());
    }

    #[test]
    fn xor_length_mismatch() {
        let a = BitString::zeros(4);
        let b = BitString::zeros(5);
        assert!(a.xor(&b).is_err());
    }

    #[test]
    fn concat_and_slice() {
        let a = BitString::parse_binary("101").unwrap();
        let b = BitString::parse_binary("01").unwrap();
        let c = a.concat(&b);
        assert_eq!(c.to_string(), "10101");
        assert_eq!(c.slice(3, 2), b);
        assert_eq!(c.slice(0, 3), a);
    }

    proptest! {
        #[test]
        fn hex_round_trip(word in any::<u128>(), len in 0usize..=128) {
            let bs = BitString::from_word(word, len);
            let hex = bs.to_hex();
            let back = BitString::from_hex(&hex, len).unwrap();
            prop_assert_eq!(back, bs);
        }

        #[test]
        fn xor_self_is_zero(word in any::<u128>(), len in 1usize..=128) {
            let bs = BitString::from_word(word, len);
            prop_assert!(bs.xor(&bs).unwrap().is_zero());
        }
    }
}
