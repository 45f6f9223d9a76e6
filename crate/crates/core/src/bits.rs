//! Fixed-length binary words over GF(2).
//!
//! Text form is big-endian ASCII `'0'`/`'1'`: the leftmost character is bit
//! index 0. The hex form used in files follows the same order, four bits per
//! nibble, zero-padded on the right when the length is not a multiple of 4.

use std::fmt;
use std::ops::Index;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::EbcError;

/// An ordered sequence of bits with XOR, Hamming distance, and text/hex forms.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitString {
    bits: Vec<u8>,
}

impl BitString {
    pub fn new(bits: Vec<u8>) -> Result<Self, EbcError> {
        if bits.iter().any(|&b| b > 1) {
            return Err(EbcError::InvalidBit);
        }
        Ok(Self { bits })
    }

    pub fn zeros(len: usize) -> Self {
        Self { bits: vec![0; len] }
    }

    /// Bits of `value`, LSB of the integer at the *last* index, so that the
    /// usual binary notation matches the text form.
    pub fn from_u64(value: u64, len: usize) -> Self {
        let bits = (0..len)
            .map(|i| ((value >> (len - 1 - i)) & 1) as u8)
            .collect();
        Self { bits }
    }

    pub fn to_u64(&self) -> u64 {
        assert!(self.len() <= 64);
        self.bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, i: usize) -> u8 {
        self.bits[i]
    }

    pub fn set_bit(&mut self, i: usize, value: u8) {
        assert!(value <= 1);
        self.bits[i] = value;
    }

    pub fn flip_bit(&mut self, i: usize) {
        self.bits[i] ^= 1;
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        self.bits.iter().copied()
    }

    pub fn weight(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    pub fn xor(&self, other: &Self) -> Result<Self, EbcError> {
        if self.len() != other.len() {
            return Err(EbcError::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(Self {
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(a, b)| a ^ b)
                .collect(),
        })
    }

    /// Concatenation of the bits at `positions`, in the given order.
    pub fn select(&self, positions: &[usize]) -> Self {
        Self {
            bits: positions.iter().map(|&i| self.bits[i]).collect(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, EbcError> {
        text.chars()
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                _ => Err(EbcError::InvalidBitChar(c)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(|bits| Self { bits })
    }

    pub fn to_hex(&self) -> String {
        let mut out = String::new();
        for chunk in self.bits.chunks(4) {
            let mut nibble = 0u8;
            for (i, &b) in chunk.iter().enumerate() {
                nibble |= b << (3 - i);
            }
            out.push(char::from_digit(nibble as u32, 16).unwrap());
        }
        out
    }

    pub fn from_hex(hex: &str, len: usize) -> Result<Self, EbcError> {
        let mut bits = Vec::with_capacity(hex.len() * 4);
        for c in hex.chars() {
            let nibble = c.to_digit(16).ok_or(EbcError::InvalidBitChar(c))? as u8;
            for i in 0..4 {
                bits.push((nibble >> (3 - i)) & 1);
            }
        }
        if bits.len() < len || bits.len() >= len + 4 {
            return Err(EbcError::LengthMismatch {
                left: bits.len(),
                right: len,
            });
        }
        if bits[len..].iter().any(|&b| b != 0) {
            return Err(EbcError::InvalidBit);
        }
        bits.truncate(len);
        Ok(Self { bits })
    }
}

impl Index<usize> for BitString {
    type Output = u8;
    fn index(&self, i: usize) -> &u8 {
        &self.bits[i]
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

/// Number of positions where `a` and `b` disagree.
pub fn hamming_distance(a: &BitString, b: &BitString) -> Result<usize, EbcError> {
    if a.len() != b.len() {
        return Err(EbcError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(a.iter().zip(b.iter()).filter(|(x, y)| x != y).count())
}

/// I.i.d. uniform bits; deterministic for a fixed RNG state.
pub fn sample_uniform<R: Rng>(length: usize, rng: &mut R) -> BitString {
    BitString {
        bits: (0..length).map(|_| rng.gen_range(0..=1u8)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::master_rng;
    use proptest::prelude::*;

    #[test]
    fn hamming_identical_and_full_flip() {
        let a = BitString::parse("0000").unwrap();
        let b = BitString::parse("1111").unwrap();
        assert_eq!(hamming_distance(&a, &a).unwrap(), 0);
        assert_eq!(hamming_distance(&b, &a).unwrap(), 4);
    }

    #[test]
    fn hamming_two_flips_within_threshold() {
        // n=16, m=8, t=1, gamma=0: threshold = floor((1/8)*16) = 2
        let y = BitString::parse("1010101010101010").unwrap();
        let mut y_hat = y.clone();
        y_hat.flip_bit(3);
        y_hat.flip_bit(11);
        let h = hamming_distance(&y_hat, &y).unwrap();
        assert_eq!(h, 2);
        assert!(h <= 2);
    }

    #[test]
    fn hamming_length_mismatch() {
        let a = BitString::parse("00").unwrap();
        let b = BitString::parse("000").unwrap();
        assert!(hamming_distance(&a, &b).is_err());
    }

    #[test]
    fn sample_uniform_empty_and_deterministic() {
        let mut rng = master_rng(7, 0);
        assert!(sample_uniform(0, &mut rng).is_empty());
        let a = sample_uniform(8, &mut master_rng(7, 1));
        let b = sample_uniform(8, &mut master_rng(7, 1));
        assert_eq!(a, b);
    }

    #[test]
    fn sample_uniform_frequency() {
        let mut rng = master_rng(42, 0);
        let ones: usize = (0..100_000)
            .map(|_| sample_uniform(1, &mut rng).weight())
            .sum();
        let freq = ones as f64 / 100_000.0;
        assert!((0.49..=0.51).contains(&freq), "freq = {freq}");
    }

    #[test]
    fn hex_roundtrip_odd_length() {
        let a = BitString::parse("1011001").unwrap();
        let hex = a.to_hex();
        assert_eq!(BitString::from_hex(&hex, 7).unwrap(), a);
    }

    proptest! {
        #[test]
        fn xor_is_involution(len in 0usize..64, seed in any::<u64>()) {
            let mut rng = master_rng(seed, 0);
            let a = sample_uniform(len, &mut rng);
            let b = sample_uniform(len, &mut rng);
            prop_assert_eq!(a.xor(&b).unwrap().xor(&b).unwrap(), a);
        }

        #[test]
        fn hamming_is_a_metric(len in 1usize..64, seed in any::<u64>()) {
            let mut rng = master_rng(seed, 1);
            let a = sample_uniform(len, &mut rng);
            let b = sample_uniform(len, &mut rng);
            let c = sample_uniform(len, &mut rng);
            let dab = hamming_distance(&a, &b).unwrap();
            let dba = hamming_distance(&b, &a).unwrap();
            let dac = hamming_distance(&a, &c).unwrap();
            let dcb = hamming_distance(&c, &b).unwrap();
            prop_assert_eq!(dab, dba);
            prop_assert_eq!(hamming_distance(&a, &a).unwrap(), 0);
            prop_assert!((dab == 0) == (a == b));
            prop_assert!(dab <= dac + dcb);
        }
    }
}
