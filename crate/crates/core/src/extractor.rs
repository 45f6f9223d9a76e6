//! Privacy amplification via Toeplitz two-universal hashing, plus the
//! leftover-hash security bound.

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::EbcError;

/// Seed of an ell x k Toeplitz matrix: k + ell - 1 bits, constant along
/// diagonals. Entry (i, j) is bit (i - j + k - 1) of the seed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToeplitzSeed {
    bits: BitString,
    k: usize,
    ell: usize,
}

impl ToeplitzSeed {
    pub fn new(bits: BitString, k: usize, ell: usize) -> Result<Self, EbcError> {
        let expected = k + ell - 1;
        if bits.len() != expected {
            return Err(EbcError::LengthMismatch {
                left: bits.len(),
                right: expected,
            });
        }
        Ok(Self { bits, k, ell })
    }

    pub fn seed_len(k: usize, ell: usize) -> usize {
        k + ell - 1
    }

    pub fn bits(&self) -> &BitString {
        &self.bits
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    fn entry(&self, row: usize, col: usize) -> u8 {
        self.bits.bit(row + self.k - 1 - col)
    }
}

/// c = T(r) . x over GF(2).
pub fn extract(x: &BitString, seed: &ToeplitzSeed) -> Result<BitString, EbcError> {
    if x.len() != seed.k() {
        return Err(EbcError::LengthMismatch {
            left: x.len(),
            right: seed.k(),
        });
    }
    let mut out = BitString::zeros(seed.ell());
    for row in 0..seed.ell() {
        let mut acc = 0u8;
        for col in 0..seed.k() {
            acc ^= seed.entry(row, col) & x.bit(col);
        }
        out.set_bit(row, acc);
    }
    Ok(out)
}

/// Leftover-hash bound in trace-distance flavor:
/// epsilon = 2^{-(min_entropy - ell)/2 - 1}.
///
/// A negative gap yields a value above 1/2, which callers read as "no
/// guarantee".
pub fn leftover_hash_epsilon(min_entropy: f64, ell: usize) -> f64 {
    2f64.powf(-(min_entropy - ell as f64) / 2.0 - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::sample_uniform;
    use crate::rng::master_rng;
    use proptest::prelude::*;

    fn seed_from(text: &str, k: usize, ell: usize) -> ToeplitzSeed {
        ToeplitzSeed::new(BitString::parse(text).unwrap(), k, ell).unwrap()
    }

    #[test]
    fn zero_input_maps_to_zero() {
        let seed = seed_from("1011", 3, 2);
        assert_eq!(extract(&BitString::zeros(3), &seed).unwrap(), BitString::zeros(2));
    }

    #[test]
    fn single_row_inner_product() {
        // k=2, ell=1: seed (1,1) gives the row [1 1]; x = 10 -> 1.
        let seed = seed_from("11", 2, 1);
        let c = extract(&BitString::parse("10").unwrap(), &seed).unwrap();
        assert_eq!(c, BitString::parse("1").unwrap());
    }

    #[test]
    fn wrong_input_length_rejected() {
        let seed = seed_from("11", 2, 1);
        assert!(extract(&BitString::parse("100").unwrap(), &seed).is_err());
    }

    #[test]
    fn leftover_hash_values() {
        assert_eq!(leftover_hash_epsilon(20.0, 0), 2f64.powi(-11));
        assert_eq!(leftover_hash_epsilon(0.0, 0), 0.5);
        // gap = delta' * n: the first term of the correctness epsilon.
        let dpn = 12.0;
        assert_eq!(leftover_hash_epsilon(dpn, 0), 2f64.powf(-dpn / 2.0 - 1.0));
    }

    proptest! {
        #[test]
        fn extract_is_linear(seed_val in any::<u64>()) {
            let mut rng = master_rng(seed_val, 0);
            let k = 8;
            let ell = 3;
            let seed = ToeplitzSeed::new(
                sample_uniform(ToeplitzSeed::seed_len(k, ell), &mut rng), k, ell,
            ).unwrap();
            let x1 = sample_uniform(k, &mut rng);
            let x2 = sample_uniform(k, &mut rng);
            let lhs = extract(&x1.xor(&x2).unwrap(), &seed).unwrap();
            let rhs = extract(&x1, &seed).unwrap()
                .xor(&extract(&x2, &seed).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn two_universality_exhaustive_small() {
        // For fixed x1 != x2, over all seeds: collision fraction <= 2^-ell.
        let k = 6;
        let ell = 3;
        let seed_len = ToeplitzSeed::seed_len(k, ell);
        let mut rng = master_rng(11, 0);
        for _ in 0..20 {
            let x1 = sample_uniform(k, &mut rng);
            let x2 = sample_uniform(k, &mut rng);
            if x1 == x2 {
                continue;
            }
            let mut collisions = 0usize;
            let total = 1u64 << seed_len;
            for s in 0..total {
                let seed =
                    ToeplitzSeed::new(BitString::from_u64(s, seed_len), k, ell).unwrap();
                if extract(&x1, &seed).unwrap() == extract(&x2, &seed).unwrap() {
                    collisions += 1;
                }
            }
            let fraction = collisions as f64 / total as f64;
            assert!(fraction <= 2f64.powi(-(ell as i32)) + 1e-12, "{fraction}");
        }
    }

    #[test]
    fn uniform_input_gives_near_uniform_output() {
        let k = 8;
        let ell = 2;
        let mut rng = master_rng(13, 0);
        let seed = ToeplitzSeed::new(
            sample_uniform(ToeplitzSeed::seed_len(k, ell), &mut rng), k, ell,
        ).unwrap();
        let trials = 40_000usize;
        let mut counts = [0usize; 4];
        for _ in 0..trials {
            let x = sample_uniform(k, &mut rng);
            counts[extract(&x, &seed).unwrap().to_u64() as usize] += 1;
        }
        for &c in &counts {
            let freq = c as f64 / trials as f64;
            assert!((freq - 0.25).abs() < 0.01, "{freq}");
        }
    }
}
