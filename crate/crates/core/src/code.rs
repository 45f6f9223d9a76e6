//! Binary linear [n, k, d] codes: encoding, brute-force minimum distance,
//! bounded-distance decoding, Gilbert-Varshamov feasibility, and random-code
//! search for desk-scale instances.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::binary_entropy;
use crate::bits::{hamming_distance, sample_uniform, BitString};
use crate::error::EbcError;

/// Exhaustive enumeration budget: 2^24 codewords.
pub const MAX_EXHAUSTIVE_K: usize = 24;

/// A binary linear code with a verified minimum distance.
///
/// Construction either verifies `d` by enumerating all nonzero codewords
/// (k <= 24) or accepts a caller-certified distance.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LinearCode {
    n: usize,
    k: usize,
    d: usize,
    generator: Vec<BitString>,
}

impl LinearCode {
    /// Build a code, verifying rank and minimum distance by enumeration.
    pub fn new(generator: Vec<BitString>) -> Result<Self, EbcError> {
        let k = generator.len();
        let n = generator.first().map_or(0, |r| r.len());
        if generator.iter().any(|r| r.len() != n) {
            return Err(EbcError::LengthMismatch { left: n, right: 0 });
        }
        if !full_rank(&generator) {
            return Err(EbcError::SingularGenerator);
        }
        let d = min_distance(&generator)?;
        Ok(Self { n, k, d, generator })
    }

    /// Build a code from a caller-certified distance, skipping enumeration.
    /// Still verifies rank, and re-verifies `d` when k is small enough.
    pub fn with_certified_distance(
        generator: Vec<BitString>,
        d: usize,
    ) -> Result<Self, EbcError> {
        let k = generator.len();
        let n = generator.first().map_or(0, |r| r.len());
        if !full_rank(&generator) {
            return Err(EbcError::SingularGenerator);
        }
        if k <= MAX_EXHAUSTIVE_K {
            let actual = min_distance(&generator)?;
            if actual != d {
                return Err(EbcError::MalformedCodeFile(format!(
                    "declared d = {d} but enumeration gives {actual}"
                )));
            }
        }
        Ok(Self { n, k, d, generator })
    }

    /// The standard [n, 1, n] repetition code.
    pub fn repetition(n: usize) -> Self {
        let row = BitString::new(vec![1; n]).unwrap();
        Self {
            n,
            k: 1,
            d: n,
            generator: vec![row],
        }
    }

    /// The [16, 2, 10] demo code with rows 1^10 0^6 and 0^6 1^10.
    pub fn demo_16_2_10() -> Self {
        let g1 = BitString::parse("1111111111000000").unwrap();
        let g2 = BitString::parse("0000001111111111").unwrap();
        Self::new(vec![g1, g2]).unwrap()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn generator(&self) -> &[BitString] {
        &self.generator
    }

    /// y = x . G over GF(2).
    pub fn encode(&self, x: &BitString) -> Result<BitString, EbcError> {
        if x.len() != self.k {
            return Err(EbcError::LengthMismatch {
                left: x.len(),
                right: self.k,
            });
        }
        let mut y = BitString::zeros(self.n);
        for (i, row) in self.generator.iter().enumerate() {
            if x.bit(i) == 1 {
                y = y.xor(row)?;
            }
        }
        Ok(y)
    }

    /// All 2^k (message, codeword) pairs. Only valid for k <= 24.
    pub fn codewords(&self) -> impl Iterator<Item = (BitString, BitString)> + '_ {
        (0u64..1 << self.k).map(|v| {
            let x = BitString::from_u64(v, self.k);
            let y = self.encode(&x).unwrap();
            (x, y)
        })
    }

    /// Unique codeword within `radius` of `word`, if any, as (message,
    /// distance). `radius <= (d-1)/2` guarantees uniqueness.
    pub fn nearest_codeword(
        &self,
        word: &BitString,
        radius: usize,
    ) -> Result<Option<(BitString, usize)>, EbcError> {
        if word.len() != self.n {
            return Err(EbcError::LengthMismatch {
                left: word.len(),
                right: self.n,
            });
        }
        let unique_radius = (self.d - 1) / 2;
        if radius > unique_radius {
            return Err(EbcError::RadiusTooLarge {
                radius,
                unique_radius,
            });
        }
        if self.k > MAX_EXHAUSTIVE_K {
            return Err(EbcError::DimensionTooLarge {
                dim: self.k,
                max: MAX_EXHAUSTIVE_K,
            });
        }
        let mut best: Option<(BitString, usize)> = None;
        for (x, y) in self.codewords() {
            let dist = hamming_distance(&y, word)?;
            if dist <= radius && best.as_ref().map_or(true, |(_, b)| dist < *b) {
                best = Some((x, dist));
            }
        }
        Ok(best)
    }

    /// Codeword closest to `word` with no radius bound; ties broken by the
    /// lowest message value. Used by the simulator-defined committed value.
    pub fn closest_codeword_unbounded(
        &self,
        word: &BitString,
    ) -> Result<(BitString, usize), EbcError> {
        if self.k > MAX_EXHAUSTIVE_K {
            return Err(EbcError::DimensionTooLarge {
                dim: self.k,
                max: MAX_EXHAUSTIVE_K,
            });
        }
        let mut best: Option<(BitString, usize)> = None;
        for (x, y) in self.codewords() {
            let dist = hamming_distance(&y, word)?;
            if best.as_ref().map_or(true, |(_, b)| dist < *b) {
                best = Some((x, dist));
            }
        }
        Ok(best.unwrap())
    }
}

fn full_rank(rows: &[BitString]) -> bool {
    // Gaussian elimination over GF(2).
    let mut mat: Vec<BitString> = rows.to_vec();
    let n = mat.first().map_or(0, |r| r.len());
    let mut pivot_col = 0;
    let mut rank = 0;
    while rank < mat.len() && pivot_col < n {
        if let Some(pivot) = (rank..mat.len()).find(|&r| mat[r].bit(pivot_col) == 1) {
            mat.swap(rank, pivot);
            let pivot_row = mat[rank].clone();
            for (r, row) in mat.iter_mut().enumerate() {
                if r != rank && row.bit(pivot_col) == 1 {
                    *row = row.xor(&pivot_row).unwrap();
                }
            }
            rank += 1;
        }
        pivot_col += 1;
    }
    rank == rows.len()
}

/// Exact minimum weight over all 2^k - 1 nonzero codewords, via Gray-code
/// enumeration. Errors for k > 24.
pub fn min_distance(generator: &[BitString]) -> Result<usize, EbcError> {
    let k = generator.len();
    if k == 0 || k > MAX_EXHAUSTIVE_K {
        return Err(EbcError::DimensionTooLarge {
            dim: k,
            max: MAX_EXHAUSTIVE_K,
        });
    }
    let n = generator[0].len();
    let mut current = BitString::zeros(n);
    let mut best = usize::MAX;
    for v in 1u64..1 << k {
        // Gray code: exactly one generator row toggles per step.
        let toggled = (v.trailing_zeros()) as usize;
        current = current.xor(&generator[toggled])?;
        best = best.min(current.weight());
    }
    Ok(best)
}

/// GV feasibility of rate r = t/m + gamma: r < 1 - H2(4r).
/// For r >= 1/4 the entropy argument clamps to 1 and the inequality cannot
/// hold, so the answer is false.
pub fn gv_feasible(rate: f64) -> bool {
    if rate < 0.0 {
        return false;
    }
    if rate >= 0.25 {
        return false;
    }
    rate < 1.0 - binary_entropy(4.0 * rate).unwrap()
}

/// Griesmer bound check: an [n, k, d] code requires
/// sum_{i<k} ceil(d / 2^i) <= n.
pub fn griesmer_feasible(n: usize, k: usize, d: usize) -> bool {
    let mut sum = 0usize;
    for i in 0..k {
        let pow = 1usize << i.min(63);
        sum += d.div_ceil(pow);
        if sum > n {
            return false;
        }
    }
    true
}

/// Draw random full-rank generators until one verifies at distance
/// >= `d_target`, or the attempt budget runs out. Griesmer is applied as a
/// fast infeasibility pre-check.
pub fn search_random_code<R: Rng>(
    n: usize,
    k: usize,
    d_target: usize,
    rng: &mut R,
    max_attempts: usize,
) -> Result<Option<LinearCode>, EbcError> {
    if k > MAX_EXHAUSTIVE_K {
        return Err(EbcError::DimensionTooLarge {
            dim: k,
            max: MAX_EXHAUSTIVE_K,
        });
    }
    if max_attempts == 0 {
        return Err(EbcError::ParameterOutOfRange(
            "max_attempts must be >= 1".to_string(),
        ));
    }
    if !griesmer_feasible(n, k, d_target) {
        return Ok(None);
    }
    for _ in 0..max_attempts {
        let rows: Vec<BitString> = (0..k).map(|_| sample_uniform(n, rng)).collect();
        if !full_rank(&rows) {
            continue;
        }
        let d = min_distance(&rows)?;
        if d >= d_target {
            return Ok(Some(LinearCode {
                n,
                k,
                d,
                generator: rows,
            }));
        }
    }
    Ok(None)
}

/// Text code file: header line "n k d", then k rows of n ASCII bits.
pub fn format_code(code: &LinearCode) -> String {
    let mut out = format!("{} {} {}\n", code.n(), code.k(), code.d());
    for row in code.generator() {
        out.push_str(&row.to_string());
        out.push('\n');
    }
    out
}

/// Parse a code file, re-verifying d when k <= 24.
pub fn parse_code(text: &str) -> Result<LinearCode, EbcError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| EbcError::MalformedCodeFile("empty file".to_string()))?;
    let fields: Vec<usize> = header
        .split_whitespace()
        .map(|f| {
            f.parse()
                .map_err(|_| EbcError::MalformedCodeFile(format!("bad header field '{f}'")))
        })
        .collect::<Result<_, _>>()?;
    let [n, k, d] = fields[..] else {
        return Err(EbcError::MalformedCodeFile(
            "header must be 'n k d'".to_string(),
        ));
    };
    let rows: Vec<BitString> = lines
        .map(BitString::parse)
        .collect::<Result<_, _>>()?;
    if rows.len() != k || rows.iter().any(|r| r.len() != n) {
        return Err(EbcError::MalformedCodeFile(format!(
            "expected {k} rows of {n} bits"
        )));
    }
    LinearCode::with_certified_distance(rows, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::master_rng;
    use proptest::prelude::*;

    #[test]
    fn repetition_encode() {
        let code = LinearCode::repetition(3);
        let y = code.encode(&BitString::parse("1").unwrap()).unwrap();
        assert_eq!(y, BitString::parse("111").unwrap());
    }

    #[test]
    fn zero_message_encodes_to_zero() {
        let code = LinearCode::demo_16_2_10();
        let y = code.encode(&BitString::zeros(2)).unwrap();
        assert_eq!(y, BitString::zeros(16));
    }

    #[test]
    fn demo_code_encode_and_distance() {
        let code = LinearCode::demo_16_2_10();
        // x = 10 selects the first row; nonzero weights are 10, 10, 12.
        let y = code.encode(&BitString::parse("10").unwrap()).unwrap();
        assert_eq!(y, code.generator()[0]);
        assert_eq!(code.d(), 10);
    }

    #[test]
    fn repetition_16_distance() {
        assert_eq!(min_distance(LinearCode::repetition(16).generator()).unwrap(), 16);
    }

    #[test]
    fn hamming_7_4_distance() {
        // Standard generator of the [7,4,3] Hamming code.
        let rows = ["1000110", "0100101", "0010011", "0001111"]
            .map(|r| BitString::parse(r).unwrap());
        assert_eq!(min_distance(&rows).unwrap(), 3);
    }

    #[test]
    fn min_distance_rejects_large_k() {
        let rows: Vec<BitString> = (0..25)
            .map(|i| {
                let mut r = BitString::zeros(30);
                r.set_bit(i, 1);
                r
            })
            .collect();
        assert!(matches!(
            min_distance(&rows),
            Err(EbcError::DimensionTooLarge { .. })
        ));
    }

    #[test]
    fn nearest_codeword_roundtrip() {
        let code = LinearCode::demo_16_2_10();
        let x = BitString::parse("11").unwrap();
        let y = code.encode(&x).unwrap();
        let (found, dist) = code.nearest_codeword(&y, 0).unwrap().unwrap();
        assert_eq!((found, dist), (x, 0));
    }

    #[test]
    fn nearest_codeword_two_errors() {
        let code = LinearCode::demo_16_2_10();
        let x = BitString::parse("01").unwrap();
        let mut word = code.encode(&x).unwrap();
        word.flip_bit(0);
        word.flip_bit(9);
        let (found, dist) = code.nearest_codeword(&word, 2).unwrap().unwrap();
        assert_eq!((found, dist), (x, 2));
    }

    #[test]
    fn nearest_codeword_outside_radius() {
        let code = LinearCode::demo_16_2_10();
        // Distance >= 3 from every codeword: weight-3 word inside row 2's span.
        let word = BitString::parse("0000001110000000").unwrap();
        for (_, y) in code.codewords() {
            assert!(hamming_distance(&word, &y).unwrap() >= 3);
        }
        assert!(code.nearest_codeword(&word, 2).unwrap().is_none());
    }

    #[test]
    fn nearest_codeword_radius_guard() {
        let code = LinearCode::demo_16_2_10();
        let word = BitString::zeros(16);
        assert!(matches!(
            code.nearest_codeword(&word, 5),
            Err(EbcError::RadiusTooLarge { .. })
        ));
    }

    #[test]
    fn gv_feasibility_regimes() {
        assert!(gv_feasible(0.05));
        assert!(gv_feasible(0.083));
        assert!(!gv_feasible(0.1));
        assert!(!gv_feasible(0.3));
    }

    #[test]
    fn search_finds_repetition() {
        let mut rng = master_rng(5, 0);
        let code = search_random_code(4, 1, 4, &mut rng, 200).unwrap();
        assert_eq!(code.unwrap().d(), 4);
    }

    #[test]
    fn search_finds_hamming_parameters() {
        let mut rng = master_rng(6, 0);
        let code = search_random_code(7, 4, 3, &mut rng, 5000).unwrap();
        assert!(code.unwrap().d() >= 3);
    }

    #[test]
    fn search_griesmer_precheck() {
        // [16, 3, 9]: Griesmer needs 9 + 5 + 3 = 17 > 16.
        let mut rng = master_rng(7, 0);
        assert!(search_random_code(16, 3, 9, &mut rng, 10).unwrap().is_none());
    }

    #[test]
    fn code_file_roundtrip() {
        let code = LinearCode::demo_16_2_10();
        let text = format_code(&code);
        let parsed = parse_code(&text).unwrap();
        assert_eq!(parsed.d(), 10);
        assert_eq!(parsed.generator(), code.generator());
    }

    #[test]
    fn code_file_rejects_wrong_distance() {
        let code = LinearCode::demo_16_2_10();
        let text = format_code(&code).replacen("16 2 10", "16 2 11", 1);
        assert!(parse_code(&text).is_err());
    }

    proptest! {
        #[test]
        fn encode_is_linear(a in 0u64..4, b in 0u64..4) {
            let code = LinearCode::demo_16_2_10();
            let x1 = BitString::from_u64(a, 2);
            let x2 = BitString::from_u64(b, 2);
            let lhs = code.encode(&x1.xor(&x2).unwrap()).unwrap();
            let rhs = code.encode(&x1).unwrap().xor(&code.encode(&x2).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn unique_decoding_within_radius(x_val in 0u64..4, seed in any::<u64>()) {
            let code = LinearCode::demo_16_2_10();
            let radius = (code.d() - 1) / 2;
            let x = BitString::from_u64(x_val, 2);
            let mut word = code.encode(&x).unwrap();
            let mut rng = master_rng(seed, 2);
            let weight = rand::Rng::gen_range(&mut rng, 0..=radius);
            let mut flipped = std::collections::HashSet::new();
            while flipped.len() < weight {
                flipped.insert(rand::Rng::gen_range(&mut rng, 0..16));
            }
            for &i in &flipped {
                word.flip_bit(i);
            }
            let (found, dist) = code.nearest_codeword(&word, radius).unwrap().unwrap();
            prop_assert_eq!(found, x);
            prop_assert_eq!(dist, weight);
        }
    }

    #[test]
    fn min_distance_matches_pairwise() {
        let code = LinearCode::demo_16_2_10();
        let words: Vec<_> = code.codewords().map(|(_, y)| y).collect();
        let mut pairwise = usize::MAX;
        for i in 0..words.len() {
            for j in 0..words.len() {
                if i != j {
                    pairwise = pairwise.min(hamming_distance(&words[i], &words[j]).unwrap());
                }
            }
        }
        assert_eq!(pairwise, code.d());
    }
}
