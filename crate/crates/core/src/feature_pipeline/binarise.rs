use serde::{Deserialize, Serialize};

use super::{check_intervals, PipelineError, QuantisedVector};

/// Interval-index to bit-string encodings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinarisationScheme {
    /// One bit per element; only defined for two intervals.
    Boolean,
    /// Direct binary representation of the interval index.
    Dbr,
    /// Binary reflected Gray code.
    Brgc,
    /// Linearly separable subcode (thermometer code).
    Lssc,
    OneHot,
}

impl BinarisationScheme {
    pub const ALL: [BinarisationScheme; 5] = [
        BinarisationScheme::Boolean,
        BinarisationScheme::Dbr,
        BinarisationScheme::Brgc,
        BinarisationScheme::Lssc,
        BinarisationScheme::OneHot,
    ];

    /// Stable wire code used in vault records.
    pub fn code(self) -> u8 {
        match self {
            BinarisationScheme::Boolean => 0,
            BinarisationScheme::Dbr => 1,
            BinarisationScheme::Brgc => 2,
            BinarisationScheme::Lssc => 3,
            BinarisationScheme::OneHot => 4,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.code() == code)
    }

    pub fn name(self) -> &'static str {
        match self {
            BinarisationScheme::Boolean => "boolean",
            BinarisationScheme::Dbr => "dbr",
            BinarisationScheme::Brgc => "brgc",
            BinarisationScheme::Lssc => "lssc",
            BinarisationScheme::OneHot => "onehot",
        }
    }

    /// Bits per element m for `d` intervals.
    pub fn bits_per_element(self, d: u16) -> Result<usize, PipelineError> {
        check_intervals(d)?;
        Ok(match self {
            BinarisationScheme::Boolean if d != 2 => {
                return Err(PipelineError::BooleanNeedsTwoIntervals(d))
            }
            BinarisationScheme::Boolean => 1,
            BinarisationScheme::Dbr | BinarisationScheme::Brgc => d.trailing_zeros() as usize,
            BinarisationScheme::Lssc => d as usize - 1,
            BinarisationScheme::OneHot => d as usize,
        })
    }

    /// Whether bit `b` (0 = least significant) of the code for `index` is set.
    #[inline]
    pub fn code_bit(self, index: u16, b: usize) -> bool {
        match self {
            BinarisationScheme::Boolean | BinarisationScheme::Dbr => index >> b & 1 == 1,
            BinarisationScheme::Brgc => (index ^ (index >> 1)) >> b & 1 == 1,
            BinarisationScheme::Lssc => b < index as usize,
            BinarisationScheme::OneHot => b == index as usize,
        }
    }

    /// Code word for `index`, most significant bit first.
    pub fn code_string(self, index: u16, d: u16) -> Result<String, PipelineError> {
        let m = self.bits_per_element(d)?;
        Ok((0..m)
            .rev()
            .map(|b| if self.code_bit(index, b) { '1' } else { '0' })
            .collect())
    }
}

impl std::str::FromStr for BinarisationScheme {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase().replace(['-', '_'], "");
        Self::ALL
            .into_iter()
            .find(|b| b.name() == lower)
            .ok_or_else(|| PipelineError::UnknownName(s.to_string()))
    }
}

/// Packed bit vector of length n*m. Element i occupies bits i*m .. i*m+m-1,
/// with bit i*m + b holding bit b of that element's code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryVector {
    words: Vec<u64>,
    len: usize,
    m: usize,
    scheme: Option<BinarisationScheme>,
}

impl BinaryVector {
    /// Untagged vector from explicit bits (position 0 first).
    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len(), 1, None);
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i);
            }
        }
        v
    }

    fn zeros(len: usize, m: usize, scheme: Option<BinarisationScheme>) -> Self {
        BinaryVector {
            words: vec![0; len.div_ceil(64)],
            len,
            m,
            scheme,
        }
    }

    #[inline]
    fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bits_per_element(&self) -> usize {
        self.m
    }

    pub fn scheme(&self) -> Option<BinarisationScheme> {
        self.scheme
    }

    pub fn hamming_weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Positions of set bits in increasing order.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }
}

pub fn binarise(
    q: &QuantisedVector,
    scheme: BinarisationScheme,
) -> Result<BinaryVector, PipelineError> {
    let m = scheme.bits_per_element(q.d)?;
    let mut out = BinaryVector::zeros(q.values.len() * m, m, Some(scheme));
    for (i, &idx) in q.values.iter().enumerate() {
        for b in 0..m {
            if scheme.code_bit(idx, b) {
                out.set(i * m + b);
            }
        }
    }
    Ok(out)
}

/// Number of differing bits.
pub fn hamming_score(a: &BinaryVector, b: &BinaryVector) -> Result<usize, PipelineError> {
    if a.len != b.len || a.m != b.m || a.scheme != b.scheme {
        return Err(PipelineError::BinaryMismatch {
            left: a.len,
            right: b.len,
        });
    }
    Ok(a
        .words
        .iter()
        .zip(&b.words)
        .map(|(x, y)| (x ^ y).count_ones() as usize)
        .sum())
}

/// Sorted set of bit positions, the integer set handed to the vault.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FeatureSet {
    elements: Vec<u32>,
}

impl FeatureSet {
    /// Builds a set from arbitrary elements, sorting and removing duplicates.
    pub fn new(mut elements: Vec<u32>) -> Self {
        elements.sort_unstable();
        elements.dedup();
        FeatureSet { elements }
    }

    pub fn elements(&self) -> &[u32] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn max(&self) -> Option<u32> {
        self.elements.last().copied()
    }

    pub fn contains(&self, x: u32) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    pub fn intersection_size(&self, other: &FeatureSet) -> usize {
        let (mut i, mut j, mut n) = (0, 0, 0);
        while i < self.elements.len() && j < other.elements.len() {
            match self.elements[i].cmp(&other.elements[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    n += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        n
    }
}

pub fn to_feature_set(b: &BinaryVector) -> FeatureSet {
    FeatureSet {
        elements: b.ones().map(|i| i as u32).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn four_interval_codebooks() {
        let table: [(BinarisationScheme, [&str; 4]); 4] = [
            (BinarisationScheme::Dbr, ["00", "01", "10", "11"]),
            (BinarisationScheme::Brgc, ["00", "01", "11", "10"]),
            (BinarisationScheme::Lssc, ["000", "001", "011", "111"]),
            (BinarisationScheme::OneHot, ["0001", "0010", "0100", "1000"]),
        ];
        for (scheme, codes) in table {
            for (j, code) in codes.iter().enumerate() {
                assert_eq!(scheme.code_string(j as u16, 4).unwrap(), *code, "{scheme:?} {j}");
            }
        }
        assert_eq!(BinarisationScheme::Boolean.code_string(0, 2).unwrap(), "0");
        assert_eq!(BinarisationScheme::Boolean.code_string(1, 2).unwrap(), "1");
    }

    #[test]
    fn boolean_requires_two_intervals() {
        let q = QuantisedVector::new(vec![0, 3], 4).unwrap();
        assert_eq!(
            binarise(&q, BinarisationScheme::Boolean),
            Err(PipelineError::BooleanNeedsTwoIntervals(4))
        );
    }

    #[test]
    fn widths() {
        use BinarisationScheme::*;
        assert_eq!(Dbr.bits_per_element(8).unwrap(), 3);
        assert_eq!(Brgc.bits_per_element(16).unwrap(), 4);
        assert_eq!(Lssc.bits_per_element(8).unwrap(), 7);
        assert_eq!(OneHot.bits_per_element(8).unwrap(), 8);
        let q = QuantisedVector::new(vec![1; 512], 4).unwrap();
        assert_eq!(binarise(&q, Lssc).unwrap().len(), 1536);
    }

    #[test]
    fn all_zero_input() {
        let q = QuantisedVector::new(vec![0; 10], 8).unwrap();
        for s in [BinarisationScheme::Dbr, BinarisationScheme::Brgc, BinarisationScheme::Lssc] {
            assert_eq!(binarise(&q, s).unwrap().hamming_weight(), 0);
        }
    }

    #[test]
    fn feature_set_positions() {
        let b = BinaryVector::from_bits(&[false, true, true, false]);
        assert_eq!(to_feature_set(&b).elements(), &[1, 2]);
        // Element order and LSB-first positions.
        let q = QuantisedVector::new(vec![1, 2], 4).unwrap();
        let b = binarise(&q, BinarisationScheme::Lssc).unwrap();
        assert_eq!(to_feature_set(&b).elements(), &[0, 3, 4]);
    }

    #[test]
    fn hamming_errors_and_identity() {
        let q = QuantisedVector::new(vec![1, 2, 3], 4).unwrap();
        let a = binarise(&q, BinarisationScheme::Dbr).unwrap();
        let b = binarise(&q, BinarisationScheme::Lssc).unwrap();
        assert_eq!(hamming_score(&a, &a).unwrap(), 0);
        assert!(hamming_score(&a, &b).is_err());
    }

    #[test]
    fn brgc_adjacency() {
        for d in [4u16, 8, 16] {
            for j in 0..d - 1 {
                let m = BinarisationScheme::Brgc.bits_per_element(d).unwrap();
                let diff = (0..m)
                    .filter(|&b| {
                        BinarisationScheme::Brgc.code_bit(j, b)
                            != BinarisationScheme::Brgc.code_bit(j + 1, b)
                    })
                    .count();
                assert_eq!(diff, 1);
            }
        }
    }

    fn qpair(max_d_log: u32) -> impl Strategy<Value = (u16, Vec<u16>, Vec<u16>)> {
        (1..=max_d_log).prop_flat_map(|l| {
            let d = 1u16 << l;
            (
                Just(d),
                proptest::collection::vec(0..d, 1..40),
                proptest::collection::vec(0..d, 40),
            )
                .prop_map(|(d, a, b)| {
                    let b = b[..a.len()].to_vec();
                    (d, a, b)
                })
        })
    }

    proptest! {
        #[test]
        fn lssc_distance_is_l1((d, a, b) in qpair(5)) {
            let qa = QuantisedVector::new(a.clone(), d).unwrap();
            let qb = QuantisedVector::new(b.clone(), d).unwrap();
            let h = hamming_score(
                &binarise(&qa, BinarisationScheme::Lssc).unwrap(),
                &binarise(&qb, BinarisationScheme::Lssc).unwrap(),
            ).unwrap();
            let l1: usize = a.iter().zip(&b).map(|(x, y)| x.abs_diff(*y) as usize).sum();
            prop_assert_eq!(h, l1);
        }

        #[test]
        fn onehot_distance_is_twice_disagreement((d, a, b) in qpair(5)) {
            let qa = QuantisedVector::new(a.clone(), d).unwrap();
            let qb = QuantisedVector::new(b.clone(), d).unwrap();
            let h = hamming_score(
                &binarise(&qa, BinarisationScheme::OneHot).unwrap(),
                &binarise(&qb, BinarisationScheme::OneHot).unwrap(),
            ).unwrap();
            let diff = a.iter().zip(&b).filter(|(x, y)| x != y).count();
            prop_assert_eq!(h, 2 * diff);
        }

        #[test]
        fn set_size_is_weight_and_hamming_symmetric((d, a, b) in qpair(4), s in 1usize..5) {
            let scheme = BinarisationScheme::ALL[s];
            let ba = binarise(&QuantisedVector::new(a, d).unwrap(), scheme).unwrap();
            let bb = binarise(&QuantisedVector::new(b, d).unwrap(), scheme).unwrap();
            let set = to_feature_set(&ba);
            prop_assert_eq!(set.len(), ba.hamming_weight());
            prop_assert!(set.elements().windows(2).all(|w| w[0] < w[1]));
            prop_assert_eq!(hamming_score(&ba, &bb).unwrap(), hamming_score(&bb, &ba).unwrap());
        }
    }
}
