//! Packed bit strings and the bit-level primitives used by every other
//! module: Hamming weight, zero trimming, and the sliding-window balance test.
//!
//! Positions are 0-based for [`BitString::get`] and slicing, and 1-based
//! inclusive for [`BitString::substring`], which mirrors the usual `x_i^j`
//! notation for substrings.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{param, Error, Result};

const WORD: usize = 64;

/// An ordered sequence of bits packed into 64-bit words.
///
/// Bits past `len` in the last word are always zero, so derived equality and
/// hashing on the word vector are sound.
#[derive(Clone, Default)]
pub struct BitString {
    words: Vec<u64>,
    len: usize,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self {
            words: Vec::with_capacity(bits.div_ceil(WORD)),
            len: 0,
        }
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(WORD)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        Self::repeated(true, len)
    }

    /// `bit` repeated `len` times.
    pub fn repeated(bit: bool, len: usize) -> Self {
        let mut s = Self::zeros(len);
        if bit {
            for w in s.words.iter_mut() {
                *w = u64::MAX;
            }
            s.clear_tail();
        }
        s
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut s = Self::new();
        for b in bits {
            s.push(b);
        }
        s
    }

    /// The `len`-bit big-endian binary representation of `value`.
    pub fn from_index(value: u64, len: usize) -> Self {
        assert!(len <= 64, "index strings are limited to 64 bits");
        Self::from_bits((0..len).rev().map(|k| (value >> k) & 1 == 1))
    }

    /// Inverse of [`BitString::from_index`].
    pub fn to_index(&self) -> u64 {
        assert!(self.len <= 64, "index strings are limited to 64 bits");
        self.iter().fold(0u64, |acc, b| (acc << 1) | b as u64)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Bit at 0-based position `i`.
    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD);
        if bit {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(WORD) {
            self.words.push(0);
        }
        if bit {
            self.words[self.len / WORD] |= 1u64 << (self.len % WORD);
        }
        self.len += 1;
    }

    pub fn push_repeated(&mut self, bit: bool, count: usize) {
        for _ in 0..count {
            self.push(bit);
        }
    }

    pub fn extend_from(&mut self, other: &BitString) {
        for b in other.iter() {
            self.push(b);
        }
    }

    /// Shortens the string to `len` bits (no-op if already shorter).
    pub fn truncate(&mut self, len: usize) {
        if len >= self.len {
            return;
        }
        self.len = len;
        self.words.truncate(len.div_ceil(WORD));
        self.clear_tail();
    }

    pub fn concat(parts: &[&BitString]) -> Self {
        let mut out = Self::with_capacity(parts.iter().map(|p| p.len).sum());
        for p in parts {
            out.extend_from(p);
        }
        out
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = bool> + ExactSizeIterator + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Copy of the 0-based half-open range.
    pub fn slice(&self, range: Range<usize>) -> BitString {
        assert!(range.start <= range.end && range.end <= self.len, "slice {range:?} out of bounds");
        Self::from_bits(range.map(|i| self.get(i)))
    }

    /// The 1-indexed inclusive substring `x_i^j`, defined iff
    /// `1 <= i <= j <= len`.
    pub fn substring(&self, i: usize, j: usize) -> Option<BitString> {
        if i == 0 || i > j || j > self.len {
            return None;
        }
        Some(self.slice(i - 1..j))
    }

    /// Number of ones.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of ones in a 0-based half-open range.
    pub fn weight_in(&self, range: Range<usize>) -> usize {
        range.filter(|&i| self.get(i)).count()
    }

    /// Length of the longest run of zeros bounded by ones on both sides.
    pub fn max_internal_zero_run(&self) -> usize {
        let (Some(first), Some(last)) = (self.first_one(), self.last_one()) else {
            return 0;
        };
        let mut best = 0;
        let mut run = 0;
        for i in first..=last {
            if self.get(i) {
                run = 0;
            } else {
                run += 1;
                best = best.max(run);
            }
        }
        best
    }

    pub fn first_one(&self) -> Option<usize> {
        (0..self.len).find(|&i| self.get(i))
    }

    pub fn last_one(&self) -> Option<usize> {
        (0..self.len).rev().find(|&i| self.get(i))
    }

    /// Prefix sums of the bits: `out[i]` is the weight of the first `i` bits.
    pub fn prefix_weights(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len + 1);
        out.push(0);
        let mut acc = 0;
        for b in self.iter() {
            acc += b as usize;
            out.push(acc);
        }
        out
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl PartialEq for BitString {
    fn eq(&self, other: &Self) -> bool {
        self.len == other.len && self.words == other.words
    }
}

impl Eq for BitString {}

impl Hash for BitString {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.len.hash(state);
        self.words.hash(state);
    }
}

/// Shorter strings first, then lexicographic with `0 < 1`.
impl Ord for BitString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len
            .cmp(&other.len)
            .then_with(|| self.iter().cmp(other.iter()))
    }
}

impl PartialOrd for BitString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.iter().map(|b| if b { '1' } else { '0' }).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString(\"{self}\")")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut out = BitString::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => out.push(false),
                '1' => out.push(true),
                _ => return Err(Error::BitParse(s.to_string())),
            }
        }
        Ok(out)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Hamming weight of `x`.
pub fn weight(x: &BitString) -> usize {
    x.weight()
}

/// `x` split as `0^left_cut ∥ trimmed ∥ 0^right_cut`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrimResult {
    pub trimmed: BitString,
    pub left_cut: usize,
    pub right_cut: usize,
}

/// Removes the longest all-zero prefix and suffix. An all-zero input is
/// reported as `left_cut = len, right_cut = 0`.
pub fn trim(x: &BitString) -> TrimResult {
    match (x.first_one(), x.last_one()) {
        (Some(first), Some(last)) => TrimResult {
            trimmed: x.slice(first..last + 1),
            left_cut: first,
            right_cut: x.len() - 1 - last,
        },
        _ => TrimResult {
            trimmed: BitString::new(),
            left_cut: x.len(),
            right_cut: 0,
        },
    }
}

/// Window length used by [`check_balance`]: `floor(zeta * len)`.
pub fn balance_window(len: usize, zeta: f64) -> usize {
    (zeta * len as f64 + 1e-9).floor() as usize
}

/// True iff every full window of length `floor(zeta * len)` has weight in
/// `[gamma * L, (1 - gamma) * L]`.
pub fn check_balance(x: &BitString, zeta: f64, gamma: f64) -> Result<bool> {
    if !(zeta > 0.0 && zeta <= 1.0) {
        return param(format!("zeta must lie in (0, 1], got {zeta}"));
    }
    if !(0.0..0.5).contains(&gamma) {
        return param(format!("gamma must lie in [0, 1/2), got {gamma}"));
    }
    let window = balance_window(x.len(), zeta);
    if window == 0 {
        return param(format!("balance window floor({zeta} * {}) is empty", x.len()));
    }
    Ok(windows_balanced(x, window, gamma))
}

/// Sliding-window balance test with an explicit window length.
pub fn windows_balanced(x: &BitString, window: usize, gamma: f64) -> bool {
    if window == 0 || window > x.len() {
        return true;
    }
    let lo = gamma * window as f64 - 1e-9;
    let hi = (1.0 - gamma) * window as f64 + 1e-9;
    let prefix = x.prefix_weights();
    (0..=x.len() - window).all(|start| {
        let w = (prefix[start + window] - prefix[start]) as f64;
        lo <= w && w <= hi
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn naive_balance(x: &BitString, window: usize, gamma: f64) -> bool {
        if window > x.len() {
            return true;
        }
        (0..=x.len() - window).all(|start| {
            let w = x.weight_in(start..start + window) as f64;
            w >= gamma * window as f64 - 1e-9 && w <= (1.0 - gamma) * window as f64 + 1e-9
        })
    }

    #[test]
    fn weight_examples() {
        assert_eq!(weight(&b("")), 0);
        assert_eq!(weight(&b("0011010")), 3);
        assert_eq!(weight(&BitString::ones(8)), 8);
        assert_eq!(weight(&BitString::ones(200)), 200);
    }

    #[test]
    fn trim_examples() {
        let r = trim(&b("0010110"));
        assert_eq!((r.trimmed, r.left_cut, r.right_cut), (b("1011"), 2, 1));
        let r = trim(&b("0000"));
        assert_eq!((r.trimmed, r.left_cut, r.right_cut), (b(""), 4, 0));
        let r = trim(&b("101"));
        assert_eq!((r.trimmed, r.left_cut, r.right_cut), (b("101"), 0, 0));
    }

    #[test]
    fn balance_examples() {
        assert!(check_balance(&b("10101010"), 0.5, 0.25).unwrap());
        assert!(!check_balance(&b("11110000"), 0.5, 0.25).unwrap());
        let x = b("1100110011001100");
        assert_eq!(balance_window(x.len(), 0.25), 4);
        assert!(naive_balance(&x, 4, 0.4));
        assert!(check_balance(&x, 0.25, 0.4).unwrap());
    }

    #[test]
    fn balance_parameter_errors() {
        assert!(check_balance(&b("101"), 0.1, 0.25).is_err());
        assert!(check_balance(&b("1010"), 0.5, 0.6).is_err());
    }

    #[test]
    fn substring_is_one_indexed_inclusive() {
        let x = b("0110100");
        assert_eq!(x.substring(2, 4), Some(b("110")));
        assert_eq!(x.substring(1, 7), Some(x.clone()));
        assert_eq!(x.substring(0, 2), None);
        assert_eq!(x.substring(3, 2), None);
        assert_eq!(x.substring(5, 8), None);
    }

    #[test]
    fn index_round_trip_and_ordering() {
        assert_eq!(BitString::from_index(5, 4), b("0101"));
        assert_eq!(b("0101").to_index(), 5);
        assert!(b("1") < b("00"));
        assert!(b("01") < b("10"));
    }

    #[test]
    fn packing_crosses_word_boundaries() {
        let mut x = BitString::new();
        for i in 0..150 {
            x.push(i % 3 == 0);
        }
        assert_eq!(x.weight(), 50);
        let s = x.to_string();
        assert_eq!(s.parse::<BitString>().unwrap(), x);
        let mut y = x.clone();
        y.truncate(70);
        assert_eq!(y, x.slice(0..70));
        assert_eq!(y.weight(), x.weight_in(0..70));
    }

    #[test]
    fn internal_zero_runs() {
        assert_eq!(b("0001001").max_internal_zero_run(), 2);
        assert_eq!(b("10000").max_internal_zero_run(), 0);
        assert_eq!(b("1100011").max_internal_zero_run(), 3);
        assert_eq!(b("").max_internal_zero_run(), 0);
    }

    fn bit_string(max_len: usize) -> impl Strategy<Value = BitString> {
        proptest::collection::vec(any::<bool>(), 0..max_len).prop_map(BitString::from_bits)
    }

    proptest! {
        #[test]
        fn trim_reconstructs_and_is_idempotent(x in bit_string(200)) {
            let r = trim(&x);
            let rebuilt = BitString::concat(&[
                &BitString::zeros(r.left_cut),
                &r.trimmed,
                &BitString::zeros(r.right_cut),
            ]);
            prop_assert_eq!(&rebuilt, &x);
            prop_assert_eq!(trim(&r.trimmed).trimmed, r.trimmed.clone());
            if !r.trimmed.is_empty() {
                prop_assert!(r.trimmed.get(0) && r.trimmed.get(r.trimmed.len() - 1));
            }
        }

        #[test]
        fn sliding_balance_matches_naive(x in bit_string(512), zeta in 0.05f64..1.0, gamma in 0.0f64..0.5) {
            let window = balance_window(x.len(), zeta);
            prop_assume!(window >= 1);
            prop_assert_eq!(check_balance(&x, zeta, gamma).unwrap(), naive_balance(&x, window, gamma));
        }

        #[test]
        fn balance_is_monotone_in_gamma(x in bit_string(128), zeta in 0.1f64..1.0, g in 0.0f64..0.5, frac in 0.0f64..1.0) {
            prop_assume!(balance_window(x.len(), zeta) >= 1);
            if check_balance(&x, zeta, g).unwrap() {
                prop_assert!(check_balance(&x, zeta, g * frac).unwrap());
            }
        }
    }
}
