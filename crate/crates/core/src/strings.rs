//! Shortlex string arithmetic over the binary alphabet.
//!
//! Strings are ordered length-first, then as binary numerals:
//! `ε, 0, 1, 00, 01, 10, 11, 000, …`. The `n`-th string (0-based) is the
//! binary expansion of `n + 1` with its leading `1` removed, which gives
//! [`lex_rank`] and [`lex_unrank`] without any table.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Arbitrary-precision natural number used for shortlex indices.
pub type Natural = BigUint;

/// The literal used for the empty string in text and JSON.
pub const EPS_TOKEN: &str = "eps";

/// A finite binary string. `Ord` is shortlex.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LexString {
    bits: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid binary string {input:?}: unexpected character {found:?}")]
pub struct ParseLexStringError {
    pub input: String,
    pub found: char,
}

impl LexString {
    pub fn empty() -> Self {
        Self { bits: Vec::new() }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn last_bit(&self) -> Option<bool> {
        self.bits.last().copied()
    }

    /// `self · b`
    pub fn push(&self, b: bool) -> Self {
        let mut bits = self.bits.clone();
        bits.push(b);
        Self { bits }
    }

    /// Drops the final bit; `ε` stays `ε`.
    pub fn pop(&self) -> Self {
        let mut bits = self.bits.clone();
        bits.pop();
        Self { bits }
    }

    /// The shortlex index, if it fits in a `u64`.
    pub fn index_u64(&self) -> Option<u64> {
        if self.bits.len() >= 63 {
            return lex_rank(self).to_u64();
        }
        let mut v: u64 = 1;
        for &b in &self.bits {
            v = (v << 1) | b as u64;
        }
        Some(v - 1)
    }

    /// The `n`-th string of Σ* for a machine-sized index.
    pub fn from_index(n: u64) -> Self {
        let m = n as u128 + 1;
        let width = 127 - m.leading_zeros() as usize;
        let bits = (0..width).rev().map(|i| (m >> i) & 1 == 1).collect();
        Self { bits }
    }
}

impl Ord for LexString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bits
            .len()
            .cmp(&other.bits.len())
            .then_with(|| self.bits.cmp(&other.bits))
    }
}

impl PartialOrd for LexString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for LexString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bits.is_empty() {
            return f.write_str(EPS_TOKEN);
        }
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for LexString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for LexString {
    type Err = ParseLexStringError;

    /// Accepts `eps`, `ε`, the empty string, or any word over `{0,1}`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == EPS_TOKEN || s == "ε" {
            return Ok(Self::empty());
        }
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(ParseLexStringError {
                    input: s.to_string(),
                    found: other,
                }),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Self::from_bits)
    }
}

impl Serialize for LexString {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LexString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Test helper and CLI shorthand: parses a literal that is known to be valid.
///
/// Panics on characters outside `{0,1}`.
pub fn s(text: &str) -> LexString {
    text.parse().expect("binary string literal")
}

/// 0-based shortlex index of `s`.
pub fn lex_rank(s: &LexString) -> Natural {
    let mut n = Natural::one();
    for &b in s.bits() {
        n <<= 1u32;
        if b {
            n += 1u32;
        }
    }
    n - 1u32
}

/// The `n`-th string of Σ* (0-based), inverse of [`lex_rank`].
pub fn lex_unrank(n: &Natural) -> LexString {
    let m = n + 1u32;
    let width = m.bits() as usize - 1;
    let bits = (0..width).rev().map(|i| m.bit(i as u64)).collect();
    LexString::from_bits(bits)
}

/// The next string in shortlex order; `successor(11) = 000`.
pub fn successor(s: &LexString) -> LexString {
    let mut bits = s.bits().to_vec();
    for i in (0..bits.len()).rev() {
        if bits[i] {
            bits[i] = false;
        } else {
            bits[i] = true;
            return LexString::from_bits(bits);
        }
    }
    // all ones (or ε): roll over to the next length
    LexString::from_bits(vec![false; bits.len() + 1])
}

/// The previous string in shortlex order, `None` for `ε`.
pub fn predecessor(s: &LexString) -> Option<LexString> {
    if s.is_empty() {
        return None;
    }
    let mut bits = s.bits().to_vec();
    for i in (0..bits.len()).rev() {
        if bits[i] {
            bits[i] = false;
            return Some(LexString::from_bits(bits));
        }
        bits[i] = true;
    }
    Some(LexString::from_bits(vec![true; bits.len() - 1]))
}

/// Cantor pairing on naturals: `(a + b)(a + b + 1)/2 + b`.
pub fn cantor_pair(a: &Natural, b: &Natural) -> Natural {
    let w = a + b;
    (&w * (&w + 1u32)) / 2u32 + b
}

/// Inverse of [`cantor_pair`].
pub fn cantor_unpair(z: &Natural) -> (Natural, Natural) {
    // w = floor((sqrt(8z + 1) - 1) / 2)
    let w = ((z * 8u32 + 1u32).sqrt() - 1u32) / 2u32;
    let t = (&w * (&w + 1u32)) / 2u32;
    let b = z - &t;
    let a = &w - &b;
    (a, b)
}

/// `⟨a, b⟩`: Cantor pairing on shortlex ranks.
pub fn pair(a: &LexString, b: &LexString) -> LexString {
    lex_unrank(&cantor_pair(&lex_rank(a), &lex_rank(b)))
}

/// Inverse of [`pair`].
pub fn unpair(z: &LexString) -> (LexString, LexString) {
    let (a, b) = cantor_unpair(&lex_rank(z));
    (lex_unrank(&a), lex_unrank(&b))
}

/// Iterates Σ* in shortlex order starting at `start`.
#[derive(Debug, Clone)]
pub struct Shortlex {
    next: LexString,
}

impl Shortlex {
    pub fn new() -> Self {
        Self::from(LexString::empty())
    }

    pub fn from(start: LexString) -> Self {
        Self { next: start }
    }
}

impl Default for Shortlex {
    fn default() -> Self {
        Self::new()
    }
}

impl Iterator for Shortlex {
    type Item = LexString;

    fn next(&mut self) -> Option<LexString> {
        let succ = successor(&self.next);
        Some(std::mem::replace(&mut self.next, succ))
    }
}

/// All strings of length at most `max_len`, in shortlex order.
pub fn up_to_len(max_len: usize) -> impl Iterator<Item = LexString> {
    Shortlex::new().take_while(move |x| x.len() <= max_len)
}
