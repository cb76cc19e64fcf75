//! Binary strings, the length-lex bijection with the naturals, the pairing
//! function and its columns, and code prefixes indexed by strings.

use crate::error::{Error, Result};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

pub const DEFAULT_DEPTH_CAP: u32 = 63;

/// Largest string length that may carry a length-lex index. Read once from
/// `CGMT_DEPTH_CAP`; values above 63 are clamped so indices fit in `u64`.
pub fn depth_cap() -> u32 {
    static CAP: OnceLock<u32> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var("CGMT_DEPTH_CAP")
            .ok()
            .and_then(|v| v.trim().parse::<u32>().ok())
            .map(|v| v.min(DEFAULT_DEPTH_CAP))
            .unwrap_or(DEFAULT_DEPTH_CAP)
    })
}

pub fn check_depth(depth: u32) -> Result<()> {
    let cap = depth_cap();
    if depth > cap {
        Err(Error::DepthCap { depth, cap })
    } else {
        Ok(())
    }
}

#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn empty() -> Self {
        BitString { bits: Vec::new() }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        BitString { bits }
    }

    pub fn zeros(len: usize) -> Self {
        BitString { bits: vec![false; len] }
    }

    pub fn ones(len: usize) -> Self {
        BitString { bits: vec![true; len] }
    }

    /// The string of length `len` whose lexicographic rank among strings of
    /// that length is `rank`.
    pub fn from_rank(len: u32, rank: u64) -> Self {
        let bits = (0..len).map(|i| (rank >> (len - 1 - i)) & 1 == 1).collect();
        BitString { bits }
    }

    /// Lexicographic rank among strings of the same length. Requires `len <= 64`.
    pub fn rank(&self) -> u64 {
        debug_assert!(self.bits.len() <= 64);
        self.bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        self.bits.get(i).copied()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn push(&mut self, b: bool) {
        self.bits.push(b);
    }

    pub fn pop(&mut self) -> Option<bool> {
        self.bits.pop()
    }

    pub fn truncate(&mut self, len: usize) {
        self.bits.truncate(len);
    }

    pub fn child(&self, b: bool) -> Self {
        let mut bits = Vec::with_capacity(self.bits.len() + 1);
        bits.extend_from_slice(&self.bits);
        bits.push(b);
        BitString { bits }
    }

    pub fn concat(&self, other: &BitString) -> Self {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        BitString { bits }
    }

    pub fn prefix(&self, len: usize) -> Self {
        BitString { bits: self.bits[..len.min(self.bits.len())].to_vec() }
    }

    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        self.bits.len() <= other.bits.len() && other.bits[..self.bits.len()] == self.bits[..]
    }

    pub fn compatible(&self, other: &BitString) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }

    pub fn is_all_zeros(&self) -> bool {
        self.bits.iter().all(|&b| !b)
    }

    pub fn first_one(&self) -> Option<usize> {
        self.bits.iter().position(|&b| b)
    }

    /// Order first by length, then lexicographically.
    pub fn length_lex_cmp(&self, other: &BitString) -> Ordering {
        self.bits.len().cmp(&other.bits.len()).then_with(|| self.bits.cmp(&other.bits))
    }

    /// Successor in lexicographic order among strings of the same length.
    pub fn lex_successor(&self) -> Option<BitString> {
        let mut bits = self.bits.clone();
        for i in (0..bits.len()).rev() {
            if bits[i] {
                bits[i] = false;
            } else {
                bits[i] = true;
                return Some(BitString { bits });
            }
        }
        None
    }

    /// All strings of a given length in lexicographic order.
    pub fn all_of_length(len: u32) -> impl Iterator<Item = BitString> {
        let count = 1u64 << len;
        (0..count).map(move |r| BitString::from_rank(len, r))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bits.is_empty() {
            return f.write_str("⟨⟩");
        }
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{}\"", self.to_plain())
    }
}

impl BitString {
    /// Digits only; the empty string renders as "".
    pub fn to_plain(&self) -> String {
        self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "⟨⟩" || s == "<>" {
            return Ok(BitString::empty());
        }
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("invalid binary digit {other:?} in {s:?}"))),
            })
            .collect::<Result<Vec<bool>>>()
            .map(BitString::from_bits)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_plain())
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub type LengthLexIndex = u64;

/// Position of `s` in the enumeration ⟨⟩, 0, 1, 00, 01, ... .
pub fn index_of(s: &BitString) -> Result<LengthLexIndex> {
    let len = s.len() as u32;
    check_depth(len)?;
    Ok((1u64 << len) - 1 + s.rank())
}

pub fn string_at(i: LengthLexIndex) -> BitString {
    let len = 63 - (i + 1).leading_zeros();
    let rank = i + 1 - (1u64 << len);
    BitString::from_rank(len, rank)
}

/// Heap-order index of a child: index_of(σ⌢b) = 2·index_of(σ) + 1 + b.
pub fn child_index(i: LengthLexIndex, b: bool) -> LengthLexIndex {
    2 * i + 1 + b as u64
}

/// Cantor pairing π(n, m) = (n+m)(n+m+1)/2 + n.
pub fn pair(n: u64, m: u64) -> u64 {
    let d = n + m;
    d * (d + 1) / 2 + n
}

pub fn unpair(z: u64) -> (u64, u64) {
    let mut d = (((8 * z + 1) as f64).sqrt() as u64).saturating_sub(1) / 2;
    while d * (d + 1) / 2 > z {
        d -= 1;
    }
    while (d + 1) * (d + 2) / 2 <= z {
        d += 1;
    }
    let n = z - d * (d + 1) / 2;
    (n, d - n)
}

/// A finite prefix of a tree code: entry `i` is the mark of `string_at(i)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct CodePrefix {
    entries: Vec<bool>,
}

impl CodePrefix {
    pub fn new(entries: Vec<bool>) -> Self {
        CodePrefix { entries }
    }

    /// Complete code prefix for blocks `0..=depth` marking exactly `marked`.
    pub fn from_marked<'a, I>(depth: u32, marked: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a BitString>,
    {
        check_depth(depth)?;
        let mut entries = vec![false; block_len(depth) as usize];
        for s in marked {
            if s.len() as u32 <= depth {
                entries[index_of(s)? as usize] = true;
            }
        }
        Ok(CodePrefix { entries })
    }

    pub fn entries(&self) -> &[bool] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: LengthLexIndex) -> Option<bool> {
        self.entries.get(i as usize).copied()
    }

    pub fn mark(&self, s: &BitString) -> Option<bool> {
        if s.len() as u32 > depth_cap() {
            return None;
        }
        index_of(s).ok().and_then(|i| self.get(i))
    }

    /// Largest n such that every string of length ≤ n has an entry.
    pub fn complete_block(&self) -> Option<u32> {
        let len = self.entries.len() as u64;
        if len == 0 {
            return None;
        }
        let n = 63 - (len + 1).leading_zeros();
        Some(n - 1)
    }

    pub fn marked_strings(&self) -> Vec<BitString> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| string_at(i as u64))
            .collect()
    }

    /// The entries as a 0/1 string.
    pub fn to_bitstring(&self) -> BitString {
        BitString::from_bits(self.entries.clone())
    }
}

/// Number of strings of length at most `n`: 2^{n+1} − 1.
pub fn block_len(n: u32) -> u64 {
    (1u64 << (n + 1)) - 1
}

/// ν^{≤n}: the first 2^{n+1} − 1 entries of `p`.
pub fn block_prefix(p: &CodePrefix, n: u32) -> Result<CodePrefix> {
    check_depth(n)?;
    let needed = block_len(n);
    if (p.len() as u64) < needed {
        return Err(Error::PrefixTooShort { needed, len: p.len() as u64 });
    }
    Ok(CodePrefix { entries: p.entries[..needed as usize].to_vec() })
}

/// The n-th column ⟨p⟩_n, defined up to the first missing position.
pub fn column(p: &CodePrefix, n: u64) -> BitString {
    column_of_bits(p.entries(), n)
}

pub fn column_of_bits(bits: &[bool], n: u64) -> BitString {
    let mut out = Vec::new();
    let mut m = 0u64;
    loop {
        let pos = pair(n, m);
        if pos >= bits.len() as u64 {
            break;
        }
        out.push(bits[pos as usize]);
        m += 1;
    }
    BitString::from_bits(out)
}
