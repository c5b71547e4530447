//! Bitstrings with a fixed MSB-first convention.
//!
//! Bit 1 of a string is its leftmost character and the most significant bit
//! of the corresponding computational-basis index.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        BitString(bits)
    }

    pub fn zeros(len: usize) -> Self {
        BitString(vec![false; len])
    }

    /// Writes `index` MSB-first in `len` bits.
    pub fn from_index(index: usize, len: usize) -> Self {
        BitString((0..len).map(|k| (index >> (len - 1 - k)) & 1 == 1).collect())
    }

    /// All `2^len` strings in lexicographic (= index) order.
    pub fn all(len: usize) -> Vec<BitString> {
        (0..1usize << len).map(|i| Self::from_index(i, len)).collect()
    }

    pub fn index(&self) -> usize {
        self.0.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Zero-based access: `bit(0)` is the leftmost bit.
    pub fn bit(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn has_prefix(&self, prefix: &[bool]) -> bool {
        self.0.starts_with(prefix)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidArgument(format!(
                    "bitstring {s:?} contains {other:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitString)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn msb_first_indexing() {
        let b = BitString::from_index(6, 4);
        assert_eq!(b.to_string(), "0110");
        assert_eq!(b.index(), 6);
        assert!(!b.bit(0));
        assert!(b.bit(1));
        assert_eq!("0110".parse::<BitString>().unwrap(), b);
        assert!("01x".parse::<BitString>().is_err());
    }

    #[test]
    fn all_strings_in_order() {
        let all = BitString::all(3);
        assert_eq!(all.len(), 8);
        assert!(all.iter().enumerate().all(|(i, b)| b.index() == i));
    }
}
