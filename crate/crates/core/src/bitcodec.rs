//! Payload bit handling shared by every channel.
//!
//! Bytes are expanded MSB-first. A framed payload is a 32-bit big-endian bit
//! count followed by the payload bits. The XOR keystream is an obfuscation
//! toy and provides no confidentiality whatsoever.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Width of the in-band length prefix, in bits.
pub const LENGTH_PREFIX_BITS: usize = 32;

/// An ordered sequence of payload bits.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitVector(Vec<bool>);

impl BitVector {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self(Vec::with_capacity(bits))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn get(&self, index: usize) -> Option<bool> {
        self.0.get(index).copied()
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = bool> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    /// Builds a vector from numeric symbols, rejecting anything but 0 and 1.
    pub fn from_symbols(symbols: &[u8]) -> Result<Self> {
        symbols
            .iter()
            .map(|&s| match s {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(Error::InvalidBits(format!("symbol {other}"))),
            })
            .collect()
    }

    /// First `n` bits (or all of them when shorter).
    pub fn prefix(&self, n: usize) -> BitVector {
        Self(self.0[..n.min(self.0.len())].to_vec())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for bit in &self.0 {
            f.write_str(if *bit { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Parses a string of `0`/`1` characters; `_` and whitespace are ignored.
impl FromStr for BitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .filter(|c| !c.is_whitespace() && *c != '_')
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidBits(s.to_owned())),
            })
            .collect()
    }
}

impl From<Vec<bool>> for BitVector {
    fn from(bits: Vec<bool>) -> Self {
        Self(bits)
    }
}

impl FromIterator<bool> for BitVector {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl Extend<bool> for BitVector {
    fn extend<I: IntoIterator<Item = bool>>(&mut self, iter: I) {
        self.0.extend(iter);
    }
}

impl IntoIterator for BitVector {
    type Item = bool;
    type IntoIter = std::vec::IntoIter<bool>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

/// Repeating key for [`xor_transform`]. Not encryption.
#[derive(Clone, PartialEq, Eq)]
pub struct XorKey(Vec<u8>);

impl XorKey {
    pub fn new(bytes: impl Into<Vec<u8>>) -> Result<Self> {
        let bytes = bytes.into();
        if bytes.is_empty() {
            return Err(Error::EmptyKey);
        }
        Ok(Self(bytes))
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    /// Endless MSB-first bitstream over the repeated key bytes.
    fn keystream(&self) -> impl Iterator<Item = bool> + '_ {
        self.0
            .iter()
            .cycle()
            .flat_map(|&byte| (0..8).rev().map(move |shift| (byte >> shift) & 1 == 1))
    }
}

impl fmt::Debug for XorKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("XorKey").field(&self.0.len()).finish()
    }
}

pub fn bytes_to_bits(payload: &[u8]) -> BitVector {
    let mut bits = BitVector::with_capacity(payload.len() * 8);
    for &byte in payload {
        bits.extend((0..8).rev().map(|shift| (byte >> shift) & 1 == 1));
    }
    bits
}

pub fn bits_to_bytes(bits: &BitVector) -> Result<Vec<u8>> {
    if !bits.len().is_multiple_of(8) {
        return Err(Error::PartialByte { len: bits.len() });
    }
    Ok(bits
        .as_slice()
        .chunks_exact(8)
        .map(|chunk| chunk.iter().fold(0u8, |acc, &b| (acc << 1) | b as u8))
        .collect())
}

/// Checks that a payload length is representable in the prefix.
pub fn length_prefix(len: usize) -> Result<u32> {
    u32::try_from(len).map_err(|_| Error::TooLong { len })
}

/// Prepends the 32-bit big-endian payload length.
pub fn frame(payload: &BitVector) -> Result<BitVector> {
    let len = length_prefix(payload.len())?;
    let mut out = BitVector::with_capacity(LENGTH_PREFIX_BITS + payload.len());
    out.extend(
        (0..LENGTH_PREFIX_BITS)
            .rev()
            .map(|shift| (len >> shift) & 1 == 1),
    );
    out.extend(payload.iter());
    Ok(out)
}

/// Reads the declared length and returns exactly that many following bits.
/// Anything after the declared payload is ignored.
pub fn unframe(bits: &BitVector) -> Result<BitVector> {
    let declared = read_length_prefix(bits)?;
    let available = bits.len() - LENGTH_PREFIX_BITS;
    if declared > available {
        return Err(Error::Truncated {
            declared,
            available,
        });
    }
    Ok(
        bits.as_slice()[LENGTH_PREFIX_BITS..LENGTH_PREFIX_BITS + declared]
            .iter()
            .copied()
            .collect(),
    )
}

/// Decodes the length prefix alone.
pub fn read_length_prefix(bits: &BitVector) -> Result<usize> {
    if bits.len() < LENGTH_PREFIX_BITS {
        return Err(Error::no_header(format!(
            "need {LENGTH_PREFIX_BITS} bits for the length prefix, have {}",
            bits.len()
        )));
    }
    let declared = bits.as_slice()[..LENGTH_PREFIX_BITS]
        .iter()
        .fold(0u32, |acc, &b| (acc << 1) | b as u32);
    Ok(declared as usize)
}

/// XORs `bits` with the key's repeating bitstream. Applying it twice with the
/// same key restores the input.
pub fn xor_transform(bits: &BitVector, key: &XorKey) -> BitVector {
    bits.iter()
        .zip(key.keystream())
        .map(|(b, k)| b ^ k)
        .collect()
}

/// Applies the optional key, passing the bits through untouched without one.
pub(crate) fn maybe_xor(bits: &BitVector, key: Option<&XorKey>) -> BitVector {
    match key {
        Some(key) => xor_transform(bits, key),
        None => bits.clone(),
    }
}
