//! The letter-case channel: one bit per ASCII letter.
//!
//! Lowercase carries 0, uppercase carries 1.

use crate::error::{Error, Result};

/// Distance between an uppercase ASCII letter and its lowercase form.
pub const CASE_OFFSET: u8 = b'a' - b'A';

/// `l(c)`: lowercase for `A..=Z`, identity otherwise.
pub fn to_lower(c: u8) -> u8 {
    if c.is_ascii_uppercase() {
        c + CASE_OFFSET
    } else {
        c
    }
}

/// `u(c)`: uppercase for `a..=z`, identity otherwise.
pub fn to_upper(c: u8) -> u8 {
    if c.is_ascii_lowercase() {
        c - CASE_OFFSET
    } else {
        c
    }
}

/// Encodes `bit` in the case of letter `c`.
pub fn stego_char(c: u8, bit: bool) -> Result<u8> {
    if !c.is_ascii_alphabetic() {
        return Err(Error::NotAlpha { byte: c });
    }
    Ok(if bit { to_upper(c) } else { to_lower(c) })
}

/// Reads the bit carried by a letter; `None` for non-letters.
pub fn decode_char(c: u8) -> Option<bool> {
    if c.is_ascii_uppercase() {
        Some(true)
    } else if c.is_ascii_lowercase() {
        Some(false)
    } else {
        None
    }
}

/// Lowercases every ASCII letter, leaving all other bytes alone.
pub fn fold(bytes: &[u8]) -> Vec<u8> {
    bytes.iter().map(|&b| to_lower(b)).collect()
}
