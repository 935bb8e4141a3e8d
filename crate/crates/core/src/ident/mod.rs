//! Identifier channel for case-sensitive C-like sources.
//!
//! Each local or static variable carries one bit, in declaration order. A 1
//! renames the variable by appending `_` to every occurrence in its scope; a
//! 0 leaves it alone. The payload bit count lives in a first-line comment of
//! the form `/* stego:k=N */`.

mod decl;
mod lexer;

pub use decl::{
    find_candidates, Analysis, CandidateVar, NameMode, ScopeId, Symbol, SymbolKind, SymbolTable,
    FILE_SCOPE,
};
pub use lexer::{is_keyword, lex, Token, TokenKind, KEYWORDS};

use crate::bitcodec::{self, maybe_xor, BitVector, XorKey};
use crate::error::{Error, Result};

const COMMENT_PREFIX: &[u8] = b"/* stego:k=";
const COMMENT_SUFFIX: &[u8] = b" */";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum DfaState {
    Start,
    /// One character read; the pattern needs at least one more.
    Head,
    Accept,
    Reject,
}

fn dfa_step(state: DfaState, byte: u8) -> DfaState {
    let letter = byte.is_ascii_alphabetic() || byte == b'_';
    let digit = byte.is_ascii_digit();
    match state {
        DfaState::Start if letter => DfaState::Head,
        DfaState::Head | DfaState::Accept if letter || digit => DfaState::Accept,
        _ => DfaState::Reject,
    }
}

/// Strict identifier automaton: `[a-zA-Z_][a-zA-Z0-9_]+`.
///
/// Single-character names are rejected here even though the lexer accepts
/// them as identifiers.
pub fn match_identifier(text: &[u8]) -> bool {
    text.iter().fold(DfaState::Start, |s, &b| dfa_step(s, b)) == DfaState::Accept
}

/// The first-line comment recording `bits` payload bits.
pub fn stego_comment(bits: usize) -> String {
    format!("/* stego:k={bits} */")
}

/// Splits a stego comment off the first line. Returns the bit count and the
/// remaining source.
pub fn read_stego_comment(source: &[u8]) -> Result<(usize, &[u8])> {
    let missing = || Error::no_header("first line is not a /* stego:k=N */ comment");
    let rest = source.strip_prefix(COMMENT_PREFIX).ok_or_else(missing)?;
    let digits = rest.iter().take_while(|b| b.is_ascii_digit()).count();
    if digits == 0 {
        return Err(missing());
    }
    let rest_after = rest[digits..]
        .strip_prefix(COMMENT_SUFFIX)
        .ok_or_else(missing)?;
    let body = if let Some(b) = rest_after.strip_prefix(b"\r\n") {
        b
    } else if let Some(b) = rest_after.strip_prefix(b"\n") {
        b
    } else if rest_after.is_empty() {
        rest_after
    } else {
        return Err(missing());
    };
    let bits = std::str::from_utf8(&rest[..digits])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::no_header("stego comment count out of range"))?;
    Ok((bits, body))
}

fn line_ending(source: &[u8]) -> &'static [u8] {
    match source.iter().position(|&b| b == b'\n') {
        Some(p) if p > 0 && source[p - 1] == b'\r' => b"\r\n",
        _ => b"\n",
    }
}

/// Number of carrier variables in the cover.
pub fn capacity(source: &[u8]) -> Result<usize> {
    let tokens = lex(source)?;
    Ok(find_candidates(&tokens, NameMode::Cover)?.candidates.len())
}

/// Renames carriers for `payload` and returns the stego source along with
/// the symbol table recording every rename.
pub fn embed_with_table(
    source: &[u8],
    payload: &BitVector,
    key: Option<&XorKey>,
) -> Result<(Vec<u8>, SymbolTable)> {
    if source.starts_with(COMMENT_PREFIX) {
        return Err(Error::AmbiguousCover {
            reason: "cover already starts with a stego comment".into(),
        });
    }
    let tokens = lex(source)?;
    let mut analysis = find_candidates(&tokens, NameMode::Cover)?;
    let bits = maybe_xor(payload, key);
    if bits.len() > analysis.candidates.len() {
        return Err(Error::Capacity {
            needed: bits.len(),
            available: analysis.candidates.len(),
        });
    }

    let mut renamed = vec![false; tokens.len()];
    for (candidate, bit) in analysis.candidates.clone().iter().zip(bits.iter()) {
        if !bit {
            continue;
        }
        let new_name = format!("{}_", analysis.candidate_name(candidate));
        if analysis.all_names.contains(&new_name) {
            return Err(Error::Collision { name: new_name });
        }
        for t in analysis.occurrences(&tokens, candidate) {
            renamed[t] = true;
        }
        analysis.table.set_rename(candidate.symbol, new_name);
    }

    let header = stego_comment(payload.len());
    let mut out = Vec::with_capacity(source.len() + header.len() + bits.len() * 4);
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(line_ending(source));
    for (token, rename) in tokens.iter().zip(&renamed) {
        out.extend_from_slice(token.text);
        if *rename {
            out.push(b'_');
        }
    }
    Ok((out, analysis.table))
}

pub fn embed(source: &[u8], payload: &BitVector, key: Option<&XorKey>) -> Result<Vec<u8>> {
    embed_with_table(source, payload, key).map(|(stego, _)| stego)
}

pub fn extract_bits(stego: &[u8], key: Option<&XorKey>) -> Result<BitVector> {
    let (declared, body) = read_stego_comment(stego)?;
    let tokens = lex(body)?;
    let analysis = find_candidates(&tokens, NameMode::Stego)?;
    if declared > analysis.candidates.len() {
        return Err(Error::Truncated {
            declared,
            available: analysis.candidates.len(),
        });
    }
    let bits: BitVector = analysis.candidates[..declared]
        .iter()
        .map(|c| analysis.candidate_name(c).ends_with('_'))
        .collect();
    Ok(maybe_xor(&bits, key))
}

pub fn extract(stego: &[u8], key: Option<&XorKey>) -> Result<Vec<u8>> {
    bitcodec::bits_to_bytes(&extract_bits(stego, key)?)
}
