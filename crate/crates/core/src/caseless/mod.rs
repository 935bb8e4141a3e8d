//! Case channel for case-insensitive programming languages.
//!
//! Keyword and identifier letters carry bits exactly like HTML tag letters.
//! String literals, numbers and comments are never touched. The payload is
//! always framed with the in-band 32-bit length prefix.

mod profile;

pub use profile::{Escape, LanguageProfile, StringDelimiter};

use std::ops::Range;
use std::str::FromStr;

use crate::bitcodec::{self, maybe_xor, BitVector, XorKey, LENGTH_PREFIX_BITS};
use crate::error::{Error, Result};
use crate::site::{self, CandidateSite, SiteKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Keyword,
    Identifier,
    StringLiteral,
    NumberLiteral,
    Comment,
    Whitespace,
    Punct,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token<'a> {
    pub kind: TokenKind,
    pub span: Range<usize>,
    pub text: &'a [u8],
}

/// Which letters carry bits.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Strategy {
    /// Every letter of every keyword and identifier.
    #[default]
    All,
    /// Only the first letter of each keyword and identifier.
    FirstChar,
    KeywordsOnly,
    IdentifiersOnly,
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "all" => Ok(Strategy::All),
            "first-char" => Ok(Strategy::FirstChar),
            "keywords" => Ok(Strategy::KeywordsOnly),
            "identifiers" => Ok(Strategy::IdentifiersOnly),
            other => Err(format!("unknown strategy {other:?}")),
        }
    }
}

fn is_ident_start(b: u8) -> bool {
    b.is_ascii_alphabetic() || b == b'_'
}

fn is_ident_continue(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_'
}

fn starts_with_ci(haystack: &[u8], prefix: &[u8]) -> bool {
    haystack.len() >= prefix.len() && haystack[..prefix.len()].eq_ignore_ascii_case(prefix)
}

fn find(haystack: &[u8], needle: &[u8], from: usize) -> Option<usize> {
    haystack
        .get(from..)?
        .windows(needle.len())
        .position(|w| w == needle)
        .map(|p| p + from)
}

fn line_end(source: &[u8], from: usize) -> usize {
    source[from..]
        .iter()
        .position(|&b| b == b'\n' || b == b'\r')
        .map_or(source.len(), |p| p + from)
}

struct Lexer<'a, 'p> {
    src: &'a [u8],
    profile: &'p LanguageProfile,
    pos: usize,
    tokens: Vec<Token<'a>>,
}

impl<'a> Lexer<'a, '_> {
    fn push(&mut self, kind: TokenKind, end: usize) {
        let span = self.pos..end;
        self.tokens.push(Token {
            kind,
            text: &self.src[span.clone()],
            span,
        });
        self.pos = end;
    }

    /// Longest comment opener at the cursor: (is_block, opener index, length).
    fn comment_at(&self) -> Option<(bool, usize, usize)> {
        let rest = &self.src[self.pos..];
        let blocks = self
            .profile
            .block_comments
            .iter()
            .enumerate()
            .filter(|(_, (open, _))| rest.starts_with(open))
            .map(|(i, (open, _))| (true, i, open.len()));
        let lines = self
            .profile
            .line_comments
            .iter()
            .enumerate()
            .filter(|(_, prefix)| {
                if prefix.iter().all(u8::is_ascii_alphabetic) {
                    starts_with_ci(rest, prefix)
                        && !rest
                            .get(prefix.len())
                            .copied()
                            .is_some_and(is_ident_continue)
                } else {
                    rest.starts_with(prefix)
                }
            })
            .map(|(i, prefix)| (false, i, prefix.len()));
        blocks.chain(lines).max_by_key(|&(_, _, len)| len)
    }

    fn string_end(&self, delim: &StringDelimiter) -> Result<usize> {
        let mut i = self.pos + 1;
        while i < self.src.len() {
            let b = self.src[i];
            if delim.escape == Escape::Backslash && b == b'\\' {
                i += 2;
                continue;
            }
            if b == delim.quote {
                if delim.escape == Escape::Double && self.src.get(i + 1) == Some(&delim.quote) {
                    i += 2;
                    continue;
                }
                return Ok(i + 1);
            }
            i += 1;
        }
        Err(Error::UnterminatedString { offset: self.pos })
    }

    fn number_end(&self, mut i: usize, hex: bool) -> usize {
        while i < self.src.len() {
            let b = self.src[i];
            let prev = self.src[i - 1];
            let digit_follows = self.src.get(i + 1).is_some_and(u8::is_ascii_digit);
            if is_ident_continue(b)
                || (b == b'.' && !hex && digit_follows)
                || ((b == b'+' || b == b'-')
                    && !hex
                    && matches!(prev, b'e' | b'E')
                    && digit_follows)
            {
                i += 1;
            } else {
                break;
            }
        }
        i
    }

    fn run(mut self) -> Result<Vec<Token<'a>>> {
        let src = self.src;
        while self.pos < src.len() {
            let start = self.pos;
            let b = src[start];
            let rest = &src[start..];

            if b.is_ascii_whitespace() {
                let len = rest.iter().take_while(|b| b.is_ascii_whitespace()).count();
                self.push(TokenKind::Whitespace, start + len);
                continue;
            }

            if let Some((is_block, idx, open_len)) = self.comment_at() {
                let end = if is_block {
                    let close = &self.profile.block_comments[idx].1;
                    find(src, close, start + open_len)
                        .map(|p| p + close.len())
                        .ok_or(Error::UnterminatedComment { offset: start })?
                } else {
                    line_end(src, start + open_len)
                };
                self.push(TokenKind::Comment, end);
                continue;
            }

            if let Some(delim) = self.profile.strings.iter().find(|d| d.quote == b) {
                let end = self.string_end(delim)?;
                self.push(TokenKind::StringLiteral, end);
                continue;
            }

            if let Some(prefix) = self.profile.hex_prefixes.iter().find(|p| {
                starts_with_ci(rest, p) && rest.get(p.len()).is_some_and(u8::is_ascii_hexdigit)
            }) {
                let end = self.number_end(start + prefix.len(), true);
                self.push(TokenKind::NumberLiteral, end);
                continue;
            }

            if b.is_ascii_digit() {
                let end = self.number_end(start + 1, false);
                self.push(TokenKind::NumberLiteral, end);
                continue;
            }

            if is_ident_start(b) {
                let len = rest.iter().take_while(|&&b| is_ident_continue(b)).count();
                let word = &rest[..len];
                let kind = if self.profile.is_keyword(word) {
                    TokenKind::Keyword
                } else {
                    TokenKind::Identifier
                };
                let raw = self.profile.starts_raw_line(word);
                self.push(kind, start + len);
                if raw {
                    let end = line_end(src, self.pos);
                    if end > self.pos {
                        self.push(TokenKind::StringLiteral, end);
                    }
                }
                continue;
            }

            self.push(TokenKind::Punct, start + 1);
        }
        Ok(self.tokens)
    }
}

/// Splits `source` into tokens that tile it exactly.
pub fn tokenize<'a>(source: &'a [u8], profile: &LanguageProfile) -> Result<Vec<Token<'a>>> {
    Lexer {
        src: source,
        profile,
        pos: 0,
        tokens: Vec::new(),
    }
    .run()
}

pub fn candidate_sites(tokens: &[Token], strategy: Strategy) -> Vec<CandidateSite> {
    let mut sites = Vec::new();
    for token in tokens {
        let kind = match token.kind {
            TokenKind::Keyword => SiteKind::Keyword,
            TokenKind::Identifier => SiteKind::Identifier,
            _ => continue,
        };
        let wanted = match strategy {
            Strategy::All | Strategy::FirstChar => true,
            Strategy::KeywordsOnly => kind == SiteKind::Keyword,
            Strategy::IdentifiersOnly => kind == SiteKind::Identifier,
        };
        if !wanted {
            continue;
        }
        let letters = token
            .text
            .iter()
            .enumerate()
            .filter(|(_, b)| b.is_ascii_alphabetic())
            .map(|(i, &b)| CandidateSite {
                offset: token.span.start + i,
                original: b,
                kind,
            });
        if strategy == Strategy::FirstChar {
            sites.extend(letters.take(1));
        } else {
            sites.extend(letters);
        }
    }
    sites
}

/// Tokenizes and selects sites in one step.
pub fn sites(
    source: &[u8],
    profile: &LanguageProfile,
    strategy: Strategy,
) -> Result<Vec<CandidateSite>> {
    Ok(candidate_sites(&tokenize(source, profile)?, strategy))
}

/// Payload bits that fit after the length prefix.
pub fn capacity(source: &[u8], profile: &LanguageProfile, strategy: Strategy) -> Result<usize> {
    Ok(sites(source, profile, strategy)?
        .len()
        .saturating_sub(LENGTH_PREFIX_BITS))
}

pub fn embed(
    source: &[u8],
    payload: &BitVector,
    profile: &LanguageProfile,
    strategy: Strategy,
    key: Option<&XorKey>,
) -> Result<Vec<u8>> {
    let sites = sites(source, profile, strategy)?;
    let framed = bitcodec::frame(&maybe_xor(payload, key))?;
    let mut stego = source.to_vec();
    site::write_bits(&mut stego, &sites, &framed)?;
    Ok(stego)
}

pub fn extract_bits(
    stego: &[u8],
    profile: &LanguageProfile,
    strategy: Strategy,
    key: Option<&XorKey>,
) -> Result<BitVector> {
    let sites = sites(stego, profile, strategy)?;
    let channel = site::read_bits(stego, &sites);
    Ok(maybe_xor(&bitcodec::unframe(&channel)?, key))
}

pub fn extract(
    stego: &[u8],
    profile: &LanguageProfile,
    strategy: Strategy,
    key: Option<&XorKey>,
) -> Result<Vec<u8>> {
    bitcodec::bits_to_bytes(&extract_bits(stego, profile, strategy, key)?)
}
