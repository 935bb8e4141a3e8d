//! A tiling lexer for a C-like surface syntax.

use std::ops::Range;

use crate::error::{Error, Result};

pub const KEYWORDS: &[&str] = &[
    "auto",
    "break",
    "case",
    "char",
    "const",
    "continue",
    "default",
    "do",
    "double",
    "else",
    "enum",
    "extern",
    "float",
    "for",
    "goto",
    "if",
    "inline",
    "int",
    "long",
    "register",
    "restrict",
    "return",
    "short",
    "signed",
    "sizeof",
    "static",
    "struct",
    "switch",
    "typedef",
    "union",
    "unsigned",
    "void",
    "volatile",
    "while",
    "_Alignas",
    "_Alignof",
    "_Atomic",
    "_Bool",
    "_Complex",
    "_Generic",
    "_Imaginary",
    "_Noreturn",
    "_Static_assert",
    "_Thread_local",
];

/// Multi-byte punctuators, longest first.
const PUNCTUATORS: &[&str] = &[
    "<<=", ">>=", "...", "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||", "+=",
    "-=", "*=", "/=", "%=", "&=", "^=", "|=", "##",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Keyword,
    Identifier,
    StringLiteral,
    CharLiteral,
    NumberLiteral,
    Comment,
    /// A whole preprocessor line, continuations included.
    Directive,
    Whitespace,
    Punct,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token<'a> {
    pub kind: TokenKind,
    pub span: Range<usize>,
    pub text: &'a [u8],
}

impl Token<'_> {
    pub fn is(&self, text: &str) -> bool {
        self.text == text.as_bytes()
    }

    pub fn is_trivia(&self) -> bool {
        matches!(self.kind, TokenKind::Whitespace | TokenKind::Comment)
    }
}

pub fn is_keyword(word: &[u8]) -> bool {
    KEYWORDS.iter().any(|k| k.as_bytes() == word)
}

fn is_ident_start(b: u8) -> bool {
    b.is_ascii_alphabetic() || b == b'_'
}

fn is_ident_continue(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_'
}

/// Offset just past the `*/` closing a comment opened at `start`.
fn block_comment_end(src: &[u8], start: usize) -> Result<usize> {
    src[start + 2..]
        .windows(2)
        .position(|w| w == b"*/")
        .map(|p| start + 2 + p + 2)
        .ok_or(Error::UnterminatedComment { offset: start })
}

fn quoted_end(src: &[u8], open: usize, quote: u8) -> Result<usize> {
    let mut i = open + 1;
    while i < src.len() {
        match src[i] {
            b'\\' => i += 2,
            b if b == quote => return Ok(i + 1),
            _ => i += 1,
        }
    }
    Err(Error::UnterminatedString { offset: open })
}

/// A directive runs to the first newline not preceded by a backslash.
/// Block comments inside it may span lines.
fn directive_end(src: &[u8], start: usize) -> Result<usize> {
    let mut i = start + 1;
    while i < src.len() {
        match src[i] {
            b'\n' => {
                let mut j = i;
                if j > 0 && src[j - 1] == b'\r' {
                    j -= 1;
                }
                if j > 0 && src[j - 1] == b'\\' {
                    i += 1;
                    continue;
                }
                return Ok(j);
            }
            b'/' if src.get(i + 1) == Some(&b'*') => i = block_comment_end(src, i)?,
            _ => i += 1,
        }
    }
    Ok(src.len())
}

fn number_end(src: &[u8], start: usize) -> usize {
    let mut i = start + 1;
    while i < src.len() {
        let b = src[i];
        let exponent_sign =
            (b == b'+' || b == b'-') && matches!(src[i - 1], b'e' | b'E' | b'p' | b'P');
        if is_ident_continue(b) || b == b'.' || exponent_sign {
            i += 1;
        } else {
            break;
        }
    }
    i
}

pub fn lex(source: &[u8]) -> Result<Vec<Token<'_>>> {
    let mut tokens = Vec::new();
    let mut pos = 0;
    // only whitespace seen since the last newline
    let mut line_start = true;

    while pos < source.len() {
        let b = source[pos];
        let rest = &source[pos..];
        let (kind, end) = if b.is_ascii_whitespace() || b == 0x0B {
            let len = rest
                .iter()
                .take_while(|&&c| c.is_ascii_whitespace() || c == 0x0B)
                .count();
            (TokenKind::Whitespace, pos + len)
        } else if b == b'#' && line_start {
            (TokenKind::Directive, directive_end(source, pos)?)
        } else if rest.starts_with(b"//") {
            let len = rest.iter().take_while(|&&c| c != b'\n').count();
            let mut end = pos + len;
            if end > pos && source[end - 1] == b'\r' {
                end -= 1;
            }
            (TokenKind::Comment, end)
        } else if rest.starts_with(b"/*") {
            (TokenKind::Comment, block_comment_end(source, pos)?)
        } else if b == b'"' {
            (TokenKind::StringLiteral, quoted_end(source, pos, b'"')?)
        } else if b == b'\'' {
            (TokenKind::CharLiteral, quoted_end(source, pos, b'\'')?)
        } else if b.is_ascii_digit() || (b == b'.' && rest.get(1).is_some_and(u8::is_ascii_digit)) {
            (TokenKind::NumberLiteral, number_end(source, pos))
        } else if is_ident_start(b) {
            let len = rest.iter().take_while(|&&c| is_ident_continue(c)).count();
            let word = &rest[..len];
            // encoding prefixes belong to the literal: L"x", u8"x", U'x'
            let prefix = matches!(word, b"L" | b"u" | b"U" | b"u8");
            match rest.get(len) {
                Some(&q @ (b'"' | b'\'')) if prefix => {
                    let kind = if q == b'"' {
                        TokenKind::StringLiteral
                    } else {
                        TokenKind::CharLiteral
                    };
                    (kind, quoted_end(source, pos + len, q)?)
                }
                _ if is_keyword(word) => (TokenKind::Keyword, pos + len),
                _ => (TokenKind::Identifier, pos + len),
            }
        } else {
            let len = PUNCTUATORS
                .iter()
                .find(|p| rest.starts_with(p.as_bytes()))
                .map_or(1, |p| p.len());
            (TokenKind::Punct, pos + len)
        };

        let text = &source[pos..end];
        if kind == TokenKind::Whitespace {
            if text.contains(&b'\n') {
                line_start = true;
            }
        } else {
            line_start = false;
        }
        tokens.push(Token {
            kind,
            span: pos..end,
            text,
        });
        pos = end;
    }
    Ok(tokens)
}
