//! Language profiles for the case-insensitive channel.
//!
//! A profile is a line-oriented text file. Blank lines and lines starting
//! with `#` are ignored; every other line is a directive:
//!
//! ```text
//! name <name>
//! keyword <word> [<word> ...]
//! comment <open> <close>
//! linecomment <prefix>
//! string <quote> [double|backslash|none]
//! hexprefix <prefix>
//! rawline <keyword>
//! ```
//!
//! Keywords match case-insensitively. `string` escapes default to `double`
//! (a doubled quote inside the literal stands for one quote). Alphabetic
//! `linecomment` prefixes such as BASIC's `REM` match case-insensitively and
//! only as a whole word. A `rawline` keyword (BASIC's `DATA`) turns the rest
//! of its line into a literal.

use std::collections::HashSet;

use crate::error::{Error, Result};

const PASCAL: &str = include_str!("../../profiles/pascal.profile");
const BASIC: &str = include_str!("../../profiles/basic.profile");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Escape {
    /// `''` inside a `'...'` literal.
    Double,
    /// `\'` inside a `'...'` literal.
    Backslash,
    None,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StringDelimiter {
    pub quote: u8,
    pub escape: Escape,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageProfile {
    pub name: String,
    /// Lowercased keywords.
    keywords: HashSet<Vec<u8>>,
    pub block_comments: Vec<(Vec<u8>, Vec<u8>)>,
    pub line_comments: Vec<Vec<u8>>,
    pub strings: Vec<StringDelimiter>,
    pub hex_prefixes: Vec<Vec<u8>>,
    /// Lowercased keywords whose remaining line is literal data.
    raw_lines: HashSet<Vec<u8>>,
}

impl LanguageProfile {
    pub fn pascal() -> Self {
        Self::parse(PASCAL).expect("built-in pascal profile")
    }

    pub fn basic() -> Self {
        Self::parse(BASIC).expect("built-in basic profile")
    }

    /// Looks up a built-in profile by name.
    pub fn builtin(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "pascal" => Some(Self::pascal()),
            "basic" => Some(Self::basic()),
            _ => None,
        }
    }

    pub fn is_keyword(&self, word: &[u8]) -> bool {
        self.keywords.contains(&word.to_ascii_lowercase())
    }

    pub fn starts_raw_line(&self, word: &[u8]) -> bool {
        self.raw_lines.contains(&word.to_ascii_lowercase())
    }

    pub fn keyword_count(&self) -> usize {
        self.keywords.len()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut profile = LanguageProfile {
            name: String::from("custom"),
            keywords: HashSet::new(),
            block_comments: Vec::new(),
            line_comments: Vec::new(),
            strings: Vec::new(),
            hex_prefixes: Vec::new(),
            raw_lines: HashSet::new(),
        };
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let err = |message: String| Error::Profile { line, message };
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut fields = trimmed.split_whitespace();
            let directive = fields.next().unwrap_or_default();
            let args: Vec<&str> = fields.collect();
            match (directive, args.as_slice()) {
                ("name", [name]) => profile.name = (*name).to_owned(),
                ("keyword", words) if !words.is_empty() => {
                    for word in words {
                        if !profile
                            .keywords
                            .insert(word.to_ascii_lowercase().into_bytes())
                        {
                            return Err(err(format!("duplicate keyword {word:?}")));
                        }
                    }
                }
                ("comment", [open, close]) => profile
                    .block_comments
                    .push((open.as_bytes().to_vec(), close.as_bytes().to_vec())),
                ("linecomment", [prefix]) => profile.line_comments.push(prefix.as_bytes().to_vec()),
                ("string", [quote, rest @ ..]) if rest.len() <= 1 => {
                    let &[q] = quote.as_bytes() else {
                        return Err(err(format!("quote must be one byte, got {quote:?}")));
                    };
                    let escape = match rest.first().copied() {
                        None | Some("double") => Escape::Double,
                        Some("backslash") => Escape::Backslash,
                        Some("none") => Escape::None,
                        Some(other) => return Err(err(format!("unknown escape {other:?}"))),
                    };
                    profile.strings.push(StringDelimiter { quote: q, escape });
                }
                ("hexprefix", [prefix]) => profile.hex_prefixes.push(prefix.as_bytes().to_vec()),
                ("rawline", [word]) => {
                    profile
                        .raw_lines
                        .insert(word.to_ascii_lowercase().into_bytes());
                }
                _ => return Err(err(format!("cannot parse {trimmed:?}"))),
            }
        }
        Ok(profile)
    }
}
