//! Byte-level tag scanner.
//!
//! A small hand-written state machine that walks an HTML document and records
//! every ASCII letter belonging to a tag name or an attribute name. Attribute
//! values, comments, `<!...>` declarations, `<?...>` instructions, the bodies
//! of raw-text elements such as `<script>`, and `<Header k>` length elements
//! produce no sites. Text between tags is never touched.

use std::ops::Range;

use crate::error::Error;
use crate::site::{CandidateSite, SiteKind};

/// Elements whose content is not markup.
const RAW_TEXT_ELEMENTS: &[&[u8]] = &[
    b"script",
    b"style",
    b"textarea",
    b"title",
    b"xmp",
    b"iframe",
    b"noembed",
    b"noframes",
    b"noscript",
];

const HEADER_NAME: &[u8] = b"header";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tag {
    /// Offset of the opening `<`.
    pub start: usize,
    /// Offset one past the closing `>`.
    pub end: usize,
    pub name: Range<usize>,
    pub closing: bool,
}

/// A `<Header k>` length element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeaderElement {
    pub span: Range<usize>,
    /// `None` when the digits overflow.
    pub bits: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct ScanResult<'a> {
    pub document: &'a [u8],
    pub sites: Vec<CandidateSite>,
    pub tags: Vec<Tag>,
    /// All length elements in document order.
    pub headers: Vec<HeaderElement>,
}

impl ScanResult<'_> {
    /// Rebuilds the document from its pass-through bytes and the current site
    /// letters.
    pub fn reassemble(&self) -> Vec<u8> {
        self.reassemble_with(|site| site.original)
    }

    /// Rebuilds the document substituting each site with `letter(site)`.
    pub fn reassemble_with(&self, mut letter: impl FnMut(&CandidateSite) -> u8) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.document.len());
        let mut cursor = 0;
        for site in &self.sites {
            out.extend_from_slice(&self.document[cursor..site.offset]);
            out.push(letter(site));
            cursor = site.offset + 1;
        }
        out.extend_from_slice(&self.document[cursor..]);
        out
    }

    pub fn tag_name(&self, tag: &Tag) -> &[u8] {
        &self.document[tag.name.clone()]
    }
}

/// The document ended inside a tag. Everything scanned before the failure is
/// kept in `partial`.
#[derive(Debug, Clone)]
pub struct UnterminatedTag<'a> {
    pub offset: usize,
    pub partial: ScanResult<'a>,
}

impl From<UnterminatedTag<'_>> for Error {
    fn from(e: UnterminatedTag<'_>) -> Self {
        Error::UnterminatedTag { offset: e.offset }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Text,
    TagName,
    BeforeAttrName,
    AttrName,
    AfterAttrName,
    BeforeAttrValue,
    AttrValueQuoted(u8),
    AttrValueUnquoted,
    BogusTag,
}

fn is_space(b: u8) -> bool {
    matches!(b, b' ' | b'\t' | b'\n' | b'\r' | 0x0C)
}

fn find(haystack: &[u8], needle: &[u8], from: usize) -> Option<usize> {
    if from > haystack.len() {
        return None;
    }
    haystack[from..]
        .windows(needle.len())
        .position(|w| w == needle)
        .map(|p| p + from)
}

/// Recognises `<header DIGITS>` (any letter case, whitespace before the
/// digits) starting at `at`.
pub(crate) fn header_at(doc: &[u8], at: usize) -> Option<HeaderElement> {
    let rest = doc.get(at..)?;
    if rest.first() != Some(&b'<') {
        return None;
    }
    let name = rest.get(1..1 + HEADER_NAME.len())?;
    if !name.eq_ignore_ascii_case(HEADER_NAME) {
        return None;
    }
    let mut i = 1 + HEADER_NAME.len();
    let ws_start = i;
    while rest.get(i).is_some_and(|&b| is_space(b)) {
        i += 1;
    }
    if i == ws_start {
        return None;
    }
    let digits_start = i;
    while rest.get(i).is_some_and(u8::is_ascii_digit) {
        i += 1;
    }
    if i == digits_start || rest.get(i) != Some(&b'>') {
        return None;
    }
    let bits = std::str::from_utf8(&rest[digits_start..i])
        .ok()
        .and_then(|s| s.parse().ok());
    Some(HeaderElement {
        span: at..at + i + 1,
        bits,
    })
}

/// End of a raw-text element body: the offset of its `</name` closer, or the
/// document end when there is none.
fn raw_text_end(doc: &[u8], from: usize, name: &[u8]) -> usize {
    let mut i = from;
    while let Some(lt) = find(doc, b"</", i) {
        let name_end = lt + 2 + name.len();
        if doc.len() >= name_end
            && doc[lt + 2..name_end].eq_ignore_ascii_case(name)
            && doc
                .get(name_end)
                .is_none_or(|&b| is_space(b) || b == b'/' || b == b'>')
        {
            return lt;
        }
        i = lt + 2;
    }
    doc.len()
}

pub fn scan(doc: &[u8]) -> Result<ScanResult<'_>, UnterminatedTag<'_>> {
    let mut result = ScanResult {
        document: doc,
        sites: Vec::new(),
        tags: Vec::new(),
        headers: Vec::new(),
    };
    let mut state = State::Text;
    let mut tag_start = 0;
    let mut name_start = 0;
    let mut name_end = 0;
    let mut closing = false;
    let mut i = 0;

    let site = |result: &mut ScanResult, offset: usize, kind| {
        result.sites.push(CandidateSite {
            offset,
            original: doc[offset],
            kind,
        })
    };

    while i < doc.len() {
        let c = doc[i];
        match state {
            State::Text => {
                let Some(lt) = doc[i..].iter().position(|&b| b == b'<').map(|p| p + i) else {
                    i = doc.len();
                    continue;
                };
                if let Some(header) = header_at(doc, lt) {
                    i = header.span.end;
                    result.headers.push(header);
                    continue;
                }
                let next = doc.get(lt + 1).copied();
                let after = doc.get(lt + 2).copied();
                match next {
                    Some(b'!') if doc[lt..].starts_with(b"<!--") => {
                        match find(doc, b"-->", lt + 4) {
                            Some(end) => i = end + 3,
                            None => {
                                return Err(UnterminatedTag {
                                    offset: lt,
                                    partial: result,
                                })
                            }
                        }
                    }
                    Some(b'!') | Some(b'?') => {
                        tag_start = lt;
                        state = State::BogusTag;
                        i = lt + 2;
                    }
                    Some(n) if n.is_ascii_alphabetic() => {
                        tag_start = lt;
                        closing = false;
                        name_start = lt + 1;
                        state = State::TagName;
                        i = lt + 1;
                    }
                    Some(b'/') => match after {
                        Some(a) if a.is_ascii_alphabetic() => {
                            tag_start = lt;
                            closing = true;
                            name_start = lt + 2;
                            state = State::TagName;
                            i = lt + 2;
                        }
                        Some(b'>') => i = lt + 3,
                        Some(_) => {
                            tag_start = lt;
                            state = State::BogusTag;
                            i = lt + 2;
                        }
                        // "</" at the very end is plain text
                        None => i = doc.len(),
                    },
                    _ => i = lt + 1,
                }
                continue;
            }
            State::TagName => {
                if c.is_ascii_alphabetic() {
                    site(&mut result, i, SiteKind::TagName);
                } else if is_space(c) || c == b'/' {
                    name_end = i;
                    state = State::BeforeAttrName;
                } else if c == b'>' {
                    name_end = i;
                }
            }
            State::BeforeAttrName => {
                if c.is_ascii_alphabetic() {
                    site(&mut result, i, SiteKind::AttrName);
                    state = State::AttrName;
                } else if c == b'"' || c == b'\'' {
                    state = State::AttrValueQuoted(c);
                } else if !is_space(c) && c != b'/' && c != b'>' {
                    state = State::AttrName;
                }
            }
            State::AttrName => {
                if c.is_ascii_alphabetic() {
                    site(&mut result, i, SiteKind::AttrName);
                } else if is_space(c) {
                    state = State::AfterAttrName;
                } else if c == b'/' {
                    state = State::BeforeAttrName;
                } else if c == b'=' {
                    state = State::BeforeAttrValue;
                }
            }
            State::AfterAttrName => {
                if c.is_ascii_alphabetic() {
                    site(&mut result, i, SiteKind::AttrName);
                    state = State::AttrName;
                } else if c == b'=' {
                    state = State::BeforeAttrValue;
                } else if c == b'/' {
                    state = State::BeforeAttrName;
                } else if c == b'"' || c == b'\'' {
                    state = State::AttrValueQuoted(c);
                } else if !is_space(c) && c != b'>' {
                    state = State::AttrName;
                }
            }
            State::BeforeAttrValue => {
                if c == b'"' || c == b'\'' {
                    state = State::AttrValueQuoted(c);
                } else if !is_space(c) && c != b'>' {
                    state = State::AttrValueUnquoted;
                }
            }
            State::AttrValueQuoted(quote) => {
                if c == quote {
                    state = State::BeforeAttrName;
                }
            }
            State::AttrValueUnquoted => {
                if is_space(c) {
                    state = State::BeforeAttrName;
                }
            }
            State::BogusTag => {
                if c == b'>' {
                    state = State::Text;
                }
            }
        }

        if c == b'>' && !matches!(state, State::AttrValueQuoted(_) | State::Text) {
            let tag = Tag {
                start: tag_start,
                end: i + 1,
                name: name_start..name_end,
                closing,
            };
            i += 1;
            state = State::Text;
            let name = &doc[tag.name.clone()];
            if !tag.closing {
                if name.eq_ignore_ascii_case(b"plaintext") {
                    i = doc.len();
                } else if let Some(raw) = RAW_TEXT_ELEMENTS
                    .iter()
                    .find(|raw| name.eq_ignore_ascii_case(raw))
                {
                    i = raw_text_end(doc, i, raw);
                }
            }
            result.tags.push(tag);
            continue;
        }
        i += 1;
    }

    if state != State::Text {
        return Err(UnterminatedTag {
            offset: tag_start,
            partial: result,
        });
    }
    Ok(result)
}
