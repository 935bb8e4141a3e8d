//! Case channel inside HTML tags.
//!
//! Letters of tag names and attribute names are rewritten to lowercase for a 0
//! bit and uppercase for a 1 bit. Browsers treat both spellings identically,
//! so the rendered page does not change.

mod scanner;

pub use scanner::{scan, HeaderElement, ScanResult, Tag, UnterminatedTag};

use crate::bitcodec::{self, maybe_xor, BitVector, XorKey, LENGTH_PREFIX_BITS};
use crate::error::{Error, Result};
use crate::site;

/// Where the payload bit count is stored.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum LengthMode {
    /// First 32 channel bits hold the count.
    #[default]
    InBand,
    /// A literal `<Header k>` element holds the count.
    HeaderTag,
}

/// Maximum payload bits the cover can carry in `mode`.
pub fn capacity(document: &[u8], mode: LengthMode) -> Result<usize> {
    let sites = scan(document)?.sites.len();
    Ok(match mode {
        LengthMode::InBand => sites.saturating_sub(LENGTH_PREFIX_BITS),
        LengthMode::HeaderTag => sites,
    })
}

pub fn embed(
    cover: &[u8],
    payload: &BitVector,
    mode: LengthMode,
    key: Option<&XorKey>,
) -> Result<Vec<u8>> {
    let scan = scan(cover)?;
    let data = maybe_xor(payload, key);
    let mut stego = cover.to_vec();
    match mode {
        LengthMode::InBand => {
            let framed = bitcodec::frame(&data)?;
            site::write_bits(&mut stego, &scan.sites, &framed)?;
            Ok(stego)
        }
        LengthMode::HeaderTag => {
            if !scan.headers.is_empty() {
                return Err(Error::AmbiguousCover {
                    reason: "cover already contains a <Header k> element".into(),
                });
            }
            site::write_bits(&mut stego, &scan.sites, &data)?;
            Ok(splice_header(&stego, header_position(&scan), payload.len()))
        }
    }
}

pub fn extract_bits(stego: &[u8], mode: LengthMode, key: Option<&XorKey>) -> Result<BitVector> {
    let scan = scan(stego)?;
    let channel = site::read_bits(stego, &scan.sites);
    let data = match mode {
        LengthMode::InBand => bitcodec::unframe(&channel)?,
        LengthMode::HeaderTag => {
            let declared = header_value(&scan)?;
            if declared > channel.len() {
                return Err(Error::Truncated {
                    declared,
                    available: channel.len(),
                });
            }
            channel.prefix(declared)
        }
    };
    Ok(maybe_xor(&data, key))
}

/// Extracts the payload as bytes. Fails with `E_PARTIAL_BYTE` when the hidden
/// bit count is not a whole number of bytes; use [`extract_bits`] for those.
pub fn extract(stego: &[u8], mode: LengthMode, key: Option<&XorKey>) -> Result<Vec<u8>> {
    bitcodec::bits_to_bytes(&extract_bits(stego, mode, key)?)
}

/// Inserts `<Header k>` right after the first `<head ...>` start tag, or at the
/// start of the document when there is none.
pub fn insert_header(document: &[u8], bits: usize) -> Result<Vec<u8>> {
    let scan = scan(document)?;
    Ok(splice_header(document, header_position(&scan), bits))
}

/// Reads `k` from the first `<Header k>` element.
pub fn read_header(document: &[u8]) -> Result<usize> {
    match scan(document) {
        Ok(scan) => header_value(&scan),
        Err(e) => header_value(&e.partial),
    }
}

pub fn header_element(bits: usize) -> String {
    format!("<Header {bits}>")
}

fn header_position(scan: &ScanResult) -> usize {
    scan.tags
        .iter()
        .find(|t| !t.closing && scan.tag_name(t).eq_ignore_ascii_case(b"head"))
        .map_or(0, |t| t.end)
}

fn splice_header(document: &[u8], at: usize, bits: usize) -> Vec<u8> {
    let header = header_element(bits);
    let mut out = Vec::with_capacity(document.len() + header.len());
    out.extend_from_slice(&document[..at]);
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(&document[at..]);
    out
}

fn header_value(scan: &ScanResult) -> Result<usize> {
    let header = scan
        .headers
        .first()
        .ok_or_else(|| Error::no_header("no <Header k> element"))?;
    header
        .bits
        .ok_or_else(|| Error::no_header("<Header k> value out of range"))
}

/// Span of the length element inserted by header-tag embedding, if any.
pub(crate) fn first_header_span(document: &[u8]) -> Option<std::ops::Range<usize>> {
    let headers = match scan(document) {
        Ok(s) => s.headers,
        Err(e) => e.partial.headers,
    };
    headers.into_iter().next().map(|h| h.span)
}
