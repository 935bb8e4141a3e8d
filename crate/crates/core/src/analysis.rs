//! Cover/stego comparison: byte histograms and invariance checks.

use std::collections::HashSet;
use std::fmt;

use crate::case;
use crate::caseless::{self, LanguageProfile, Strategy};
use crate::error::Result;
use crate::html::{self, LengthMode};
use crate::ident;
use crate::site::CandidateSite;

/// Occurrence count of every byte value.
#[derive(Clone, PartialEq, Eq)]
pub struct Histogram([u64; 256]);

impl Histogram {
    pub fn get(&self, byte: u8) -> u64 {
        self.0[byte as usize]
    }

    pub fn counts(&self) -> &[u64; 256] {
        &self.0
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    /// Combined count of a letter in both cases.
    pub fn folded(&self, letter: u8) -> u64 {
        let lower = case::to_lower(letter);
        self.get(lower) + self.get(case::to_upper(lower))
    }
}

impl fmt::Debug for Histogram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.0.iter().enumerate().filter(|(_, &c)| c > 0))
            .finish()
    }
}

pub fn histogram(document: &[u8]) -> Histogram {
    let mut counts = [0u64; 256];
    for &b in document {
        counts[b as usize] += 1;
    }
    Histogram(counts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HistogramRow {
    pub byte: u8,
    pub cover: u64,
    pub stego: u64,
}

impl HistogramRow {
    pub fn delta(&self) -> i64 {
        self.stego as i64 - self.cover as i64
    }
}

/// Case-folded counts for one letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LetterPair {
    /// Lowercase form.
    pub letter: u8,
    pub cover: u64,
    pub stego: u64,
}

#[derive(Debug, Clone)]
pub struct HistogramReport {
    pub rows: Vec<HistogramRow>,
    pub pairs: Vec<LetterPair>,
    pub cover_total: u64,
    pub stego_total: u64,
}

impl HistogramReport {
    /// Letter pairs whose folded count changed, i.e. more than case moved.
    pub fn flagged_pairs(&self) -> Vec<LetterPair> {
        self.pairs
            .iter()
            .filter(|p| p.cover != p.stego)
            .copied()
            .collect()
    }

    pub fn changed_bytes(&self) -> usize {
        self.rows.iter().filter(|r| r.delta() != 0).count()
    }

    /// Sum of positive deltas: how many bytes moved into another bucket.
    pub fn moved(&self) -> u64 {
        self.rows.iter().map(|r| r.delta().max(0) as u64).sum()
    }
}

/// Tab-separated rows for every byte present in either document, followed by
/// `#`-prefixed summary lines.
impl fmt::Display for HistogramReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows.iter().filter(|r| r.cover > 0 || r.stego > 0) {
            writeln!(
                f,
                "{}\t{}\t{}\t{}",
                row.byte,
                row.cover,
                row.stego,
                row.delta()
            )?;
        }
        let flagged = self.flagged_pairs();
        writeln!(
            f,
            "# cover_bytes={} stego_bytes={} changed_buckets={} moved={}",
            self.cover_total,
            self.stego_total,
            self.changed_bytes(),
            self.moved()
        )?;
        write!(f, "# folded_letter_mismatches={}", flagged.len())?;
        for p in &flagged {
            write!(f, " {}:{}->{}", p.letter as char, p.cover, p.stego)?;
        }
        writeln!(f)
    }
}

pub fn compare_histograms(cover: &Histogram, stego: &Histogram) -> HistogramReport {
    let rows = (0..=255u8)
        .map(|byte| HistogramRow {
            byte,
            cover: cover.get(byte),
            stego: stego.get(byte),
        })
        .collect();
    let pairs = (b'a'..=b'z')
        .map(|letter| LetterPair {
            letter,
            cover: cover.folded(letter),
            stego: stego.folded(letter),
        })
        .collect();
    HistogramReport {
        rows,
        pairs,
        cover_total: cover.total(),
        stego_total: stego.total(),
    }
}

/// Channel whose artifacts [`verify_invariance`] should account for.
#[derive(Debug, Clone, Copy)]
pub enum Channel<'p> {
    Html(LengthMode),
    Caseless {
        profile: &'p LanguageProfile,
        strategy: Strategy,
    },
    Ident,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvarianceReport {
    pub holds: bool,
    /// Cover offset of the first difference that is not allowed.
    pub first_divergence: Option<usize>,
    pub detail: String,
}

impl InvarianceReport {
    fn ok() -> Self {
        Self {
            holds: true,
            first_divergence: None,
            detail: "invariant".into(),
        }
    }

    fn diverges(at: usize, detail: impl Into<String>) -> Self {
        Self {
            holds: false,
            first_divergence: Some(at),
            detail: detail.into(),
        }
    }
}

/// Checks that `stego` differs from `cover` only in ways the channel allows:
/// letter case for the case channels, one trailing `_` on identifiers for the
/// identifier channel. Inserted length artifacts are removed first.
///
/// For the case channels every changed byte must also be a carrier site of
/// the cover under the given mode or strategy.
pub fn verify_invariance(cover: &[u8], stego: &[u8], channel: Channel) -> InvarianceReport {
    match channel {
        Channel::Html(LengthMode::InBand) => sites_compare(
            cover,
            stego,
            html::scan(cover).map(|s| s.sites).map_err(Into::into),
        ),
        Channel::Html(LengthMode::HeaderTag) => match html::first_header_span(stego) {
            Some(span) => {
                let mut stripped = stego[..span.start].to_vec();
                stripped.extend_from_slice(&stego[span.end..]);
                let sites = html::scan(cover).map(|s| s.sites).map_err(Into::into);
                sites_compare(cover, &stripped, sites)
            }
            None => InvarianceReport::diverges(0, "stego has no <Header k> element"),
        },
        Channel::Caseless { profile, strategy } => {
            sites_compare(cover, stego, caseless::sites(cover, profile, strategy))
        }
        Channel::Ident => ident_compare(cover, stego),
    }
}

fn sites_compare(
    cover: &[u8],
    stego: &[u8],
    sites: Result<Vec<CandidateSite>>,
) -> InvarianceReport {
    let report = fold_compare(cover, stego);
    if !report.holds {
        return report;
    }
    let sites = match sites {
        Ok(sites) => sites,
        Err(e) => return InvarianceReport::diverges(0, format!("cover does not scan: {e}")),
    };
    let allowed: HashSet<usize> = sites.iter().map(|s| s.offset).collect();
    match (0..cover.len()).find(|&i| cover[i] != stego[i] && !allowed.contains(&i)) {
        Some(at) => InvarianceReport::diverges(
            at,
            format!("case changed outside a carrier site at offset {at}"),
        ),
        None => report,
    }
}

fn fold_compare(cover: &[u8], stego: &[u8]) -> InvarianceReport {
    let mismatch = cover
        .iter()
        .zip(stego)
        .position(|(&c, &s)| case::to_lower(c) != case::to_lower(s));
    match mismatch {
        Some(at) => InvarianceReport::diverges(
            at,
            format!(
                "byte {:#04x} became {:#04x} at offset {at}",
                cover[at], stego[at]
            ),
        ),
        None if cover.len() != stego.len() => {
            let at = cover.len().min(stego.len());
            InvarianceReport::diverges(
                at,
                format!("length changed from {} to {}", cover.len(), stego.len()),
            )
        }
        None => InvarianceReport::ok(),
    }
}

fn ident_compare(cover: &[u8], stego: &[u8]) -> InvarianceReport {
    let body = match ident::read_stego_comment(stego) {
        Ok((_, body)) => body,
        Err(_) => return InvarianceReport::diverges(0, "stego has no stego comment"),
    };
    let (cover_tokens, stego_tokens) = match (ident::lex(cover), ident::lex(body)) {
        (Ok(c), Ok(s)) => (c, s),
        (Err(e), _) | (_, Err(e)) => return InvarianceReport::diverges(0, e.to_string()),
    };
    for (c, s) in cover_tokens.iter().zip(&stego_tokens) {
        if c.kind != s.kind {
            return InvarianceReport::diverges(
                c.span.start,
                format!("token kind {:?} became {:?}", c.kind, s.kind),
            );
        }
        let renamed = c.kind == ident::TokenKind::Identifier
            && s.text.len() == c.text.len() + 1
            && s.text.starts_with(c.text)
            && s.text.ends_with(b"_");
        if c.text != s.text && !renamed {
            return InvarianceReport::diverges(
                c.span.start,
                format!(
                    "token {:?} became {:?}",
                    String::from_utf8_lossy(c.text),
                    String::from_utf8_lossy(s.text)
                ),
            );
        }
    }
    if cover_tokens.len() != stego_tokens.len() {
        return InvarianceReport::diverges(
            cover.len(),
            format!(
                "token count changed from {} to {}",
                cover_tokens.len(),
                stego_tokens.len()
            ),
        );
    }
    InvarianceReport::ok()
}
