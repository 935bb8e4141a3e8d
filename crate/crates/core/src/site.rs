use crate::bitcodec::BitVector;
use crate::case;
use crate::error::{Error, Result};

/// Where a candidate letter was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SiteKind {
    TagName,
    AttrName,
    Keyword,
    Identifier,
}

/// A single letter position able to carry one bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CandidateSite {
    pub offset: usize,
    pub original: u8,
    pub kind: SiteKind,
}

/// Writes `bits` into the first `bits.len()` sites of `doc`.
pub(crate) fn write_bits(doc: &mut [u8], sites: &[CandidateSite], bits: &BitVector) -> Result<()> {
    if bits.len() > sites.len() {
        return Err(Error::Capacity {
            needed: bits.len(),
            available: sites.len(),
        });
    }
    for (site, bit) in sites.iter().zip(bits.iter()) {
        doc[site.offset] = case::stego_char(site.original, bit)?;
    }
    Ok(())
}

/// Reads one bit per site, in order.
pub(crate) fn read_bits(doc: &[u8], sites: &[CandidateSite]) -> BitVector {
    sites
        .iter()
        .filter_map(|site| case::decode_char(doc[site.offset]))
        .collect()
}
