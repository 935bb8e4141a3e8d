//! Hide bits in the letter case of HTML tags and program source code.
//!
//! Three channels are provided:
//!
//! * [`html`]: flips the case of letters in tag and attribute names.
//! * [`caseless`]: flips the case of keyword and identifier letters in
//!   case-insensitive languages such as Pascal or BASIC.
//! * [`ident`]: appends an underscore to local and static variable names in
//!   C-like sources to encode a 1 bit.
//!
//! [`analysis`] provides histograms and invariance checks for cover/stego
//! pairs.

pub mod analysis;
pub mod bitcodec;
pub mod case;
pub mod caseless;
mod error;
pub mod html;
pub mod ident;
pub mod site;

pub use bitcodec::{BitVector, XorKey};
pub use error::{Error, Result};
pub use site::{CandidateSite, SiteKind};
