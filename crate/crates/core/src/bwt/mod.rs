//! Two-stream Burrows–Wheeler transform and its inverse.
//!
//! * [`suffix_array_streams`] sorts the suffixes of `s$` by prefix doubling;
//!   every round is a handful of sequential passes and two stream sorts.
//! * [`bwt_forward`] reads the character before each suffix in suffix order.
//! * [`rank_permutation`] lists the orbit of a permutation by pointer
//!   jumping, again with every step a sort-join.
//! * [`bwt_inverse`] turns a BWT image into the permutation that maps each
//!   row to the row of the next text position and ranks it.
//! * [`bwt_logspace_oracle`] computes each output character by counting
//!   smaller suffixes, with counters only.
//! * [`entropy_only_compress`] chains the BWT with move-to-front,
//!   zero-run-length and arithmetic coding.
//!
//! Symbols inside a [`BwtString`] are shifted by one: `0` is the sentinel
//! `$` and text symbol `x` is stored as `x + 1`.
//!
//! Measured pass counts stay within `C * ceil(log2 n)^2` for the constants
//! below, at the default budget `64 * ceil(log2 n)^2` bits and `n >= 2^10`.
//! A doubling round costs about `9 + 4 log2(n / R)` passes for sort runs of
//! `R` records, and there are at most `ceil(log2(n + 1))` rounds; one
//! pointer-jumping round costs about `6 + 2 log2(2n / R)`.

mod inverse;
mod oracle;
mod pipeline;
mod rank;
mod sa;

use alloc::format;
use alloc::vec::Vec;

use crate::{Error, Result, Symbol};

pub use inverse::bwt_inverse;
pub use oracle::{bwt_logspace_oracle, bwt_rotation_oracle};
pub use pipeline::{entropy_only_compress, entropy_only_decompress, EntropyOnly, EO_MAGIC, EO_VERSION};
pub use rank::{rank_permutation, Permutation};
pub use sa::{bwt_forward, suffix_array_streams};

pub(crate) use sa::{attach_text, prefix_doubling, DoublingRound};

/// Pass constant for [`suffix_array_streams`].
pub const C_SA: f64 = 5.0;
/// Pass constant for [`bwt_forward`].
pub const C_BWT: f64 = 5.0;
/// Pass constant for [`entropy_only_compress`].
pub const C_PIPE: f64 = 5.0;
/// Size constants for [`entropy_only_compress`] on strings with
/// `H_k = 0`: the payload stays within `A_STAR * |s| H_k*(s) + A_LOG * log2 n`
/// bits.
pub const A_STAR: f64 = 4.0;
pub const A_LOG: f64 = 64.0;
/// Pass constant for [`rank_permutation`].
pub const C_RANK: f64 = 4.0;
/// Pass constant for [`bwt_inverse`].
pub const C_INV: f64 = 4.0;

/// The sentinel `$`, smaller than every text symbol.
pub const SENTINEL: Symbol = 0;

/// BWT of `s$`, shifted so that `$` is `0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BwtString {
    transformed: Vec<Symbol>,
}

impl BwtString {
    /// Wraps a shifted sequence; it must hold exactly one sentinel.
    pub fn new(transformed: Vec<Symbol>) -> Result<Self> {
        let count = transformed.iter().filter(|&&x| x == SENTINEL).count();
        if count != 1 {
            return Err(Error::InvalidInput(format!(
                "a BWT image has exactly one sentinel, found {count}"
            )));
        }
        Ok(BwtString { transformed })
    }

    /// Reads bytes with `b'$'` as the sentinel and every other byte `b` as `b + 1`.
    pub fn from_ascii(s: &[u8]) -> Result<Self> {
        Self::new(
            s.iter()
                .map(|&b| if b == b'$' { SENTINEL } else { Symbol::from(b) + 1 })
                .collect(),
        )
    }

    /// Inverse of [`BwtString::from_ascii`] for symbols that fit in a byte.
    pub fn to_ascii(&self) -> Vec<u8> {
        self.transformed
            .iter()
            .map(|&x| if x == SENTINEL { b'$' } else { (x - 1) as u8 })
            .collect()
    }

    pub fn as_slice(&self) -> &[Symbol] {
        &self.transformed
    }

    pub fn into_inner(self) -> Vec<Symbol> {
        self.transformed
    }

    /// Length including the sentinel.
    pub fn len(&self) -> usize {
        self.transformed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transformed.is_empty()
    }

    pub fn sentinel_position(&self) -> usize {
        self.transformed.iter().position(|&x| x == SENTINEL).unwrap()
    }

    /// Text alphabet size implied by the largest symbol.
    pub fn text_sigma(&self) -> u32 {
        self.transformed.iter().copied().max().unwrap_or(0)
    }
}

/// Alphabet size of a text: one more than its largest symbol.
pub(crate) fn sigma_of(s: &[Symbol]) -> u32 {
    s.iter().copied().max().map_or(1, |m| m + 1)
}
