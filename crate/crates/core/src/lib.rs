//! Compression algorithms for the read/write-streams model.
//!
//! Data lives on sequentially accessed streams (tapes) owned by a
//! [`Machine`]; algorithms move heads one record at a time, rewind to start
//! another pass, and declare their working memory at checkpoints. The
//! machine counts passes per stream and tracks the peak declared memory, so
//! every algorithm in this crate reports exactly the two resources the model
//! bounds.
//!
//! The crate is `no_std` and needs only `alloc`.
//!
//! Modules:
//!
//! * [`machine`]: streams, budgets, usage reports and the two-stream merge sort.
//! * [`entropy`]: empirical entropy `H_0`, `H_k` and the modified `H_k*` total.
//! * [`coders`]: move-to-front, zero-run-length and adaptive arithmetic coding.
//! * [`universal`]: one-pass block-wise universal compressor.
//! * [`bwt`]: two-stream suffix array, BWT, permutation ranking, BWT inversion
//!   and the entropy-only compression pipeline.
//! * [`period`] and [`grammar`]: minimum periods and straight-line grammars
//!   for periodic strings.
//! * [`debruijn`]: De Bruijn cycles, their count and low-entropy adversarial strings.
//! * [`reduction`]: integer sorting through the BWT of a ternary string.

#![no_std]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod bwt;
pub mod coders;
pub mod debruijn;
pub mod entropy;
mod error;
pub mod grammar;
pub mod machine;
pub mod period;
pub mod reduction;
pub mod universal;
mod util;

pub use error::{Error, Result};
pub use machine::{Machine, MachineBudget, StreamId, UsageReport};

/// Symbols are small unsigned integers `0..sigma`.
pub type Symbol = u32;
