//! Base coders: bit buffers, move-to-front, zero-run-length coding and
//! adaptive arithmetic coding.

mod arith;
mod bits;
mod mtf;
mod rle;

pub use arith::{ac_decode, ac_encode, ArithDecoder, ArithEncoder, KtTable, C_AC, MAX_TOTAL};
pub use bits::{BitBuffer, BitCount, BitSink};
pub use mtf::{mtf_decode, mtf_encode, Mtf};
pub use rle::{rle_decode, rle_encode, RleDecoder, RleEncoder};
