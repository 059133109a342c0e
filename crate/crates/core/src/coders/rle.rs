use alloc::vec::Vec;

use super::bits::{read_gamma_from, BitBuffer, BitSink};
use crate::{Error, Result};

/// Zero-run-length coder for move-to-front output.
///
/// A run of `r >= 1` zeros is written as `1` followed by `gamma(r)`; a
/// nonzero index `i` as `gamma(i + 1)`, which always starts with `0`.
#[derive(Debug, Clone, Default)]
pub struct RleEncoder {
    run: u64,
}

impl RleEncoder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, index: u32, out: &mut impl BitSink) {
        if index == 0 {
            self.run += 1;
        } else {
            self.flush(out);
            out.push_gamma(u64::from(index) + 1);
        }
    }

    /// Writes any pending zero run.
    pub fn flush(&mut self, out: &mut impl BitSink) {
        if self.run > 0 {
            out.push_bit(true);
            out.push_gamma(self.run);
            self.run = 0;
        }
    }

    pub fn state_bits(&self) -> u64 {
        64
    }
}

/// Incremental decoder pulling bits from a caller-supplied source.
#[derive(Debug, Clone, Default)]
pub struct RleDecoder {
    zeros: u64,
}

impl RleDecoder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn next_index(&mut self, mut bit: impl FnMut() -> Result<bool>) -> Result<u32> {
        if self.zeros > 0 {
            self.zeros -= 1;
            return Ok(0);
        }
        if bit()? {
            self.zeros = read_gamma_from(&mut bit)? - 1;
            Ok(0)
        } else {
            // the leading 0 of gamma(i + 1) has been consumed
            let mut zeros = 1u32;
            while !bit()? {
                zeros += 1;
                if zeros > 32 {
                    return Err(Error::Decode("run-length literal too long".into()));
                }
            }
            let mut v = 1u64;
            for _ in 0..zeros {
                v = (v << 1) | u64::from(bit()?);
            }
            u32::try_from(v - 1).map_err(|_| Error::Decode("run-length literal too large".into()))
        }
    }

    /// True while a decoded zero run still has zeros to hand out.
    pub fn has_pending(&self) -> bool {
        self.zeros > 0
    }
}

pub fn rle_encode(indices: &[u32]) -> BitBuffer {
    let mut out = BitBuffer::new();
    let mut enc = RleEncoder::new();
    for &i in indices {
        enc.push(i, &mut out);
    }
    enc.flush(&mut out);
    out
}

pub fn rle_decode(buf: &BitBuffer) -> Result<Vec<u32>> {
    let mut buf = buf.clone();
    buf.rewind();
    let mut dec = RleDecoder::new();
    let mut out = Vec::new();
    while buf.remaining() > 0 || dec.has_pending() {
        out.push(dec.next_index(|| {
            buf.read_bit()
                .ok_or_else(|| Error::Decode("truncated run-length stream".into()))
        })?);
    }
    Ok(out)
}
