use alloc::format;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Destination for coded bits.
pub trait BitSink {
    fn push_bit(&mut self, bit: bool);

    /// Appends the low `width` bits of `value`, most significant first.
    fn push_bits(&mut self, value: u64, width: u32) {
        for i in (0..width).rev() {
            self.push_bit((value >> i) & 1 == 1);
        }
    }

    /// Elias gamma code of `x >= 1`.
    fn push_gamma(&mut self, x: u64) {
        assert!(x >= 1, "gamma code needs x >= 1");
        let width = crate::util::floor_log2(x) + 1;
        for _ in 1..width {
            self.push_bit(false);
        }
        self.push_bits(x, width);
    }
}

/// Sink that only counts bits.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BitCount(pub u64);

impl BitSink for BitCount {
    #[inline]
    fn push_bit(&mut self, _bit: bool) {
        self.0 += 1;
    }
}

impl BitSink for BitBuffer {
    #[inline]
    fn push_bit(&mut self, bit: bool) {
        self.push(bit);
    }
}

/// Exact-length bit sequence, packed MSB-first, with a read cursor.
///
/// Padding bits in the last byte are always zero, so two buffers holding the
/// same bits compare equal regardless of their cursors.
#[derive(Debug, Clone, Default)]
pub struct BitBuffer {
    bytes: Vec<u8>,
    len: u64,
    cursor: u64,
}

impl PartialEq for BitBuffer {
    fn eq(&self, other: &Self) -> bool {
        self.len == other.len && self.bytes == other.bytes
    }
}

impl Eq for BitBuffer {}

impl BitBuffer {
    pub fn new() -> Self {
        Self::default()
    }

    /// Takes `len` bits from `bytes` (MSB-first). Bits past `len` are ignored.
    pub fn from_bytes(mut bytes: Vec<u8>, len: u64) -> Result<Self> {
        let need = len.div_ceil(8);
        if (bytes.len() as u64) < need {
            return Err(Error::Format(format!(
                "{len} bits need {need} bytes, got {}",
                bytes.len()
            )));
        }
        bytes.truncate(need as usize);
        if !len.is_multiple_of(8) {
            let last = bytes.len() - 1;
            bytes[last] &= 0xffu8 << (8 - len % 8);
        }
        Ok(BitBuffer {
            bytes,
            len,
            cursor: 0,
        })
    }

    pub fn from_bits(bits: impl IntoIterator<Item = bool>) -> Self {
        let mut b = BitBuffer::new();
        for bit in bits {
            b.push(bit);
        }
        b
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Packed bytes, zero-padded to a byte boundary.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    #[inline]
    pub fn push(&mut self, bit: bool) {
        let off = (self.len % 8) as u32;
        if off == 0 {
            self.bytes.push(0);
        }
        if bit {
            *self.bytes.last_mut().unwrap() |= 0x80 >> off;
        }
        self.len += 1;
    }

    pub fn append(&mut self, other: &BitBuffer) {
        for bit in other.iter() {
            self.push(bit);
        }
    }

    #[inline]
    pub fn get(&self, i: u64) -> Option<bool> {
        (i < self.len).then(|| self.bytes[(i / 8) as usize] & (0x80 >> (i % 8)) != 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.get(i).unwrap())
    }

    pub fn cursor(&self) -> u64 {
        self.cursor
    }

    pub fn rewind(&mut self) {
        self.cursor = 0;
    }

    pub fn remaining(&self) -> u64 {
        self.len - self.cursor
    }

    #[inline]
    pub fn read_bit(&mut self) -> Option<bool> {
        let bit = self.get(self.cursor)?;
        self.cursor += 1;
        Some(bit)
    }

    /// Reads `width` bits MSB-first, or `None` (cursor unchanged) if fewer remain.
    pub fn read_bits(&mut self, width: u32) -> Option<u64> {
        if self.remaining() < u64::from(width) {
            return None;
        }
        let mut v = 0;
        for _ in 0..width {
            v = (v << 1) | u64::from(self.read_bit().unwrap());
        }
        Some(v)
    }

    pub fn read_gamma(&mut self) -> Result<u64> {
        read_gamma_from(|| {
            self.read_bit()
                .ok_or_else(|| Error::Decode("truncated gamma code".into()))
        })
    }
}

/// Reads an Elias gamma code bit by bit.
pub(crate) fn read_gamma_from(mut next: impl FnMut() -> Result<bool>) -> Result<u64> {
    let mut zeros = 0u32;
    while !next()? {
        zeros += 1;
        if zeros >= 64 {
            return Err(Error::Decode("gamma code longer than 64 bits".into()));
        }
    }
    let mut v = 1u64;
    for _ in 0..zeros {
        v = (v << 1) | u64::from(next()?);
    }
    Ok(v)
}
