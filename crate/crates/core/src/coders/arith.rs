//! 32-bit binary arithmetic coding (Witten, Neal and Cleary) with adaptive
//! Krichevsky–Trofimov frequencies.
//!
//! Underflow is handled with pending "follow" bits, which is the bitwise
//! equivalent of carry propagation.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::bits::{BitBuffer, BitSink};
use crate::{Error, Result, Symbol};

const TOP: u64 = (1 << 32) - 1;
const HALF: u64 = 1 << 31;
const Q1: u64 = 1 << 30;
const Q3: u64 = 3 << 30;

/// Frequency totals are kept at or below this; larger tables are halved.
pub const MAX_TOTAL: u64 = 1 << 29;

/// Redundancy constant: on every tested input
/// `|ac_encode(s)| <= n H_0(s) + C_AC (sigma log2 n + 1)`.
pub const C_AC: f64 = 1.0;

#[derive(Debug, Clone)]
pub struct ArithEncoder {
    low: u64,
    high: u64,
    pending: u64,
}

impl Default for ArithEncoder {
    fn default() -> Self {
        Self::new()
    }
}

impl ArithEncoder {
    pub fn new() -> Self {
        ArithEncoder {
            low: 0,
            high: TOP,
            pending: 0,
        }
    }

    fn emit(&mut self, bit: bool, out: &mut impl BitSink) {
        out.push_bit(bit);
        for _ in 0..self.pending {
            out.push_bit(!bit);
        }
        self.pending = 0;
    }

    /// Narrows to the sub-interval `[lo, hi)` of `total`.
    pub fn encode(&mut self, lo: u64, hi: u64, total: u64, out: &mut impl BitSink) {
        debug_assert!(lo < hi && hi <= total && total <= MAX_TOTAL);
        let range = self.high - self.low + 1;
        self.high = self.low + range * hi / total - 1;
        self.low += range * lo / total;
        loop {
            if self.high < HALF {
                self.emit(false, out);
            } else if self.low >= HALF {
                self.emit(true, out);
                self.low -= HALF;
                self.high -= HALF;
            } else if self.low >= Q1 && self.high < Q3 {
                self.pending += 1;
                self.low -= Q1;
                self.high -= Q1;
            } else {
                break;
            }
            self.low <<= 1;
            self.high = (self.high << 1) | 1;
        }
    }

    pub fn finish(mut self, out: &mut impl BitSink) {
        self.pending += 1;
        let bit = self.low >= Q1;
        self.emit(bit, out);
    }

    pub fn state_bits(&self) -> u64 {
        3 * 32
    }
}

/// Decoder reading from a [`BitBuffer`] at its cursor. Bits past the end read
/// as zero; more than 32 of them means the input was corrupt.
#[derive(Debug, Clone)]
pub struct ArithDecoder {
    low: u64,
    high: u64,
    code: u64,
    past_end: u32,
    // every renormalisation shift costs the encoder one bit
    shifts: u64,
    pending: u64,
}

impl ArithDecoder {
    pub fn new(src: &mut BitBuffer) -> Result<Self> {
        let mut d = ArithDecoder {
            low: 0,
            high: TOP,
            code: 0,
            past_end: 0,
            shifts: 0,
            pending: 0,
        };
        for _ in 0..32 {
            d.code = (d.code << 1) | d.next_bit(src)?;
        }
        Ok(d)
    }

    fn next_bit(&mut self, src: &mut BitBuffer) -> Result<u64> {
        match src.read_bit() {
            Some(b) => Ok(u64::from(b)),
            None => {
                self.past_end += 1;
                if self.past_end > 32 {
                    Err(Error::Decode("arithmetic code ran past the end of its input".into()))
                } else {
                    Ok(0)
                }
            }
        }
    }

    /// Position of the code inside the current interval, scaled to `total`.
    pub fn target(&self, total: u64) -> Result<u64> {
        let range = self.high - self.low + 1;
        let t = ((self.code - self.low + 1) * total - 1) / range;
        if self.code < self.low || self.code > self.high || t >= total {
            return Err(Error::Decode("arithmetic code outside the coding interval".into()));
        }
        Ok(t)
    }

    pub fn consume(&mut self, lo: u64, hi: u64, total: u64, src: &mut BitBuffer) -> Result<()> {
        let range = self.high - self.low + 1;
        self.high = self.low + range * hi / total - 1;
        self.low += range * lo / total;
        loop {
            if self.high < HALF {
                self.pending = 0;
            } else if self.low >= HALF {
                self.pending = 0;
                self.low -= HALF;
                self.high -= HALF;
                self.code -= HALF;
            } else if self.low >= Q1 && self.high < Q3 {
                self.pending += 1;
                self.low -= Q1;
                self.high -= Q1;
                self.code = self.code.wrapping_sub(Q1);
            } else {
                break;
            }
            self.low <<= 1;
            self.high = (self.high << 1) | 1;
            self.code = ((self.code << 1) | self.next_bit(src)?) & TOP;
            self.shifts += 1;
        }
        Ok(())
    }

    /// Checks that `code` is exactly what an encoder of the symbols decoded
    /// so far would have emitted: its length and its termination bits.
    pub fn finish(self, code: &BitBuffer) -> Result<()> {
        let len = code.len();
        let expect = self.shifts + 2;
        if expect != len {
            return Err(Error::Decode(format!(
                "arithmetic code has {len} bits, expected {expect}"
            )));
        }
        let bit = self.low >= Q1;
        let tail = self.pending + 2;
        let start = len - tail;
        let ok = (0..tail).all(|i| code.get(start + i) == Some(if i == 0 { bit } else { !bit }));
        if !ok {
            return Err(Error::Decode("arithmetic code has a bad termination".into()));
        }
        Ok(())
    }
}

/// Adaptive KT frequencies for many contexts over one alphabet: symbol `a`
/// with count `c` in a context of total count `t` has frequency `2c + 1` out
/// of `2t + sigma`. Each context is a Fenwick tree over its `sigma` slots.
#[derive(Debug, Clone)]
pub struct KtTable {
    sigma: usize,
    tree: Vec<u32>,
    totals: Vec<u64>,
    top_bit: usize,
}

impl KtTable {
    pub fn new(sigma: u32, contexts: usize) -> Self {
        assert!(sigma >= 1);
        let sigma = sigma as usize;
        assert!(2 * sigma as u64 + 2 < MAX_TOTAL, "alphabet too large");
        let mut tree = vec![0u32; sigma * contexts];
        for ctx in 0..contexts {
            let seg = &mut tree[ctx * sigma..(ctx + 1) * sigma];
            // every slot starts at 1
            for i in 1..=sigma {
                seg[i - 1] += 1;
                let j = i + (i & i.wrapping_neg());
                if j <= sigma {
                    seg[j - 1] += seg[i - 1];
                }
            }
        }
        let top_bit = if sigma == 0 { 0 } else { 1 << crate::util::floor_log2(sigma as u64) };
        KtTable {
            sigma,
            tree,
            totals: vec![sigma as u64; contexts],
            top_bit,
        }
    }

    pub fn sigma(&self) -> u32 {
        self.sigma as u32
    }

    pub fn contexts(&self) -> usize {
        self.totals.len()
    }

    pub fn total(&self, ctx: usize) -> u64 {
        self.totals[ctx]
    }

    fn seg(&self, ctx: usize) -> &[u32] {
        &self.tree[ctx * self.sigma..(ctx + 1) * self.sigma]
    }

    fn prefix(&self, ctx: usize, mut i: usize) -> u64 {
        let seg = self.seg(ctx);
        let mut s = 0u64;
        while i > 0 {
            s += u64::from(seg[i - 1]);
            i &= i - 1;
        }
        s
    }

    /// `[lo, hi)` of symbol `a` in context `ctx`.
    pub fn interval(&self, ctx: usize, a: Symbol) -> (u64, u64) {
        let a = a as usize;
        (self.prefix(ctx, a), self.prefix(ctx, a + 1))
    }

    /// The symbol whose interval contains `target`, and that interval.
    pub fn find(&self, ctx: usize, target: u64) -> (Symbol, u64, u64) {
        let seg = self.seg(ctx);
        let mut pos = 0usize;
        let mut acc = 0u64;
        let mut step = self.top_bit;
        while step > 0 {
            let next = pos + step;
            if next <= self.sigma && acc + u64::from(seg[next - 1]) <= target {
                pos = next;
                acc += u64::from(seg[next - 1]);
            }
            step >>= 1;
        }
        let (lo, hi) = self.interval(ctx, pos as Symbol);
        (pos as Symbol, lo, hi)
    }

    fn add(&mut self, ctx: usize, a: usize, delta: i64) {
        let sigma = self.sigma;
        let seg = &mut self.tree[ctx * sigma..(ctx + 1) * sigma];
        let mut i = a + 1;
        while i <= sigma {
            seg[i - 1] = (i64::from(seg[i - 1]) + delta) as u32;
            i += i & i.wrapping_neg();
        }
        self.totals[ctx] = (self.totals[ctx] as i64 + delta) as u64;
    }

    /// Counts one occurrence of `a` in `ctx`, halving the context's counts
    /// if its total would pass [`MAX_TOTAL`].
    pub fn update(&mut self, ctx: usize, a: Symbol) {
        self.add(ctx, a as usize, 2);
        if self.totals[ctx] > MAX_TOTAL {
            for b in 0..self.sigma {
                let (lo, hi) = self.interval(ctx, b as Symbol);
                let c = (hi - lo - 1) / 2;
                let halved = 2 * (c / 2) + 1;
                self.add(ctx, b, halved as i64 - (hi - lo) as i64);
            }
        }
    }

    /// Memory for `contexts * sigma` counts of up to `max_count` each.
    pub fn state_bits(sigma: u32, contexts: u64, max_count: u64) -> u64 {
        contexts * u64::from(sigma) * u64::from(crate::util::bits_for(2 * max_count + 1))
    }
}

fn check_symbols(s: &[Symbol], sigma: u32) -> Result<()> {
    if sigma == 0 {
        return Err(Error::InvalidInput("alphabet size must be at least 1".into()));
    }
    if let Some(pos) = s.iter().position(|&x| x >= sigma) {
        return Err(Error::InvalidInput(format!(
            "symbol {} at position {pos} is outside an alphabet of {sigma}",
            s[pos]
        )));
    }
    Ok(())
}

/// Adaptive order-0 arithmetic coding. The empty string codes to no bits.
pub fn ac_encode(s: &[Symbol], sigma: u32) -> Result<BitBuffer> {
    check_symbols(s, sigma)?;
    let mut out = BitBuffer::new();
    if s.is_empty() {
        return Ok(out);
    }
    let mut model = KtTable::new(sigma, 1);
    let mut enc = ArithEncoder::new();
    for &x in s {
        let (lo, hi) = model.interval(0, x);
        enc.encode(lo, hi, model.total(0), &mut out);
        model.update(0, x);
    }
    enc.finish(&mut out);
    Ok(out)
}

pub fn ac_decode(buf: &BitBuffer, n: usize, sigma: u32) -> Result<Vec<Symbol>> {
    if sigma == 0 {
        return Err(Error::InvalidInput("alphabet size must be at least 1".into()));
    }
    let mut src = buf.clone();
    src.rewind();
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return Ok(out);
    }
    let mut model = KtTable::new(sigma, 1);
    let mut dec = ArithDecoder::new(&mut src)?;
    for _ in 0..n {
        let total = model.total(0);
        let (x, lo, hi) = model.find(0, dec.target(total)?);
        dec.consume(lo, hi, total, &mut src)?;
        model.update(0, x);
        out.push(x);
    }
    dec.finish(buf)?;
    Ok(out)
}
