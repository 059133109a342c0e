//! One-pass block-wise universal compression.
//!
//! The input stream is cut into blocks of `c` symbols. Each block is read
//! into memory, coded with an adaptive order-`k` Krichevsky–Trofimov
//! arithmetic coder for every `k <= k_max` that fits the block, and the
//! shortest result is emitted together with its `k`. Memory is then reused
//! for the next block, so the input is read exactly once.
//!
//! For every block `s_i` and every allowed `k`, the payload is at most
//! `|s_i| H_k(s_i) + B sigma^(k+1) log2 c` bits for block sizes `c >= 2`,
//! with [`B`] calibrated on random and structured blocks.

use alloc::format;
use alloc::vec::Vec;

use crate::coders::{ArithDecoder, ArithEncoder, BitBuffer, BitCount, BitSink, KtTable};
use crate::{Error, Machine, Result, StreamId, Symbol};

pub const MAGIC: [u8; 4] = *b"RWS1";
pub const VERSION: u8 = 1;

/// Framing bits per block: one byte of `k` and a 32-bit payload length.
pub const H_BITS: u64 = 40;

/// Per-block redundancy constant, see the module docs.
pub const B: f64 = 2.0;

/// Memory constant: peak declared memory is at most
/// `c log2 sigma + B_MEM sigma^(k_max+1) log2 c` bits for `c >= 16`.
pub const B_MEM: f64 = 16.0;

/// Blocks never grow beyond this many symbols.
pub const MAX_BLOCK: u32 = 1 << 24;

/// Bits of coder state charged on top of the models.
const CODER_BITS: u64 = 96;

/// How block sizes evolve along the input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum BlockSchedule {
    /// Every block has `c` symbols (the last may be shorter).
    Fixed(u32),
    /// Blocks start at `c` symbols and double every `sigma` blocks, up to
    /// [`MAX_BLOCK`]. For inputs whose length is unknown in advance.
    Growing(u32),
}

impl BlockSchedule {
    pub fn initial(self) -> u32 {
        match self {
            BlockSchedule::Fixed(c) | BlockSchedule::Growing(c) => c,
        }
    }

    /// Sizes of successive blocks (before truncation by the input length).
    pub fn sizes(self, sigma: u32) -> impl Iterator<Item = u32> {
        let per_size = u64::from(sigma.max(1));
        let mut index = 0u64;
        core::iter::from_fn(move || {
            let size = match self {
                BlockSchedule::Fixed(c) => c,
                BlockSchedule::Growing(c) => {
                    let doublings = (index / per_size).min(32) as u32;
                    let grown = u64::from(c) << doublings;
                    grown.min(u64::from(MAX_BLOCK.max(c))) as u32
                }
            };
            index += 1;
            Some(size)
        })
    }
}

/// One coded block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub k: u8,
    pub payload: BitBuffer,
}

/// Framed output of [`compress`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressedContainer {
    pub magic: [u8; 4],
    pub version: u8,
    pub n: u64,
    pub sigma: u16,
    pub schedule: BlockSchedule,
    pub blocks: Vec<Block>,
}

impl CompressedContainer {
    /// Payload bits plus per-block framing, excluding the fixed header.
    pub fn body_bits(&self) -> u64 {
        self.blocks.iter().map(|b| b.payload.len() + H_BITS).sum()
    }

    pub fn payload_bits(&self) -> u64 {
        self.blocks.iter().map(|b| b.payload.len()).sum()
    }
}

/// Largest `k` with `sigma^k <= len` (0 for unary alphabets or empty blocks).
pub fn max_order(sigma: u32, len: u64) -> u32 {
    if sigma <= 1 || len == 0 {
        return 0;
    }
    let mut k = 0;
    let mut p = u64::from(sigma);
    while p <= len {
        k += 1;
        p = match p.checked_mul(u64::from(sigma)) {
            Some(p) => p,
            None => break,
        };
    }
    k
}

fn pow(sigma: u32, k: u32) -> u64 {
    u64::from(sigma).pow(k)
}

/// Declared memory for a block of `c` symbols coded with orders up to `k_max`:
/// the block itself, one order-`k` count table at a time, and the coder.
pub fn block_memory_bits(c: u32, sigma: u32, k_max: u32) -> u64 {
    let block = libm::ceil(f64::from(c) * libm::log2(f64::from(sigma.max(1)))) as u64;
    block + KtTable::state_bits(sigma, pow(sigma, k_max) + 1, u64::from(c)) + CODER_BITS
}

/// Codes `block` with an adaptive order-`k` model. Symbol `i >= k` is coded
/// in the context of the `k` symbols before it; the first `k` symbols share
/// one extra order-0 context.
fn encode_order(block: &[Symbol], sigma: u32, k: u32, out: &mut impl BitSink) {
    let contexts = pow(sigma, k) as usize;
    let mut model = KtTable::new(sigma, contexts + 1);
    let mut enc = ArithEncoder::new();
    let mut ctx = 0usize;
    for (i, &x) in block.iter().enumerate() {
        let c = if i < k as usize { contexts } else { ctx };
        let (lo, hi) = model.interval(c, x);
        enc.encode(lo, hi, model.total(c), out);
        model.update(c, x);
        if k > 0 {
            ctx = (ctx * sigma as usize + x as usize) % contexts;
        }
    }
    enc.finish(out);
}

fn decode_order(payload: &BitBuffer, len: usize, sigma: u32, k: u32) -> Result<Vec<Symbol>> {
    let contexts = pow(sigma, k) as usize;
    let mut model = KtTable::new(sigma, contexts + 1);
    let mut src = payload.clone();
    src.rewind();
    let mut dec = ArithDecoder::new(&mut src)?;
    let mut ctx = 0usize;
    let mut out = Vec::with_capacity(len);
    for i in 0..len {
        let c = if i < k as usize { contexts } else { ctx };
        let total = model.total(c);
        let (x, lo, hi) = model.find(c, dec.target(total)?);
        dec.consume(lo, hi, total, &mut src)?;
        model.update(c, x);
        if k > 0 {
            ctx = (ctx * sigma as usize + x as usize) % contexts;
        }
        out.push(x);
    }
    dec.finish(payload)?;
    Ok(out)
}

/// Codes `block` at every order up to `min(k_max, max_order(sigma, |block|))`
/// and returns the order with the fewest bits (smallest `k` on ties) and
/// its payload.
pub fn choose_order(block: &[Symbol], sigma: u32, k_max: u32) -> (u8, BitBuffer) {
    let top = k_max.min(max_order(sigma, block.len() as u64));
    let mut best = (0u32, u64::MAX);
    for k in 0..=top {
        let mut count = BitCount::default();
        encode_order(block, sigma, k, &mut count);
        if count.0 < best.1 {
            best = (k, count.0);
        }
    }
    let mut payload = BitBuffer::new();
    encode_order(block, sigma, best.0, &mut payload);
    debug_assert_eq!(payload.len(), best.1);
    (best.0 as u8, payload)
}

fn check_params(sigma: u32, schedule: BlockSchedule, k_max: u32) -> Result<()> {
    if sigma == 0 || sigma > u32::from(u16::MAX) {
        return Err(Error::InvalidInput(format!("alphabet size {sigma} outside 1..=65535")));
    }
    let c = schedule.initial();
    if c == 0 || c > MAX_BLOCK {
        return Err(Error::InvalidInput(format!("block size {c} outside 1..={MAX_BLOCK}")));
    }
    let limit = max_order(sigma, u64::from(c));
    if k_max > limit {
        return Err(Error::InvalidInput(format!(
            "k_max {k_max} exceeds floor(log_sigma c) = {limit}"
        )));
    }
    Ok(())
}

/// Compresses the symbols on `input` (each `< sigma`) in one pass.
pub fn compress(
    m: &mut Machine,
    input: StreamId,
    sigma: u32,
    schedule: BlockSchedule,
    k_max: u32,
) -> Result<CompressedContainer> {
    check_params(sigma, schedule, k_max)?;
    m.rewind(input)?;
    let mut blocks = Vec::new();
    let mut n = 0u64;
    let mut block: Vec<Symbol> = Vec::new();
    let mut declared_for = 0;
    for size in schedule.sizes(sigma) {
        if size != declared_for {
            m.declare_memory(block_memory_bits(size, sigma, k_max))?;
            declared_for = size;
        }
        block.clear();
        while block.len() < size as usize {
            match m.read(input) {
                Some(r) => {
                    let x = u32::try_from(r).ok().filter(|&x| x < sigma).ok_or_else(|| {
                        Error::InvalidInput(format!(
                            "symbol {r} at position {} outside an alphabet of {sigma}",
                            n + block.len() as u64
                        ))
                    })?;
                    block.push(x);
                }
                None => break,
            }
        }
        if block.is_empty() {
            break;
        }
        n += block.len() as u64;
        let (k, payload) = choose_order(&block, sigma, k_max);
        blocks.push(Block { k, payload });
        if block.len() < size as usize {
            break;
        }
    }
    m.rewind(input)?;
    m.declare_memory(0)?;
    Ok(CompressedContainer {
        magic: MAGIC,
        version: VERSION,
        n,
        sigma: sigma as u16,
        schedule,
        blocks,
    })
}

/// Inverse of [`compress`].
pub fn decompress(container: &CompressedContainer) -> Result<Vec<Symbol>> {
    if container.magic != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    if container.version != VERSION {
        return Err(Error::Format(format!("unsupported version {}", container.version)));
    }
    let sigma = u32::from(container.sigma);
    check_params(sigma, container.schedule, 0)?;
    let mut out = Vec::new();
    let mut left = container.n;
    let mut sizes = container.schedule.sizes(sigma);
    let mut blocks = container.blocks.iter().enumerate();
    while left > 0 {
        let len = u64::from(sizes.next().unwrap()).min(left);
        let (i, b) = blocks.next().ok_or_else(|| {
            Error::Format(format!("{} symbols missing after the last block", left))
        })?;
        if u32::from(b.k) > max_order(sigma, len) {
            return Err(Error::BlockDecode {
                block: i,
                reason: format!("order {} too large for {len} symbols", b.k),
            });
        }
        let syms = decode_order(&b.payload, len as usize, sigma, u32::from(b.k)).map_err(|e| {
            Error::BlockDecode {
                block: i,
                reason: format!("{e}"),
            }
        })?;
        out.extend_from_slice(&syms);
        left -= len;
    }
    if blocks.next().is_some() {
        return Err(Error::Format("more blocks than the header length needs".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::hk;
    use crate::MachineBudget;
    use alloc::vec;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn run(s: &[Symbol], sigma: u32, schedule: BlockSchedule, k_max: u32) -> (CompressedContainer, Machine) {
        let mut m = Machine::new(MachineBudget::new(1 << 40, 1));
        let bits = crate::util::bits_for(u64::from(sigma));
        let a = m.attach_stream(s.iter().map(|&x| u128::from(x)), bits).unwrap();
        let c = compress(&mut m, a, sigma, schedule, k_max).unwrap();
        (c, m)
    }

    fn payload_bound(block: &[Symbol], sigma: u32, k: u32, c: u32) -> f64 {
        let h = if (k as usize) < block.len() {
            block.len() as f64 * hk(block, k as usize).unwrap()
        } else {
            0.0
        };
        h + B * pow(sigma, k + 1) as f64 * libm::log2(f64::from(c))
    }

    #[test]
    fn orders() {
        assert_eq!(max_order(2, 1), 0);
        assert_eq!(max_order(2, 256), 8);
        assert_eq!(max_order(2, 255), 7);
        assert_eq!(max_order(256, 65536), 2);
        assert_eq!(max_order(1, 1000), 0);
    }

    #[test]
    fn unary_input() {
        let s = vec![1u32; 1 << 16];
        let (c, m) = run(&s, 2, BlockSchedule::Fixed(256), 8);
        assert_eq!(c.blocks.len(), 256);
        assert!(c.blocks.iter().all(|b| b.k == 0));
        assert!(c.body_bits() < (1 << 16) / 4, "{}", c.body_bits());
        assert_eq!(m.report().per_stream_passes, [1]);
        assert_eq!(decompress(&c).unwrap(), s);
    }

    #[test]
    fn random_single_block() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 4096;
        let s: Vec<Symbol> = (0..n).map(|_| rng.gen_range(0..2)).collect();
        let (c, _) = run(&s, 2, BlockSchedule::Fixed(n), 4);
        assert_eq!(c.blocks.len(), 1);
        assert!(c.payload_bits() as f64 >= f64::from(n) - 2.0 * libm::log2(f64::from(n)));
        assert_eq!(decompress(&c).unwrap(), s);
    }

    #[test]
    fn empty_input() {
        let (c, m) = run(&[], 3, BlockSchedule::Fixed(16), 1);
        assert_eq!(c.n, 0);
        assert!(c.blocks.is_empty());
        assert_eq!(m.report().total_passes, 0);
        assert!(decompress(&c).unwrap().is_empty());
    }

    #[test]
    fn alternating_block_chooses_order_one() {
        let block: Vec<Symbol> = (0..256).map(|i| i % 2).collect();
        let (k, payload) = choose_order(&block, 2, 8);
        assert_eq!(k, 1);
        assert!(payload.len() < 16, "{}", payload.len());
        let unary = vec![0u32; 256];
        let (k, payload) = choose_order(&unary, 2, 8);
        assert_eq!(k, 0);
        assert!(payload.len() <= 2 * 8);
    }

    #[test]
    fn random_block_order_spread() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let block: Vec<Symbol> = (0..1024).map(|_| rng.gen_range(0..2)).collect();
        let sizes: Vec<u64> = (0..=3)
            .map(|k| {
                let mut cnt = BitCount::default();
                encode_order(&block, 2, k, &mut cnt);
                cnt.0
            })
            .collect();
        let (_, payload) = choose_order(&block, 2, 3);
        assert_eq!(payload.len(), *sizes.iter().min().unwrap());
        // within 8 bits of the minimum only for the orders whose model cost is small
        assert!(sizes[1] <= payload.len() + 8, "{sizes:?}");
    }

    #[test]
    fn wrong_magic_and_truncated_block() {
        let s: Vec<Symbol> = (0..1000).map(|i| (i * i % 5) as Symbol).collect();
        let (c, _) = run(&s, 5, BlockSchedule::Fixed(100), 2);
        let mut bad = c.clone();
        bad.magic = *b"RWS2";
        assert!(matches!(decompress(&bad), Err(Error::Format(_))));
        let mut bad = c.clone();
        bad.version = 9;
        assert!(matches!(decompress(&bad), Err(Error::Format(_))));
        let mut bad = c.clone();
        let p = &bad.blocks[3].payload;
        bad.blocks[3].payload = BitBuffer::from_bits(p.iter().take(p.len() as usize - 3));
        assert!(matches!(decompress(&bad), Err(Error::BlockDecode { block: 3, .. })));
        let mut bad = c;
        bad.blocks.pop();
        assert!(matches!(decompress(&bad), Err(Error::Format(_))));
    }

    #[test]
    fn parameters_are_checked() {
        let mut m = Machine::new(MachineBudget::new(1 << 20, 1));
        let a = m.attach_stream([0u128, 1, 2], 2).unwrap();
        assert!(compress(&mut m, a, 3, BlockSchedule::Fixed(9), 3).is_err());
        assert!(compress(&mut m, a, 2, BlockSchedule::Fixed(9), 0).is_err());
        assert!(compress(&mut m, a, 3, BlockSchedule::Fixed(0), 0).is_err());
    }

    #[test]
    fn budget_and_pass_limit() {
        let mut m = Machine::new(MachineBudget::new(500, 1));
        let a = m.attach_stream((0..1000u128).map(|i| i % 2), 1).unwrap();
        assert!(matches!(
            compress(&mut m, a, 2, BlockSchedule::Fixed(1000), 0),
            Err(Error::Budget(_))
        ));
        let mut m = Machine::new(MachineBudget::new(1 << 20, 1).with_pass_limit(0));
        let a = m.attach_stream((0..1000u128).map(|i| i % 2), 1).unwrap();
        assert!(matches!(
            compress(&mut m, a, 2, BlockSchedule::Fixed(100), 0),
            Err(Error::PassLimit { .. })
        ));
    }

    #[test]
    fn growing_schedule() {
        let sizes: Vec<u32> = BlockSchedule::Growing(4).sizes(2).take(7).collect();
        assert_eq!(sizes, [4, 4, 8, 8, 16, 16, 32]);
        let s: Vec<Symbol> = (0..5000).map(|i| (i / 3 % 4) as Symbol).collect();
        let (c, m) = run(&s, 4, BlockSchedule::Growing(16), 2);
        assert_eq!(m.report().per_stream_passes, [1]);
        assert_eq!(decompress(&c).unwrap(), s);
        assert!(c.blocks.len() < 5000 / 16);
    }

    #[test]
    fn memory_within_declared_shape() {
        for (sigma, c, k_max) in [(2u32, 256u32, 3u32), (2, 1024, 8), (4, 64, 2), (256, 4096, 1)] {
            let s: Vec<Symbol> = (0..3 * c).map(|i| i * 7 % sigma).collect();
            let (_, m) = run(&s, sigma, BlockSchedule::Fixed(c), k_max);
            let bound = f64::from(c) * libm::log2(f64::from(sigma))
                + B_MEM * pow(sigma, k_max + 1) as f64 * libm::log2(f64::from(c));
            let peak = m.report().peak_declared_memory_bits;
            assert!(peak as f64 <= bound, "sigma {sigma} c {c}: {peak} > {bound}");
        }
    }

    #[test]
    fn payload_within_per_order_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for trial in 0..300 {
            let sigma = [2u32, 3, 4, 16][trial % 4];
            let c = rng.gen_range(2..2000u32);
            let skew = rng.gen_range(0.0..1.0);
            let block: Vec<Symbol> = (0..c)
                .map(|_| if rng.gen_bool(skew) { 0 } else { rng.gen_range(0..sigma) })
                .collect();
            let top = max_order(sigma, u64::from(c)).min(4);
            let (_, payload) = choose_order(&block, sigma, top);
            for k in 0..=top {
                let bound = payload_bound(&block, sigma, k, c);
                assert!(
                    payload.len() as f64 <= bound,
                    "sigma {sigma} c {c} k {k}: {} > {bound}",
                    payload.len()
                );
            }
        }
    }

    proptest! {
        #[test]
        fn round_trip(
            s in proptest::collection::vec(0u32..6, 0..3000),
            c in 1u32..300,
            growing in any::<bool>(),
        ) {
            let k_max = max_order(6, u64::from(c)).min(2);
            let schedule = if growing { BlockSchedule::Growing(c) } else { BlockSchedule::Fixed(c) };
            let (container, m) = run(&s, 6, schedule, k_max);
            prop_assert_eq!(decompress(&container).unwrap(), s.clone());
            prop_assert!(m.report().total_passes <= 1);
        }
    }
}
