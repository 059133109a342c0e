use alloc::format;
use alloc::vec::Vec;

use super::inverse::inverse_on_streams;
use super::sa::{attach_text, no_hook, prefix_doubling};
use crate::coders::{ArithDecoder, ArithEncoder, BitBuffer, BitSink, KtTable, Mtf, RleDecoder, RleEncoder};
use crate::util::bits_for;
use crate::{Error, Machine, Result, Symbol};

pub const EO_MAGIC: [u8; 4] = *b"RWSE";
pub const EO_VERSION: u8 = 1;

/// Output of [`entropy_only_compress`]: the text length, its alphabet size
/// and the arithmetic-coded bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntropyOnly {
    pub n: u64,
    pub sigma: u16,
    pub payload: BitBuffer,
}

/// Bits fed through an adaptive binary arithmetic coder.
struct BinaryAc<'a> {
    enc: ArithEncoder,
    model: KtTable,
    out: &'a mut BitBuffer,
}

impl BitSink for BinaryAc<'_> {
    fn push_bit(&mut self, bit: bool) {
        let x = Symbol::from(bit);
        let (lo, hi) = self.model.interval(0, x);
        self.enc.encode(lo, hi, self.model.total(0), self.out);
        self.model.update(0, x);
    }
}

fn coder_state_bits(sigma: u32, n: u64) -> u64 {
    let mtf = Mtf::new(sigma + 1).state_bits();
    mtf + 64 + 96 + KtTable::state_bits(2, 1, 64 * (n + 1)) + u64::from(bits_for(n + 1))
}

/// BWT, then one coding pass: move-to-front over `$` and the text alphabet
/// (`$` first), zero-run-length coding, and adaptive binary arithmetic
/// coding of the run-length bits.
pub fn entropy_only_compress(m: &mut Machine, s: &[Symbol], sigma: u32) -> Result<EntropyOnly> {
    if sigma == 0 || sigma > u32::from(u16::MAX) {
        return Err(Error::InvalidInput(format!("alphabet size {sigma} outside 1..=65535")));
    }
    if let Some(pos) = s.iter().position(|&x| x >= sigma) {
        return Err(Error::InvalidInput(format!(
            "symbol {} at position {pos} is outside an alphabet of {sigma}",
            s[pos]
        )));
    }
    let n = s.len() as u64;
    let (text, scratch) = attach_text(m, s, sigma)?;
    let (sa, _, lay) = prefix_doubling(m, text, scratch, n, sigma, &mut no_hook)?;

    m.declare_memory(coder_state_bits(sigma, n))?;
    let mut payload = BitBuffer::new();
    let mut mtf = Mtf::new(sigma + 1);
    let mut rle = RleEncoder::new();
    let mut ac = BinaryAc {
        enc: ArithEncoder::new(),
        model: KtTable::new(2, 1),
        out: &mut payload,
    };
    while let Some(r) = m.read(sa) {
        let index = mtf.encode(lay.prev.get(r) as Symbol)?;
        rle.push(index, &mut ac);
    }
    rle.flush(&mut ac);
    let BinaryAc { enc, out, .. } = ac;
    enc.finish(out);
    m.rewind(sa)?;
    Ok(EntropyOnly {
        n,
        sigma: sigma as u16,
        payload,
    })
}

/// Inverse of [`entropy_only_compress`]: decodes the BWT lazily onto a
/// stream, then inverts it on two streams.
pub fn entropy_only_decompress(m: &mut Machine, eo: &EntropyOnly) -> Result<Vec<Symbol>> {
    let sigma = u32::from(eo.sigma);
    if sigma == 0 {
        return Err(Error::Format("alphabet size 0".into()));
    }
    let total = eo
        .n
        .checked_add(1)
        .ok_or_else(|| Error::Format("length overflows".into()))?;
    let cb = bits_for(u64::from(sigma));
    let t = m.attach_stream(core::iter::empty(), cb)?;
    let other = m.attach_stream(core::iter::empty(), cb)?;

    m.declare_memory(coder_state_bits(sigma, eo.n))?;
    let mut src = eo.payload.clone();
    src.rewind();
    let mut dec = ArithDecoder::new(&mut src)?;
    let mut model = KtTable::new(2, 1);
    let mut rle = RleDecoder::new();
    let mut mtf = Mtf::new(sigma + 1);
    for _ in 0..total {
        let index = rle.next_index(|| {
            let t = model.total(0);
            let (x, lo, hi) = model.find(0, dec.target(t)?);
            dec.consume(lo, hi, t, &mut src)?;
            model.update(0, x);
            Ok(x == 1)
        })?;
        m.write(t, u128::from(mtf.decode(index)?));
    }
    if rle.has_pending() {
        return Err(Error::Decode("zero run extends past the end of the text".into()));
    }
    dec.finish(&eo.payload)?;
    m.rewind(t)?;

    let (text, _) = inverse_on_streams(m, t, other, total, cb)?;
    let mut s = Vec::with_capacity(eo.n as usize);
    while let Some(r) = m.read(text) {
        s.push(r as Symbol);
    }
    m.rewind(text)?;
    Ok(s)
}
