use alloc::vec::Vec;

use super::{sigma_of, BwtString};
use crate::machine::two_stream_merge_sort;
use crate::util::{bits_for, Field};
use crate::{Machine, Result, StreamId, Symbol};

/// Record layout for prefix doubling, low bits first: the character before
/// the suffix (shifted, `0` = `$`), the suffix start, the rank of the second
/// half and the rank of the first half.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SaLayout {
    pub prev: Field,
    pub idx: Field,
    pub rank2: Field,
    pub rank: Field,
    pub bits: u32,
    pub w: u32,
}

impl SaLayout {
    pub fn new(n: usize, sigma: u32) -> Self {
        let sb = bits_for(u64::from(sigma));
        let w = bits_for((n as u64 + 1).max(u64::from(sigma) + 1));
        SaLayout {
            prev: Field::new(0, sb),
            idx: Field::new(sb, w),
            rank2: Field::new(sb + w, w),
            rank: Field::new(sb + 2 * w, w),
            bits: sb + 3 * w,
            w,
        }
    }
}

/// State handed to the per-round hook: `a` holds the records of all `n + 1`
/// suffixes in start order, rewound, with `rank` the rank of their length-`h`
/// prefixes. `b` is free scratch and must be left rewound.
pub(crate) struct DoublingRound {
    pub a: StreamId,
    pub b: StreamId,
    pub h: u64,
    pub n: u64,
    pub layout: SaLayout,
}

/// Sorts the suffixes of `s$`, where `s` is the `n` symbols (each `< sigma`)
/// on `text`. Returns the stream holding one record per suffix in suffix
/// order (and the other stream), both rewound.
pub(crate) fn prefix_doubling(
    m: &mut Machine,
    text: StreamId,
    scratch: StreamId,
    n: u64,
    sigma: u32,
    hook: &mut dyn FnMut(&mut Machine, &DoublingRound) -> Result<()>,
) -> Result<(StreamId, StreamId, SaLayout)> {
    let lay = SaLayout::new(n as usize, sigma);
    let total = n + 1;
    let counters = u64::from(lay.bits) + 3 * u64::from(lay.w);

    // Load: one record per suffix, rank = first character.
    m.rewind(text)?;
    m.rewind(scratch)?;
    m.reformat(scratch, lay.bits)?;
    m.declare_memory(counters)?;
    let mut prev = 0u64;
    for i in 0..n {
        let x = m.read(text).expect("text shorter than its length") as u64 + 1;
        m.write(
            scratch,
            lay.rank.put(x) | lay.idx.put(i) | lay.prev.put(prev),
        );
        prev = x;
    }
    m.write(scratch, lay.idx.put(n) | lay.prev.put(prev));
    m.rewind(text)?;
    m.rewind(scratch)?;
    let (mut a, mut b) = (scratch, text);
    if total == 1 {
        return Ok((a, b, lay));
    }

    let mut h = 1u64;
    loop {
        m.declare_memory(counters)?;
        hook(
            m,
            &DoublingRound {
                a,
                b,
                h,
                n,
                layout: lay,
            },
        )?;

        // Copy, then walk the copy `h` records ahead to fetch second halves.
        m.reformat(b, lay.bits)?;
        while let Some(r) = m.read(a) {
            m.write(b, r);
        }
        m.rewind(a)?;
        m.rewind(b)?;
        m.skip(b, h as usize);
        while let Some(r) = m.peek(a) {
            let second = m.read(b).map_or(0, |r2| lay.rank.get(r2) + 1);
            m.write(a, lay.rank2.set(r, second));
        }
        m.rewind(a)?;
        m.rewind(b)?;

        let sorted = two_stream_merge_sort(m, a, b, |r| lay.rank2.and_above(r))?;
        let other = if sorted == a { b } else { a };

        // Dense ranks of the pairs, in place.
        m.declare_memory(counters)?;
        let mut last = None;
        let mut next_rank = 0u64;
        while let Some(r) = m.peek(sorted) {
            let key = lay.rank2.and_above(r);
            if last.is_some_and(|k| k != key) {
                next_rank += 1;
            }
            last = Some(key);
            m.write(sorted, lay.rank.set(r, next_rank));
        }
        m.rewind(sorted)?;
        if next_rank + 1 == total {
            return Ok((sorted, other, lay));
        }

        let by_idx = two_stream_merge_sort(m, sorted, other, |r| lay.idx.get(r))?;
        b = if by_idx == sorted { other } else { sorted };
        a = by_idx;
        h *= 2;
    }
}

/// Attaches `s` and an empty scratch stream to `m`.
pub(crate) fn attach_text(m: &mut Machine, s: &[Symbol], sigma: u32) -> Result<(StreamId, StreamId)> {
    let bits = bits_for(u64::from(sigma.saturating_sub(1)));
    let text = m.attach_stream(s.iter().map(|&x| u128::from(x)), bits)?;
    let scratch = m.attach_stream(core::iter::empty(), bits)?;
    Ok((text, scratch))
}

pub(crate) fn no_hook(_: &mut Machine, _: &DoublingRound) -> Result<()> {
    Ok(())
}

/// Suffix array of `s$` (0-based starts; the sentinel suffix is `n`),
/// computed on two streams attached to `m`.
pub fn suffix_array_streams(m: &mut Machine, s: &[Symbol]) -> Result<Vec<u64>> {
    let sigma = sigma_of(s);
    let (text, scratch) = attach_text(m, s, sigma)?;
    let (sa, _, lay) = prefix_doubling(m, text, scratch, s.len() as u64, sigma, &mut no_hook)?;
    let mut out = Vec::with_capacity(s.len() + 1);
    while let Some(r) = m.read(sa) {
        out.push(lay.idx.get(r));
    }
    m.rewind(sa)?;
    Ok(out)
}

/// BWT of `s$`, computed on two streams attached to `m`.
pub fn bwt_forward(m: &mut Machine, s: &[Symbol]) -> Result<BwtString> {
    let sigma = sigma_of(s);
    let (text, scratch) = attach_text(m, s, sigma)?;
    let (sa, _, lay) = prefix_doubling(m, text, scratch, s.len() as u64, sigma, &mut no_hook)?;
    let mut out = Vec::with_capacity(s.len() + 1);
    while let Some(r) = m.read(sa) {
        out.push(lay.prev.get(r) as Symbol);
    }
    m.rewind(sa)?;
    BwtString::new(out)
}
