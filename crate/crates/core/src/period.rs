//! Minimum periods.
//!
//! [`min_period_streams`] sorts the suffixes of `s$` on two streams. The
//! suffix just before `s` itself in suffix order gives a candidate period,
//! checked by one comparison pass. The candidate is right whenever it
//! checks out, but it misses periods above `n / 2` (for `ba` the
//! predecessor of `ba` is `a`, which is no border). For that case every
//! doubling round also probes for borders of length `h..2h` using the
//! length-`h` prefix ranks it already has.

use alloc::vec::Vec;

use crate::bwt::{attach_text, prefix_doubling, sigma_of, DoublingRound};
use crate::machine::two_stream_merge_sort;
use crate::util::bits_for;
use crate::{Error, Machine, Result, Symbol};

/// Pass constant: [`min_period_streams`] uses at most
/// `C_PER * ceil(log2 n)^2` passes for `n >= 16`.
pub const C_PER: f64 = 6.0;

/// Smallest `l >= 1` with `s[i] == s[i + l]` wherever both exist.
pub fn min_period_oracle<T: PartialEq>(s: &[T]) -> Result<usize> {
    if s.is_empty() {
        return Err(Error::InvalidInput("empty string has no period".into()));
    }
    Ok((1..=s.len())
        .find(|&l| s[l..] == s[..s.len() - l])
        .unwrap_or(s.len()))
}

/// Whether `l` is a period of `s`.
pub fn is_period<T: PartialEq>(s: &[T], l: usize) -> bool {
    l >= 1 && l <= s.len() && s[l..] == s[..s.len() - l]
}

/// Minimum period of `s`, computed on two streams attached to `m` in
/// `O(log n)` bits of declared memory.
pub fn min_period_streams(m: &mut Machine, s: &[Symbol]) -> Result<usize> {
    if s.is_empty() {
        return Err(Error::InvalidInput("empty string has no period".into()));
    }
    let n = s.len() as u64;
    let sigma = sigma_of(s);
    let (text, scratch) = attach_text(m, s, sigma)?;
    let mut border = 0u64;
    let (sa, other, lay) = prefix_doubling(m, text, scratch, n, sigma, &mut |m, round| {
        border = border.max(probe_borders(m, round)?);
        Ok(())
    })?;
    m.declare_memory(4 * u64::from(bits_for(n)) + u64::from(lay.bits))?;

    // The suffix sorted just before the whole string.
    let mut before = n;
    let mut prev = n;
    while let Some(r) = m.read(sa) {
        let i = lay.idx.get(r);
        if i == 0 {
            before = prev;
        }
        prev = i;
    }
    m.rewind(sa)?;
    let candidate = before;

    // Check it: in start order the record for suffix i + 1 carries s[i].
    let by_idx = two_stream_merge_sort(m, sa, other, |r| lay.idx.get(r))?;
    m.read(by_idx);
    m.aux_skip(by_idx, candidate as usize + 1);
    let mut holds = true;
    while let Some(far) = m.aux_read(by_idx) {
        let near = m.read(by_idx).expect("main head trails the aux head");
        if lay.prev.get(near) != lay.prev.get(far) {
            holds = false;
            break;
        }
    }
    m.rewind(by_idx)?;

    let found = n - border;
    if holds {
        debug_assert_eq!(candidate, found);
        Ok(candidate as usize)
    } else {
        Ok(found as usize)
    }
}

/// Longest border of length in `h..2h` (0 if none), from the length-`h`
/// prefix ranks on `round.a`. A border of length `L = n - p` exists iff the
/// length-`h` blocks at `0` and `p` agree and so do those at `L - h` and
/// `n - h`.
fn probe_borders(m: &mut Machine, round: &DoublingRound) -> Result<u64> {
    let (n, h, lay) = (round.n, round.h, round.layout);
    if h >= n {
        return Ok(0);
    }
    let (a, b) = (round.a, round.b);
    m.declare_memory(4 * u64::from(bits_for(n)))?;

    // Ranks of blocks 0 and n - h, and a copy of all ranks on `b`.
    m.reformat(b, lay.w)?;
    let (mut first, mut last) = (0, 0);
    let mut i = 0u64;
    while let Some(r) = m.read(a) {
        let rank = lay.rank.get(r);
        if i == 0 {
            first = rank;
        }
        if i == n - h {
            last = rank;
        }
        m.write(b, u128::from(rank));
        i += 1;
    }
    m.rewind(a)?;
    m.reverse(b)?;

    // q = L - h runs up from 0 on `a` while p = n - h - q runs down on `b`.
    m.skip(b, h as usize);
    let mut best = 0;
    for q in 0..h.min(n - h) {
        let rank_q = lay.rank.get(m.read(a).expect("q < n"));
        let rank_p = m.read(b).expect("p >= 1") as u64;
        if rank_p == first && rank_q == last {
            best = h + q;
        }
    }
    m.rewind(a)?;
    m.rewind(b)?;
    Ok(best)
}

/// All periods of `s` in increasing order, by direct comparison.
pub fn periods<T: PartialEq>(s: &[T]) -> Vec<usize> {
    (1..=s.len()).filter(|&l| is_period(s, l)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::ceil_log2;
    use crate::MachineBudget;
    use proptest::prelude::*;

    fn streams(s: &[Symbol]) -> (usize, u64) {
        let mut m = Machine::new(MachineBudget::polylog(s.len() as u64));
        let l = min_period_streams(&mut m, s).unwrap();
        (l, m.report().total_passes)
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(min_period_oracle(b"abcabcab").unwrap(), 3);
        assert_eq!(min_period_oracle(b"aaaa").unwrap(), 1);
        assert_eq!(min_period_oracle(b"abcd").unwrap(), 4);
        assert!(min_period_oracle::<u8>(&[]).is_err());
        assert_eq!(periods(b"abaab"), [3, 5]);
    }

    #[test]
    fn stream_examples() {
        assert_eq!(streams(&[0]).0, 1);
        assert_eq!(streams(&[1, 0]).0, 2);
        let s: Vec<Symbol> = (0..1 << 12).map(|i| i % 2).collect();
        assert_eq!(streams(&s).0, 2);
    }

    #[test]
    fn all_binary_strings_up_to_twelve() {
        for n in 1..=12u32 {
            for bits in 0u32..1 << n {
                let s: Vec<Symbol> = (0..n).map(|i| (bits >> i) & 1).collect();
                assert_eq!(streams(&s).0, min_period_oracle(&s).unwrap(), "{s:?}");
            }
        }
    }

    #[test]
    fn passes_stay_polylogarithmic() {
        for lg in [8u32, 12] {
            let n = 1usize << lg;
            for l in [1, 3, n / 2 + 1, n - 1] {
                let s: Vec<Symbol> = (0..n).map(|i| u32::from(i % l == l - 1)).collect();
                let (got, passes) = streams(&s);
                assert_eq!(got, min_period_oracle(&s).unwrap());
                let bound = C_PER * f64::from(ceil_log2(n as u64).pow(2));
                assert!(passes as f64 <= bound, "n={n} l={l}: {passes}");
            }
        }
    }

    proptest! {
        #[test]
        fn planted(base in proptest::collection::vec(0u32..3, 1..20), len in 1usize..200) {
            let s: Vec<Symbol> = (0..len).map(|i| base[i % base.len()]).collect();
            prop_assert_eq!(streams(&s).0, min_period_oracle(&s).unwrap());
        }

        #[test]
        fn random(s in proptest::collection::vec(0u32..2, 1..60)) {
            prop_assert_eq!(streams(&s).0, min_period_oracle(&s).unwrap());
        }
    }
}
