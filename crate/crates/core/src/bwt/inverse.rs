use alloc::vec::Vec;

use super::rank::{list_rank, perm_fields};
use super::{BwtString, SENTINEL};
use crate::machine::two_stream_merge_sort;
use crate::util::{bits_for, Field};
use crate::{Error, Machine, Result, StreamId, Symbol};

/// Inverts the BWT on the two given streams. `t` holds the shifted BWT
/// symbols (`0` = `$`), each fitting in `cb` bits, rewound. Returns the
/// stream holding the text symbols (unshifted, sentinel removed) in order,
/// rewound, and the other stream.
///
/// A stable sort of the positions of `t` by character lists, for each row
/// `r`, the row whose rotation starts one text position later. Ranking that
/// permutation from row 0 (the rotation starting at `$`) walks the text
/// left to right; the first characters of the visited rows spell `$s`.
pub(crate) fn inverse_on_streams(
    m: &mut Machine,
    t: StreamId,
    other: StreamId,
    total: u64,
    cb: u32,
) -> Result<(StreamId, StreamId)> {
    let w = bits_for(total);
    let (pos, ch) = (Field::new(0, w), Field::new(w, cb));
    m.declare_memory(4 * u64::from(w) + u64::from(cb))?;

    m.rewind(t)?;
    m.rewind(other)?;
    m.reformat(other, w + cb)?;
    let mut sentinels = 0;
    for p in 0..total {
        let x = m.read(t).ok_or_else(|| Error::InvalidInput("BWT stream too short".into()))?;
        if x == u128::from(SENTINEL) {
            sentinels += 1;
        }
        m.write(other, ch.put(x as u64) | pos.put(p));
    }
    m.rewind(t)?;
    m.rewind(other)?;
    if sentinels != 1 {
        return Err(Error::InvalidInput(alloc::format!(
            "a BWT image has exactly one sentinel, found {sentinels}"
        )));
    }
    let sorted = two_stream_merge_sort(m, other, t, |r| ch.get(r))?;
    let spare = if sorted == other { t } else { other };

    let (pi_f, pch_f, pbits) = perm_fields(total, cb);
    m.reformat(spare, pbits)?;
    while let Some(r) = m.read(sorted) {
        m.write(spare, pi_f.put(pos.get(r)) | pch_f.put(ch.get(r)));
    }
    m.rewind(sorted)?;
    m.rewind(spare)?;

    let (nodes, free, nl, c) = list_rank(m, spare, sorted, total, 0, cb)?;
    if c != total {
        return Err(Error::InvalidInput(alloc::format!(
            "not a BWT image: the row permutation splits into cycles ({c} of {total} rows reachable)"
        )));
    }
    let ordered = two_stream_merge_sort(m, nodes, free, |r| core::cmp::Reverse(nl.dist.get(r)))?;
    let out = if ordered == nodes { free } else { nodes };
    m.reformat(out, cb.max(1))?;
    let first = m.read(ordered).map(|r| nl.ch.get(r));
    debug_assert_eq!(first, Some(u64::from(SENTINEL)));
    while let Some(r) = m.read(ordered) {
        m.write(out, u128::from(nl.ch.get(r) - 1));
    }
    m.rewind(ordered)?;
    m.rewind(out)?;
    Ok((out, ordered))
}

/// Recovers `s` from the BWT of `s$`, on two streams attached to `m`.
pub fn bwt_inverse(m: &mut Machine, t: &BwtString) -> Result<Vec<Symbol>> {
    let total = t.len() as u64;
    let cb = bits_for(u64::from(t.text_sigma()));
    let a = m.attach_stream(t.as_slice().iter().map(|&x| u128::from(x)), cb)?;
    let b = m.attach_stream(core::iter::empty(), cb)?;
    let (text, _) = inverse_on_streams(m, a, b, total, cb)?;
    let mut s = Vec::with_capacity(t.len() - 1);
    while let Some(r) = m.read(text) {
        s.push(r as Symbol);
    }
    m.rewind(text)?;
    Ok(s)
}
