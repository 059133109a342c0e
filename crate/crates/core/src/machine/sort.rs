//! Balanced two-way merge sort on two streams.
//!
//! Run formation reads the input once, sorts `R = memory_bits / record_bits`
//! records at a time in memory and writes the runs to the scratch stream.
//! Each merge round then sweeps the source stream once (primary head on the
//! left run of each pair, auxiliary head on the right run) and writes the
//! merged runs to the other stream. With `N` records that is
//! `ceil(log2 ceil(N / R))` rounds and at most `2 * (rounds + 1)` passes.
//!
//! Memory declarations cover the record buffer; loop counters are
//! `O(log N)` bits and are not charged.

use alloc::format;
use alloc::vec::Vec;

use super::{Machine, StreamId};
use crate::{Error, Result};

/// Number of merge rounds for `n` records with run capacity `cap`.
pub fn merge_rounds(n: u64, cap: u64) -> u32 {
    if n == 0 || cap == 0 {
        return 0;
    }
    crate::util::ceil_log2(n.div_ceil(cap))
}

/// Upper bound on the passes [`two_stream_merge_sort`] makes.
pub fn sort_pass_bound(n: u64, cap: u64) -> u64 {
    2 * (u64::from(merge_rounds(n, cap)) + 1)
}

/// Stable sort of the records on `input` by `key`, using `scratch` as the
/// second stream. Returns the stream holding the sorted records, rewound.
/// The other stream's contents are left undefined.
pub fn two_stream_merge_sort<K, F>(
    m: &mut Machine,
    input: StreamId,
    scratch: StreamId,
    key: F,
) -> Result<StreamId>
where
    K: Ord,
    F: Fn(u128) -> K,
{
    assert_ne!(input, scratch, "sort needs two distinct streams");
    let bits = u64::from(m.record_bits(input));
    let cap = m.budget().memory_bits / bits;
    if cap < 2 {
        return Err(Error::Budget(format!(
            "run capacity {cap} < 2 with {} memory bits and {bits}-bit records",
            m.budget().memory_bits
        )));
    }
    let cap = usize::try_from(cap).unwrap_or(usize::MAX);

    m.rewind(input)?;
    m.rewind(scratch)?;
    m.reformat(scratch, bits as u32)?;

    // Run formation.
    let buffered = cap.min(m.len(input));
    m.declare_memory(buffered as u64 * bits)?;
    let mut buf: Vec<u128> = Vec::with_capacity(buffered);
    let mut n = 0usize;
    loop {
        buf.clear();
        while buf.len() < cap {
            match m.read(input) {
                Some(r) => buf.push(r),
                None => break,
            }
        }
        if buf.is_empty() {
            break;
        }
        buf.sort_by_key(|&r| key(r));
        for &r in &buf {
            m.write(scratch, r);
        }
        n += buf.len();
        if buf.len() < cap {
            break;
        }
    }
    drop(buf);
    m.truncate(scratch);
    m.rewind(input)?;
    m.rewind(scratch)?;

    // Merge rounds.
    m.declare_memory(2 * bits)?;
    let (mut src, mut dst) = (scratch, input);
    let mut run = cap;
    while run < n {
        let mut start = 0;
        while start < n {
            let left = run.min(n - start);
            let right = run.min(n - start - left);
            m.aux_skip(src, left);
            m.merge_runs(src, dst, left, right, &key);
            m.skip(src, right);
            start += left + right;
        }
        m.truncate(dst);
        m.rewind(src)?;
        m.rewind(dst)?;
        core::mem::swap(&mut src, &mut dst);
        run = run.saturating_mul(2);
    }
    Ok(src)
}
