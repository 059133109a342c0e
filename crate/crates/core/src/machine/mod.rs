//! The read/write-streams machine.
//!
//! A [`Machine`] owns up to `max_streams` tapes. Every read and write goes
//! through the machine, which counts records moved and passes completed and
//! enforces the optional pass limit. Memory accounting is cooperative:
//! algorithms call [`Machine::declare_memory`] with the size of their working
//! set and the machine keeps the peak, failing as soon as a declaration
//! exceeds the budget.

mod sort;
mod stream;

use alloc::format;
use alloc::vec::Vec;

pub use sort::{merge_rounds, sort_pass_bound, two_stream_merge_sort};
pub use stream::{Direction, Stream};

use crate::{Error, Result};

/// Handle of a stream attached to a [`Machine`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StreamId(pub(crate) usize);

impl StreamId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Resources a machine may use: `m` bits of memory, `t` streams and
/// optionally at most `p` passes in total.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MachineBudget {
    pub memory_bits: u64,
    pub max_streams: usize,
    pub pass_limit: Option<u64>,
}

impl MachineBudget {
    pub fn new(memory_bits: u64, max_streams: usize) -> Self {
        MachineBudget {
            memory_bits,
            max_streams,
            pass_limit: None,
        }
    }

    pub fn with_pass_limit(mut self, limit: u64) -> Self {
        self.pass_limit = Some(limit);
        self
    }

    /// `64 * ceil(log2 n)^2` bits on two streams, no pass limit. The log is
    /// clamped below at 8 so small inputs over a byte alphabet still have
    /// room for a move-to-front list.
    pub fn polylog(n: u64) -> Self {
        let lg = u64::from(crate::util::ceil_log2(n).max(8));
        MachineBudget::new(64 * lg * lg, 2)
    }
}

/// Resource usage measured over a machine's lifetime.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct UsageReport {
    pub per_stream_passes: Vec<u64>,
    pub total_passes: u64,
    pub peak_declared_memory_bits: u64,
    pub records_read: u64,
    pub records_written: u64,
}

#[derive(Debug, Clone)]
pub struct Machine {
    budget: MachineBudget,
    streams: Vec<Stream>,
    declared: u64,
    peak: u64,
    records_read: u64,
    records_written: u64,
    total_passes: u64,
}

impl Machine {
    pub fn new(budget: MachineBudget) -> Self {
        Machine {
            budget,
            streams: Vec::new(),
            declared: 0,
            peak: 0,
            records_read: 0,
            records_written: 0,
            total_passes: 0,
        }
    }

    pub fn budget(&self) -> &MachineBudget {
        &self.budget
    }

    pub fn stream_count(&self) -> usize {
        self.streams.len()
    }

    pub fn stream(&self, id: StreamId) -> &Stream {
        &self.streams[id.0]
    }

    /// Attaches a new stream holding `contents`, head at position 0.
    pub fn attach_stream<I>(&mut self, contents: I, record_bits: u32) -> Result<StreamId>
    where
        I: IntoIterator<Item = u128>,
    {
        if self.streams.len() >= self.budget.max_streams {
            return Err(Error::Budget(format!(
                "cannot attach stream {}: machine allows {}",
                self.streams.len() + 1,
                self.budget.max_streams
            )));
        }
        if record_bits == 0 || record_bits > 128 {
            return Err(Error::InvalidInput(format!(
                "record width {record_bits} outside 1..=128"
            )));
        }
        let stream = Stream::new(contents.into_iter().collect(), record_bits);
        let mask = stream.mask();
        if stream.records.iter().any(|&r| r & !mask != 0) {
            return Err(Error::InvalidInput(format!(
                "record does not fit in {record_bits} bits"
            )));
        }
        self.streams.push(stream);
        Ok(StreamId(self.streams.len() - 1))
    }

    /// Ensures `count` streams are attached, attaching empty ones as needed,
    /// and returns handles for the first `count`.
    pub fn ensure_streams(&mut self, count: usize, record_bits: u32) -> Result<Vec<StreamId>> {
        while self.streams.len() < count {
            self.attach_stream(core::iter::empty(), record_bits)?;
        }
        Ok((0..count).map(StreamId).collect())
    }

    /// Records the caller's current working-set size.
    pub fn declare_memory(&mut self, bits: u64) -> Result<()> {
        if bits > self.budget.memory_bits {
            return Err(Error::Budget(format!(
                "declared {bits} bits of memory, budget is {}",
                self.budget.memory_bits
            )));
        }
        self.declared = bits;
        self.peak = self.peak.max(bits);
        Ok(())
    }

    pub fn declared_memory(&self) -> u64 {
        self.declared
    }

    /// Reads the record under the primary head and advances it.
    #[inline(always)]
    pub fn read(&mut self, id: StreamId) -> Option<u128> {
        let r = self.streams[id.0].step();
        if r.is_some() {
            self.records_read += 1;
        }
        r
    }

    /// The record the primary head would read next, without moving.
    #[inline(always)]
    pub fn peek(&self, id: StreamId) -> Option<u128> {
        self.streams[id.0].peek()
    }

    /// Reads through the auxiliary forward-only head.
    #[inline(always)]
    pub fn aux_read(&mut self, id: StreamId) -> Option<u128> {
        let r = self.streams[id.0].aux_step();
        if r.is_some() {
            self.records_read += 1;
        }
        r
    }

    /// Moves the primary head over up to `k` records. Equivalent to `k` reads
    /// with the values discarded; returns how many records were passed.
    pub fn skip(&mut self, id: StreamId, k: usize) -> usize {
        let k = self.streams[id.0].skip(k);
        self.records_read += k as u64;
        k
    }

    /// Moves the auxiliary head over up to `k` records.
    pub fn aux_skip(&mut self, id: StreamId, k: usize) -> usize {
        let k = self.streams[id.0].aux_skip(k);
        self.records_read += k as u64;
        k
    }

    /// Merges the `left` records ahead of the primary head of `src` with the
    /// `right` records ahead of its auxiliary head into `dst`, ties going
    /// left. Moves heads and counts records exactly like the equivalent
    /// sequence of reads and writes, without the per-record dispatch.
    pub(crate) fn merge_runs<K: Ord, F: Fn(u128) -> K>(
        &mut self,
        src: StreamId,
        dst: StreamId,
        left: usize,
        right: usize,
        key: &F,
    ) {
        assert_ne!(src, dst, "merge needs two distinct streams");
        let (s, d) = if src.0 < dst.0 {
            let (lo, hi) = self.streams.split_at_mut(dst.0);
            (&mut lo[src.0], &mut hi[0])
        } else {
            let (lo, hi) = self.streams.split_at_mut(src.0);
            (&mut hi[0], &mut lo[dst.0])
        };
        assert_eq!(s.direction, Direction::Forward, "merge reads forward");
        assert_eq!(d.direction, Direction::Forward, "merge writes forward");
        let total = left + right;
        let end = d.head + total;
        if d.records.len() < end {
            d.records.resize(end, 0);
        }
        let out = &mut d.records[d.head..end];
        let a = &s.records[s.head..s.head + left];
        let b = &s.records[s.aux..s.aux + right];
        let (mut i, mut j) = (0, 0);
        if left > 0 && right > 0 {
            let (mut ka, mut kb) = (key(a[0]), key(b[0]));
            loop {
                if ka <= kb {
                    out[i + j] = a[i];
                    i += 1;
                    if i == left {
                        break;
                    }
                    ka = key(a[i]);
                } else {
                    out[i + j] = b[j];
                    j += 1;
                    if j == right {
                        break;
                    }
                    kb = key(b[j]);
                }
            }
        }
        // One run is exhausted; the other fills the rest.
        if i < left {
            out[i + j..].copy_from_slice(&a[i..]);
        } else {
            out[i + j..].copy_from_slice(&b[j..]);
        }
        d.head = end;
        d.moved |= total > 0;
        s.head += left;
        s.aux += right;
        s.moved |= total > 0;
        let moved = total as u64;
        self.records_read += moved;
        self.records_written += moved;
    }

    /// Writes at the primary head and advances it. Writing forward at the
    /// end of the tape extends it.
    #[inline(always)]
    pub fn write(&mut self, id: StreamId, rec: u128) {
        let s = &mut self.streams[id.0];
        debug_assert!(rec & !s.mask() == 0, "record wider than stream");
        s.write(rec);
        self.records_written += 1;
    }

    /// Cuts the tape at the primary head (forward direction only).
    pub fn truncate(&mut self, id: StreamId) {
        let s = &mut self.streams[id.0];
        debug_assert_eq!(s.direction, Direction::Forward);
        let h = s.head;
        s.records.truncate(h);
        s.aux = s.aux.min(h);
    }

    /// Changes the record width of a stream whose contents are about to be
    /// overwritten. Only valid with the head at the start.
    pub fn reformat(&mut self, id: StreamId, record_bits: u32) -> Result<()> {
        let s = &mut self.streams[id.0];
        if s.head != 0 || s.aux != 0 {
            return Err(Error::InvalidInput("reformat requires a rewound stream".into()));
        }
        if record_bits == 0 || record_bits > 128 {
            return Err(Error::InvalidInput(format!(
                "record width {record_bits} outside 1..=128"
            )));
        }
        s.record_bits = record_bits;
        s.records.clear();
        Ok(())
    }

    /// Moves both heads back to the start, forward direction. Counts a pass
    /// if any head moved since the last boundary.
    pub fn rewind(&mut self, id: StreamId) -> Result<()> {
        let s = &mut self.streams[id.0];
        s.head = 0;
        s.aux = 0;
        s.direction = Direction::Forward;
        if s.close_sweep() {
            self.total_passes += 1;
            self.check_passes()?;
        }
        Ok(())
    }

    /// Reverses the primary head in place. Counts a pass if any head moved
    /// since the last boundary.
    pub fn reverse(&mut self, id: StreamId) -> Result<()> {
        let s = &mut self.streams[id.0];
        s.direction = match s.direction {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        };
        if s.close_sweep() {
            self.total_passes += 1;
            self.check_passes()?;
        }
        Ok(())
    }

    fn check_passes(&self) -> Result<()> {
        match self.budget.pass_limit {
            Some(limit) if self.total_passes > limit => Err(Error::PassLimit {
                limit,
                used: self.total_passes,
            }),
            _ => Ok(()),
        }
    }

    pub fn record_bits(&self, id: StreamId) -> u32 {
        self.streams[id.0].record_bits
    }

    pub fn len(&self, id: StreamId) -> usize {
        self.streams[id.0].len()
    }

    pub fn is_empty(&self, id: StreamId) -> bool {
        self.streams[id.0].is_empty()
    }

    /// Passes completed so far over all streams, counting open sweeps.
    pub fn total_passes(&self) -> u64 {
        self.streams.iter().map(Stream::passes).sum()
    }

    pub fn report(&self) -> UsageReport {
        let per_stream_passes: Vec<u64> = self.streams.iter().map(Stream::passes).collect();
        UsageReport {
            total_passes: per_stream_passes.iter().sum(),
            per_stream_passes,
            peak_declared_memory_bits: self.peak,
            records_read: self.records_read,
            records_written: self.records_written,
        }
    }
}
