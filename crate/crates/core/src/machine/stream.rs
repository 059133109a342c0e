use alloc::vec::Vec;

/// Direction the primary head moves in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// A sequentially accessed tape of fixed-width records.
///
/// The head sits between cells: a forward step reads `records[head]` and
/// moves to `head + 1`, a backward step reads `records[head - 1]` and moves
/// to `head - 1`. The only non-sequential repositioning is [`rewind`].
///
/// Besides the primary read/write head there is an auxiliary read-only head
/// that only moves forward. Merging reads two runs of the same tape through
/// the two heads in one sweep.
///
/// [`rewind`]: crate::Machine::rewind
#[derive(Debug, Clone)]
pub struct Stream {
    pub(super) records: Vec<u128>,
    pub(super) record_bits: u32,
    pub(super) head: usize,
    pub(super) aux: usize,
    pub(super) direction: Direction,
    pub(super) passes_completed: u64,
    pub(super) moved: bool,
}

impl Stream {
    pub(super) fn new(records: Vec<u128>, record_bits: u32) -> Self {
        Stream {
            records,
            record_bits,
            head: 0,
            aux: 0,
            direction: Direction::Forward,
            passes_completed: 0,
            moved: false,
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn head(&self) -> usize {
        self.head
    }

    pub fn aux_head(&self) -> usize {
        self.aux
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn record_bits(&self) -> u32 {
        self.record_bits
    }

    pub fn passes_completed(&self) -> u64 {
        self.passes_completed
    }

    /// Passes including a sweep that is still open (heads moved since the
    /// last rewind or reversal).
    pub fn passes(&self) -> u64 {
        self.passes_completed + u64::from(self.moved)
    }

    /// The tape contents, for inspection outside the model (tests, final
    /// output hand-off). Algorithms never use this to read data.
    pub fn contents(&self) -> &[u128] {
        &self.records
    }

    #[inline]
    pub(super) fn mask(&self) -> u128 {
        if self.record_bits >= 128 {
            u128::MAX
        } else {
            (1u128 << self.record_bits) - 1
        }
    }

    #[inline(always)]
    pub(super) fn peek(&self) -> Option<u128> {
        match self.direction {
            Direction::Forward => self.records.get(self.head).copied(),
            Direction::Backward => self
                .head
                .checked_sub(1)
                .and_then(|i| self.records.get(i).copied()),
        }
    }

    #[inline(always)]
    pub(super) fn step(&mut self) -> Option<u128> {
        let rec = self.peek()?;
        match self.direction {
            Direction::Forward => self.head += 1,
            Direction::Backward => self.head -= 1,
        }
        self.moved = true;
        Some(rec)
    }

    #[inline(always)]
    pub(super) fn write(&mut self, rec: u128) {
        self.moved = true;
        match self.direction {
            Direction::Forward => {
                match self.records.get_mut(self.head) {
                    Some(cell) => *cell = rec,
                    None => self.records.push(rec),
                }
                self.head += 1;
            }
            Direction::Backward => {
                assert!(self.head > 0, "backward write at start of tape");
                self.head -= 1;
                self.records[self.head] = rec;
            }
        }
    }

    #[inline(always)]
    pub(super) fn aux_step(&mut self) -> Option<u128> {
        let rec = self.records.get(self.aux).copied()?;
        self.aux += 1;
        self.moved = true;
        Some(rec)
    }

    /// Moves the primary head up to `k` records along its direction.
    pub(super) fn skip(&mut self, k: usize) -> usize {
        let k = match self.direction {
            Direction::Forward => k.min(self.records.len().saturating_sub(self.head)),
            Direction::Backward => k.min(self.head),
        };
        match self.direction {
            Direction::Forward => self.head += k,
            Direction::Backward => self.head -= k,
        }
        self.moved |= k > 0;
        k
    }

    pub(super) fn aux_skip(&mut self, k: usize) -> usize {
        let k = k.min(self.records.len().saturating_sub(self.aux));
        self.aux += k;
        self.moved |= k > 0;
        k
    }

    /// Closes the current sweep; returns whether it counted as a pass.
    pub(super) fn close_sweep(&mut self) -> bool {
        let counted = self.moved;
        if counted {
            self.passes_completed += 1;
        }
        self.moved = false;
        counted
    }
}
