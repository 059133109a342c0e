use alloc::vec;
use alloc::vec::Vec;

use super::{BwtString, SENTINEL};
use crate::Symbol;

// Suffixes of `s$` compare like slices of `s`: a proper prefix is smaller,
// exactly as if it were followed by the sentinel.
#[inline]
fn suffix_less(s: &[Symbol], i: usize, j: usize) -> bool {
    s[i..] < s[j..]
}

fn before(s: &[Symbol], i: usize) -> Symbol {
    if i == 0 {
        SENTINEL
    } else {
        s[i - 1] + 1
    }
}

/// Packs up to `width` upcoming symbols of a suffix into one word, so most
/// suffix comparisons cost a single integer compare. Symbols are stored
/// shifted by one and the end of the string reads as zero. With symbols too
/// wide to pack, the width is zero and every comparison falls through.
struct Window {
    bits: u32,
    width: usize,
    mask: u32,
}

impl Window {
    fn new(s: &[Symbol]) -> Self {
        let top = u64::from(s.iter().copied().max().unwrap_or(0)) + 1;
        let bits = 64 - top.leading_zeros();
        let width = (32 / bits) as usize;
        let used = bits as usize * width;
        let mask = if used == 32 { u32::MAX } else { (1 << used) - 1 };
        Window { bits, width, mask }
    }

    #[inline]
    fn value(s: &[Symbol], i: usize) -> u32 {
        // Only wraps for symbols too wide to pack, where the value is unused.
        s.get(i).map_or(0, |&x| x.wrapping_add(1))
    }

    fn key(&self, s: &[Symbol], i: usize) -> u32 {
        (i..i + self.width).fold(0, |k, t| self.slide(k, Self::value(s, t)))
    }

    #[inline]
    fn slide(&self, key: u32, next: u32) -> u32 {
        if self.width == 0 {
            0
        } else {
            // Shift in 64 bits: a single 32-bit symbol fills the whole key.
            (((u64::from(key) << self.bits) | u64::from(next)) as u32) & self.mask
        }
    }
}

const BATCH: usize = 16;

/// BWT by counting: the suffix at `i` has rank equal to the number of
/// suffixes smaller than it, and contributes the character before it at
/// that rank. Keeps only a fixed number of counters besides the output;
/// ranks for a batch of suffixes are counted in one scan.
pub fn bwt_logspace_oracle(s: &[Symbol]) -> BwtString {
    let total = s.len() + 1;
    let mut out = vec![SENTINEL; total];
    let win = Window::new(s);
    for first in (0..total).step_by(BATCH) {
        let count = BATCH.min(total - first);
        let mut targets = [0u32; BATCH];
        for (l, t) in targets.iter_mut().enumerate().take(count) {
            *t = win.key(s, first + l);
        }
        let mut ranks = [0u32; BATCH];
        let mut key = win.key(s, 0);
        for j in 0..total {
            let mut tie = false;
            for l in 0..BATCH {
                // Bounded by `total`; wrapping keeps the loop vectorizable
                // when overflow checks are on.
                ranks[l] = ranks[l].wrapping_add(u32::from(key < targets[l]));
                tie |= key == targets[l];
            }
            if tie {
                break_ties(s, &win, j, first, count, key, &targets, &mut ranks);
            }
            key = win.slide(key, Window::value(s, j + win.width));
        }
        for l in 0..count {
            out[ranks[l] as usize] = before(s, first + l);
        }
    }
    BwtString::new(out).expect("exactly one suffix starts at 0")
}

// Equal windows: both suffixes have `width` more symbols, compare the rest.
// Unused target slots hold zero, which only the empty suffix can match.
#[cold]
#[inline(never)]
#[allow(clippy::too_many_arguments)]
fn break_ties(
    s: &[Symbol],
    win: &Window,
    j: usize,
    first: usize,
    count: usize,
    key: u32,
    targets: &[u32; BATCH],
    ranks: &mut [u32; BATCH],
) {
    for l in 0..count {
        let i = first + l;
        if key == targets[l] && j != i && suffix_less(s, j + win.width, i + win.width) {
            ranks[l] += 1;
        }
    }
}

/// BWT by sorting all rotations of `s$`, compared cyclically.
pub fn bwt_rotation_oracle(s: &[Symbol]) -> BwtString {
    let mut text: Vec<Symbol> = s.iter().map(|&x| x + 1).collect();
    text.push(SENTINEL);
    let total = text.len();
    let rotation = |r: usize| text[r..].iter().chain(&text[..r]);
    let mut rows: Vec<usize> = (0..total).collect();
    rows.sort_by(|&a, &b| rotation(a).cmp(rotation(b)));
    BwtString::new(rows.iter().map(|&r| text[(r + total - 1) % total]).collect()).unwrap()
}
