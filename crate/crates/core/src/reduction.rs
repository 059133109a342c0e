//! Integer sorting through the BWT.
//!
//! Each bit `x_i[j]` of each value becomes the phrase
//! `x_i[j] 2 x_i (i-1) (j-1)` over `{0, 1, 2}`, fields fixed-width and
//! most significant bit first. Suffixes starting with `2` sort last, by
//! value, then index, then bit position, so the last `2n log2 n` BWT
//! symbols are the bits of the sorted values.

use alloc::format;
use alloc::vec::Vec;

use crate::bwt::bwt_forward;
use crate::util::{ceil_log2, floor_log2};
use crate::{Error, Machine, Result, Symbol};

/// Largest supported instance size.
pub const MAX_N: u64 = 1 << 31;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortInstance {
    values: Vec<u64>,
    /// Trailing padding values, dropped after sorting.
    padding: usize,
}

/// Field widths of one phrase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhraseWidths {
    pub value: u32,
    pub index: u32,
    pub position: u32,
}

impl PhraseWidths {
    /// For `n = 2^lg`: values take `2 lg` bits, indices `lg` and bit
    /// positions `log2 lg + 1`.
    pub fn for_n(n: u64) -> Self {
        let lg = floor_log2(n);
        PhraseWidths {
            value: 2 * lg,
            index: lg,
            position: ceil_log2(u64::from(lg)) + 1,
        }
    }

    pub fn phrase_len(self) -> u64 {
        2 + u64::from(self.value + self.index + self.position)
    }
}

impl SortInstance {
    /// `values.len()` must be a power of two `n >= 2` and every value below
    /// `2^(2 log2 n)`.
    pub fn new(values: Vec<u64>) -> Result<Self> {
        let n = values.len() as u64;
        if n < 2 || !n.is_power_of_two() || n > MAX_N {
            return Err(Error::InvalidInput(format!(
                "instance size {n} is not a power of two in 2..=2^31"
            )));
        }
        let w = PhraseWidths::for_n(n).value;
        if let Some(v) = values.iter().find(|&&v| v >> w != 0) {
            return Err(Error::InvalidInput(format!("value {v} does not fit in {w} bits")));
        }
        Ok(SortInstance { values, padding: 0 })
    }

    /// Pads `values` with the largest representable value up to the
    /// smallest power of two `n` whose `2 log2 n`-bit fields hold them all.
    pub fn padded(mut values: Vec<u64>) -> Result<Self> {
        let len = values.len();
        let top = values.iter().copied().max().unwrap_or(0);
        let mut n = (len as u64).max(2).next_power_of_two();
        while n <= MAX_N && top >> PhraseWidths::for_n(n).value != 0 {
            n *= 2;
        }
        let max = (1u64 << PhraseWidths::for_n(n).value) - 1;
        values.resize(n as usize, max);
        let mut inst = SortInstance::new(values)?;
        inst.padding = n as usize - len;
        Ok(inst)
    }

    pub fn n(&self) -> u64 {
        self.values.len() as u64
    }

    pub fn values(&self) -> &[u64] {
        &self.values[..self.values.len() - self.padding]
    }

    pub fn widths(&self) -> PhraseWidths {
        PhraseWidths::for_n(self.n())
    }

    /// Length of [`encode_instance`]'s output.
    pub fn encoded_len(&self) -> u64 {
        let w = self.widths();
        self.n() * u64::from(w.value) * w.phrase_len()
    }
}

fn push_field(out: &mut Vec<Symbol>, x: u64, width: u32) {
    out.extend((0..width).rev().map(|b| (x >> b & 1) as Symbol));
}

/// The ternary string for `inst`.
pub fn encode_instance(inst: &SortInstance) -> Vec<Symbol> {
    let w = inst.widths();
    let mut out = Vec::with_capacity(inst.encoded_len() as usize);
    for (i, &x) in inst.values.iter().enumerate() {
        for j in 0..w.value {
            out.push((x >> (w.value - 1 - j) & 1) as Symbol);
            out.push(2);
            push_field(&mut out, x, w.value);
            push_field(&mut out, i as u64, w.index);
            push_field(&mut out, u64::from(j), w.position);
        }
    }
    out
}

/// Splits `tail` into `n` words of `2 log2 n` bits, most significant first.
pub fn decode_sorted(tail: &[Symbol], n: u64) -> Result<Vec<u64>> {
    if n < 2 || !n.is_power_of_two() || n > MAX_N {
        return Err(Error::InvalidInput(format!("instance size {n} is not a power of two in 2..=2^31")));
    }
    let w = PhraseWidths::for_n(n).value as usize;
    if tail.len() as u64 != n * w as u64 {
        return Err(Error::Length(format!(
            "expected {} bits for {n} values, got {}",
            n * w as u64,
            tail.len()
        )));
    }
    tail.chunks(w)
        .map(|word| {
            word.iter().try_fold(0u64, |acc, &b| match b {
                0 | 1 => Ok(acc << 1 | u64::from(b)),
                _ => Err(Error::InvalidInput(format!("symbol {b} is not a bit"))),
            })
        })
        .collect()
}

/// Sorts `inst` (stably) by taking the BWT of its encoding on `m`.
pub fn sort_via_bwt(m: &mut Machine, inst: &SortInstance) -> Result<Vec<u64>> {
    let s = encode_instance(inst);
    let t = bwt_forward(m, &s)?;
    let bits = (inst.n() * u64::from(inst.widths().value)) as usize;
    let tail: Vec<Symbol> = t.as_slice()[t.len() - bits..].iter().map(|&c| c.saturating_sub(1)).collect();
    let mut sorted = decode_sorted(&tail, inst.n())?;
    sorted.truncate(sorted.len() - inst.padding);
    Ok(sorted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::MachineBudget;
    use alloc::vec;
    use proptest::prelude::*;

    fn machine(inst: &SortInstance) -> Machine {
        Machine::new(MachineBudget::polylog(inst.encoded_len()))
    }

    #[test]
    fn widths_and_lengths() {
        let w = PhraseWidths::for_n(4);
        assert_eq!((w.value, w.index, w.position), (4, 2, 2));
        let inst = SortInstance::new(vec![5, 3, 12, 3]).unwrap();
        assert_eq!(encode_instance(&inst).len() as u64, inst.encoded_len());
        assert_eq!(inst.encoded_len(), 4 * 4 * 10);
        let zero = SortInstance::new(vec![0, 0]).unwrap();
        let s = encode_instance(&zero);
        assert_eq!(s.len(), 2 * 2 * 6);
        assert_eq!(&s[..6], [0, 2, 0, 0, 0, 0]);
    }

    #[test]
    fn invalid_instances() {
        assert!(SortInstance::new(vec![1, 2, 3]).is_err());
        assert!(SortInstance::new(vec![16, 0, 0, 0]).is_err());
        assert!(SortInstance::new(vec![7]).is_err());
    }

    #[test]
    fn only_leading_bits_precede_a_two() {
        let inst = SortInstance::new(vec![9, 15, 0, 6]).unwrap();
        let s = encode_instance(&inst);
        let phrase = inst.widths().phrase_len() as usize;
        for (p, pair) in s.windows(2).enumerate() {
            if pair[1] == 2 {
                assert_eq!(p % phrase, 0);
            }
        }
    }

    #[test]
    fn decode_examples() {
        let tail: Vec<Symbol> = b"0011001101011100".iter().map(|&b| Symbol::from(b - b'0')).collect();
        assert_eq!(decode_sorted(&tail, 4).unwrap(), [3, 3, 5, 12]);
        assert_eq!(decode_sorted(&[0; 16], 4).unwrap(), [0; 4]);
        assert!(matches!(decode_sorted(&[0; 15], 4), Err(Error::Length(_))));
    }

    #[test]
    fn sort_examples() {
        let inst = SortInstance::new(vec![5, 3, 12, 3]).unwrap();
        assert_eq!(sort_via_bwt(&mut machine(&inst), &inst).unwrap(), [3, 3, 5, 12]);
        let inst = SortInstance::new(vec![7; 4]).unwrap();
        assert_eq!(sort_via_bwt(&mut machine(&inst), &inst).unwrap(), [7; 4]);
        let inst = SortInstance::padded(vec![9, 1, 63]).unwrap();
        assert_eq!(inst.n(), 8);
        assert_eq!(sort_via_bwt(&mut machine(&inst), &inst).unwrap(), [1, 9, 63]);
    }

    proptest! {
        #[test]
        fn matches_comparison_sort(lg in 1u32..6, seed in proptest::collection::vec(any::<u64>(), 32)) {
            let n = 1usize << lg;
            let values: Vec<u64> = seed[..n].iter().map(|v| v % (1 << (2 * lg))).collect();
            let inst = SortInstance::new(values.clone()).unwrap();
            let mut expected = values;
            expected.sort_unstable();
            prop_assert_eq!(sort_via_bwt(&mut machine(&inst), &inst).unwrap(), expected);
        }
    }
}
