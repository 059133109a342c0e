use alloc::format;
use alloc::vec::Vec;

use crate::{Error, Result, Symbol};

fn check_order<T: Ord + Clone>(order: &[T]) -> Result<()> {
    let mut sorted = order.to_vec();
    sorted.sort();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidInput("duplicate symbol in initial order".into()));
    }
    Ok(())
}

/// Move-to-front indices of `s` starting from `initial_order`.
pub fn mtf_encode<T: Ord + Clone>(s: &[T], initial_order: &[T]) -> Result<Vec<u32>> {
    check_order(initial_order)?;
    let mut list = initial_order.to_vec();
    s.iter()
        .enumerate()
        .map(|(pos, x)| {
            let i = list.iter().position(|y| y == x).ok_or_else(|| {
                Error::InvalidInput(format!("symbol at position {pos} is not in the initial order"))
            })?;
            list[..=i].rotate_right(1);
            Ok(i as u32)
        })
        .collect()
}

pub fn mtf_decode<T: Ord + Clone>(indices: &[u32], initial_order: &[T]) -> Result<Vec<T>> {
    check_order(initial_order)?;
    let mut list = initial_order.to_vec();
    indices
        .iter()
        .map(|&i| {
            let i = i as usize;
            if i >= list.len() {
                return Err(Error::Decode(format!(
                    "move-to-front index {i} out of range for {} symbols",
                    list.len()
                )));
            }
            list[..=i].rotate_right(1);
            Ok(list[0].clone())
        })
        .collect()
}

/// Incremental move-to-front over `0..sigma` with the sorted initial order.
#[derive(Debug, Clone)]
pub struct Mtf {
    list: Vec<Symbol>,
}

impl Mtf {
    pub fn new(sigma: u32) -> Self {
        Mtf {
            list: (0..sigma).collect(),
        }
    }

    pub fn encode(&mut self, x: Symbol) -> Result<u32> {
        let i = self
            .list
            .iter()
            .position(|&y| y == x)
            .ok_or_else(|| Error::InvalidInput(format!("symbol {x} outside the alphabet")))?;
        self.list[..=i].rotate_right(1);
        Ok(i as u32)
    }

    pub fn decode(&mut self, i: u32) -> Result<Symbol> {
        let i = i as usize;
        if i >= self.list.len() {
            return Err(Error::Decode(format!("move-to-front index {i} out of range")));
        }
        self.list[..=i].rotate_right(1);
        Ok(self.list[0])
    }

    /// Bits of state: the list, one symbol per entry.
    pub fn state_bits(&self) -> u64 {
        let n = self.list.len() as u64;
        n * u64::from(crate::util::bits_for(n.saturating_sub(1)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(
            mtf_encode(b"banana", b"abn").unwrap(),
            vec![1, 1, 2, 1, 1, 1]
        );
        assert_eq!(mtf_encode(b"aaaa", b"ab").unwrap(), vec![0, 0, 0, 0]);
        assert_eq!(mtf_decode(&[1, 1, 2, 1, 1, 1], b"abn").unwrap(), b"banana");
        assert!(mtf_encode(b"abc", b"ab").is_err());
        assert!(mtf_encode(b"a", b"aa").is_err());
        assert!(mtf_decode(&[2], b"ab").is_err());
    }

    #[test]
    fn incremental_matches_batch() {
        let s = [3u32, 0, 0, 2, 3, 1, 1, 0];
        let order: Vec<u32> = (0..4).collect();
        let mut m = Mtf::new(4);
        let inc: Vec<u32> = s.iter().map(|&x| m.encode(x).unwrap()).collect();
        assert_eq!(inc, mtf_encode(&s, &order).unwrap());
        let mut d = Mtf::new(4);
        let back: Vec<u32> = inc.iter().map(|&i| d.decode(i).unwrap()).collect();
        assert_eq!(back, s);
        assert_eq!(m.state_bits(), 8);
    }

    #[test]
    fn exhaustive_binary() {
        for n in 0..=12u32 {
            for code in 0..1u32 << n {
                let s: Vec<u8> = (0..n).map(|i| (code >> i) as u8 & 1).collect();
                let e = mtf_encode(&s, &[0, 1]).unwrap();
                assert_eq!(mtf_decode(&e, &[0u8, 1]).unwrap(), s);
            }
        }
    }

    proptest! {
        #[test]
        fn round_trip(s in proptest::collection::vec(0u8..20, 0..500)) {
            let order: Vec<u8> = (0..20).collect();
            let e = mtf_encode(&s, &order).unwrap();
            prop_assert!(e.iter().all(|&i| i < 20));
            prop_assert_eq!(mtf_decode(&e, &order).unwrap(), s);
        }
    }
}
