//! Straight-line grammars and the doubling construction for periodic
//! strings.
//!
//! For `s = t^m t'` with `|t| = l` the construction uses
//!
//! ```text
//! N0 -> N1 N3          start: the repetitions, then the tail
//! N1 -> A_j ...        product over the set bits j of m
//! N2 -> t
//! N3 -> t'             omitted (and N0 -> N1) when t' is empty
//! A_0 -> N2
//! A_{j+1} -> A_j A_j
//! ```
//!
//! which is `2l + O(log n)` symbols.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::period::is_period;
use crate::util::ceil_log2;
use crate::{Error, Result, Symbol};

/// Calibrated constants for
/// `size_bits <= C_G1 * l * ceil(log2 sigma) + C_G2 * log2 n * log2 log2 n`.
///
/// The `l` term pays for both `t` and `t'` at the uniform symbol width
/// `ceil(log2(#nt + sigma))`, not `ceil(log2 sigma)`. Fitted on
/// `n <= 2^20`, `sigma` in `2..=256`.
pub const C_G1: f64 = 8.0;
pub const C_G2: f64 = 8.0;

/// A right-hand-side symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum GSym {
    T(Symbol),
    N(u32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Grammar {
    /// Right-hand side of each nonterminal, indexed by id.
    pub productions: Vec<Vec<GSym>>,
    pub start: u32,
    pub sigma: u32,
}

impl Grammar {
    pub fn nonterminals(&self) -> usize {
        self.productions.len()
    }

    /// Total right-hand-side length.
    pub fn rhs_len(&self) -> u64 {
        self.productions.iter().map(|p| p.len() as u64).sum()
    }

    /// Bits with every symbol written in `ceil(log2(#nonterminals + sigma))`
    /// bits.
    pub fn size_bits(&self) -> u64 {
        let width = ceil_log2(self.productions.len() as u64 + u64::from(self.sigma)).max(1);
        self.rhs_len() * u64::from(width)
    }

    /// Checks references and acyclicity; returns the nonterminals in an
    /// order where every production only uses earlier ones.
    pub fn validate(&self) -> Result<Vec<u32>> {
        let k = self.productions.len();
        if self.start as usize >= k {
            return Err(Error::InvalidInput(format!("start symbol N{} undefined", self.start)));
        }
        for (a, rhs) in self.productions.iter().enumerate() {
            for &x in rhs {
                match x {
                    GSym::T(c) if c >= self.sigma => {
                        return Err(Error::InvalidInput(format!(
                            "N{a} uses terminal {c} outside an alphabet of {}",
                            self.sigma
                        )))
                    }
                    GSym::N(b) if b as usize >= k => {
                        return Err(Error::InvalidInput(format!("N{a} uses undefined N{b}")))
                    }
                    _ => {}
                }
            }
        }
        // Iterative depth-first search; 1 = on the stack, 2 = done.
        let mut state = vec![0u8; k];
        let mut order = Vec::with_capacity(k);
        let mut stack: Vec<(u32, usize)> = Vec::new();
        for root in 0..k as u32 {
            if state[root as usize] != 0 {
                continue;
            }
            state[root as usize] = 1;
            stack.push((root, 0));
            while let Some(top) = stack.last_mut() {
                let (a, i) = *top;
                top.1 += 1;
                match self.productions[a as usize].get(i) {
                    Some(&GSym::N(b)) => match state[b as usize] {
                        0 => {
                            state[b as usize] = 1;
                            stack.push((b, 0));
                        }
                        1 => return Err(Error::Cycle(b)),
                        _ => {}
                    },
                    Some(_) => {}
                    None => {
                        state[a as usize] = 2;
                        order.push(a);
                        stack.pop();
                    }
                }
            }
        }
        Ok(order)
    }

    /// Length of the string each nonterminal derives.
    pub fn expansion_lengths(&self) -> Result<Vec<u64>> {
        let order = self.validate()?;
        let mut len = vec![0u64; self.productions.len()];
        for a in order {
            let mut total = 0u64;
            for &x in &self.productions[a as usize] {
                let l = match x {
                    GSym::T(_) => 1,
                    GSym::N(b) => len[b as usize],
                };
                total = total
                    .checked_add(l)
                    .ok_or_else(|| Error::Overflow(format!("N{a} derives more than 2^64 symbols")))?;
            }
            len[a as usize] = total;
        }
        Ok(len)
    }

    /// The string derived from the start symbol.
    pub fn expand(&self) -> Result<Vec<Symbol>> {
        let len = self.expansion_lengths()?[self.start as usize];
        let cap = usize::try_from(len).map_err(|_| Error::Size(format!("expansion of {len} symbols")))?;
        let mut out = Vec::with_capacity(cap);
        let mut stack: Vec<(u32, usize)> = vec![(self.start, 0)];
        while let Some(top) = stack.last_mut() {
            let (a, i) = *top;
            top.1 += 1;
            match self.productions[a as usize].get(i) {
                Some(&GSym::T(c)) => out.push(c),
                Some(&GSym::N(b)) => stack.push((b, 0)),
                None => {
                    stack.pop();
                }
            }
        }
        Ok(out)
    }
}

/// One production per line, start first: `N0: N1 N3`, terminals as
/// decimal numbers.
impl fmt::Display for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let start = self.start as usize;
        let ids = core::iter::once(start).chain((0..self.productions.len()).filter(|&a| a != start));
        for a in ids {
            write!(f, "N{a}:")?;
            for x in &self.productions[a] {
                match x {
                    GSym::T(c) => write!(f, " {c}")?,
                    GSym::N(b) => write!(f, " N{b}")?,
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Grammar for `s` given a period `l` of `s`.
pub fn build_periodic_grammar(s: &[Symbol], l: usize, sigma: u32) -> Result<Grammar> {
    if !is_period(s, l) {
        return Err(Error::InvalidInput(format!("{l} is not a period of the input")));
    }
    if let Some(&c) = s.iter().find(|&&c| c >= sigma) {
        return Err(Error::InvalidInput(format!("symbol {c} outside an alphabet of {sigma}")));
    }
    let reps = (s.len() / l) as u64;
    let tail = &s[reps as usize * l..];
    let levels = 64 - reps.leading_zeros();
    let chain = |j: u32| GSym::N(4 + j);

    let mut productions = vec![Vec::new(); 4];
    productions[0] = vec![GSym::N(1), GSym::N(3)];
    productions[1] = (0..levels).rev().filter(|&j| reps >> j & 1 == 1).map(chain).collect();
    productions[2] = s[..l].iter().map(|&c| GSym::T(c)).collect();
    productions[3] = tail.iter().map(|&c| GSym::T(c)).collect();
    productions.push(vec![GSym::N(2)]);
    for j in 1..levels {
        productions.push(vec![chain(j - 1), chain(j - 1)]);
    }
    if tail.is_empty() {
        // Drop N3 and renumber the chain down by one.
        productions.remove(3);
        productions[0].pop();
        for rhs in &mut productions {
            for x in rhs {
                if let GSym::N(b) = x {
                    if *b > 3 {
                        *b -= 1;
                    }
                }
            }
        }
    }
    Ok(Grammar {
        productions,
        start: 0,
        sigma,
    })
}

/// The right-hand side of the size bound, `C_G1 * l * ceil(log2 sigma) +
/// C_G2 * log2 n * log2 log2 n`, with the logarithms clamped below at 1.
pub fn size_bound(l: usize, n: usize, sigma: u32) -> f64 {
    let lg = libm::log2(n as f64).max(1.0);
    let lglg = libm::log2(lg).max(1.0);
    C_G1 * l as f64 * f64::from(ceil_log2(u64::from(sigma)).max(1)) + C_G2 * lg * lglg
}
