//! De Bruijn cycles.
//!
//! Cycles are compared as cyclic sequences: [`enumerate_cycles_small`] lists
//! each one once, rotated to start with `0^k`. Under that convention the
//! number of cycles is `sigma!^(sigma^(k-1)) / sigma^k`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;

use crate::{Error, Result, Symbol};

/// Largest cycle length [`generate_cycle`] builds.
pub const MAX_CYCLE: u64 = 1 << 24;
/// Largest cycle length [`enumerate_cycles_small`] accepts.
pub const MAX_ENUMERATED: u64 = 12;
/// Largest count, in bits, [`count_cycles`] evaluates.
pub const MAX_COUNT_BITS: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeBruijnCycle {
    pub sigma: u32,
    pub k: u32,
    pub cycle: Vec<Symbol>,
}

impl DeBruijnCycle {
    /// Whether every k-tuple occurs exactly once, reading cyclically.
    pub fn is_valid(&self) -> bool {
        is_de_bruijn(&self.cycle, self.sigma, self.k)
    }
}

/// `sigma^k`, if it is at most `cap`.
fn power_within(sigma: u32, k: u32, cap: u64) -> Option<u64> {
    let mut p = 1u64;
    for _ in 0..k {
        p = p.checked_mul(u64::from(sigma)).filter(|&p| p <= cap)?;
    }
    Some(p)
}

fn check_args(sigma: u32, k: u32) -> Result<()> {
    if sigma < 2 || k < 1 {
        return Err(Error::InvalidInput(format!(
            "need sigma >= 2 and k >= 1, got sigma = {sigma}, k = {k}"
        )));
    }
    Ok(())
}

/// Window scan with wraparound.
pub fn is_de_bruijn(cycle: &[Symbol], sigma: u32, k: u32) -> bool {
    let Some(len) = power_within(sigma, k, MAX_CYCLE) else {
        return false;
    };
    if cycle.len() as u64 != len || cycle.iter().any(|&c| c >= sigma) {
        return false;
    }
    let mut seen = vec![false; len as usize];
    for start in 0..cycle.len() {
        let code = (0..k as usize).fold(0u64, |acc, d| {
            acc * u64::from(sigma) + u64::from(cycle[(start + d) % cycle.len()])
        });
        if core::mem::replace(&mut seen[code as usize], true) {
            return false;
        }
    }
    true
}

/// A De Bruijn cycle of order `k`, from an Eulerian circuit of the graph on
/// `(k-1)`-tuples that always leaves a node by its smallest unused edge.
pub fn generate_cycle(sigma: u32, k: u32) -> Result<DeBruijnCycle> {
    check_args(sigma, k)?;
    let len = power_within(sigma, k, MAX_CYCLE)
        .ok_or_else(|| Error::Size(format!("{sigma}^{k} exceeds the cycle cap of {MAX_CYCLE}")))?;
    let nodes = len / u64::from(sigma);
    let sig = u64::from(sigma);

    // Hierholzer: follow unused edges, emitting an edge when backtracking.
    let mut next_edge = vec![0u32; nodes as usize];
    let mut stack: Vec<(u64, Symbol)> = vec![(0, 0)];
    let mut out = Vec::with_capacity(len as usize);
    while let Some(&(v, label)) = stack.last() {
        let e = &mut next_edge[v as usize];
        if *e < sigma {
            let c = *e;
            *e += 1;
            stack.push(((v * sig + u64::from(c)) % nodes, c));
        } else {
            stack.pop();
            if !stack.is_empty() {
                out.push(label);
            }
        }
    }
    out.reverse();
    // Edge labels in circuit order, the circuit starting at node 0^(k-1):
    // rotate so the cycle reads from that node's first k-tuple.
    out.rotate_right(k as usize - 1);
    let d = DeBruijnCycle { sigma, k, cycle: out };
    debug_assert!(d.is_valid());
    Ok(d)
}

/// `sigma!^(sigma^(k-1)) / sigma^k`, exactly.
pub fn count_cycles(sigma: u32, k: u32) -> Result<BigUint> {
    check_args(sigma, k)?;
    let too_big = || Error::Overflow(format!("count for sigma = {sigma}, k = {k} exceeds {MAX_COUNT_BITS} bits"));
    let fact: BigUint = (1..=sigma).map(BigUint::from).product();
    let exp = power_within(sigma, k - 1, MAX_COUNT_BITS).ok_or_else(too_big)?;
    if exp.saturating_mul(fact.bits()) > MAX_COUNT_BITS {
        return Err(too_big());
    }
    let num = fact.pow(exp as u32);
    let den = BigUint::from(sigma).pow(k);
    Ok(num / den)
}

/// Calls `f` on every De Bruijn cycle of order `k` that starts with `0^k`,
/// in lexicographic order.
pub fn for_each_cycle(sigma: u32, k: u32, mut f: impl FnMut(&[Symbol])) -> Result<()> {
    check_args(sigma, k)?;
    let len = power_within(sigma, k, MAX_ENUMERATED).ok_or_else(|| {
        Error::Size(format!("{sigma}^{k} exceeds the enumeration cap of {MAX_ENUMERATED}"))
    })? as usize;
    let (k, sig) = (k as usize, u64::from(sigma));
    let top = len as u64 / sig;
    let mut seq = vec![0 as Symbol; len];
    let mut seen = vec![false; len];
    seen[0] = true;

    // Position i fixes the tuple ending at i; the last k - 1 tuples wrap.
    #[allow(clippy::too_many_arguments)]
    fn extend(
        i: usize,
        code: u64,
        seq: &mut [Symbol],
        seen: &mut [bool],
        sig: u64,
        top: u64,
        k: usize,
        f: &mut dyn FnMut(&[Symbol]),
    ) {
        let len = seq.len();
        if i == len + k - 1 {
            f(seq);
            return;
        }
        let wrapped = i >= len;
        let choices = if wrapped { seq[i - len]..seq[i - len] + 1 } else { 0..sig as Symbol };
        for c in choices {
            let next = (code % top) * sig + u64::from(c);
            if seen[next as usize] {
                continue;
            }
            seen[next as usize] = true;
            if !wrapped {
                seq[i] = c;
            }
            extend(i + 1, next, seq, seen, sig, top, k, f);
            seen[next as usize] = false;
        }
    }
    extend(k, 0, &mut seq, &mut seen, sig, top, k, &mut f);
    Ok(())
}

/// All De Bruijn cycles of order `k` for `sigma^k <= 12`, each rotated to
/// start with `0^k`.
pub fn enumerate_cycles_small(sigma: u32, k: u32) -> Result<Vec<DeBruijnCycle>> {
    let mut out = Vec::new();
    for_each_cycle(sigma, k, |c| {
        out.push(DeBruijnCycle {
            sigma,
            k,
            cycle: c.to_vec(),
        })
    })?;
    Ok(out)
}

/// `d` repeated to length `n` (the last copy cut short), for
/// `d = generate_cycle(sigma, k)`. Every k-tuple of the result is always
/// followed by the same symbol, so its order-`k` entropy is zero.
pub fn adversarial_string(sigma: u32, k: u32, n: usize) -> Result<Vec<Symbol>> {
    let d = generate_cycle(sigma, k)?.cycle;
    Ok(d.iter().copied().cycle().take(n).collect())
}
