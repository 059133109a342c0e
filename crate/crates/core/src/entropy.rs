//! Empirical entropy of finite strings.
//!
//! `H_0(s) = (1/n) sum_a occ(a, s) log2(n / occ(a, s))` and
//! `H_k(s) = (1/n) sum_{|w| = k} |w_s| H_0(w_s)`, where `w_s` collects the
//! characters that immediately follow occurrences of `w`. Contexts are
//! linear: the final `k` characters head no context.
//!
//! [`hk_star_total`] is the fixed-length surrogate for the modified entropy:
//! every occurring context contributes at least `floor(log2 |w_s|) + 1`
//! bits, so `n H_k(s) <= hk_star_total(s, k) <= n H_k(s) + O(sigma^k log n)`.
//!
//! Counts are exact integers; each context contributes
//! `m log2 m - sum_c c log2 c`, which is exactly zero for a context with a
//! single follower symbol.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::{Error, Result, Symbol};

/// Number of occurrences of `a` in `s`.
pub fn occ<T: PartialEq>(a: &T, s: &[T]) -> u64 {
    s.iter().filter(|&x| x == a).count() as u64
}

fn xlog2x(c: u64) -> f64 {
    if c <= 1 {
        0.0
    } else {
        let c = c as f64;
        c * libm::log2(c)
    }
}

/// `m H_0` for a multiset with the given counts summing to `m`.
fn total_bits(counts: impl IntoIterator<Item = u64>) -> f64 {
    let mut m = 0;
    let mut sum = 0.0;
    let mut distinct = 0;
    for c in counts {
        if c > 0 {
            m += c;
            sum += xlog2x(c);
            distinct += 1;
        }
    }
    if distinct <= 1 {
        0.0
    } else {
        (xlog2x(m) - sum).max(0.0)
    }
}

fn floor_term(m: u64) -> f64 {
    f64::from(crate::util::floor_log2(m) + 1)
}

/// Zeroth-order empirical entropy in bits per character.
pub fn h0<T: Ord>(s: &[T]) -> Result<f64> {
    if s.is_empty() {
        return Err(Error::InvalidInput("H_0 of the empty string".into()));
    }
    let mut counts: BTreeMap<&T, u64> = BTreeMap::new();
    for x in s {
        *counts.entry(x).or_default() += 1;
    }
    Ok(total_bits(counts.into_values()) / s.len() as f64)
}

/// One row of a context table: an occurring `k`-tuple `w`, `|w_s|` and `H_0(w_s)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ContextRow<T> {
    pub context: Vec<T>,
    pub follower_len: u64,
    pub h0: f64,
}

impl<T> ContextRow<T> {
    /// `|w_s| H_0(w_s)`.
    pub fn bits(&self) -> f64 {
        self.follower_len as f64 * self.h0
    }
}

fn check_order(n: usize, k: usize) -> Result<()> {
    if k >= n {
        return Err(Error::InvalidInput(format!(
            "order {k} needs a string longer than {n}"
        )));
    }
    Ok(())
}

/// Follower counts per context, in lexicographic context order.
fn followers<T: Ord>(s: &[T], k: usize) -> BTreeMap<&[T], BTreeMap<&T, u64>> {
    let mut table: BTreeMap<&[T], BTreeMap<&T, u64>> = BTreeMap::new();
    for i in 0..s.len() - k {
        *table
            .entry(&s[i..i + k])
            .or_default()
            .entry(&s[i + k])
            .or_default() += 1;
    }
    table
}

/// Every `k`-tuple occurring at positions `0..n-k` with its follower statistics.
pub fn context_table<T: Ord + Clone>(s: &[T], k: usize) -> Result<Vec<ContextRow<T>>> {
    check_order(s.len(), k)?;
    Ok(followers(s, k)
        .into_iter()
        .map(|(w, counts)| {
            let m: u64 = counts.values().sum();
            ContextRow {
                context: w.to_vec(),
                follower_len: m,
                h0: total_bits(counts.into_values()) / m as f64,
            }
        })
        .collect())
}

fn context_sums<T: Ord>(s: &[T], k: usize) -> (f64, f64) {
    let mut plain = 0.0;
    let mut star = 0.0;
    for counts in followers(s, k).into_values() {
        let m: u64 = counts.values().sum();
        let bits = total_bits(counts.into_values());
        plain += bits;
        star += bits.max(floor_term(m));
    }
    (plain, star)
}

/// `k`-th order empirical entropy in bits per character. `hk(s, 0) = h0(s)`.
pub fn hk<T: Ord>(s: &[T], k: usize) -> Result<f64> {
    check_order(s.len(), k)?;
    Ok(context_sums(s, k).0 / s.len() as f64)
}

/// `sum_w max(|w_s| H_0(w_s), floor(log2 |w_s|) + 1)` over occurring contexts, in bits.
pub fn hk_star_total<T: Ord>(s: &[T], k: usize) -> Result<f64> {
    check_order(s.len(), k)?;
    Ok(context_sums(s, k).1)
}

/// `H_k` and the `H_k*` total for one order.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OrderRow {
    pub k: usize,
    pub hk: f64,
    pub hk_star_total: f64,
}

/// Context table for one order.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OrderContexts {
    pub k: usize,
    pub rows: Vec<ContextRow<Symbol>>,
}

/// Entropy summary of a string at several orders.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EntropyReport {
    pub n: u64,
    pub sigma: u32,
    pub per_order: Vec<OrderRow>,
    pub context_table: Vec<OrderContexts>,
}

impl EntropyReport {
    /// Report for the orders in `orders`, each of which must be `< |s|`.
    /// `sigma` is the number of distinct symbols in `s`.
    pub fn new(s: &[Symbol], orders: &[usize]) -> Result<Self> {
        let mut per_order = Vec::with_capacity(orders.len());
        let mut tables = Vec::with_capacity(orders.len());
        for &k in orders {
            let rows = context_table(s, k)?;
            let plain: f64 = rows.iter().map(ContextRow::bits).sum();
            let star: f64 = rows
                .iter()
                .map(|r| r.bits().max(floor_term(r.follower_len)))
                .sum();
            per_order.push(OrderRow {
                k,
                hk: plain / s.len() as f64,
                hk_star_total: star,
            });
            tables.push(OrderContexts { k, rows });
        }
        let mut seen: Vec<Symbol> = s.to_vec();
        seen.sort_unstable();
        seen.dedup();
        Ok(EntropyReport {
            n: s.len() as u64,
            sigma: seen.len() as u32,
            per_order,
            context_table: tables,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    const EPS: f64 = 1e-9;

    fn b(s: &str) -> &[u8] {
        s.as_bytes()
    }

    // Rescans s for every context instead of building a table.
    fn hk_brute(s: &[u8], k: usize) -> f64 {
        let n = s.len();
        let mut total = 0.0;
        let mut done: Vec<&[u8]> = Vec::new();
        for i in 0..n - k {
            let w = &s[i..i + k];
            if done.contains(&w) {
                continue;
            }
            done.push(w);
            let ws: Vec<u8> = (0..n - k)
                .filter(|&j| &s[j..j + k] == w)
                .map(|j| s[j + k])
                .collect();
            let m = ws.len() as f64;
            for a in 0..=255u8 {
                let c = occ(&a, &ws) as f64;
                if c > 0.0 {
                    total += c * libm::log2(m / c);
                }
            }
        }
        total / n as f64
    }

    #[test]
    fn occurrences() {
        assert_eq!(occ(&b'a', b("banana")), 3);
        assert_eq!(occ(&b'z', b("banana")), 0);
        assert_eq!(occ(&1u8, &[1u8; 77]), 77);
    }

    #[test]
    fn zeroth_order() {
        assert_eq!(h0(b("1111")).unwrap(), 0.0);
        assert!((h0(b("ab")).unwrap() - 1.0).abs() < EPS);
        let expect = (2.0 * libm::log2(1.5) + libm::log2(3.0)) / 3.0;
        assert!((h0(b("aab")).unwrap() - expect).abs() < EPS);
        assert!((expect - 0.9183).abs() < 1e-4);
        assert!(h0::<u8>(&[]).is_err());
    }

    #[test]
    fn kth_order() {
        assert_eq!(hk(b("abababab"), 1).unwrap(), 0.0);
        // a -> "nn", b -> "a", n -> "aa": all deterministic
        assert_eq!(hk(b("banana"), 1).unwrap(), 0.0);
        assert!((hk(b("banana"), 1).unwrap() - hk_brute(b("banana"), 1)).abs() < EPS);
        // a -> "bc", b -> "a": 2 bits over 4 chars
        assert!((hk(b("abac"), 1).unwrap() - 2.0 / 4.0).abs() < EPS);
        assert!(hk(b("ab"), 2).is_err());
        assert!(hk_star_total(b("ab"), 2).is_err());
    }

    #[test]
    fn star_floor_term() {
        assert_eq!(hk_star_total(&[1u8; 1024], 0).unwrap(), 11.0);
        // contexts a (w_s = "bbb") and b (w_s = "aaa"), 2 bits each
        assert_eq!(hk_star_total(b("abababa"), 1).unwrap(), 4.0);
    }

    #[test]
    fn context_rows() {
        let rows = context_table(b("banana"), 1).unwrap();
        let got: Vec<(u8, u64)> = rows.iter().map(|r| (r.context[0], r.follower_len)).collect();
        assert_eq!(got, vec![(b'a', 2), (b'b', 1), (b'n', 2)]);
        assert!(rows.iter().all(|r| r.h0 == 0.0));
    }

    #[test]
    fn report() {
        let s: Vec<Symbol> = b("mississippi").iter().map(|&c| Symbol::from(c)).collect();
        let r = EntropyReport::new(&s, &[0, 1, 2]).unwrap();
        assert_eq!(r.n, 11);
        assert_eq!(r.sigma, 4);
        assert_eq!(r.per_order.len(), 3);
        assert!((r.per_order[0].hk - h0(&s).unwrap()).abs() < EPS);
        assert!((r.per_order[2].hk_star_total - hk_star_total(&s, 2).unwrap()).abs() < EPS);
        assert_eq!(r.context_table[1].rows.len(), 4);
    }

    #[test]
    fn exhaustive_ternary_against_rescan() {
        for n in 1..=9usize {
            let total = 3usize.pow(n as u32);
            for code in 0..total {
                let mut c = code;
                let s: Vec<u8> = (0..n)
                    .map(|_| {
                        let d = (c % 3) as u8;
                        c /= 3;
                        b'a' + d
                    })
                    .collect();
                for k in 0..n.min(4) {
                    let got = hk(&s, k).unwrap();
                    assert!((got - hk_brute(&s, k)).abs() < EPS, "{s:?} k={k}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn zero_order_agrees(s in proptest::collection::vec(0u8..5, 1..300)) {
            prop_assert!((hk(&s, 0).unwrap() - h0(&s).unwrap()).abs() < EPS);
        }

        #[test]
        fn bounds_and_monotonicity(s in proptest::collection::vec(0u8..4, 6..2000)) {
            let sigma = {
                let mut d = s.clone();
                d.sort_unstable();
                d.dedup();
                d.len() as f64
            };
            let n = s.len() as f64;
            let mut prev = f64::INFINITY;
            for k in 0..5 {
                let h = hk(&s, k).unwrap();
                prop_assert!(h >= 0.0 && h <= libm::log2(sigma) + EPS);
                prop_assert!(h <= prev + EPS);
                prop_assert!(n * h <= hk_star_total(&s, k).unwrap() + EPS);
                prev = h;
            }
        }
    }
}
