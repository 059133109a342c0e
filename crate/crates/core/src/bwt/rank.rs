use alloc::format;
use alloc::vec::Vec;

use crate::machine::two_stream_merge_sort;
use crate::util::{bits_for, ceil_log2, Field};
use crate::{Error, Machine, Result, StreamId};

/// A permutation of `0..len`, listed as `pi(0), pi(1), ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    pub mapping: Vec<u64>,
}

impl Permutation {
    pub fn new(mapping: Vec<u64>) -> Self {
        Permutation { mapping }
    }

    /// From a 1-based listing `pi(1), ..., pi(len)`.
    pub fn from_one_based(mapping: &[u64]) -> Self {
        Permutation {
            mapping: mapping.iter().map(|&v| v.wrapping_sub(1)).collect(),
        }
    }

    pub fn identity(len: usize) -> Self {
        Permutation {
            mapping: (0..len as u64).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }
}

/// Linked-list node, low bits first: payload character, distance, next, node.
#[derive(Debug, Clone, Copy)]
pub(crate) struct NodeLayout {
    pub ch: Field,
    pub dist: Field,
    pub next: Field,
    pub x: Field,
    pub bits: u32,
    pub nil: u64,
}

/// Sort-join record, low bits first: character, distance, payload, kind, key.
#[derive(Debug, Clone, Copy)]
struct JoinLayout {
    ch: Field,
    dist: Field,
    a: Field,
    kind: Field,
    key: Field,
    bits: u32,
}

const PROVIDER: u64 = 0;
const REQUEST: u64 = 1;
const PASSTHROUGH: u64 = 2;

impl NodeLayout {
    fn new(total: u64, cb: u32) -> Self {
        let w = bits_for(total);
        NodeLayout {
            ch: Field::new(0, cb),
            dist: Field::new(cb, w),
            next: Field::new(cb + w, w),
            x: Field::new(cb + 2 * w, w),
            bits: cb + 3 * w,
            nil: total,
        }
    }
}

impl JoinLayout {
    fn new(total: u64, cb: u32) -> Self {
        let w = bits_for(total);
        JoinLayout {
            ch: Field::new(0, cb),
            dist: Field::new(cb, w),
            a: Field::new(cb + w, w),
            kind: Field::new(cb + 2 * w, 2),
            key: Field::new(cb + 2 * w + 2, w),
            bits: cb + 3 * w + 2,
        }
    }
}

/// Input record layout for [`list_rank`]: `pi(x)` above a `cb`-bit character.
pub(crate) fn perm_fields(total: u64, cb: u32) -> (Field, Field, u32) {
    let w = bits_for(total);
    (Field::new(cb, w), Field::new(0, cb), cb + w)
}

/// Ranks the cycle of `start`. `perm` holds `total` records `pi(x) | ch` in
/// `x` order (see [`perm_fields`]). The cycle is cut before `start` and each
/// node learns its distance to the cut by pointer jumping: every round joins
/// each node with the node it points to through one stream sort.
///
/// Returns the node stream (any order), the other stream, the layout and
/// the length `c` of the cycle. Nodes on the cycle have `next == nil` and
/// `dist` equal to `c - 1` minus their distance from `start`; other nodes
/// keep a saturated, meaningless `dist`.
pub(crate) fn list_rank(
    m: &mut Machine,
    perm: StreamId,
    other: StreamId,
    total: u64,
    start: u64,
    cb: u32,
) -> Result<(StreamId, StreamId, NodeLayout, u64)> {
    let nl = NodeLayout::new(total, cb);
    let jl = JoinLayout::new(total, cb);
    let (pi_f, ch_f, _) = perm_fields(total, cb);
    let counters = 2 * u64::from(jl.bits) + 4 * u64::from(bits_for(total));
    m.declare_memory(counters)?;

    m.rewind(perm)?;
    m.rewind(other)?;
    m.reformat(other, nl.bits)?;
    let mut active = 0u64;
    for x in 0..total {
        let r = m.read(perm).ok_or_else(|| Error::InvalidPermutation("too few entries".into()))?;
        let pi = pi_f.get(r);
        if pi >= total {
            return Err(Error::InvalidPermutation(format!(
                "pi({x}) = {pi} is outside 0..{total}"
            )));
        }
        let (next, dist) = if pi == start { (nl.nil, 0) } else { (pi, 1) };
        if next != nl.nil {
            active += 1;
        }
        m.write(
            other,
            nl.x.put(x) | nl.next.put(next) | nl.dist.put(dist) | nl.ch.put(ch_f.get(r)),
        );
    }
    m.rewind(perm)?;
    m.rewind(other)?;
    let (mut nodes, mut spare) = (other, perm);

    let max_rounds = ceil_log2(total) + 1;
    let mut round = 0;
    while (round == 0 && total > 1) || (active > 0 && round < max_rounds) {
        m.declare_memory(counters)?;
        m.reformat(spare, jl.bits)?;
        while let Some(r) = m.read(nodes) {
            let (x, next, dist, ch) = (nl.x.get(r), nl.next.get(r), nl.dist.get(r), nl.ch.get(r));
            m.write(
                spare,
                jl.key.put(x) | jl.kind.put(PROVIDER) | jl.a.put(next) | jl.dist.put(dist),
            );
            let rec = if next == nl.nil {
                jl.key.put(x) | jl.kind.put(PASSTHROUGH) | jl.a.put(nl.nil)
            } else {
                jl.key.put(next) | jl.kind.put(REQUEST) | jl.a.put(x)
            };
            m.write(spare, rec | jl.dist.put(dist) | jl.ch.put(ch));
        }
        m.rewind(nodes)?;
        m.rewind(spare)?;
        let joined = two_stream_merge_sort(m, spare, nodes, |r| jl.kind.and_above(r))?;
        let out = if joined == spare { nodes } else { spare };

        m.declare_memory(counters)?;
        m.reformat(out, nl.bits)?;
        let check = round == 0;
        let mut provider: Option<(u64, u64, u64)> = None;
        let mut requests = 0u64;
        let close = |p: Option<(u64, u64, u64)>, requests: u64| -> Result<()> {
            if let Some((key, _, _)) = p {
                let want = u64::from(key != start);
                if requests != want {
                    return Err(Error::InvalidPermutation(format!(
                        "{requests} entries map to {key}, expected {want}"
                    )));
                }
            }
            Ok(())
        };
        active = 0;
        while let Some(r) = m.read(joined) {
            let key = jl.key.get(r);
            match jl.kind.get(r) {
                PROVIDER => {
                    if check {
                        close(provider, requests)?;
                    }
                    provider = Some((key, jl.a.get(r), jl.dist.get(r)));
                    requests = 0;
                }
                REQUEST => {
                    requests += 1;
                    let (_, next, dist) = provider.expect("every node provides");
                    if next != nl.nil {
                        active += 1;
                    }
                    m.write(
                        out,
                        nl.x.put(jl.a.get(r))
                            | nl.next.put(next)
                            | nl.dist.put((jl.dist.get(r) + dist).min(nl.nil))
                            | nl.ch.put(jl.ch.get(r)),
                    );
                }
                _ => {
                    m.write(
                        out,
                        nl.x.put(key)
                            | nl.next.put(nl.nil)
                            | nl.dist.put(jl.dist.get(r))
                            | nl.ch.put(jl.ch.get(r)),
                    );
                }
            }
        }
        if check {
            close(provider, requests)?;
        }
        m.rewind(joined)?;
        m.rewind(out)?;
        nodes = out;
        spare = joined;
        round += 1;
    }

    // Count the cycle through `start`.
    let mut c = 0;
    while let Some(r) = m.read(nodes) {
        if nl.next.get(r) == nl.nil {
            c += 1;
        }
    }
    m.rewind(nodes)?;
    Ok((nodes, spare, nl, c))
}

/// The orbit `pi^0(start), pi^1(start), ..., pi^(len-1)(start)`, computed on
/// two streams attached to `m`.
pub fn rank_permutation(m: &mut Machine, pi: &Permutation, start: u64) -> Result<Vec<u64>> {
    let total = pi.len() as u64;
    if start >= total {
        return Err(Error::InvalidPermutation(format!(
            "start {start} outside a permutation of {total}"
        )));
    }
    let (pi_f, _, bits) = perm_fields(total, 0);
    let mut entries = Vec::with_capacity(pi.mapping.len());
    for (x, &v) in pi.mapping.iter().enumerate() {
        if v >= total {
            return Err(Error::InvalidPermutation(format!("pi({x}) = {v} is outside 0..{total}")));
        }
        entries.push(pi_f.put(v));
    }
    let perm = m.attach_stream(entries, bits)?;
    let other = m.attach_stream(core::iter::empty(), bits)?;
    let (nodes, spare, nl, c) = list_rank(m, perm, other, total, start, 0)?;

    // Entry j of the output is the node at distance j mod c from start.
    let jl = JoinLayout::new(total, 0);
    m.reformat(spare, jl.bits)?;
    while let Some(r) = m.read(nodes) {
        if nl.next.get(r) == nl.nil {
            let d = c - 1 - nl.dist.get(r);
            m.write(spare, jl.key.put(d) | jl.kind.put(PROVIDER) | jl.a.put(nl.x.get(r)));
        }
    }
    for j in 0..total {
        m.write(spare, jl.key.put(j % c) | jl.kind.put(REQUEST) | jl.a.put(j));
    }
    m.rewind(nodes)?;
    m.rewind(spare)?;
    let joined = two_stream_merge_sort(m, spare, nodes, |r| jl.kind.and_above(r))?;
    let out = if joined == spare { nodes } else { spare };

    let w = bits_for(total);
    let (val, pos) = (Field::new(0, w), Field::new(w, w));
    m.reformat(out, 2 * w)?;
    let mut current = 0;
    while let Some(r) = m.read(joined) {
        if jl.kind.get(r) == PROVIDER {
            current = jl.a.get(r);
        } else {
            m.write(out, pos.put(jl.a.get(r)) | val.put(current));
        }
    }
    m.rewind(joined)?;
    m.rewind(out)?;
    let sorted = two_stream_merge_sort(m, out, joined, |r| pos.get(r))?;
    let mut orbit = Vec::with_capacity(pi.len());
    while let Some(r) = m.read(sorted) {
        orbit.push(val.get(r));
    }
    m.rewind(sorted)?;
    Ok(orbit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bwt::C_RANK;
    use crate::MachineBudget;
    use alloc::vec;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn machine(n: usize) -> Machine {
        Machine::new(MachineBudget::polylog(n as u64))
    }

    fn iterate(pi: &Permutation, start: u64) -> Vec<u64> {
        let mut x = start;
        (0..pi.len())
            .map(|_| {
                let here = x;
                x = pi.mapping[x as usize];
                here
            })
            .collect()
    }

    fn one_based(v: Vec<u64>) -> Vec<u64> {
        v.into_iter().map(|x| x + 1).collect()
    }

    #[test]
    fn examples() {
        let id = Permutation::identity(4);
        assert_eq!(one_based(rank_permutation(&mut machine(4), &id, 0).unwrap()), [1, 1, 1, 1]);
        let pi = Permutation::from_one_based(&[2, 3, 4, 1]);
        assert_eq!(one_based(rank_permutation(&mut machine(4), &pi, 0).unwrap()), [1, 2, 3, 4]);
        let pi = Permutation::from_one_based(&[1, 2]);
        assert_eq!(one_based(rank_permutation(&mut machine(2), &pi, 0).unwrap()), [1, 1]);
        let pi = Permutation::from_one_based(&[1]);
        assert_eq!(rank_permutation(&mut machine(1), &pi, 0).unwrap(), [0]);
    }

    #[test]
    fn multiple_cycles_wrap() {
        // (0 2 4)(1 3)
        let pi = Permutation::new(vec![2, 3, 4, 1, 0]);
        assert_eq!(rank_permutation(&mut machine(5), &pi, 0).unwrap(), [0, 2, 4, 0, 2]);
        assert_eq!(rank_permutation(&mut machine(5), &pi, 3).unwrap(), [3, 1, 3, 1, 3]);
    }

    #[test]
    fn non_bijections_are_rejected() {
        for bad in [vec![0u64, 0], vec![1, 1, 0], vec![0, 5], vec![2, 2, 2], vec![1, 0, 1]] {
            let pi = Permutation::new(bad.clone());
            let r = rank_permutation(&mut machine(3), &pi, 0);
            assert!(matches!(r, Err(Error::InvalidPermutation(_))), "{bad:?}: {r:?}");
        }
    }

    #[test]
    fn pass_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for lg in [10u32, 12, 14] {
            let n = 1usize << lg;
            let mut order: Vec<u64> = (0..n as u64).collect();
            order.shuffle(&mut rng);
            // one big cycle through the shuffled order
            let mut mapping = vec![0; n];
            for i in 0..n {
                mapping[order[i] as usize] = order[(i + 1) % n];
            }
            let pi = Permutation::new(mapping);
            let mut m = machine(n);
            let got = rank_permutation(&mut m, &pi, 0).unwrap();
            assert_eq!(got, iterate(&pi, 0));
            let passes = m.report().total_passes as f64;
            assert!(passes <= C_RANK * f64::from(lg * lg), "n=2^{lg}: {passes}");
        }
    }

    proptest! {
        #[test]
        fn matches_direct_iteration(seed in any::<u64>(), n in 1usize..300, start_frac in 0.0f64..1.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut mapping: Vec<u64> = (0..n as u64).collect();
            mapping.shuffle(&mut rng);
            let pi = Permutation::new(mapping);
            let start = ((n as f64 * start_frac) as u64).min(n as u64 - 1);
            let mut m = machine(n);
            prop_assert_eq!(rank_permutation(&mut m, &pi, start).unwrap(), iterate(&pi, start));
        }
    }
}
