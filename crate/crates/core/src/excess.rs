//! Range-minimum of prefix excess and LCA over balanced parentheses.
//!
//! `E(j)` is the number of `(` minus the number of `)` in `S[1..j]`. Blocks
//! carry their minimum prefix excess relative to their own start, so a fully
//! covered block is answered from its summary and only the (at most two)
//! partially covered blocks per level are descended into. Back-pointing
//! blocks are split at `d` and each part is translated into its target with
//! the cached rank of `(` at the offset or the split.

use crate::builder::build;
use crate::error::{Error, Result};
use crate::graph::{piece, piece_of, BlockGraph, BlockKind, BuildConfig, MinAt, OPEN};

/// A tree node, identified by the 1-based position of its `(`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeHandle(pub usize);

/// Balanced parentheses string stored as an excess-augmented block graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BpString {
    graph: BlockGraph,
    open: usize,
    top: SparseMin,
}

/// Sparse table over the absolute minimum excess of each top-level block;
/// `index[k][i]` is the leftmost minimum among blocks `i..i + 2^k`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
struct SparseMin {
    values: Vec<i64>,
    index: Vec<Vec<u32>>,
}

impl SparseMin {
    fn new(values: Vec<i64>) -> Self {
        let mut index = vec![(0..values.len() as u32).collect::<Vec<_>>()];
        let mut span = 1;
        while 2 * span <= values.len() {
            let prev = index.last().expect("first row");
            let row = (0..=values.len() - 2 * span)
                .map(|i| {
                    let (a, b) = (prev[i], prev[i + span]);
                    if values[b as usize] < values[a as usize] { b } else { a }
                })
                .collect();
            index.push(row);
            span *= 2;
        }
        Self { values, index }
    }

    /// Leftmost minimum over blocks `l..=r`.
    fn argmin(&self, l: usize, r: usize) -> usize {
        let k = (usize::BITS - 1 - (r - l + 1).leading_zeros()) as usize;
        let (a, b) = (self.index[k][l] as usize, self.index[k][r + 1 - (1 << k)] as usize);
        if self.values[b] < self.values[a] { b } else { a }
    }

    /// Rightmost block in `0..=r` whose minimum is below `target`.
    fn last_below(&self, r: usize, target: i64) -> Option<usize> {
        let mut end = r + 1;
        for k in (0..self.index.len()).rev() {
            let span = 1 << k;
            if end >= span && self.values[self.argmin(end - span, end - 1)] >= target {
                end -= span;
            }
        }
        end.checked_sub(1)
    }
}

fn check_balanced(text: &[u8]) -> Result<()> {
    let mut e: i64 = 0;
    for (i, &c) in text.iter().enumerate() {
        e += match c {
            b'(' => 1,
            b')' => -1,
            other => return Err(Error::Unbalanced(format!("symbol {other:#04x} at {}", i + 1))),
        };
        if e < 0 {
            return Err(Error::Unbalanced(format!("excess negative at {}", i + 1)));
        }
    }
    if e != 0 {
        return Err(Error::Unbalanced(format!("final excess {e}")));
    }
    Ok(())
}

fn better(best: &mut Option<MinAt>, cand: MinAt) {
    if best.is_none_or(|b| cand.value < b.value) {
        *best = Some(cand);
    }
}

impl BpString {
    /// Builds a graph for `text` with excess augmentation forced on.
    pub fn new(text: &[u8], config: &BuildConfig) -> Result<Self> {
        if text.is_empty() {
            return Err(Error::EmptyText);
        }
        check_balanced(text)?;
        let config = BuildConfig { enable_excess: true, ..config.clone() };
        Self::from_graph(build(text, &config)?)
    }

    /// Wraps an existing graph; it must carry excess data and be balanced.
    pub fn from_graph(graph: BlockGraph) -> Result<Self> {
        if !graph.params.excess {
            return Err(Error::NoExcess);
        }
        let open = graph.tracked_index(OPEN).ok_or(Error::NoExcess)?;
        let mins = graph.levels[0]
            .iter()
            .map(|b| {
                let aug = b.excess.as_ref().ok_or(Error::NoExcess)?;
                Ok(Self::rel(b.rank_before[open], b.start) + aug.min.value)
            })
            .collect::<Result<Vec<_>>>()?;
        let bp = Self { graph, open, top: SparseMin::new(mins) };
        let n = bp.graph.len();
        if !n.is_multiple_of(2) || bp.excess(n)? != 0 {
            return Err(Error::Unbalanced("open and close counts differ".into()));
        }
        let m = bp.min_excess_pos(1, n)?;
        if bp.excess(m)? < 0 {
            return Err(Error::Unbalanced(format!("excess negative at {m}")));
        }
        Ok(bp)
    }

    pub fn graph(&self) -> &BlockGraph {
        &self.graph
    }

    pub fn into_graph(self) -> BlockGraph {
        self.graph
    }

    pub fn len(&self) -> usize {
        self.graph.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }

    /// `E(i)`, with `E(0) = 0`.
    pub fn excess(&self, i: usize) -> Result<i64> {
        let opens = self.graph.rank(OPEN, i)? as i64;
        Ok(2 * opens - i as i64)
    }

    /// Excess of the first `t` symbols of a block given its cached count of `(`.
    fn rel(opens: u64, t: usize) -> i64 {
        2 * opens as i64 - t as i64
    }

    /// Leftmost `j` in `[i, k]` minimizing `E(j)`.
    pub fn min_excess_pos(&self, i: usize, k: usize) -> Result<usize> {
        let n = self.graph.len();
        if i == 0 || i > k || k > n {
            return Err(Error::OutOfRange { pos: if i == 0 { 0 } else { k }, len: n });
        }
        let (lo, hi) = (i - 1, k);
        let top = &self.graph.levels[0];
        let first = piece_of(n, top.len(), lo);
        let last = piece_of(n, top.len(), hi - 1);
        let mut best: Option<MinAt> = None;
        let partial = |idx: usize, best: &mut Option<MinAt>| {
            let b = &top[idx];
            let base = Self::rel(b.rank_before[self.open], b.start);
            let (blo, bhi) = (lo.max(b.start) - b.start, hi.min(b.end()) - b.start);
            let m = self.range_min(0, idx, blo, bhi);
            better(best, MinAt { value: base + m.value, pos: b.start + m.pos });
        };
        partial(first, &mut best);
        if last > first + 1 {
            let idx = self.top.argmin(first + 1, last - 1);
            let b = &top[idx];
            let pos = b.start + b.excess.as_ref().expect("excess-augmented block").min.pos;
            better(&mut best, MinAt { value: self.top.values[idx], pos });
        }
        if last > first {
            partial(last, &mut best);
        }
        Ok(best.expect("non-empty range").pos)
    }

    /// Leftmost minimum of block-relative excess over prefix lengths
    /// `lo+1..=hi`.
    fn range_min(&self, level: usize, idx: usize, lo: usize, hi: usize) -> MinAt {
        let g = &self.graph;
        let b = g.block(level, idx);
        let aug = b.excess.as_ref().expect("excess-augmented block");
        if lo == 0 && hi == b.len {
            return aug.min;
        }
        match &b.kind {
            BlockKind::Literal(bytes) => {
                let mut e: i64 = bytes[..lo].iter().map(|&c| if c == OPEN { 1 } else { -1 }).sum();
                let mut best = MinAt { value: i64::MAX, pos: 0 };
                for (x, &c) in bytes[lo..hi].iter().enumerate() {
                    e += if c == OPEN { 1 } else { -1 };
                    if e < best.value {
                        best = MinAt { value: e, pos: lo + x + 1 };
                    }
                }
                best
            }
            BlockKind::Internal { first_child, child_count } => {
                let cc = *child_count;
                let mut best = None;
                for c in piece_of(b.len, cc, lo)..=piece_of(b.len, cc, hi - 1) {
                    let (off, clen) = piece(b.len, cc, c);
                    let child = g.block(level + 1, first_child + c);
                    let base = Self::rel(child.rank_before[self.open] - b.rank_before[self.open], off);
                    let m = self.range_min(level + 1, first_child + c, lo.max(off) - off, hi.min(off + clen) - off);
                    better(&mut best, MinAt { value: base + m.value, pos: off + m.pos });
                }
                best.expect("non-empty range")
            }
            BlockKind::Back(bp) => {
                let d = bp.split;
                let cache = bp.excess.as_ref();
                let mut best = None;
                if lo < d {
                    let head = match cache {
                        Some(c) if lo == 0 && hi >= d => c.head,
                        _ => {
                            let shift = Self::rel(bp.rank_at_offset[self.open], bp.offset);
                            let m = self.range_min(level, bp.target, bp.offset + lo, bp.offset + hi.min(d));
                            MinAt { value: m.value - shift, pos: m.pos - bp.offset }
                        }
                    };
                    better(&mut best, head);
                }
                if hi > d {
                    let tail = match cache.and_then(|c| c.tail) {
                        Some(t) if lo <= d && hi == b.len => t,
                        _ => {
                            let base = Self::rel(bp.rank_at_split[self.open], d);
                            let m = self.range_min(level, bp.target + 1, lo.max(d) - d, hi - d);
                            MinAt { value: base + m.value, pos: d + m.pos }
                        }
                    };
                    better(&mut best, tail);
                }
                best.expect("non-empty range")
            }
        }
    }

    /// Largest prefix length in `lo+1..=hi` of a block whose relative excess
    /// is below `target`.
    fn rightmost_below(&self, level: usize, idx: usize, lo: usize, hi: usize, target: i64) -> Option<usize> {
        let g = &self.graph;
        let b = g.block(level, idx);
        let aug = b.excess.as_ref().expect("excess-augmented block");
        if lo == 0 && hi == b.len && aug.min.value >= target {
            return None;
        }
        match &b.kind {
            BlockKind::Literal(bytes) => {
                let mut e: i64 = bytes[..lo].iter().map(|&c| if c == OPEN { 1 } else { -1 }).sum();
                let mut found = None;
                for (x, &c) in bytes[lo..hi].iter().enumerate() {
                    e += if c == OPEN { 1 } else { -1 };
                    if e < target {
                        found = Some(lo + x + 1);
                    }
                }
                found
            }
            BlockKind::Internal { first_child, child_count } => {
                let cc = *child_count;
                (piece_of(b.len, cc, lo)..=piece_of(b.len, cc, hi - 1)).rev().find_map(|c| {
                    let (off, clen) = piece(b.len, cc, c);
                    let child = g.block(level + 1, first_child + c);
                    let base = Self::rel(child.rank_before[self.open] - b.rank_before[self.open], off);
                    self.rightmost_below(
                        level + 1,
                        first_child + c,
                        lo.max(off) - off,
                        hi.min(off + clen) - off,
                        target - base,
                    )
                    .map(|p| off + p)
                })
            }
            BlockKind::Back(bp) => {
                let d = bp.split;
                let cache = bp.excess.as_ref();
                if hi > d {
                    let skip = matches!(cache.and_then(|c| c.tail), Some(t) if lo <= d && hi == b.len && t.value >= target);
                    if !skip {
                        let base = Self::rel(bp.rank_at_split[self.open], d);
                        let hit = self
                            .rightmost_below(level, bp.target + 1, lo.max(d) - d, hi - d, target - base)
                            .map(|p| d + p);
                        if hit.is_some() {
                            return hit;
                        }
                    }
                }
                if lo < d {
                    let skip = matches!(cache, Some(c) if lo == 0 && hi >= d && c.head.value >= target);
                    if !skip {
                        let shift = Self::rel(bp.rank_at_offset[self.open], bp.offset);
                        return self
                            .rightmost_below(level, bp.target, bp.offset + lo, bp.offset + hi.min(d), target + shift)
                            .map(|p| p - bp.offset);
                    }
                }
                None
            }
        }
    }

    /// Largest `q` in `[0, end]` with `E(q) < target` (`E(0) = 0`).
    fn last_below(&self, end: usize, target: i64) -> Option<usize> {
        if end > 0 {
            let top = &self.graph.levels[0];
            let last = piece_of(self.graph.len(), top.len(), end - 1);
            let search = |idx: usize, hi: usize| {
                let b = &top[idx];
                let base = Self::rel(b.rank_before[self.open], b.start);
                self.rightmost_below(0, idx, 0, hi, target - base).map(|p| b.start + p)
            };
            if let Some(q) = search(last, end - top[last].start) {
                return Some(q);
            }
            if last > 0 {
                if let Some(idx) = self.top.last_below(last - 1, target) {
                    return Some(search(idx, top[idx].len).expect("block minimum is below target"));
                }
            }
        }
        (target > 0).then_some(0)
    }

    fn check_node(&self, u: NodeHandle) -> Result<()> {
        if u.0 == 0 || u.0 > self.len() || self.graph.access(u.0)? != OPEN {
            return Err(Error::InvalidNode(u.0));
        }
        Ok(())
    }

    /// Lowest common ancestor; a node is its own ancestor.
    ///
    /// For `u < v`, the leftmost minimum `m` of `E` over `[u, v]` is either at
    /// `u` (then `u` encloses `v`) or at the close of the child of the LCA
    /// that contains `u`, in which case `E(m)` is the LCA's depth and its
    /// opening parenthesis follows the last position before `u` whose excess
    /// is below that depth.
    pub fn lca(&self, u: NodeHandle, v: NodeHandle) -> Result<NodeHandle> {
        self.check_node(u)?;
        self.check_node(v)?;
        let (a, b) = if u <= v { (u.0, v.0) } else { (v.0, u.0) };
        if a == b {
            return Ok(NodeHandle(a));
        }
        let m = self.min_excess_pos(a, b)?;
        let depth = self.excess(m)?;
        if depth >= self.excess(a)? {
            return Ok(NodeHandle(a));
        }
        let q = self.last_below(a - 1, depth).expect("an ancestor exists");
        Ok(NodeHandle(q + 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bp(text: &[u8]) -> BpString {
        let cfg = BuildConfig { arity: 2, leaf_block_len: Some(2), level_skip: false, ..BuildConfig::default() };
        BpString::new(text, &cfg).unwrap()
    }

    #[test]
    fn excess_values() {
        let s = bp(b"(()())");
        let values: Vec<i64> = (0..=6).map(|i| s.excess(i).unwrap()).collect();
        assert_eq!(values, vec![0, 1, 2, 1, 2, 1, 0]);
        assert!(s.excess(7).is_err());
    }

    #[test]
    fn min_excess_examples() {
        let s = bp(b"(()())");
        assert_eq!(s.min_excess_pos(1, 6).unwrap(), 6);
        assert_eq!(s.min_excess_pos(2, 5).unwrap(), 3);
        assert_eq!(s.min_excess_pos(4, 4).unwrap(), 4);
        assert!(s.min_excess_pos(3, 2).is_err());
        assert!(s.min_excess_pos(0, 2).is_err());
    }

    #[test]
    fn lca_small_tree() {
        // root(1) -> a(2) -> b(3); root -> c(6) -> d(7)
        let s = bp(b"((())(()))");
        let n = NodeHandle;
        assert_eq!(s.lca(n(3), n(7)).unwrap(), n(1));
        assert_eq!(s.lca(n(2), n(3)).unwrap(), n(2));
        assert_eq!(s.lca(n(7), n(6)).unwrap(), n(6));
        assert_eq!(s.lca(n(3), n(3)).unwrap(), n(3));
        assert!(s.lca(n(4), n(1)).is_err());
    }

    #[test]
    fn sparse_min_matches_scan() {
        let values = vec![5, 3, 7, 3, 9, 1, 4, 1, 8, 2];
        let t = SparseMin::new(values.clone());
        for l in 0..values.len() {
            for r in l..values.len() {
                let want = (l..=r).min_by_key(|&i| (values[i], i)).unwrap();
                assert_eq!(t.argmin(l, r), want);
            }
            for target in 0..10 {
                let want = (0..=l).rev().find(|&i| values[i] < target);
                assert_eq!(t.last_below(l, target), want);
            }
        }
    }

    #[test]
    fn rejects_unbalanced() {
        let cfg = BuildConfig::default();
        assert!(matches!(BpString::new(b"(()", &cfg), Err(Error::Unbalanced(_))));
        assert!(matches!(BpString::new(b")(", &cfg), Err(Error::Unbalanced(_))));
        assert!(matches!(BpString::new(b"(x)", &cfg), Err(Error::Unbalanced(_))));
        let plain = build(b"(())", &cfg).unwrap();
        assert_eq!(BpString::from_graph(plain), Err(Error::NoExcess));
    }
}
