//! Level-by-level construction with Karp-Rabin marking and full
//! reconstruction as the acceptance test of each attempt.
//!
//! Every level is processed with two passes over the text: block and pair
//! signatures go into a table, then a rolling window records the leftmost
//! position at which each signature is seen. A pair of text-adjacent blocks
//! whose leftmost position is its own start is a first occurrence and both
//! blocks are marked. Unmarked blocks point at the marked block(s) covering
//! their leftmost occurrence.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{
    piece, BackPointer, Block, BlockGraph, BlockKind, BuildConfig, ExcessAugment, GraphParams,
    MinAt, SplitExcess, CLOSE, OPEN,
};
use crate::kr::KarpRabinHasher;
use crate::lz;

/// Span of a block at some level: 0-based start and length.
pub type Span = (usize, usize);

/// Result of scanning one level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelMarks {
    pub marked: Vec<bool>,
    /// Leftmost position whose window signature equals the block's.
    pub leftmost: Vec<usize>,
}

/// Per tracked symbol prefix counts, flattened: `counts[k * (n + 1) + i]`.
struct PrefixCounts {
    stride: usize,
    counts: Vec<u32>,
}

impl PrefixCounts {
    fn new(text: &[u8], tracked: &[u8]) -> Self {
        let stride = text.len() + 1;
        let mut counts = vec![0u32; stride * tracked.len()];
        for (k, &a) in tracked.iter().enumerate() {
            let row = &mut counts[k * stride..(k + 1) * stride];
            for (i, &c) in text.iter().enumerate() {
                row[i + 1] = row[i] + u32::from(c == a);
            }
        }
        Self { stride, counts }
    }

    fn at(&self, k: usize, i: usize) -> u64 {
        u64::from(self.counts[k * self.stride + i])
    }

    fn range(&self, tracked: usize, from: usize, to: usize) -> Vec<u64> {
        (0..tracked).map(|k| self.at(k, to) - self.at(k, from)).collect()
    }
}

fn step(c: u8) -> i64 {
    if c == OPEN {
        1
    } else {
        -1
    }
}

/// Leftmost minimum of prefix excess over prefix lengths `from+1..=to` of
/// `bytes`, relative to `bytes[0]`.
fn min_prefix(bytes: &[u8], from: usize, to: usize) -> MinAt {
    let mut e: i64 = bytes[..from].iter().map(|&c| step(c)).sum();
    let mut best = MinAt { value: i64::MAX, pos: 0 };
    for (k, &c) in bytes[from..to].iter().enumerate() {
        e += step(c);
        if e < best.value {
            best = MinAt { value: e, pos: from + k + 1 };
        }
    }
    best
}

fn augment(bytes: &[u8]) -> ExcessAugment {
    ExcessAugment { total: bytes.iter().map(|&c| step(c)).sum(), min: min_prefix(bytes, 0, bytes.len()) }
}

/// Marks the blocks of one level. `spans` must be sorted by start and
/// disjoint; pairs are formed only by blocks that are adjacent in the text.
pub fn mark_level(text: &[u8], spans: &[Span], hasher: &KarpRabinHasher) -> LevelMarks {
    const UNSET: usize = usize::MAX;
    // window length -> signature -> leftmost start
    let mut tables: HashMap<usize, HashMap<u64, usize>> = HashMap::new();
    let mut reach: HashMap<usize, usize> = HashMap::new();
    let mut block_sigs = Vec::with_capacity(spans.len());
    let mut pair_sigs = Vec::with_capacity(spans.len());

    let mut note = |len: usize, sig: u64, start: usize| {
        tables.entry(len).or_default().entry(sig).or_insert(UNSET);
        let r = reach.entry(len).or_insert(0);
        *r = (*r).max(start);
    };
    for (i, &(start, len)) in spans.iter().enumerate() {
        let sig = hasher.hash(&text[start..start + len]);
        note(len, sig, start);
        block_sigs.push(sig);
        let pair = spans.get(i + 1).filter(|next| next.0 == start + len).map(|next| {
            let plen = len + next.1;
            let sig = hasher.hash(&text[start..start + plen]);
            note(plen, sig, start);
            (plen, sig)
        });
        pair_sigs.push(pair);
    }

    for (&len, table) in tables.iter_mut() {
        let last = reach[&len];
        let mut pending = table.len();
        for (p, sig) in hasher.windows(text, len) {
            if p > last || pending == 0 {
                break;
            }
            if let Some(slot) = table.get_mut(&sig) {
                if *slot == UNSET {
                    *slot = p;
                    pending -= 1;
                }
            }
        }
    }

    let mut marked = vec![false; spans.len()];
    let mut leftmost = Vec::with_capacity(spans.len());
    for (i, &(start, len)) in spans.iter().enumerate() {
        let first = tables[&len][&block_sigs[i]];
        leftmost.push(first);
        if i == 0 || first >= start {
            marked[i] = true;
        }
        if let Some((plen, sig)) = pair_sigs[i] {
            if tables[&plen][&sig] >= start {
                marked[i] = true;
                marked[i + 1] = true;
            }
        }
    }
    LevelMarks { marked, leftmost }
}

struct Resolver<'a> {
    text: &'a [u8],
    counts: &'a PrefixCounts,
    tracked: usize,
    excess: bool,
}

impl Resolver<'_> {
    /// Back pointer of unmarked block `idx` whose content first occurs at
    /// `source`. Fails when that occurrence is not covered by one marked
    /// block or two text-adjacent marked blocks preceding `idx`.
    fn resolve(&self, spans: &[Span], marked: &[bool], idx: usize, source: usize) -> Result<BackPointer> {
        let (start, len) = spans[idx];
        if source >= start {
            return Err(Error::Unmarked);
        }
        let j = spans.partition_point(|s| s.0 <= source).checked_sub(1).ok_or(Error::Unmarked)?;
        let (tstart, tlen) = spans[j];
        if source >= tstart + tlen || !marked[j] || j >= idx {
            return Err(Error::Unmarked);
        }
        let offset = source - tstart;
        let spans_next = offset + len > tlen;
        if spans_next {
            let k = j + 1;
            let ok = k < idx
                && marked[k]
                && spans[k].0 == tstart + tlen
                && source + len <= spans[k].0 + spans[k].1;
            if !ok {
                return Err(Error::Unmarked);
            }
        }
        let split = if spans_next { tlen - offset } else { len };
        let excess = self.excess.then(|| {
            let bytes = &self.text[start..start + len];
            SplitExcess {
                head: min_prefix(bytes, 0, split),
                tail: (split < len).then(|| min_prefix(bytes, split, len)),
            }
        });
        Ok(BackPointer {
            target: j,
            spans_next,
            offset,
            split,
            rank_at_offset: self.counts.range(self.tracked, tstart, source),
            rank_at_split: self.counts.range(self.tracked, start, start + split),
            excess,
        })
    }
}

/// Public form of back-pointer resolution for a single block, mainly for
/// inspection and tests.
pub fn resolve_back_pointer(
    text: &[u8],
    spans: &[Span],
    marks: &LevelMarks,
    idx: usize,
    tracked: &[u8],
    excess: bool,
) -> Result<BackPointer> {
    let counts = PrefixCounts::new(text, tracked);
    let resolver = Resolver { text, counts: &counts, tracked: tracked.len(), excess };
    resolver.resolve(spans, &marks.marked, idx, marks.leftmost[idx])
}

fn default_leaf_len(n: usize, sigma: usize) -> usize {
    let ln = (n as f64).log2();
    let ls = (sigma.max(2) as f64).log2();
    ((ln / ls).floor() as usize).max(1)
}

/// Number of top-level blocks, or `None` for a single literal node.
fn top_count(n: usize, arity: usize, leaf: usize, skip: bool, z: usize) -> Option<usize> {
    if n <= leaf || (!skip && n < arity) {
        return None;
    }
    if !skip {
        return Some(arity);
    }
    let skipped = arity.saturating_mul(z);
    if n > skipped.saturating_mul(leaf) {
        Some(skipped)
    } else {
        Some(n.div_ceil(leaf))
    }
}

fn resolve_params(text: &[u8], alphabet: &[u8], config: &BuildConfig) -> Result<GraphParams> {
    if config.arity < 2 {
        return Err(Error::InvalidConfig(format!("arity {} < 2", config.arity)));
    }
    if !(8..=62).contains(&config.hash_modulus_bits) {
        return Err(Error::ModulusBits(config.hash_modulus_bits));
    }
    if config.max_attempts == 0 {
        return Err(Error::InvalidConfig("max_attempts must be positive".into()));
    }
    let leaf = config.leaf_block_len.unwrap_or_else(|| default_leaf_len(text.len(), alphabet.len()));
    let affix = config.affix_len.unwrap_or(leaf);
    if leaf == 0 || affix == 0 {
        return Err(Error::InvalidConfig("leaf and affix lengths must be positive".into()));
    }
    let mut tracked = match &config.rank_symbols {
        Some(symbols) => symbols.clone(),
        None if alphabet.len() <= 4 => alphabet.to_vec(),
        None => Vec::new(),
    };
    if config.enable_excess {
        if let Some(&bad) = alphabet.iter().find(|&&c| c != OPEN && c != CLOSE) {
            return Err(Error::InvalidConfig(format!(
                "excess needs a parentheses text, found {:#04x}",
                bad
            )));
        }
        tracked.extend([OPEN, CLOSE]);
    }
    tracked.sort_unstable();
    tracked.dedup();
    if let Some(&bad) = tracked.iter().find(|c| alphabet.binary_search(c).is_err()) {
        return Err(Error::InvalidConfig(format!("tracked symbol {:#04x} does not occur", bad)));
    }
    Ok(GraphParams {
        arity: config.arity,
        leaf_block_len: leaf,
        affix_len: affix,
        tracked,
        excess: config.enable_excess,
        level_skip: config.level_skip,
        hash_seed: config.hash_seed,
        hash_modulus_bits: config.hash_modulus_bits,
    })
}

fn make_block(
    text: &[u8],
    span: Span,
    kind: BlockKind,
    params: &GraphParams,
    counts: &PrefixCounts,
) -> Block {
    let (start, len) = span;
    let bytes = &text[start..start + len];
    let a = params.affix_len.min(len);
    Block {
        start,
        len,
        kind,
        prefix: bytes[..a].to_vec(),
        suffix: bytes[len - a..].to_vec(),
        rank_before: (0..params.tracked.len()).map(|k| counts.at(k, start)).collect(),
        excess: params.excess.then(|| augment(bytes)),
    }
}

/// Monte-Carlo phase: one pass of level construction with a fixed hasher.
fn construct_levels(
    text: &[u8],
    params: &GraphParams,
    z: usize,
    hasher: &KarpRabinHasher,
    counts: &PrefixCounts,
) -> Result<Vec<Vec<Block>>> {
    let n = text.len();
    let Some(top) = top_count(n, params.arity, params.leaf_block_len, params.level_skip, z) else {
        let block = make_block(text, (0, n), BlockKind::Literal(text.to_vec()), params, counts);
        return Ok(vec![vec![block]]);
    };
    let resolver = Resolver { text, counts, tracked: params.tracked.len(), excess: params.excess };
    let mut spans: Vec<Span> = (0..top).map(|k| piece(n, top, k)).collect();
    let mut levels = Vec::new();
    while !spans.is_empty() {
        let mut marks = mark_level(text, &spans, hasher);
        let mut next: Vec<Span> = Vec::new();
        let mut blocks = Vec::with_capacity(spans.len());
        for (i, &(start, len)) in spans.iter().enumerate() {
            let mut back = None;
            if !marks.marked[i] {
                let source = marks.leftmost[i];
                if source >= start || text[source..source + len] != text[start..start + len] {
                    return Err(Error::Unmarked);
                }
                match resolver.resolve(&spans, &marks.marked, i, source) {
                    Ok(bp) => back = Some(bp),
                    // The occurrence is real but not covered by marked blocks.
                    Err(Error::Unmarked) => marks.marked[i] = true,
                    Err(e) => return Err(e),
                }
            }
            let kind = if let Some(bp) = back {
                BlockKind::Back(bp)
            } else if len <= params.leaf_block_len {
                BlockKind::Literal(text[start..start + len].to_vec())
            } else {
                let child_count = params.arity.min(len);
                let first_child = next.len();
                next.extend((0..child_count).map(|k| {
                    let (off, l) = piece(len, child_count, k);
                    (start + off, l)
                }));
                BlockKind::Internal { first_child, child_count }
            };
            blocks.push(make_block(text, (start, len), kind, params, counts));
        }
        levels.push(blocks);
        spans = next;
    }
    Ok(levels)
}

/// Expands the graph back into text. Returns `None` when the structure is
/// inconsistent (a pointer reaches text not yet produced).
pub(crate) fn reconstruct(levels: &[Vec<Block>], n: usize) -> Option<Vec<u8>> {
    fn emit(levels: &[Vec<Block>], level: usize, idx: usize, out: &mut Vec<u8>) -> Option<()> {
        let block = &levels[level][idx];
        if out.len() != block.start {
            return None;
        }
        match &block.kind {
            BlockKind::Literal(bytes) => out.extend_from_slice(bytes),
            BlockKind::Internal { first_child, child_count } => {
                for c in *first_child..first_child + child_count {
                    emit(levels, level + 1, c, out)?;
                }
            }
            BlockKind::Back(bp) => {
                let src = levels[level][bp.target].start + bp.offset;
                if src + block.len > block.start {
                    return None;
                }
                out.extend_from_within(src..src + block.len);
            }
        }
        Some(())
    }
    let mut out = Vec::with_capacity(n);
    for idx in 0..levels.first()?.len() {
        emit(levels, 0, idx, &mut out)?;
    }
    (out.len() == n).then_some(out)
}

/// Recomputes every sample, cache and affix from `text` and compares them
/// with the stored ones.
pub(crate) fn metadata_consistent(levels: &[Vec<Block>], text: &[u8], params: &GraphParams, totals: &[u64]) -> bool {
    let counts = PrefixCounts::new(text, &params.tracked);
    let tracked = params.tracked.len();
    if (0..tracked).any(|k| counts.at(k, text.len()) != totals[k]) {
        return false;
    }
    levels.iter().all(|level| {
        level.iter().all(|b| {
            let kind = match &b.kind {
                BlockKind::Back(bp) => {
                    let tstart = level[bp.target].start;
                    let bytes = &text[b.start..b.end()];
                    BlockKind::Back(BackPointer {
                        rank_at_offset: counts.range(tracked, tstart, tstart + bp.offset),
                        rank_at_split: counts.range(tracked, b.start, b.start + bp.split),
                        excess: params.excess.then(|| SplitExcess {
                            head: min_prefix(bytes, 0, bp.split),
                            tail: (bp.split < b.len).then(|| min_prefix(bytes, bp.split, b.len)),
                        }),
                        ..bp.clone()
                    })
                }
                other => other.clone(),
            };
            make_block(text, (b.start, b.len), kind, params, &counts) == *b
        })
    })
}

/// True iff the graph expands to exactly `text`.
pub fn verify(graph: &BlockGraph, text: &[u8]) -> bool {
    graph.n == text.len() && reconstruct(&graph.levels, graph.n).as_deref() == Some(text)
}

/// Builds a verified block graph for `text`.
///
/// Each attempt draws a fresh hasher; an attempt is rejected when back
/// pointers cannot be resolved or when reconstruction differs from `text`.
/// After a rejected attempt the modulus width doubles (up to 61 bits, or the
/// configured width if larger).
pub fn build(text: &[u8], config: &BuildConfig) -> Result<BlockGraph> {
    if text.is_empty() {
        return Err(Error::EmptyText);
    }
    let mut alphabet = text.to_vec();
    alphabet.sort_unstable();
    alphabet.dedup();
    let params = resolve_params(text, &alphabet, config)?;
    let z = lz::parse(text)?.phrase_count();
    let counts = PrefixCounts::new(text, &params.tracked);
    let totals = (0..params.tracked.len()).map(|k| counts.at(k, text.len())).collect();

    let widest = config.hash_modulus_bits.max(61);
    for attempt in 0..config.max_attempts {
        let bits = config.hash_modulus_bits.checked_shl(attempt).unwrap_or(widest).min(widest);
        let seed = config.hash_seed.wrapping_add(u64::from(attempt).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let hasher = KarpRabinHasher::new(seed, bits)?;
        let levels = match construct_levels(text, &params, z, &hasher, &counts) {
            Ok(levels) => levels,
            Err(Error::Unmarked) => continue,
            Err(e) => return Err(e),
        };
        if reconstruct(&levels, text.len()).as_deref() == Some(text) {
            return Ok(BlockGraph {
                n: text.len(),
                alphabet,
                params,
                levels,
                z,
                attempts: attempt + 1,
                totals,
            });
        }
    }
    Err(Error::CollisionsPersist(config.max_attempts))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(arity: usize, leaf: usize) -> BuildConfig {
        BuildConfig { arity, leaf_block_len: Some(leaf), level_skip: false, ..BuildConfig::default() }
    }

    /// Leftmost-occurrence oracle for pair marking.
    fn oracle_marks(text: &[u8], spans: &[Span]) -> Vec<bool> {
        let first = |s: usize, l: usize| {
            (0..=s).find(|&p| text[p..p + l] == text[s..s + l]).unwrap()
        };
        let mut marked = vec![false; spans.len()];
        marked[0] = true;
        for (i, &(s, l)) in spans.iter().enumerate() {
            if first(s, l) == s {
                marked[i] = true;
            }
            if let Some(&(ns, nl)) = spans.get(i + 1) {
                if ns == s + l && first(s, l + nl) == s {
                    marked[i] = true;
                    marked[i + 1] = true;
                }
            }
        }
        marked
    }

    #[test]
    fn short_text_is_one_literal() {
        let g = build(b"ab", &cfg(3, 1)).unwrap();
        assert_eq!(g.level_count(), 1);
        assert_eq!(g.levels[0].len(), 1);
        assert_eq!(g.levels[0][0].kind, BlockKind::Literal(b"ab".to_vec()));

        let g = build(b"abcd", &cfg(2, 4)).unwrap();
        assert_eq!(g.levels[0][0].kind, BlockKind::Literal(b"abcd".to_vec()));
    }

    #[test]
    fn ababab_top_level() {
        let g = build(b"ababab", &cfg(3, 2)).unwrap();
        let top = &g.levels[0];
        assert_eq!(top.len(), 3);
        assert!(top[0].is_marked() && top[1].is_marked());
        let BlockKind::Back(bp) = &top[2].kind else { panic!("third block should point back") };
        assert_eq!((bp.target + 1, bp.g(), bp.d()), (1, 1, 2));
        assert_eq!(bp.second_target(), None);
        assert_eq!(bp.rank_at_offset, vec![0, 0]);
        assert_eq!(bp.rank_at_split, vec![1, 1]);
    }

    #[test]
    fn mark_level_examples() {
        let h = KarpRabinHasher::new(1, 61).unwrap();
        let m = mark_level(b"xyz", &[(0, 3)], &h);
        assert_eq!(m.marked, vec![true]);

        let m = mark_level(b"ababab", &[(0, 2), (2, 2), (4, 2)], &h);
        assert_eq!(m.marked, vec![true, true, false]);
        assert_eq!(m.leftmost[2], 0);

        let m = mark_level(b"abcdef", &[(0, 2), (2, 2), (4, 2)], &h);
        assert_eq!(m.marked, vec![true; 3]);
    }

    #[test]
    fn non_adjacent_blocks_never_pair() {
        let h = KarpRabinHasher::new(1, 61).unwrap();
        // "ab" and "cd" are not text-adjacent, so "abcd"-style pairing is
        // never considered; "cd" has no earlier occurrence and stays marked.
        let text = b"ab__cdab";
        let m = mark_level(text, &[(0, 2), (4, 2), (6, 2)], &h);
        assert_eq!(m.marked, vec![true, true, true]);
    }

    #[test]
    fn marks_match_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let h = KarpRabinHasher::new(2, 61).unwrap();
        for _ in 0..200 {
            let n = rng.gen_range(2..200);
            let text: Vec<u8> = (0..n).map(|_| b'a' + rng.gen_range(0..2)).collect();
            let parts = rng.gen_range(2..=n.min(9));
            let spans: Vec<Span> = (0..parts).map(|k| piece(n, parts, k)).collect();
            assert_eq!(mark_level(&text, &spans, &h).marked, oracle_marks(&text, &spans));
        }
    }

    #[test]
    fn straddling_back_pointer() {
        // blocks "aa" "ab" "aa" "ba" "ab": block 3 first occurs at 3,
        // straddling blocks 1 and 2.
        let text = b"aaabaabaab";
        let spans: Vec<Span> = (0..5).map(|k| piece(10, 5, k)).collect();
        let h = KarpRabinHasher::new(4, 61).unwrap();
        let marks = mark_level(text, &spans, &h);
        let bp = resolve_back_pointer(text, &spans, &marks, 3, b"ab", false).unwrap();
        assert_eq!(marks.leftmost[3], 3);
        assert_eq!((bp.target, bp.g(), bp.second_target()), (1, 2, Some(2)));
        assert_eq!(bp.d(), spans[0].1 - bp.g() + 1);
        assert_eq!(bp.rank_at_offset, vec![1, 0]);
        assert_eq!(bp.rank_at_split, vec![0, 1]);
    }

    #[test]
    fn invalid_configs() {
        assert_eq!(build(b"", &BuildConfig::default()), Err(Error::EmptyText));
        assert!(matches!(build(b"abc", &cfg(1, 1)), Err(Error::InvalidConfig(_))));
        let bad_track = BuildConfig { rank_symbols: Some(vec![b'z']), ..cfg(2, 1) };
        assert!(matches!(build(b"abc", &bad_track), Err(Error::InvalidConfig(_))));
        let bad_excess = BuildConfig { enable_excess: true, ..cfg(2, 1) };
        assert!(matches!(build(b"(a)", &bad_excess), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn corrupted_literal_fails_verify() {
        let text = b"abracadabra_abracadabra";
        let mut g = build(text, &cfg(2, 2)).unwrap();
        assert!(verify(&g, text));
        let lit = g
            .levels
            .iter_mut()
            .flatten()
            .find_map(|b| match &mut b.kind {
                BlockKind::Literal(bytes) => Some(bytes),
                _ => None,
            })
            .unwrap();
        lit[0] ^= 1;
        assert!(!verify(&g, text));
    }

    #[test]
    fn unary_alphabet_collapses() {
        let text = vec![b'a'; 5000];
        let g = build(&text, &BuildConfig::default()).unwrap();
        assert_eq!(g.z(), 2);
        let blocks: usize = g.levels.iter().map(Vec::len).sum();
        assert!(blocks <= 4 * g.params.arity * g.level_count(), "{blocks} blocks");
        assert!(verify(&g, &text));
    }
}
