//! Block graph data model.
//!
//! Positions stored in blocks are 0-based; the public query API is 1-based.

/// Opening and closing parenthesis symbols used by excess augmentation.
pub const OPEN: u8 = b'(';
pub const CLOSE: u8 = b')';

/// Parameters for [`crate::build`]. `None` fields are derived from the text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuildConfig {
    /// Branching factor `r` (at least 2).
    pub arity: usize,
    /// Marked blocks at most this long become literal leaves.
    /// Defaults to `max(1, floor(log2 n / log2 sigma))`.
    pub leaf_block_len: Option<usize>,
    /// Length of the stored prefix and suffix of each block. Defaults to the
    /// leaf length.
    pub affix_len: Option<usize>,
    /// Symbols with rank/select support. Defaults to the whole alphabet when
    /// it has at most four symbols, otherwise to none.
    pub rank_symbols: Option<Vec<u8>>,
    /// Store excess minima (text must be over `(` and `)`).
    pub enable_excess: bool,
    pub hash_seed: u64,
    pub hash_modulus_bits: u32,
    /// Start from `r * z` top-level blocks instead of `r`.
    pub level_skip: bool,
    /// Cap on Las-Vegas attempts.
    pub max_attempts: u32,
}

impl Default for BuildConfig {
    fn default() -> Self {
        Self {
            arity: 4,
            leaf_block_len: None,
            affix_len: None,
            rank_symbols: None,
            enable_excess: false,
            hash_seed: 0,
            hash_modulus_bits: 61,
            level_skip: true,
            max_attempts: 16,
        }
    }
}

/// Parameters a built graph was constructed with, after defaults are applied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphParams {
    pub arity: usize,
    pub leaf_block_len: usize,
    pub affix_len: usize,
    /// Sorted, deduplicated.
    pub tracked: Vec<u8>,
    pub excess: bool,
    pub level_skip: bool,
    pub hash_seed: u64,
    pub hash_modulus_bits: u32,
}

/// Minimum of a prefix-excess sequence and the leftmost prefix length
/// (1-based) attaining it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MinAt {
    pub value: i64,
    pub pos: usize,
}

/// Excess summary of one block, relative to its first symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExcessAugment {
    pub total: i64,
    pub min: MinAt,
}

/// Excess minima of a back-pointing block split at `d`: over prefix lengths
/// `1..=d` and `d+1..=len` (both relative to the block start).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitExcess {
    pub head: MinAt,
    pub tail: Option<MinAt>,
}

/// Delegation record of an unmarked block: its content is the first
/// occurrence at `offset` inside `target` (continuing into `target + 1` when
/// `spans_next`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BackPointer {
    /// Index of the first target block within the same level.
    pub target: usize,
    pub spans_next: bool,
    /// 0-based offset of the occurrence inside the first target.
    pub offset: usize,
    /// Number of the block's symbols that fall inside the first target.
    pub split: usize,
    /// Per tracked symbol: occurrences in the first `offset` symbols of the
    /// first target.
    pub rank_at_offset: Vec<u64>,
    /// Per tracked symbol: occurrences in the first `split` symbols of this
    /// block.
    pub rank_at_split: Vec<u64>,
    pub excess: Option<SplitExcess>,
}

impl BackPointer {
    /// 1-based offset of the occurrence within the first target.
    pub fn g(&self) -> usize {
        self.offset + 1
    }

    /// Length of the block prefix that is a suffix of the first target.
    pub fn d(&self) -> usize {
        self.split
    }

    pub fn second_target(&self) -> Option<usize> {
        self.spans_next.then_some(self.target + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BlockKind {
    /// Children are `first_child..first_child + child_count` on the next level.
    Internal { first_child: usize, child_count: usize },
    Literal(Vec<u8>),
    Back(BackPointer),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    /// 0-based start in the text.
    pub start: usize,
    pub len: usize,
    pub kind: BlockKind,
    pub prefix: Vec<u8>,
    pub suffix: Vec<u8>,
    /// Per tracked symbol: occurrences in `text[..start]`.
    pub rank_before: Vec<u64>,
    pub excess: Option<ExcessAugment>,
}

impl Block {
    pub fn end(&self) -> usize {
        self.start + self.len
    }

    pub fn is_marked(&self) -> bool {
        !matches!(self.kind, BlockKind::Back(_))
    }
}

/// A verified block graph. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockGraph {
    pub(crate) n: usize,
    pub(crate) alphabet: Vec<u8>,
    pub(crate) params: GraphParams,
    pub(crate) levels: Vec<Vec<Block>>,
    pub(crate) z: usize,
    pub(crate) attempts: u32,
    /// Per tracked symbol: occurrences in the whole text.
    pub(crate) totals: Vec<u64>,
}

impl BlockGraph {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn alphabet(&self) -> &[u8] {
        &self.alphabet
    }

    pub fn sigma(&self) -> usize {
        self.alphabet.len()
    }

    pub fn params(&self) -> &GraphParams {
        &self.params
    }

    pub fn levels(&self) -> &[Vec<Block>] {
        &self.levels
    }

    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    /// LZ77 phrase count of the text.
    pub fn z(&self) -> usize {
        self.z
    }

    pub fn build_attempts(&self) -> u32 {
        self.attempts
    }

    pub(crate) fn tracked_index(&self, symbol: u8) -> Option<usize> {
        self.params.tracked.binary_search(&symbol).ok()
    }

    pub(crate) fn block(&self, level: usize, idx: usize) -> &Block {
        &self.levels[level][idx]
    }
}

/// Splits `len` symbols into `parts` pieces as evenly as possible, longer
/// pieces first. Returns the offset and length of piece `k`.
pub(crate) fn piece(len: usize, parts: usize, k: usize) -> (usize, usize) {
    let q = len / parts;
    let rem = len % parts;
    if k < rem {
        (k * (q + 1), q + 1)
    } else {
        (rem * (q + 1) + (k - rem) * q, q)
    }
}

/// Index of the piece containing `offset` under the split of [`piece`].
pub(crate) fn piece_of(len: usize, parts: usize, offset: usize) -> usize {
    debug_assert!(offset < len);
    let q = len / parts;
    let rem = len % parts;
    let big = rem * (q + 1);
    if offset < big {
        offset / (q + 1)
    } else {
        rem + (offset - big) / q
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pieces_tile_and_shrink() {
        for len in 1..60 {
            for parts in 1..=len.min(9) {
                let mut expect = 0;
                let mut prev = usize::MAX;
                for k in 0..parts {
                    let (off, l) = piece(len, parts, k);
                    assert_eq!(off, expect);
                    assert!(l <= prev && prev.saturating_sub(l) <= 1 || prev == usize::MAX);
                    for o in off..off + l {
                        assert_eq!(piece_of(len, parts, o), k);
                    }
                    expect += l;
                    prev = l;
                }
                assert_eq!(expect, len);
            }
        }
    }
}
