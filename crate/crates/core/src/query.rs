//! Access, extraction, rank and select by descent.
//!
//! All public positions are 1-based. A descent moves either down to the child
//! containing the position or sideways through a back pointer to the marked
//! block(s) holding the first occurrence, so at most two blocks are visited
//! per level.

use crate::error::{Error, Result};
use crate::graph::{piece, piece_of, Block, BlockGraph, BlockKind};

/// Descent state: a block and a 0-based offset inside it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QueryCursor {
    pub level: usize,
    pub block: usize,
    pub local_offset: usize,
}

impl BlockGraph {
    fn top_cursor(&self, pos: usize) -> QueryCursor {
        let top = self.levels[0].len();
        let block = piece_of(self.n, top, pos);
        QueryCursor { level: 0, block, local_offset: pos - self.levels[0][block].start }
    }

    fn check_pos(&self, i: usize) -> Result<usize> {
        if i == 0 || i > self.n {
            return Err(Error::OutOfRange { pos: i, len: self.n });
        }
        Ok(i - 1)
    }

    fn symbol_index(&self, a: u8) -> Result<usize> {
        self.tracked_index(a).ok_or(Error::UntrackedSymbol(a))
    }

    /// `S[i]`.
    pub fn access(&self, i: usize) -> Result<u8> {
        self.access_traced(i).map(|(c, _)| c)
    }

    /// `S[i]` and the number of blocks visited.
    pub fn access_traced(&self, i: usize) -> Result<(u8, usize)> {
        let mut cur = self.top_cursor(self.check_pos(i)?);
        let mut visits = 0;
        loop {
            visits += 1;
            let b = self.block(cur.level, cur.block);
            match &b.kind {
                BlockKind::Literal(bytes) => return Ok((bytes[cur.local_offset], visits)),
                BlockKind::Internal { first_child, child_count } => {
                    let k = piece_of(b.len, *child_count, cur.local_offset);
                    cur.local_offset -= piece(b.len, *child_count, k).0;
                    cur.level += 1;
                    cur.block = first_child + k;
                }
                BlockKind::Back(bp) => {
                    let t = bp.offset + cur.local_offset;
                    let tlen = self.block(cur.level, bp.target).len;
                    if t < tlen {
                        cur.block = bp.target;
                        cur.local_offset = t;
                    } else {
                        cur.block = bp.target + 1;
                        cur.local_offset = t - tlen;
                    }
                }
            }
        }
    }

    /// `S[i..i+m-1]`.
    pub fn extract(&self, i: usize, m: usize) -> Result<Vec<u8>> {
        self.extract_traced(i, m).map(|(s, _)| s)
    }

    /// Extraction plus the number of blocks visited. The range is cut into
    /// pieces of at most `affix_len` symbols; each piece descends until it
    /// straddles a block boundary (or fits in a stored affix) and is then read
    /// from the prefix/suffix affixes of the blocks it touches.
    pub fn extract_traced(&self, i: usize, m: usize) -> Result<(Vec<u8>, usize)> {
        let end = i.checked_add(m).and_then(|e| e.checked_sub(1)).unwrap_or(0);
        if i == 0 || end > self.n {
            return Err(Error::OutOfRange { pos: end.max(i), len: self.n });
        }
        let mut out = Vec::with_capacity(m);
        let mut visits = 0;
        let step = self.params.affix_len;
        let mut pos = i - 1;
        while pos < i - 1 + m {
            let len = step.min(i - 1 + m - pos);
            self.extract_piece(pos, len, &mut out, &mut visits);
            pos += len;
        }
        Ok((out, visits))
    }

    /// Reads `len` symbols starting at offset `local` of block `idx`, moving
    /// on to the following blocks of the same level. Valid only when the
    /// blocks touched are text-adjacent and `len <= affix_len`.
    fn read_span(&self, level: usize, mut idx: usize, local: usize, len: usize, out: &mut Vec<u8>, visits: &mut usize) {
        let first: &Block = self.block(level, idx);
        let part = (first.len - local).min(len);
        let sfx = &first.suffix;
        let from = local - (first.len - sfx.len());
        out.extend_from_slice(&sfx[from..from + part]);
        *visits += 1;
        let mut left = len - part;
        while left > 0 {
            idx += 1;
            let b = self.block(level, idx);
            let take = left.min(b.len);
            out.extend_from_slice(&b.prefix[..take]);
            *visits += 1;
            left -= take;
        }
    }

    fn extract_piece(&self, pos: usize, len: usize, out: &mut Vec<u8>, visits: &mut usize) {
        let top = self.levels[0].len();
        let first = piece_of(self.n, top, pos);
        if piece_of(self.n, top, pos + len - 1) != first {
            let local = pos - self.levels[0][first].start;
            self.read_span(0, first, local, len, out, visits);
            return;
        }
        let mut cur = self.top_cursor(pos);
        loop {
            *visits += 1;
            let b = self.block(cur.level, cur.block);
            let local = cur.local_offset;
            if local + len <= b.prefix.len() {
                out.extend_from_slice(&b.prefix[local..local + len]);
                return;
            }
            let sfx_start = b.len - b.suffix.len();
            if local >= sfx_start {
                out.extend_from_slice(&b.suffix[local - sfx_start..local - sfx_start + len]);
                return;
            }
            match &b.kind {
                BlockKind::Literal(bytes) => {
                    out.extend_from_slice(&bytes[local..local + len]);
                    return;
                }
                BlockKind::Internal { first_child, child_count } => {
                    let k = piece_of(b.len, *child_count, local);
                    let off = piece(b.len, *child_count, k).0;
                    if piece_of(b.len, *child_count, local + len - 1) != k {
                        self.read_span(cur.level + 1, first_child + k, local - off, len, out, visits);
                        return;
                    }
                    cur = QueryCursor { level: cur.level + 1, block: first_child + k, local_offset: local - off };
                }
                BlockKind::Back(bp) => {
                    let t = bp.offset + local;
                    let tlen = self.block(cur.level, bp.target).len;
                    if t + len <= tlen {
                        cur.block = bp.target;
                        cur.local_offset = t;
                    } else if t >= tlen {
                        cur.block = bp.target + 1;
                        cur.local_offset = t - tlen;
                    } else {
                        self.read_span(cur.level, bp.target, t, len, out, visits);
                        return;
                    }
                }
            }
        }
    }

    /// Occurrences of `a` in `S[1..i]`.
    pub fn rank(&self, a: u8, i: usize) -> Result<u64> {
        let k = self.symbol_index(a)?;
        if i > self.n {
            return Err(Error::OutOfRange { pos: i, len: self.n });
        }
        if i == 0 {
            return Ok(0);
        }
        if i == self.n {
            return Ok(self.totals[k]);
        }
        let cur = self.top_cursor(i - 1);
        let b = self.block(0, cur.block);
        Ok(b.rank_before[k] + self.local_rank(0, cur.block, k, cur.local_offset + 1))
    }

    /// Occurrences of tracked symbol `k` among the first `t` symbols of a block.
    pub(crate) fn local_rank(&self, level: usize, idx: usize, k: usize, t: usize) -> u64 {
        if t == 0 {
            return 0;
        }
        let b = self.block(level, idx);
        match &b.kind {
            BlockKind::Literal(bytes) => {
                let a = self.params.tracked[k];
                bytes[..t].iter().filter(|&&c| c == a).count() as u64
            }
            BlockKind::Internal { first_child, child_count } => {
                let c = piece_of(b.len, *child_count, t - 1);
                let off = piece(b.len, *child_count, c).0;
                let child = self.block(level + 1, first_child + c);
                child.rank_before[k] - b.rank_before[k]
                    + self.local_rank(level + 1, first_child + c, k, t - off)
            }
            BlockKind::Back(bp) => {
                let d = bp.split;
                if t < d {
                    self.local_rank(level, bp.target, k, bp.offset + t) - bp.rank_at_offset[k]
                } else if t == d {
                    bp.rank_at_split[k]
                } else {
                    bp.rank_at_split[k] + self.local_rank(level, bp.target + 1, k, t - d)
                }
            }
        }
    }

    /// Position of the `j`-th occurrence of `a`.
    pub fn select(&self, a: u8, j: u64) -> Result<usize> {
        let k = self.symbol_index(a)?;
        if j == 0 || j > self.totals[k] {
            return Err(Error::NoSuchOccurrence);
        }
        let top = &self.levels[0];
        let idx = top.partition_point(|b| b.rank_before[k] < j) - 1;
        let b = &top[idx];
        Ok(b.start + self.local_select(0, idx, k, j - b.rank_before[k]) + 1)
    }

    /// 0-based offset of the `j`-th occurrence of tracked symbol `k` inside a
    /// block; `j` must not exceed the block's count.
    pub(crate) fn local_select(&self, level: usize, idx: usize, k: usize, j: u64) -> usize {
        let b = self.block(level, idx);
        match &b.kind {
            BlockKind::Literal(bytes) => {
                let a = self.params.tracked[k];
                bytes
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c == a)
                    .nth(j as usize - 1)
                    .map(|(p, _)| p)
                    .expect("occurrence inside literal block")
            }
            BlockKind::Internal { first_child, child_count } => {
                let children = &self.levels[level + 1][*first_child..first_child + child_count];
                let base = b.rank_before[k];
                let c = children.partition_point(|ch| ch.rank_before[k] - base < j) - 1;
                let child = &children[c];
                piece(b.len, *child_count, c).0
                    + self.local_select(level + 1, first_child + c, k, j - (child.rank_before[k] - base))
            }
            BlockKind::Back(bp) => {
                if j <= bp.rank_at_split[k] {
                    self.local_select(level, bp.target, k, j + bp.rank_at_offset[k]) - bp.offset
                } else {
                    self.local_select(level, bp.target + 1, k, j - bp.rank_at_split[k]) + bp.split
                }
            }
        }
    }
}
