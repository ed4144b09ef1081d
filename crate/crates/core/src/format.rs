//! Binary graph file (`BGF1`) and space accounting.
//!
//! Layout, all fixed-width integers little-endian, counts as unsigned LEB128
//! varints and signed values zigzag-encoded:
//!
//! ```text
//! magic "BGF1" | version u16 | file length u64
//! header: n, sigma, alphabet[sigma], arity, leaf_len, affix_len, flags u8,
//!         z, hash_seed u64, modulus_bits u8, attempts, tracked count,
//!         tracked[..], totals[..], level count
//! per level, per block:
//!   tag u8 (0 internal, 1 literal, 2 back)
//!   excess summary (if enabled)
//!   literal:  packed symbols
//!   back:     distance to target, offset, split excess
//!   internal and back: packed prefix then suffix affix (once when the
//!   block is no longer than the affix length)
//! then per level: rank_before deltas and then the back blocks' rank caches
//!   (at offset, at split), each as a width byte plus fixed-width fields
//! trailer: CRC-64/XZ of every preceding byte, u64
//! ```
//!
//! Spans are not stored: the top level splits `n` evenly into as many blocks
//! as it has, and every internal block splits into `min(r, len)` children in
//! level order. The second target and the split follow from the offset and
//! the target length. Symbols are packed as `ceil(log2 sigma)`-bit codes into
//! the sorted alphabet, least significant bit first.

use crc::{Crc, CRC_64_XZ};

use crate::builder::{metadata_consistent, reconstruct};
use crate::error::{Error, Result};
use crate::graph::{
    piece, BackPointer, Block, BlockGraph, BlockKind, ExcessAugment, GraphParams, MinAt, SplitExcess,
};

pub const MAGIC: &[u8; 4] = b"BGF1";
pub const VERSION: u16 = 1;
const CRC64: Crc<u64> = Crc::<u64>::new(&CRC_64_XZ);

const TAG_INTERNAL: u8 = 0;
const TAG_LITERAL: u8 = 1;
const TAG_BACK: u8 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Category {
    Header,
    Structure,
    Literal,
    Affix,
    Sample,
    Excess,
    Trailer,
}

/// Serialized size broken down by category, plus shape counters.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SpaceStats {
    pub n: usize,
    pub sigma: usize,
    pub z: usize,
    pub arity: usize,
    pub leaf_block_len: usize,
    pub affix_len: usize,
    pub levels: usize,
    pub blocks_per_level: Vec<usize>,
    pub marked_per_level: Vec<usize>,
    pub header_bits: usize,
    pub pointer_bits: usize,
    pub literal_bits: usize,
    pub affix_bits: usize,
    pub sample_bits: usize,
    pub excess_bits: usize,
    pub trailer_bits: usize,
    pub total_bytes: usize,
    pub build_attempts: u32,
}

impl SpaceStats {
    pub fn total_blocks(&self) -> usize {
        self.blocks_per_level.iter().sum()
    }

    /// `key=value` lines.
    pub fn to_key_value(&self) -> String {
        let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
        let rows: [(&str, String); 18] = [
            ("n", self.n.to_string()),
            ("sigma", self.sigma.to_string()),
            ("z", self.z.to_string()),
            ("arity", self.arity.to_string()),
            ("leaf_len", self.leaf_block_len.to_string()),
            ("affix_len", self.affix_len.to_string()),
            ("levels", self.levels.to_string()),
            ("blocks_per_level", join(&self.blocks_per_level)),
            ("marked_per_level", join(&self.marked_per_level)),
            ("header_bits", self.header_bits.to_string()),
            ("pointer_bits", self.pointer_bits.to_string()),
            ("literal_bits", self.literal_bits.to_string()),
            ("affix_bits", self.affix_bits.to_string()),
            ("sample_bits", self.sample_bits.to_string()),
            ("excess_bits", self.excess_bits.to_string()),
            ("trailer_bits", self.trailer_bits.to_string()),
            ("total_bytes", self.total_bytes.to_string()),
            ("build_attempts", self.build_attempts.to_string()),
        ];
        rows.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}

fn code_width(sigma: usize) -> u32 {
    if sigma <= 1 {
        0
    } else {
        usize::BITS - (sigma - 1).leading_zeros()
    }
}

struct Writer<'a> {
    buf: Vec<u8>,
    tally: Vec<(Category, usize)>,
    alphabet: &'a [u8],
    width: u32,
}

impl<'a> Writer<'a> {
    fn new(alphabet: &'a [u8]) -> Self {
        Self { buf: Vec::new(), tally: Vec::new(), alphabet, width: code_width(alphabet.len()) }
    }

    fn account(&mut self, cat: Category, from: usize) {
        let used = self.buf.len() - from;
        match self.tally.iter_mut().find(|(c, _)| *c == cat) {
            Some((_, total)) => *total += used,
            None => self.tally.push((cat, used)),
        }
    }

    fn bytes(&mut self, cat: Category, bytes: &[u8]) {
        let from = self.buf.len();
        self.buf.extend_from_slice(bytes);
        self.account(cat, from);
    }

    fn varint(&mut self, cat: Category, mut v: u64) {
        let from = self.buf.len();
        loop {
            let byte = (v & 0x7f) as u8;
            v >>= 7;
            if v == 0 {
                self.buf.push(byte);
                break;
            }
            self.buf.push(byte | 0x80);
        }
        self.account(cat, from);
    }

    fn signed(&mut self, cat: Category, v: i64) {
        self.varint(cat, ((v << 1) ^ (v >> 63)) as u64);
    }

    fn codes(&mut self, cat: Category, codes: impl Iterator<Item = u64>, width: u32) {
        let from = self.buf.len();
        let mut acc: u128 = 0;
        let mut bits = 0;
        for code in codes {
            acc |= u128::from(code) << bits;
            bits += width;
            while bits >= 8 {
                self.buf.push(acc as u8);
                acc >>= 8;
                bits -= 8;
            }
        }
        if bits > 0 {
            self.buf.push(acc as u8);
        }
        self.account(cat, from);
    }

    fn symbols(&mut self, cat: Category, bytes: &[u8]) {
        let alphabet = self.alphabet;
        let codes = bytes.iter().map(|c| alphabet.binary_search(c).expect("symbol in alphabet") as u64);
        self.codes(cat, codes, self.width);
    }

    /// Width byte, then every value in that many bits.
    fn packed(&mut self, cat: Category, values: &[u64]) {
        let width = values.iter().map(|v| u64::BITS - v.leading_zeros()).max().unwrap_or(0);
        self.bytes(cat, &[width as u8]);
        self.codes(cat, values.iter().copied(), width);
    }

    fn min_at(&mut self, m: MinAt) {
        self.signed(Category::Excess, m.value);
        self.varint(Category::Excess, m.pos as u64);
    }

    fn tally_of(&self, cat: Category) -> usize {
        self.tally.iter().find(|(c, _)| *c == cat).map_or(0, |(_, v)| *v)
    }
}

fn write_graph<'a>(g: &'a BlockGraph) -> Writer<'a> {
    use Category::*;
    let p = &g.params;
    let mut w = Writer::new(&g.alphabet);
    w.bytes(Header, MAGIC);
    w.bytes(Header, &VERSION.to_le_bytes());
    w.bytes(Header, &[0; 8]);
    w.varint(Header, g.n as u64);
    w.varint(Header, g.alphabet.len() as u64);
    w.bytes(Header, &g.alphabet);
    w.varint(Header, p.arity as u64);
    w.varint(Header, p.leaf_block_len as u64);
    w.varint(Header, p.affix_len as u64);
    w.bytes(Header, &[u8::from(p.level_skip) | u8::from(p.excess) << 1]);
    w.varint(Header, g.z as u64);
    w.bytes(Header, &p.hash_seed.to_le_bytes());
    w.bytes(Header, &[p.hash_modulus_bits as u8]);
    w.varint(Header, u64::from(g.attempts));
    w.varint(Header, p.tracked.len() as u64);
    w.bytes(Header, &p.tracked);
    for &t in &g.totals {
        w.varint(Sample, t);
    }
    w.varint(Header, g.levels.len() as u64);

    w.varint(Structure, g.levels[0].len() as u64);
    for level in &g.levels {
        let mut prev_rank = vec![0u64; p.tracked.len()];
        let mut deltas = Vec::with_capacity(level.len() * p.tracked.len());
        let mut caches = Vec::new();
        for (idx, b) in level.iter().enumerate() {
            let tag = match b.kind {
                BlockKind::Internal { .. } => TAG_INTERNAL,
                BlockKind::Literal(_) => TAG_LITERAL,
                BlockKind::Back(_) => TAG_BACK,
            };
            w.bytes(Structure, &[tag]);
            deltas.extend(b.rank_before.iter().zip(&prev_rank).map(|(r, p)| r - p));
            prev_rank.clone_from(&b.rank_before);
            if let BlockKind::Back(bp) = &b.kind {
                caches.extend(bp.rank_at_offset.iter().chain(&bp.rank_at_split));
            }
            if let Some(e) = b.excess {
                w.signed(Excess, e.total);
                w.min_at(e.min);
            }
            match &b.kind {
                BlockKind::Internal { .. } => {}
                BlockKind::Literal(bytes) => w.symbols(Literal, bytes),
                BlockKind::Back(bp) => {
                    w.varint(Structure, (idx - bp.target) as u64);
                    w.varint(Structure, bp.offset as u64);
                    if let Some(s) = bp.excess {
                        w.min_at(s.head);
                        if let Some(t) = s.tail {
                            w.min_at(t);
                        }
                    }
                }
            }
            if !matches!(b.kind, BlockKind::Literal(_)) {
                if b.len <= p.affix_len {
                    w.symbols(Affix, &b.prefix);
                } else {
                    w.symbols(Affix, &[b.prefix.as_slice(), b.suffix.as_slice()].concat());
                }
            }
        }
        w.packed(Sample, &deltas);
        w.packed(Sample, &caches);
    }
    let total = (w.buf.len() + 8) as u64;
    w.buf[6..14].copy_from_slice(&total.to_le_bytes());
    let sum = CRC64.checksum(&w.buf);
    w.bytes(Trailer, &sum.to_le_bytes());
    w
}

/// Serializes a graph to the `BGF1` format.
pub fn serialize(graph: &BlockGraph) -> Vec<u8> {
    write_graph(graph).buf
}

/// Exact byte accounting of [`serialize`] by category.
pub fn stats(graph: &BlockGraph) -> SpaceStats {
    use Category::*;
    let w = write_graph(graph);
    let bits = |c| w.tally_of(c) * 8;
    SpaceStats {
        n: graph.n,
        sigma: graph.alphabet.len(),
        z: graph.z,
        arity: graph.params.arity,
        leaf_block_len: graph.params.leaf_block_len,
        affix_len: graph.params.affix_len,
        levels: graph.levels.len(),
        blocks_per_level: graph.levels.iter().map(Vec::len).collect(),
        marked_per_level: graph.levels.iter().map(|l| l.iter().filter(|b| b.is_marked()).count()).collect(),
        header_bits: bits(Header),
        pointer_bits: bits(Structure),
        literal_bits: bits(Literal),
        affix_bits: bits(Affix),
        sample_bits: bits(Sample),
        excess_bits: bits(Excess),
        trailer_bits: bits(Trailer),
        total_bytes: w.buf.len(),
        build_attempts: graph.attempts,
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
    alphabet: Vec<u8>,
    width: u32,
}

impl<'a> Reader<'a> {
    fn take(&mut self, k: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(k).filter(|&e| e <= self.buf.len()).ok_or(Error::Truncated)?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u64_le(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn varint(&mut self) -> Result<u64> {
        let mut v: u64 = 0;
        for shift in (0..64).step_by(7) {
            let byte = self.u8()?;
            v |= u64::from(byte & 0x7f) << shift;
            if byte & 0x80 == 0 {
                return Ok(v);
            }
        }
        Err(Error::Malformed("varint too long".into()))
    }

    fn usize(&mut self) -> Result<usize> {
        usize::try_from(self.varint()?).map_err(|_| Error::Malformed("value exceeds usize".into()))
    }

    fn signed(&mut self) -> Result<i64> {
        let v = self.varint()?;
        Ok((v >> 1) as i64 ^ -((v & 1) as i64))
    }

    fn min_at(&mut self) -> Result<MinAt> {
        Ok(MinAt { value: self.signed()?, pos: self.usize()? })
    }

    fn codes(&mut self, count: usize, width: u32) -> Result<Vec<u64>> {
        let nbytes = count.checked_mul(width as usize).ok_or(Error::Truncated)?.div_ceil(8);
        let raw = self.take(nbytes)?;
        let mut out = Vec::with_capacity(count);
        let mut acc: u128 = 0;
        let mut bits = 0;
        let mut it = raw.iter();
        let mask = (1u128 << width) - 1;
        for _ in 0..count {
            while bits < width {
                acc |= u128::from(*it.next().expect("sized above")) << bits;
                bits += 8;
            }
            out.push((acc & mask) as u64);
            acc >>= width;
            bits -= width;
        }
        Ok(out)
    }

    fn packed(&mut self, count: usize) -> Result<Vec<u64>> {
        let width = u32::from(self.u8()?);
        if width > 64 {
            return Err(Error::Malformed(format!("field width {width}")));
        }
        self.codes(count, width)
    }

    fn symbols(&mut self, len: usize) -> Result<Vec<u8>> {
        let width = self.width;
        self.codes(len, width)?
            .into_iter()
            .map(|code| self.alphabet.get(code as usize).copied().ok_or_else(|| Error::Malformed("symbol code".into())))
            .collect()
    }
}

fn malformed(msg: &str) -> Error {
    Error::Malformed(msg.to_string())
}

/// Parses a `BGF1` file. Checks, in order: magic, version, declared length
/// (truncation), checksum, then structural consistency of the body.
pub fn deserialize(bytes: &[u8]) -> Result<BlockGraph> {
    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        return Err(Error::BadMagic);
    }
    let mut r = Reader { buf: bytes, pos: 4, alphabet: Vec::new(), width: 0 };
    let version = u16::from_le_bytes(r.take(2)?.try_into().expect("2 bytes"));
    if version != VERSION {
        return Err(Error::Version(version));
    }
    let declared = r.u64_le()?;
    if (bytes.len() as u64) < declared {
        return Err(Error::Truncated);
    }
    if bytes.len() as u64 != declared || declared < 22 {
        return Err(malformed("length does not match header"));
    }
    let (body, trailer) = bytes.split_at(bytes.len() - 8);
    let stored = u64::from_le_bytes(trailer.try_into().expect("8 bytes"));
    let computed = CRC64.checksum(body);
    if stored != computed {
        return Err(Error::Checksum { stored, computed });
    }
    r.buf = body;

    let n = r.usize()?;
    let sigma = r.usize()?;
    let alphabet = r.take(sigma)?.to_vec();
    if alphabet.windows(2).any(|w| w[0] >= w[1]) || n == 0 || sigma == 0 {
        return Err(malformed("bad alphabet or length"));
    }
    r.width = code_width(sigma);
    r.alphabet = alphabet.clone();
    let arity = r.usize()?;
    let leaf_block_len = r.usize()?;
    let affix_len = r.usize()?;
    let flags = r.u8()?;
    let z = r.usize()?;
    let hash_seed = r.u64_le()?;
    let hash_modulus_bits = u32::from(r.u8()?);
    let attempts = u32::try_from(r.varint()?).map_err(|_| malformed("attempts"))?;
    let tcount = r.usize()?;
    let tracked = r.take(tcount)?.to_vec();
    if arity < 2 || leaf_block_len == 0 || affix_len == 0 || flags > 3 {
        return Err(malformed("bad parameters"));
    }
    if tracked.windows(2).any(|w| w[0] >= w[1]) || tracked.iter().any(|t| alphabet.binary_search(t).is_err()) {
        return Err(malformed("bad tracked symbols"));
    }
    let totals = (0..tcount).map(|_| r.varint()).collect::<Result<Vec<_>>>()?;
    let params = GraphParams {
        arity,
        leaf_block_len,
        affix_len,
        tracked,
        excess: flags & 2 != 0,
        level_skip: flags & 1 != 0,
        hash_seed,
        hash_modulus_bits,
    };

    let level_count = r.usize()?;
    let top = r.usize()?;
    if level_count == 0 || level_count > n || top == 0 || top > n {
        return Err(malformed("level or block count"));
    }
    let mut spans: Vec<(usize, usize)> = (0..top).map(|k| piece(n, top, k)).collect();
    let mut levels: Vec<Vec<Block>> = Vec::with_capacity(level_count);
    while !spans.is_empty() {
        if levels.len() == level_count {
            return Err(malformed("more levels than declared"));
        }
        let mut next = Vec::new();
        let mut blocks: Vec<Block> = Vec::with_capacity(spans.len());
        for (idx, &(start, len)) in spans.iter().enumerate() {
            let tag = r.u8()?;
            let excess = if params.excess {
                Some(ExcessAugment { total: r.signed()?, min: r.min_at()? })
            } else {
                None
            };
            let kind = match tag {
                TAG_INTERNAL => {
                    let child_count = arity.min(len);
                    if len <= leaf_block_len {
                        return Err(malformed("internal block within leaf length"));
                    }
                    let first_child = next.len();
                    next.extend((0..child_count).map(|k| {
                        let (off, l) = piece(len, child_count, k);
                        (start + off, l)
                    }));
                    BlockKind::Internal { first_child, child_count }
                }
                TAG_LITERAL => BlockKind::Literal(r.symbols(len)?),
                TAG_BACK => {
                    let distance = r.usize()?;
                    let offset = r.usize()?;
                    let (rank_at_offset, rank_at_split) = (Vec::new(), Vec::new());
                    if distance == 0 || distance > idx {
                        return Err(malformed("back pointer"));
                    }
                    let target = idx - distance;
                    let tlen = blocks[target].len;
                    let spans_next = offset + len > tlen;
                    let split = if spans_next { tlen.saturating_sub(offset) } else { len };
                    let excess = if params.excess {
                        let head = r.min_at()?;
                        let tail = if split < len { Some(r.min_at()?) } else { None };
                        Some(SplitExcess { head, tail })
                    } else {
                        None
                    };
                    let last = target + usize::from(spans_next);
                    let fits = !spans_next
                        || (offset < tlen
                            && last < idx
                            && blocks[last].start == blocks[target].end()
                            && offset + len <= tlen + blocks[last].len);
                    if !fits || !blocks[target].is_marked() || !blocks[last].is_marked() {
                        return Err(malformed("back pointer target"));
                    }
                    BlockKind::Back(BackPointer {
                        target,
                        spans_next,
                        offset,
                        split,
                        rank_at_offset,
                        rank_at_split,
                        excess,
                    })
                }
                other => return Err(malformed(&format!("block tag {other}"))),
            };
            let a = affix_len.min(len);
            let (prefix, suffix) = match &kind {
                BlockKind::Literal(bytes) => (bytes[..a].to_vec(), bytes[len - a..].to_vec()),
                _ if len <= affix_len => {
                    let all = r.symbols(len)?;
                    (all.clone(), all)
                }
                _ => {
                    let mut both = r.symbols(2 * a)?;
                    let suffix = both.split_off(a);
                    (both, suffix)
                }
            };
            blocks.push(Block { start, len, kind, prefix, suffix, rank_before: Vec::new(), excess });
        }
        let deltas = r.packed(blocks.len() * tcount)?;
        let backs = blocks.iter().filter(|b| matches!(b.kind, BlockKind::Back(_))).count();
        let caches = r.packed(backs * 2 * tcount)?;
        let mut prev_rank = vec![0u64; tcount];
        let mut caches = caches.chunks(tcount.max(1));
        for (b, d) in blocks.iter_mut().zip(deltas.chunks(tcount.max(1))) {
            if tcount > 0 {
                for (p, v) in prev_rank.iter_mut().zip(d) {
                    *p = p.checked_add(*v).ok_or_else(|| malformed("rank"))?;
                }
            }
            b.rank_before = prev_rank.clone();
            if let BlockKind::Back(bp) = &mut b.kind {
                if tcount > 0 {
                    bp.rank_at_offset = caches.next().expect("sized").to_vec();
                    bp.rank_at_split = caches.next().expect("sized").to_vec();
                }
            }
        }
        levels.push(blocks);
        spans = next;
    }
    if levels.len() != level_count {
        return Err(malformed("fewer levels than declared"));
    }
    if r.pos != body.len() {
        return Err(malformed("trailing bytes"));
    }
    let text = reconstruct(&levels, n).ok_or_else(|| malformed("graph does not expand to its declared length"))?;
    if !metadata_consistent(&levels, &text, &params, &totals) {
        return Err(malformed("stored samples disagree with the graph content"));
    }
    Ok(BlockGraph { n, alphabet, params, levels, z, attempts, totals })
}
