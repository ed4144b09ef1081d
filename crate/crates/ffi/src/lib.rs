//! C ABI over `blockgraph`. Graphs are opaque heap handles released with
//! `bg_free` / `bg_bp_free`; every fallible call returns a `BgStatus` and
//! writes its result through an out-pointer. Positions are 1-based.

use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use blockgraph::{build, deserialize, serialize, BlockGraph, BpString, BuildConfig, Error, NodeHandle};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BgStatus {
    Ok = 0,
    NullPointer = 1,
    EmptyText = 2,
    InvalidConfig = 3,
    OutOfRange = 4,
    UntrackedSymbol = 5,
    NoSuchOccurrence = 6,
    CollisionsPersist = 7,
    Unbalanced = 8,
    NoExcess = 9,
    InvalidNode = 10,
    BadMagic = 11,
    Version = 12,
    Checksum = 13,
    Truncated = 14,
    Malformed = 15,
    Internal = 16,
}

impl From<&Error> for BgStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::EmptyText => BgStatus::EmptyText,
            Error::InvalidConfig(_) | Error::ModulusBits(_) | Error::Corpus(_) => BgStatus::InvalidConfig,
            Error::OutOfRange { .. } => BgStatus::OutOfRange,
            Error::UntrackedSymbol(_) => BgStatus::UntrackedSymbol,
            Error::NoSuchOccurrence => BgStatus::NoSuchOccurrence,
            Error::CollisionsPersist(_) => BgStatus::CollisionsPersist,
            Error::Unbalanced(_) => BgStatus::Unbalanced,
            Error::NoExcess => BgStatus::NoExcess,
            Error::InvalidNode(_) => BgStatus::InvalidNode,
            Error::BadMagic => BgStatus::BadMagic,
            Error::Version(_) => BgStatus::Version,
            Error::Checksum { .. } => BgStatus::Checksum,
            Error::Truncated => BgStatus::Truncated,
            Error::Malformed(_) => BgStatus::Malformed,
            Error::InvalidParse(_) | Error::Unmarked => BgStatus::Internal,
        }
    }
}

/// Build parameters. Zero lengths and a null `rank_symbols` select the
/// library defaults.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct BgConfig {
    pub arity: usize,
    pub leaf_block_len: usize,
    pub affix_len: usize,
    pub rank_symbols: *const u8,
    pub rank_symbols_len: usize,
    pub enable_excess: bool,
    pub level_skip: bool,
    pub hash_seed: u64,
    pub hash_modulus_bits: u32,
    pub max_attempts: u32,
}

/// Opaque block graph.
pub struct BgGraph {
    inner: BlockGraph,
}

/// Opaque balanced-parentheses string with excess support.
pub struct BgBpString {
    inner: BpString,
}

fn guard<F: FnOnce() -> Result<(), BgStatus>>(f: F) -> BgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BgStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => BgStatus::Internal,
    }
}

fn lift<T>(r: blockgraph::Result<T>) -> Result<T, BgStatus> {
    r.map_err(|e| BgStatus::from(&e))
}

unsafe fn bytes<'a>(p: *const u8, len: usize) -> Result<&'a [u8], BgStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(BgStatus::NullPointer);
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, BgStatus> {
    p.as_mut().ok_or(BgStatus::NullPointer)
}

unsafe fn graph<'a>(g: *const BgGraph) -> Result<&'a BlockGraph, BgStatus> {
    g.as_ref().map(|g| &g.inner).ok_or(BgStatus::NullPointer)
}

unsafe fn bp<'a>(b: *const BgBpString) -> Result<&'a BpString, BgStatus> {
    b.as_ref().map(|b| &b.inner).ok_or(BgStatus::NullPointer)
}

unsafe fn to_config(cfg: *const BgConfig) -> Result<BuildConfig, BgStatus> {
    let Some(c) = cfg.as_ref() else {
        return Ok(BuildConfig::default());
    };
    let rank_symbols = if c.rank_symbols.is_null() {
        None
    } else {
        Some(bytes(c.rank_symbols, c.rank_symbols_len)?.to_vec())
    };
    Ok(BuildConfig {
        arity: c.arity,
        leaf_block_len: (c.leaf_block_len > 0).then_some(c.leaf_block_len),
        affix_len: (c.affix_len > 0).then_some(c.affix_len),
        rank_symbols,
        enable_excess: c.enable_excess,
        hash_seed: c.hash_seed,
        hash_modulus_bits: c.hash_modulus_bits,
        level_skip: c.level_skip,
        max_attempts: c.max_attempts,
    })
}

/// Library defaults.
#[no_mangle]
pub extern "C" fn bg_config_default() -> BgConfig {
    let d = BuildConfig::default();
    BgConfig {
        arity: d.arity,
        leaf_block_len: 0,
        affix_len: 0,
        rank_symbols: ptr::null(),
        rank_symbols_len: 0,
        enable_excess: d.enable_excess,
        level_skip: d.level_skip,
        hash_seed: d.hash_seed,
        hash_modulus_bits: d.hash_modulus_bits,
        max_attempts: d.max_attempts,
    }
}

/// Builds a graph over `text[0..len)`. A null `config` uses the defaults.
///
/// # Safety
/// `text` must point to `len` readable bytes and `out` to writable storage.
#[no_mangle]
pub unsafe extern "C" fn bg_build(text: *const u8, len: usize, config: *const BgConfig, out_graph: *mut *mut BgGraph) -> BgStatus {
    guard(|| {
        let slot = out(out_graph)?;
        let g = lift(build(bytes(text, len)?, &to_config(config)?))?;
        *slot = Box::into_raw(Box::new(BgGraph { inner: g }));
        Ok(())
    })
}

/// Loads a graph from serialized bytes.
///
/// # Safety
/// `data` must point to `len` readable bytes and `out` to writable storage.
#[no_mangle]
pub unsafe extern "C" fn bg_load(data: *const u8, len: usize, out_graph: *mut *mut BgGraph) -> BgStatus {
    guard(|| {
        let slot = out(out_graph)?;
        let g = lift(deserialize(bytes(data, len)?))?;
        *slot = Box::into_raw(Box::new(BgGraph { inner: g }));
        Ok(())
    })
}

/// Serializes a graph into a new buffer released with `bg_bytes_free`.
///
/// # Safety
/// `g` must be a live handle; `out_data` and `out_len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bg_serialize(g: *const BgGraph, out_data: *mut *mut u8, out_len: *mut usize) -> BgStatus {
    guard(|| {
        let g = graph(g)?;
        let (data, len) = (out(out_data)?, out(out_len)?);
        let buf = serialize(g).into_boxed_slice();
        *len = buf.len();
        *data = Box::into_raw(buf) as *mut u8;
        Ok(())
    })
}

/// Releases a buffer from `bg_serialize`.
///
/// # Safety
/// `data` and `len` must come from one `bg_serialize` call, freed once.
#[no_mangle]
pub unsafe extern "C" fn bg_bytes_free(data: *mut u8, len: usize) {
    if !data.is_null() {
        drop(Box::from_raw(ptr::slice_from_raw_parts_mut(data, len)));
    }
}

/// Releases a graph. Null is ignored.
///
/// # Safety
/// `g` must come from `bg_build` or `bg_load` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bg_free(g: *mut BgGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Text length, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bg_len(g: *const BgGraph) -> usize {
    graph(g).map_or(0, |g| g.len())
}

/// Number of levels, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bg_levels(g: *const BgGraph) -> usize {
    graph(g).map_or(0, |g| g.level_count())
}

/// `S[i]`.
///
/// # Safety
/// `g` must be a live handle and `out_symbol` writable.
#[no_mangle]
pub unsafe extern "C" fn bg_access(g: *const BgGraph, i: usize, out_symbol: *mut u8) -> BgStatus {
    guard(|| {
        let (g, slot) = (graph(g)?, out(out_symbol)?);
        *slot = lift(g.access(i))?;
        Ok(())
    })
}

/// Writes `S[i..i+m-1]` into `buf`, which must hold `m` bytes.
///
/// # Safety
/// `g` must be a live handle and `buf` must have `m` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn bg_extract(g: *const BgGraph, i: usize, m: usize, buf: *mut u8) -> BgStatus {
    guard(|| {
        let g = graph(g)?;
        let s = lift(g.extract(i, m))?;
        if m > 0 {
            if buf.is_null() {
                return Err(BgStatus::NullPointer);
            }
            ptr::copy_nonoverlapping(s.as_ptr(), buf, m);
        }
        Ok(())
    })
}

/// Occurrences of `a` in `S[1..i]`.
///
/// # Safety
/// `g` must be a live handle and `out_count` writable.
#[no_mangle]
pub unsafe extern "C" fn bg_rank(g: *const BgGraph, a: u8, i: usize, out_count: *mut u64) -> BgStatus {
    guard(|| {
        let (g, slot) = (graph(g)?, out(out_count)?);
        *slot = lift(g.rank(a, i))?;
        Ok(())
    })
}

/// Position of the `j`-th occurrence of `a`.
///
/// # Safety
/// `g` must be a live handle and `out_pos` writable.
#[no_mangle]
pub unsafe extern "C" fn bg_select(g: *const BgGraph, a: u8, j: u64, out_pos: *mut usize) -> BgStatus {
    guard(|| {
        let (g, slot) = (graph(g)?, out(out_pos)?);
        *slot = lift(g.select(a, j))?;
        Ok(())
    })
}

/// Builds an excess-augmented graph over a balanced parentheses string.
///
/// # Safety
/// `text` must point to `len` readable bytes and `out_bp` be writable.
#[no_mangle]
pub unsafe extern "C" fn bg_bp_build(text: *const u8, len: usize, config: *const BgConfig, out_bp: *mut *mut BgBpString) -> BgStatus {
    guard(|| {
        let slot = out(out_bp)?;
        let b = lift(BpString::new(bytes(text, len)?, &to_config(config)?))?;
        *slot = Box::into_raw(Box::new(BgBpString { inner: b }));
        Ok(())
    })
}

/// Wraps a loaded graph, consuming it on success. On failure `g` stays
/// owned by the caller.
///
/// # Safety
/// `g` must be a live handle and `out_bp` writable.
#[no_mangle]
pub unsafe extern "C" fn bg_bp_from_graph(g: *mut BgGraph, out_bp: *mut *mut BgBpString) -> BgStatus {
    guard(|| {
        let slot = out(out_bp)?;
        let inner = graph(g)?.clone();
        let b = lift(BpString::from_graph(inner))?;
        drop(Box::from_raw(g));
        *slot = Box::into_raw(Box::new(BgBpString { inner: b }));
        Ok(())
    })
}

/// Releases a parentheses handle. Null is ignored.
///
/// # Safety
/// `b` must come from `bg_bp_build` or `bg_bp_from_graph`, freed once.
#[no_mangle]
pub unsafe extern "C" fn bg_bp_free(b: *mut BgBpString) {
    if !b.is_null() {
        drop(Box::from_raw(b));
    }
}

/// Serializes the underlying graph; release with `bg_bytes_free`.
///
/// # Safety
/// `b` must be a live handle; `out_data` and `out_len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bg_bp_serialize(b: *const BgBpString, out_data: *mut *mut u8, out_len: *mut usize) -> BgStatus {
    guard(|| {
        let b = bp(b)?;
        let (data, len) = (out(out_data)?, out(out_len)?);
        let buf = serialize(b.graph()).into_boxed_slice();
        *len = buf.len();
        *data = Box::into_raw(buf) as *mut u8;
        Ok(())
    })
}

/// Length of the parentheses string, or 0 for a null handle.
///
/// # Safety
/// `b` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bg_bp_len(b: *const BgBpString) -> usize {
    bp(b).map_or(0, |b| b.len())
}

/// `E(i)`: opens minus closes in `S[1..i]`.
///
/// # Safety
/// `b` must be a live handle and `out_excess` writable.
#[no_mangle]
pub unsafe extern "C" fn bg_bp_excess(b: *const BgBpString, i: usize, out_excess: *mut i64) -> BgStatus {
    guard(|| {
        let (b, slot) = (bp(b)?, out(out_excess)?);
        *slot = lift(b.excess(i))?;
        Ok(())
    })
}

/// Leftmost position of minimum excess in `[i, k]`.
///
/// # Safety
/// `b` must be a live handle and `out_pos` writable.
#[no_mangle]
pub unsafe extern "C" fn bg_bp_min_excess_pos(b: *const BgBpString, i: usize, k: usize, out_pos: *mut usize) -> BgStatus {
    guard(|| {
        let (b, slot) = (bp(b)?, out(out_pos)?);
        *slot = lift(b.min_excess_pos(i, k))?;
        Ok(())
    })
}

/// Lowest common ancestor of the nodes opened at `u` and `v`.
///
/// # Safety
/// `b` must be a live handle and `out_node` writable.
#[no_mangle]
pub unsafe extern "C" fn bg_bp_lca(b: *const BgBpString, u: usize, v: usize, out_node: *mut usize) -> BgStatus {
    guard(|| {
        let (b, slot) = (bp(b)?, out(out_node)?);
        *slot = lift(b.lca(NodeHandle(u), NodeHandle(v)))?.0;
        Ok(())
    })
}

/// Static, NUL-terminated description of a status.
#[no_mangle]
pub extern "C" fn bg_status_message(status: BgStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        BgStatus::Ok => b"ok\0",
        BgStatus::NullPointer => b"null pointer argument\0",
        BgStatus::EmptyText => b"empty text\0",
        BgStatus::InvalidConfig => b"invalid configuration\0",
        BgStatus::OutOfRange => b"position out of range\0",
        BgStatus::UntrackedSymbol => b"symbol is not tracked\0",
        BgStatus::NoSuchOccurrence => b"occurrence does not exist\0",
        BgStatus::CollisionsPersist => b"hash collisions persist after retries\0",
        BgStatus::Unbalanced => b"not a balanced parentheses string\0",
        BgStatus::NoExcess => b"graph has no excess augmentation\0",
        BgStatus::InvalidNode => b"invalid node handle\0",
        BgStatus::BadMagic => b"bad magic\0",
        BgStatus::Version => b"unsupported version\0",
        BgStatus::Checksum => b"checksum mismatch\0",
        BgStatus::Truncated => b"truncated input\0",
        BgStatus::Malformed => b"malformed input\0",
        BgStatus::Internal => b"internal error\0",
    };
    s.as_ptr().cast()
}
