//! Linear-scan oracles and fixture suites shared by the test targets.
#![allow(dead_code)]

use blockgraph::{corpus, BlockGraph, BuildConfig};

pub fn rank(text: &[u8], a: u8, i: usize) -> u64 {
    text[..i].iter().filter(|&&c| c == a).count() as u64
}

pub fn select(text: &[u8], a: u8, j: u64) -> Option<usize> {
    text.iter().enumerate().filter(|(_, &c)| c == a).nth(j as usize - 1).map(|(p, _)| p + 1)
}

pub fn alphabet(text: &[u8]) -> Vec<u8> {
    let mut a = text.to_vec();
    a.sort_unstable();
    a.dedup();
    a
}

/// Leftmost `j` in `[i, k]` minimizing the prefix excess `E(j)`.
pub fn min_excess_pos(text: &[u8], i: usize, k: usize) -> usize {
    let mut e = 0i64;
    let mut best = (i64::MAX, 0);
    for (p, &c) in text[..k].iter().enumerate() {
        e += if c == b'(' { 1 } else { -1 };
        if p + 1 >= i && e < best.0 {
            best = (e, p + 1);
        }
    }
    best.1
}

/// Parent pointers of the tree encoded by `text`, keyed by 1-based `(`
/// position; the root's parent is 0.
pub fn parents(text: &[u8]) -> Vec<usize> {
    let mut parent = vec![0; text.len() + 1];
    let mut stack = Vec::new();
    for (p, &c) in text.iter().enumerate() {
        if c == b'(' {
            parent[p + 1] = stack.last().copied().unwrap_or(0);
            stack.push(p + 1);
        } else {
            stack.pop();
        }
    }
    parent
}

pub fn lca(parent: &[usize], u: usize, v: usize) -> usize {
    let mut seen = std::collections::HashSet::new();
    let mut x = u;
    while x != 0 {
        seen.insert(x);
        x = parent[x];
    }
    let mut y = v;
    while !seen.contains(&y) {
        y = parent[y];
    }
    y
}

/// Length of the longest earlier-starting match for position `i`, by brute force.
pub fn longest_previous_factor(text: &[u8], i: usize) -> usize {
    (0..i)
        .map(|s| (0..text.len() - i).take_while(|&l| text[s + l] == text[i + l]).count())
        .max()
        .unwrap_or(0)
}

/// Named fixtures: random over sigma 2, 4, 26, Fibonacci words, powers and
/// unary strings, all of length at most 2000.
pub fn suite() -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    for seed in 0..30u64 {
        for &(sigma, n) in &[(2usize, 2000usize), (4, 1200), (26, 500)] {
            let n = 1 + ((n - 1) * (seed as usize + 1)) / 30;
            out.push((format!("random-s{sigma}-n{n}-{seed}"), corpus::random(sigma, n, seed).unwrap()));
        }
    }
    for n in [1usize, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233, 377, 610, 987, 1597, 1000, 1999, 2000, 777] {
        out.push((format!("fibonacci-{n}"), corpus::fibonacci(n).unwrap()));
    }
    for seed in 0..80u64 {
        let base_len = 1 + (seed as usize * 7) % 97;
        let sigma = [2usize, 4, 26][seed as usize % 3];
        let base = corpus::random(sigma, base_len, 1000 + seed).unwrap();
        let k = (2000 / base_len).min(2 + seed as usize % 30);
        out.push((format!("power-{base_len}x{k}-{seed}"), corpus::power(&base, k).unwrap()));
    }
    for n in [1usize, 2, 3, 4, 7, 16, 100, 999, 2000, 31, 64, 65, 255, 256, 1024, 1500, 1777, 5, 6, 10] {
        out.push((format!("unary-{n}"), vec![b'x'; n]));
    }
    out
}

/// Suite config: every symbol tracked so rank/select cover the alphabet.
pub fn config(text: &[u8], arity: usize, seed: u64) -> BuildConfig {
    BuildConfig { arity, rank_symbols: Some(alphabet(text)), hash_seed: seed, ..BuildConfig::default() }
}

/// `(i, m)` grid with at least `want` valid pairs (fewer only when the
/// string has fewer substrings).
pub fn extract_grid(n: usize, want: usize) -> Vec<(usize, usize)> {
    let lengths = [1usize, 2, 3, 4, 5, 7, 8, 11, 16, 23, 32, 64, 100, 257];
    let mut pairs = Vec::new();
    let per_len = want.div_ceil(lengths.len()).max(1);
    for &m in &lengths {
        if m > n {
            continue;
        }
        let starts = n - m + 1;
        let step = (starts / per_len).max(1);
        pairs.extend((1..=starts).step_by(step).map(|i| (i, m)));
    }
    if n <= 40 {
        pairs = (1..=n).flat_map(|i| (1..=n - i + 1).map(move |m| (i, m))).collect();
    }
    pairs
}

/// Every access, extract-grid, rank and select answer compared with the
/// oracles. Returns a description of the first mismatch.
pub fn check_all(g: &BlockGraph, text: &[u8], grid: usize) -> Result<(), String> {
    let n = text.len();
    for i in 1..=n {
        let got = g.access(i).map_err(|e| format!("access({i}): {e}"))?;
        if got != text[i - 1] {
            return Err(format!("access({i})"));
        }
    }
    for (i, m) in extract_grid(n, grid) {
        let got = g.extract(i, m).map_err(|e| format!("extract({i},{m}): {e}"))?;
        if got != text[i - 1..i - 1 + m] {
            return Err(format!("extract({i},{m})"));
        }
    }
    for &a in &g.params().tracked {
        let mut count = 0u64;
        for i in 0..=n {
            if i > 0 && text[i - 1] == a {
                count += 1;
                let s = g.select(a, count).map_err(|e| format!("select({a},{count}): {e}"))?;
                if s != i {
                    return Err(format!("select({},{count}) = {s}, want {i}", a as char));
                }
            }
            let r = g.rank(a, i).map_err(|e| format!("rank({a},{i}): {e}"))?;
            if r != count {
                return Err(format!("rank({},{i}) = {r}, want {count}", a as char));
            }
        }
        if g.select(a, count + 1).is_ok() {
            return Err(format!("select({}, {}) should fail", a as char, count + 1));
        }
    }
    Ok(())
}
