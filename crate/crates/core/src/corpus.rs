//! Deterministic test and benchmark inputs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CorpusKind {
    /// Uniform symbols; `a..` for `sigma <= 26`, raw bytes `0..sigma` above.
    Random { sigma: usize, n: usize, seed: u64 },
    /// First `n` symbols of the Fibonacci word `abaababa...`.
    Fibonacci { n: usize },
    /// `base` repeated `k` times.
    Power { base: Vec<u8>, k: usize },
    /// Balanced parentheses of a random tree with `nodes` nodes.
    BpRandomTree { nodes: usize, seed: u64 },
    /// `(` + `copies` copies of a random `nodes`-node tree + `)`.
    BpRepeatedTree { nodes: usize, copies: usize, seed: u64 },
}

pub fn generate(kind: &CorpusKind) -> Result<Vec<u8>> {
    match kind {
        CorpusKind::Random { sigma, n, seed } => random(*sigma, *n, *seed),
        CorpusKind::Fibonacci { n } => fibonacci(*n),
        CorpusKind::Power { base, k } => power(base, *k),
        CorpusKind::BpRandomTree { nodes, seed } => bp_random_tree(*nodes, *seed),
        CorpusKind::BpRepeatedTree { nodes, copies, seed } => {
            if *copies == 0 {
                return Err(Error::Corpus("copies must be positive".into()));
            }
            let tree = bp_random_tree(*nodes, *seed)?;
            let mut out = Vec::with_capacity(tree.len() * copies + 2);
            out.push(b'(');
            for _ in 0..*copies {
                out.extend_from_slice(&tree);
            }
            out.push(b')');
            Ok(out)
        }
    }
}

pub fn random(sigma: usize, n: usize, seed: u64) -> Result<Vec<u8>> {
    if sigma == 0 || sigma > 256 || n == 0 {
        return Err(Error::Corpus(format!("random needs 1 <= sigma <= 256 and n > 0, got {sigma}, {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = if sigma <= 26 { b'a' } else { 0 };
    Ok((0..n).map(|_| first + rng.gen_range(0..sigma) as u8).collect())
}

pub fn fibonacci(n: usize) -> Result<Vec<u8>> {
    if n == 0 {
        return Err(Error::Corpus("fibonacci length must be positive".into()));
    }
    let (mut prev, mut cur) = (b"a".to_vec(), b"ab".to_vec());
    while cur.len() < n {
        let next = [cur.as_slice(), prev.as_slice()].concat();
        prev = std::mem::replace(&mut cur, next);
    }
    cur.truncate(n);
    Ok(cur)
}

pub fn power(base: &[u8], k: usize) -> Result<Vec<u8>> {
    if base.is_empty() || k == 0 {
        return Err(Error::Corpus("power needs a non-empty base and k > 0".into()));
    }
    Ok(base.repeat(k))
}

/// Random recursive tree: node `i` hangs under a uniform earlier node;
/// children are emitted in creation order.
pub fn bp_random_tree(nodes: usize, seed: u64) -> Result<Vec<u8>> {
    if nodes == 0 {
        return Err(Error::Corpus("tree needs at least one node".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    for i in 1..nodes {
        // Bias towards recent nodes now and then so depths vary.
        let parent = if rng.gen_bool(0.3) { i - 1 } else { rng.gen_range(0..i) };
        children[parent].push(i);
    }
    let mut out = Vec::with_capacity(2 * nodes);
    let mut stack = vec![(0usize, 0usize)];
    out.push(b'(');
    while let Some((node, next)) = stack.last_mut() {
        if let Some(&child) = children[*node].get(*next) {
            *next += 1;
            out.push(b'(');
            stack.push((child, 0));
        } else {
            out.push(b')');
            stack.pop();
        }
    }
    Ok(out)
}
