//! Greedy LZ77 factorization (self-overlapping copies allowed).
//!
//! The phrase count `z` is only used to size the top level of a block graph
//! and for reporting, so the parser favours clarity over asymptotics: a
//! prefix-doubling suffix array gives, for every position, its nearest
//! lexicographic neighbours among earlier positions, and the longest previous
//! factor is the longer of the two matches.

use crate::error::{Error, Result};

/// One phrase of the parse. Positions are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lz77Phrase {
    /// First occurrence of a symbol.
    Literal { start: usize, symbol: u8 },
    /// Copy of `length` symbols from `source < start`; may overlap itself.
    Copy { start: usize, source: usize, length: usize },
}

impl Lz77Phrase {
    pub fn start(&self) -> usize {
        match *self {
            Lz77Phrase::Literal { start, .. } | Lz77Phrase::Copy { start, .. } => start,
        }
    }

    /// Number of text symbols the phrase covers (1 for a literal).
    pub fn span(&self) -> usize {
        match *self {
            Lz77Phrase::Literal { .. } => 1,
            Lz77Phrase::Copy { length, .. } => length,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lz77Parse {
    pub phrases: Vec<Lz77Phrase>,
    pub n: usize,
}

impl Lz77Parse {
    pub fn phrase_count(&self) -> usize {
        self.phrases.len()
    }

    pub fn decode(&self) -> Result<Vec<u8>> {
        decode(self)
    }
}

/// Suffix array by prefix doubling, O(n log^2 n).
pub(crate) fn suffix_array(text: &[u8]) -> Vec<u32> {
    let n = text.len();
    let mut sa: Vec<u32> = (0..n as u32).collect();
    let mut rank: Vec<u32> = text.iter().map(|&c| u32::from(c)).collect();
    let mut tmp = vec![0u32; n];
    let mut k = 1;
    if n <= 1 {
        return sa;
    }
    loop {
        let key = |i: u32| {
            let i = i as usize;
            let second = if i + k < n { rank[i + k] as i64 } else { -1 };
            (rank[i], second)
        };
        sa.sort_unstable_by_key(|&i| key(i));
        tmp[sa[0] as usize] = 0;
        for w in 1..n {
            let bump = u32::from(key(sa[w - 1]) != key(sa[w]));
            tmp[sa[w] as usize] = tmp[sa[w - 1] as usize] + bump;
        }
        std::mem::swap(&mut rank, &mut tmp);
        if rank[sa[n - 1] as usize] as usize == n - 1 {
            break;
        }
        k *= 2;
    }
    sa
}

fn common_prefix(text: &[u8], a: usize, b: usize) -> usize {
    text[a..].iter().zip(&text[b..]).take_while(|(x, y)| x == y).count()
}

/// Greedy left-to-right parse of `text`.
pub fn parse(text: &[u8]) -> Result<Lz77Parse> {
    if text.is_empty() {
        return Err(Error::EmptyText);
    }
    let n = text.len();
    let sa = suffix_array(text);

    // For each position, the nearest suffixes in lexicographic order (before
    // and after) that start earlier in the text.
    const NONE: u32 = u32::MAX;
    let mut psv = vec![NONE; n];
    let mut nsv = vec![NONE; n];
    let mut stack: Vec<u32> = Vec::new();
    for &pos in &sa {
        while let Some(&top) = stack.last() {
            if top > pos {
                nsv[top as usize] = pos;
                stack.pop();
            } else {
                break;
            }
        }
        psv[pos as usize] = stack.last().copied().unwrap_or(NONE);
        stack.push(pos);
    }

    let mut phrases = Vec::new();
    let mut i = 0;
    while i < n {
        let mut best = (0, 0);
        for cand in [psv[i], nsv[i]] {
            if cand != NONE {
                let len = common_prefix(text, cand as usize, i);
                if len > best.0 {
                    best = (len, cand as usize);
                }
            }
        }
        if best.0 == 0 {
            phrases.push(Lz77Phrase::Literal { start: i + 1, symbol: text[i] });
            i += 1;
        } else {
            phrases.push(Lz77Phrase::Copy { start: i + 1, source: best.1 + 1, length: best.0 });
            i += best.0;
        }
    }
    Ok(Lz77Parse { phrases, n })
}

pub fn phrase_count(parse: &Lz77Parse) -> usize {
    parse.phrase_count()
}

/// Expands a parse back into text. Copies are performed symbol by symbol so
/// self-overlapping phrases behave as in the encoder.
pub fn decode(parse: &Lz77Parse) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(parse.n);
    for phrase in &parse.phrases {
        if phrase.start() != out.len() + 1 {
            return Err(Error::InvalidParse(format!(
                "phrase starts at {} but {} symbols decoded",
                phrase.start(),
                out.len()
            )));
        }
        match *phrase {
            Lz77Phrase::Literal { symbol, .. } => out.push(symbol),
            Lz77Phrase::Copy { source, length, start } => {
                if source == 0 || source >= start || length == 0 {
                    return Err(Error::InvalidParse(format!(
                        "copy at {start} has source {source}, length {length}"
                    )));
                }
                for k in 0..length {
                    let c = out[source - 1 + k];
                    out.push(c);
                }
            }
        }
    }
    if out.len() != parse.n {
        return Err(Error::InvalidParse(format!("decoded {} of {} symbols", out.len(), parse.n)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// O(n^2) greedy parser used as the oracle.
    fn brute_force(text: &[u8]) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < text.len() {
            let best = (0..i).map(|j| common_prefix(text, j, i)).max().unwrap_or(0);
            out.push((i, best));
            i += best.max(1);
        }
        out
    }

    #[test]
    fn single_symbol() {
        let p = parse(b"a").unwrap();
        assert_eq!(p.phrases, vec![Lz77Phrase::Literal { start: 1, symbol: b'a' }]);
        assert_eq!(phrase_count(&p), 1);
        assert_eq!(decode(&p).unwrap(), b"a");
    }

    #[test]
    fn periodic_inputs() {
        let p = parse(b"abababab").unwrap();
        assert_eq!(
            p.phrases,
            vec![
                Lz77Phrase::Literal { start: 1, symbol: b'a' },
                Lz77Phrase::Literal { start: 2, symbol: b'b' },
                Lz77Phrase::Copy { start: 3, source: 1, length: 6 },
            ]
        );
        assert_eq!(phrase_count(&parse(b"aaaaaaaa").unwrap()), 2);
    }

    #[test]
    fn abracadabra() {
        let p = parse(b"abracadabra").unwrap();
        assert_eq!(p.phrase_count(), brute_force(b"abracadabra").len());
        assert_eq!(p.phrase_count(), 8);
        assert_eq!(decode(&p).unwrap(), b"abracadabra");
    }

    #[test]
    fn overlapping_copy_decodes() {
        let p = Lz77Parse {
            phrases: vec![
                Lz77Phrase::Literal { start: 1, symbol: b'a' },
                Lz77Phrase::Copy { start: 2, source: 1, length: 7 },
            ],
            n: 8,
        };
        assert_eq!(decode(&p).unwrap(), b"aaaaaaaa");
    }

    #[test]
    fn bad_source_rejected() {
        let p = Lz77Parse {
            phrases: vec![
                Lz77Phrase::Literal { start: 1, symbol: b'a' },
                Lz77Phrase::Copy { start: 2, source: 2, length: 1 },
            ],
            n: 2,
        };
        assert!(matches!(decode(&p), Err(Error::InvalidParse(_))));
    }

    #[test]
    fn empty_rejected() {
        assert_eq!(parse(b""), Err(Error::EmptyText));
    }

    #[test]
    fn suffix_array_sorted() {
        let text = b"mississippi";
        let sa = suffix_array(text);
        for w in sa.windows(2) {
            assert!(text[w[0] as usize..] < text[w[1] as usize..]);
        }
    }

    #[test]
    fn matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let n = rng.gen_range(1..300);
            let sigma = rng.gen_range(1..5u8);
            let text: Vec<u8> = (0..n).map(|_| b'a' + rng.gen_range(0..sigma)).collect();
            let p = parse(&text).unwrap();
            let lens: Vec<(usize, usize)> =
                p.phrases.iter().map(|ph| match *ph {
                    Lz77Phrase::Literal { start, .. } => (start - 1, 0),
                    Lz77Phrase::Copy { start, length, .. } => (start - 1, length),
                }).collect();
            assert_eq!(lens, brute_force(&text));
            assert_eq!(decode(&p).unwrap(), text);
        }
    }
}
