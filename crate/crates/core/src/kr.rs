//! Karp-Rabin polynomial fingerprints with O(1) rolling updates.
//!
//! A signature of `w[0..L)` is `sum(w[i] * base^(L-1-i)) mod modulus`. Equal
//! content always yields equal signatures; unequal content collides with
//! probability about `L / modulus` for a random base.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

const CACHED_POWERS: usize = 64;

/// Immutable hasher: a prime modulus, a base in `[2, modulus)` and a small
/// table of powers of the base.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KarpRabinHasher {
    modulus: u64,
    base: u64,
    powers: Vec<u64>,
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

impl KarpRabinHasher {
    /// Deterministic hasher for `seed` with a prime modulus of exactly
    /// `modulus_bits` bits.
    pub fn new(seed: u64, modulus_bits: u32) -> Result<Self> {
        if !(8..=62).contains(&modulus_bits) {
            return Err(Error::ModulusBits(modulus_bits));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (u64::from(modulus_bits) << 56));
        let lo = 1u64 << (modulus_bits - 1);
        let hi = 1u64 << modulus_bits;
        let modulus = loop {
            let candidate = rng.gen_range(lo..hi) | 1;
            if primal_check::miller_rabin(candidate) {
                break candidate;
            }
        };
        let base = rng.gen_range(2..modulus);
        Ok(Self::with_parts(modulus, base))
    }

    /// Hasher with an explicit modulus and base. `modulus` is expected to be
    /// prime; a `base` outside `[2, modulus)` is folded into it.
    pub fn with_parts(modulus: u64, base: u64) -> Self {
        assert!(modulus >= 3, "modulus too small");
        let base = if (2..modulus).contains(&base) { base } else { 2 + base % (modulus - 2) };
        let mut powers = Vec::with_capacity(CACHED_POWERS);
        let mut p = 1 % modulus;
        for _ in 0..CACHED_POWERS {
            powers.push(p);
            p = mul_mod(p, base, modulus);
        }
        Self { modulus, base, powers }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    /// `base^k mod modulus`.
    pub fn power(&self, k: usize) -> u64 {
        if let Some(&p) = self.powers.get(k) {
            return p;
        }
        let mut result = 1 % self.modulus;
        let mut b = self.base;
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = mul_mod(result, b, self.modulus);
            }
            b = mul_mod(b, b, self.modulus);
            e >>= 1;
        }
        result
    }

    #[inline]
    fn push(&self, sig: u64, symbol: u8) -> u64 {
        (mul_mod(sig, self.base, self.modulus) + u64::from(symbol) % self.modulus) % self.modulus
    }

    /// Signature of `bytes` in full.
    pub fn hash(&self, bytes: &[u8]) -> u64 {
        bytes.iter().fold(0, |sig, &c| self.push(sig, c))
    }

    /// Signature of `text[start..start + length]` (0-based start).
    pub fn hash_window(&self, text: &[u8], start: usize, length: usize) -> Result<u64> {
        let end = start.checked_add(length).filter(|&e| e <= text.len()).ok_or(Error::OutOfRange {
            pos: start.saturating_add(length),
            len: text.len(),
        })?;
        Ok(self.hash(&text[start..end]))
    }

    /// Slides a window of `window_length` symbols one position to the right:
    /// drops `outgoing` from the front and appends `incoming`.
    #[inline]
    pub fn roll(&self, signature: u64, outgoing: u8, incoming: u8, window_length: usize) -> u64 {
        debug_assert!(window_length >= 1);
        self.roll_with(signature, outgoing, incoming, self.power(window_length - 1))
    }

    #[inline]
    fn roll_with(&self, signature: u64, outgoing: u8, incoming: u8, top: u64) -> u64 {
        let m = self.modulus;
        let drop = mul_mod(u64::from(outgoing) % m, top, m);
        let sig = (signature + m - drop) % m;
        self.push(sig, incoming)
    }

    /// Every window of `length` symbols in `text`, as `(start, signature)`,
    /// left to right.
    pub fn windows<'a>(&'a self, text: &'a [u8], length: usize) -> Windows<'a> {
        Windows {
            hasher: self,
            text,
            length,
            top: if length > 0 { self.power(length - 1) } else { 0 },
            next: 0,
            sig: 0,
        }
    }
}

/// Iterator produced by [`KarpRabinHasher::windows`].
pub struct Windows<'a> {
    hasher: &'a KarpRabinHasher,
    text: &'a [u8],
    length: usize,
    top: u64,
    next: usize,
    sig: u64,
}

impl Iterator for Windows<'_> {
    type Item = (usize, u64);

    fn next(&mut self) -> Option<(usize, u64)> {
        let start = self.next;
        if self.length == 0 || start + self.length > self.text.len() {
            return None;
        }
        self.sig = if start == 0 {
            self.hasher.hash(&self.text[..self.length])
        } else {
            self.hasher.roll_with(
                self.sig,
                self.text[start - 1],
                self.text[start + self.length - 1],
                self.top,
            )
        };
        self.next += 1;
        Some((start, self.sig))
    }
}
