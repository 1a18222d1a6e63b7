//! Index-modulation mapping between source bits and active-subcarrier sets.
//!
//! A subblock of `n` subcarriers keeps only `k` of them active. The choice
//! of the active set carries `p1 = floor(log2(C(n, k)))` bits via a lookup
//! table, and the M-ary symbols on the active subcarriers carry
//! `p2 = k * log2(M)` more.
//!
//! # Example
//!
//! ```
//! use ofdm_im_noma::im_mapping::{bits_per_subblock, IndexLookupTable};
//!
//! let counts = bits_per_subblock(4, 2, 2);
//! assert_eq!((counts.index_bits, counts.symbol_bits), (2, 2));
//!
//! let table = IndexLookupTable::new(4, 2).unwrap();
//! assert_eq!(table.active_indices(0), &[0, 1]);
//! assert_eq!(table.word_for(&[0, 3]), Some(3));
//! ```

use crate::Error;
use std::collections::HashMap;
use std::fmt;

/// Which side of the power split a user occupies.
///
/// The near user (A) gets the smaller power share and the stronger channel;
/// the far user (B) gets the rest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UserRole {
    Near,
    Far,
}

impl UserRole {
    /// Single-letter label used in reports and CSV rows.
    pub fn label(self) -> &'static str {
        match self {
            UserRole::Near => "A",
            UserRole::Far => "B",
        }
    }
}

impl fmt::Display for UserRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Per-user subblock parameters: geometry plus modulation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UserParams {
    pub role: UserRole,
    /// Subcarriers per subblock.
    pub n: usize,
    /// Active subcarriers per subblock.
    pub k: usize,
    /// Modulation order.
    pub m: usize,
}

impl UserParams {
    /// Validates geometry and modulation order.
    pub fn new(role: UserRole, n: usize, k: usize, m: usize) -> Result<Self, Error> {
        if k == 0 || k > n {
            return Err(Error::InvalidSubblock { n, k });
        }
        if m < 2 || !m.is_power_of_two() {
            return Err(Error::InvalidModOrder(m));
        }
        let counts = bits_per_subblock(n, k, m);
        if counts.total() > 32 {
            return Err(Error::CandidateSpaceTooLarge {
                bits: counts.total(),
                cap: 32,
            });
        }
        Ok(Self { role, n, k, m })
    }

    /// Bits carried by one of this user's subblocks.
    pub fn bit_counts(&self) -> BitCounts {
        bits_per_subblock(self.n, self.k, self.m)
    }

    /// Bits per modulated symbol, `log2(m)`.
    pub fn bits_per_symbol(&self) -> u32 {
        self.m.trailing_zeros()
    }
}

/// Bits per subblock, split by where they travel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BitCounts {
    /// Bits selecting the active-index set.
    pub index_bits: u32,
    /// Bits carried by the M-ary symbols.
    pub symbol_bits: u32,
}

impl BitCounts {
    pub fn total(&self) -> u32 {
        self.index_bits + self.symbol_bits
    }
}

/// Splits a subblock's bit budget: `floor(log2(C(n, k)))` index bits plus
/// `k * log2(m)` symbol bits.
///
/// # Panics
/// Panics unless `1 <= k <= n` and `m` is a power of two at least 2.
pub fn bits_per_subblock(n: usize, k: usize, m: usize) -> BitCounts {
    assert!(k >= 1 && k <= n, "need 1 <= k <= n");
    assert!(m >= 2 && m.is_power_of_two(), "modulation order must be a power of two");
    let combos = binomial(n, k);
    let index_bits = 127 - combos.leading_zeros(); // floor(log2) for combos >= 1
    let symbol_bits = k as u32 * m.trailing_zeros();
    BitCounts { index_bits, symbol_bits }
}

/// Exact binomial coefficient; `n` up to 64 stays well inside `u128`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 1..=k {
        // Multiply before dividing; the running product of i consecutive
        // binomials is always divisible by i.
        c = c * (n - k + i) as u128 / i as u128;
    }
    c
}

/// Lookup table from index words to active-subcarrier sets.
///
/// Holds `2^p1` sets of `k` sorted indices in `0..n`. For the classical
/// `(n, k) = (4, 2)` case the table is the well-known hand ordering
/// `{0,1}, {1,2}, {2,3}, {0,3}`; every other geometry takes the first
/// `2^p1` k-combinations in lexicographic order.
#[derive(Debug, Clone)]
pub struct IndexLookupTable {
    n: usize,
    k: usize,
    index_bits: u32,
    sets: Vec<Vec<usize>>,
    inverse: HashMap<Vec<usize>, u32>,
}

impl IndexLookupTable {
    /// Enumeration cap: tables wider than this many index bits are refused.
    pub const MAX_INDEX_BITS: u32 = 20;

    pub fn new(n: usize, k: usize) -> Result<Self, Error> {
        if k == 0 || k > n {
            return Err(Error::InvalidSubblock { n, k });
        }
        let counts = bits_per_subblock(n, k, 2);
        if counts.index_bits > Self::MAX_INDEX_BITS {
            return Err(Error::CandidateSpaceTooLarge {
                bits: counts.index_bits,
                cap: Self::MAX_INDEX_BITS,
            });
        }
        let num_sets = 1usize << counts.index_bits;

        let sets: Vec<Vec<usize>> = if (n, k) == (4, 2) {
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]]
        } else {
            lexicographic_combinations(n, k, num_sets)
        };

        let inverse = sets
            .iter()
            .enumerate()
            .map(|(word, set)| (set.clone(), word as u32))
            .collect();

        Ok(Self {
            n,
            k,
            index_bits: counts.index_bits,
            sets,
            inverse,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Bits consumed by one index word.
    pub fn index_bits(&self) -> u32 {
        self.index_bits
    }

    /// Number of legal active sets, always `2^index_bits`.
    pub fn num_sets(&self) -> usize {
        self.sets.len()
    }

    /// Active indices for an index word, sorted ascending.
    ///
    /// # Panics
    /// Panics if `word` is out of range.
    pub fn active_indices(&self, word: u32) -> &[usize] {
        &self.sets[word as usize]
    }

    /// All legal sets in word order.
    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    /// Index word for a sorted active set, if it is one of the legal sets.
    pub fn word_for(&self, indices: &[usize]) -> Option<u32> {
        self.inverse.get(indices).copied()
    }
}

fn lexicographic_combinations(n: usize, k: usize, take: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(take);
    let mut current: Vec<usize> = (0..k).collect();
    loop {
        out.push(current.clone());
        if out.len() == take {
            return out;
        }
        // Advance to the next k-combination of 0..n in lexicographic order.
        let mut i = k;
        loop {
            debug_assert!(i > 0, "combination enumeration exhausted early");
            i -= 1;
            if current[i] != i + n - k {
                break;
            }
        }
        current[i] += 1;
        for j in i + 1..k {
            current[j] = current[j - 1] + 1;
        }
    }
}

/// One subblock's payload: the index word plus the packed symbol word.
///
/// Symbol words pack MSB-first: the first `log2(m)` chunk modulates the
/// lowest active index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SubblockPayload {
    pub index_word: u32,
    pub symbol_word: u32,
}

impl SubblockPayload {
    /// Splits a bit slice (index bits first, MSB-first within each word).
    ///
    /// # Panics
    /// Panics unless `bits.len() == counts.total()` and every entry is 0/1.
    pub fn from_bits(bits: &[u8], counts: BitCounts) -> Self {
        assert_eq!(bits.len(), counts.total() as usize, "payload width mismatch");
        let (index, symbol) = bits.split_at(counts.index_bits as usize);
        Self {
            index_word: pack_bits(index),
            symbol_word: pack_bits(symbol),
        }
    }

    /// Appends this payload as bits (index bits first, MSB-first).
    pub fn to_bits(&self, counts: BitCounts, out: &mut Vec<u8>) {
        unpack_bits(self.index_word, counts.index_bits, out);
        unpack_bits(self.symbol_word, counts.symbol_bits, out);
    }

    /// Symbol index for the active subcarrier of a given rank (0 = lowest
    /// active index).
    pub fn symbol_at(&self, k: usize, bits_per_symbol: u32, rank: usize) -> u32 {
        symbol_at(self.symbol_word, k, bits_per_symbol, rank)
    }

    /// Hamming distance between two payloads of identical widths.
    pub fn bit_errors(&self, other: &Self) -> u32 {
        (self.index_word ^ other.index_word).count_ones()
            + (self.symbol_word ^ other.symbol_word).count_ones()
    }
}

/// Extracts the symbol index at `rank` from a packed symbol word.
pub fn symbol_at(symbol_word: u32, k: usize, bits_per_symbol: u32, rank: usize) -> u32 {
    debug_assert!(rank < k);
    let shift = bits_per_symbol * (k - 1 - rank) as u32;
    (symbol_word >> shift) & ((1u32 << bits_per_symbol) - 1)
}

/// Packs per-rank symbol indices into a symbol word (rank 0 lands in the
/// most significant chunk).
pub fn pack_symbols(symbols: &[u32], bits_per_symbol: u32) -> u32 {
    let mut word = 0u32;
    for &s in symbols {
        debug_assert!(s < (1u32 << bits_per_symbol));
        word = (word << bits_per_symbol) | s;
    }
    word
}

fn pack_bits(bits: &[u8]) -> u32 {
    let mut word = 0u32;
    for &b in bits {
        debug_assert!(b <= 1, "bits must be 0 or 1");
        word = (word << 1) | b as u32;
    }
    word
}

fn unpack_bits(word: u32, width: u32, out: &mut Vec<u8>) {
    for i in (0..width).rev() {
        out.push(((word >> i) & 1) as u8);
    }
}
