//! Three avalanche rounds plus a whitening XOR over a 256-bit block.
//!
//! Within a round each word is replaced by `A(word, sum of the other three +
//! round key)`, and every update sees the words already updated before it in
//! the same round. The last four subkeys are XORed in at the end.

use crate::primitives::{avalanche, unavalanche, Word};

/// Number of words in a block.
pub const BLOCK_WORDS: usize = 4;
/// Number of bytes in a block.
pub const BLOCK_BYTES: usize = 32;
/// Number of 64-bit subkeys consumed by one encryption.
pub const SUBKEY_COUNT: usize = 16;

/// One 256-bit cipher block as four words, first word first.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Block(pub [Word; BLOCK_WORDS]);

impl Block {
    pub const fn new(w1: Word, w2: Word, w3: Word, w4: Word) -> Self {
        Block([w1, w2, w3, w4])
    }

    /// Big-endian words, so the bytes read in the same order the words are
    /// printed in hex.
    pub fn from_bytes(bytes: &[u8; BLOCK_BYTES]) -> Self {
        let mut words = [0; BLOCK_WORDS];
        for (word, chunk) in words.iter_mut().zip(bytes.chunks_exact(8)) {
            *word = Word::from_be_bytes(chunk.try_into().unwrap());
        }
        Block(words)
    }

    pub fn to_bytes(&self) -> [u8; BLOCK_BYTES] {
        let mut out = [0; BLOCK_BYTES];
        for (chunk, word) in out.chunks_exact_mut(8).zip(self.0.iter()) {
            chunk.copy_from_slice(&word.to_be_bytes());
        }
        out
    }

    /// Bitwise XOR of two blocks.
    pub fn xor(&self, other: &Block) -> Block {
        let mut words = self.0;
        for (w, o) in words.iter_mut().zip(other.0.iter()) {
            *w ^= o;
        }
        Block(words)
    }

    /// Bit `index` of the block, counting from the most significant bit of
    /// the first word (`0..256`).
    pub fn bit(&self, index: usize) -> bool {
        let word = self.0[index / 64];
        (word >> (63 - index % 64)) & 1 == 1
    }

    /// Returns a copy with bit `index` inverted (same numbering as [`Block::bit`]).
    pub fn flip_bit(&self, index: usize) -> Block {
        let mut words = self.0;
        words[index / 64] ^= 1 << (63 - index % 64);
        Block(words)
    }

    pub fn count_ones(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }
}

/// The sixteen expanded subkeys. Index 0 holds the first subkey.
///
/// Subkeys 0..12 are round keys, four per round; 12..16 whiten the output.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SubkeySchedule([Word; SUBKEY_COUNT]);

impl SubkeySchedule {
    pub const fn from_words(words: [Word; SUBKEY_COUNT]) -> Self {
        SubkeySchedule(words)
    }

    pub const fn words(&self) -> &[Word; SUBKEY_COUNT] {
        &self.0
    }

    /// The four keys used in `round` (0-based).
    #[inline(always)]
    pub fn round_keys(&self, round: usize) -> [Word; 4] {
        let k = &self.0[round * 4..round * 4 + 4];
        [k[0], k[1], k[2], k[3]]
    }

    #[inline(always)]
    pub fn whitening_keys(&self) -> [Word; 4] {
        self.round_keys(3)
    }
}

impl core::fmt::Debug for SubkeySchedule {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("SubkeySchedule").finish_non_exhaustive()
    }
}

/// How many of the three rounds to run. Only the analysis code uses fewer
/// than three.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RoundCount(u8);

impl RoundCount {
    pub const ONE: RoundCount = RoundCount(1);
    pub const TWO: RoundCount = RoundCount(2);
    pub const FULL: RoundCount = RoundCount(3);

    /// `None` unless `rounds` is 1, 2 or 3.
    pub const fn new(rounds: u8) -> Option<Self> {
        match rounds {
            1..=3 => Some(RoundCount(rounds)),
            _ => None,
        }
    }

    pub const fn get(self) -> u8 {
        self.0
    }
}

#[inline(always)]
fn round(t: &mut [Word; 4], rk: [Word; 4]) {
    let [a, b, c, d] = t;
    *a = avalanche(*a, b.wrapping_add(*c).wrapping_add(*d).wrapping_add(rk[0]));
    *b = avalanche(*b, a.wrapping_add(*c).wrapping_add(*d).wrapping_add(rk[1]));
    *c = avalanche(*c, a.wrapping_add(*b).wrapping_add(*d).wrapping_add(rk[2]));
    *d = avalanche(*d, a.wrapping_add(*b).wrapping_add(*c).wrapping_add(rk[3]));
}

#[inline(always)]
fn inverse_round(t: &mut [Word; 4], rk: [Word; 4]) {
    let [a, b, c, d] = t;
    let ab = a.wrapping_add(*b);
    *d = unavalanche(*d, ab.wrapping_add(*c).wrapping_add(rk[3]));
    *c = unavalanche(*c, ab.wrapping_add(*d).wrapping_add(rk[2]));
    let cd = c.wrapping_add(*d);
    *b = unavalanche(*b, cd.wrapping_add(*a).wrapping_add(rk[1]));
    *a = unavalanche(*a, cd.wrapping_add(*b).wrapping_add(rk[0]));
}

#[inline(always)]
fn whiten(t: &mut [Word; 4], sk: &SubkeySchedule) {
    for (w, k) in t.iter_mut().zip(sk.whitening_keys()) {
        *w ^= k;
    }
}

/// Full three-round encryption with output whitening.
#[inline]
pub fn encrypt_block(p: &Block, sk: &SubkeySchedule) -> Block {
    let mut t = p.0;
    round(&mut t, sk.round_keys(0));
    round(&mut t, sk.round_keys(1));
    round(&mut t, sk.round_keys(2));
    whiten(&mut t, sk);
    Block(t)
}

/// Exact inverse of [`encrypt_block`]: strip the whitening, then undo the
/// rounds last to first, each in reverse word order.
#[inline]
pub fn decrypt_block(c: &Block, sk: &SubkeySchedule) -> Block {
    let mut t = c.0;
    whiten(&mut t, sk);
    inverse_round(&mut t, sk.round_keys(2));
    inverse_round(&mut t, sk.round_keys(1));
    inverse_round(&mut t, sk.round_keys(0));
    Block(t)
}

/// Runs only the first `rounds` rounds, whitening only when asked.
///
/// Weakened variants exist for diffusion measurements and are not used by
/// any encryption mode.
pub fn encrypt_block_rounds(p: &Block, sk: &SubkeySchedule, rounds: RoundCount, whiten_output: bool) -> Block {
    let mut t = p.0;
    for r in 0..usize::from(rounds.get()) {
        round(&mut t, sk.round_keys(r));
    }
    if whiten_output {
        whiten(&mut t, sk);
    }
    Block(t)
}
