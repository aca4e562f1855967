//! Key expansion.
//!
//! The master key seeds a 320-bit generator whose step function is built from
//! [`avalanche`]. Ten outputs are thrown away, the next sixteen become the
//! subkeys.

use core::fmt;

use crate::cipher::{SubkeySchedule, SUBKEY_COUNT};
use crate::error::KeyError;
use crate::primitives::{avalanche, Word};

/// Fills the seed words a short key leaves empty. Leading digits of the
/// fractional part of sqrt(2); nonzero, so a valid seed is never all zeros.
pub const SEED_CONSTANT: Word = 4142135623730950488;

/// Generator outputs discarded before the first subkey.
pub const WARMUP_OUTPUTS: usize = 10;

/// Supported master key lengths.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KeySize {
    Bits128,
    Bits192,
    Bits256,
}

impl KeySize {
    pub const ALL: [KeySize; 3] = [KeySize::Bits128, KeySize::Bits192, KeySize::Bits256];

    pub const fn words(self) -> usize {
        match self {
            KeySize::Bits128 => 2,
            KeySize::Bits192 => 3,
            KeySize::Bits256 => 4,
        }
    }

    pub const fn bytes(self) -> usize {
        self.words() * 8
    }

    pub const fn bits(self) -> usize {
        self.words() * 64
    }

    pub const fn from_words(words: usize) -> Option<Self> {
        match words {
            2 => Some(KeySize::Bits128),
            3 => Some(KeySize::Bits192),
            4 => Some(KeySize::Bits256),
            _ => None,
        }
    }

    pub const fn from_bits(bits: usize) -> Option<Self> {
        if bits % 64 != 0 {
            return None;
        }
        Self::from_words(bits / 64)
    }
}

/// A 128, 192 or 256-bit master key held as big-endian 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CipherKey {
    words: [Word; 4],
    size: KeySize,
}

impl CipherKey {
    /// Accepts exactly 2, 3 or 4 words.
    pub fn from_words(words: &[Word]) -> Result<Self, KeyError> {
        let size = KeySize::from_words(words.len()).ok_or(KeyError::WordCount(words.len()))?;
        let mut buf = [0; 4];
        buf[..words.len()].copy_from_slice(words);
        Ok(CipherKey { words: buf, size })
    }

    /// Const constructor for compiled-in keys. Panics on a bad word count.
    pub const fn from_const(words: &[Word]) -> Self {
        let size = match KeySize::from_words(words.len()) {
            Some(size) => size,
            None => panic!("key must be 2, 3 or 4 words"),
        };
        let mut buf = [0; 4];
        let mut i = 0;
        while i < words.len() {
            buf[i] = words[i];
            i += 1;
        }
        CipherKey { words: buf, size }
    }

    /// Accepts exactly 16, 24 or 32 bytes, read as big-endian words.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, KeyError> {
        if bytes.len() % 8 != 0 || KeySize::from_words(bytes.len() / 8).is_none() {
            return Err(KeyError::ByteLength(bytes.len()));
        }
        let mut buf = [0; 4];
        for (w, chunk) in buf.iter_mut().zip(bytes.chunks_exact(8)) {
            *w = Word::from_be_bytes(chunk.try_into().unwrap());
        }
        Self::from_words(&buf[..bytes.len() / 8])
    }

    /// Parses 32, 48 or 64 hex digits. ASCII whitespace between digits is
    /// ignored, so the grouped `1599D14129204267 E4C91210F1C15541` form works.
    pub fn from_hex(text: &str) -> Result<Self, KeyError> {
        let mut words = [0 as Word; 4];
        let mut digits = 0usize;
        for ch in text.chars().filter(|c| !c.is_ascii_whitespace()) {
            let nibble = ch.to_digit(16).ok_or(KeyError::HexDigit(ch))?;
            if digits < 64 {
                let w = &mut words[digits / 16];
                *w = (*w << 4) | Word::from(nibble);
            }
            digits += 1;
        }
        if digits % 16 != 0 || KeySize::from_words(digits / 16).is_none() {
            return Err(KeyError::HexLength(digits));
        }
        Self::from_words(&words[..digits / 16])
    }

    pub fn size(&self) -> KeySize {
        self.size
    }

    pub fn words(&self) -> &[Word] {
        &self.words[..self.size.words()]
    }

    pub fn to_bytes(&self) -> ([u8; 32], usize) {
        let mut out = [0; 32];
        for (chunk, w) in out.chunks_exact_mut(8).zip(self.words()) {
            chunk.copy_from_slice(&w.to_be_bytes());
        }
        (out, self.size.bytes())
    }
}

impl fmt::Debug for CipherKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CipherKey").field("size", &self.size).finish_non_exhaustive()
    }
}

/// Lowercase hex, no separators.
impl fmt::LowerHex for CipherKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for w in self.words() {
            write!(f, "{w:016x}")?;
        }
        Ok(())
    }
}

/// 320 bits of generator state.
///
/// Only [`seed_from_key`] creates one, so the all-zero fixed point of the
/// step function cannot be reached.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrngState([Word; 5]);

impl PrngState {
    pub fn words(&self) -> &[Word; 5] {
        &self.0
    }

    /// Advances in place and returns the output word.
    #[inline]
    pub fn next_word(&mut self) -> Word {
        let (y, next) = prng_next(*self);
        *self = next;
        y
    }
}

impl fmt::Debug for PrngState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PrngState").finish_non_exhaustive()
    }
}

/// Lays the key words out first and fills the remaining seed words with
/// [`SEED_CONSTANT`].
pub fn seed_from_key(key: &CipherKey) -> PrngState {
    let mut s = [SEED_CONSTANT; 5];
    s[..key.words().len()].copy_from_slice(key.words());
    PrngState(s)
}

/// One generator step.
///
/// The second word is taken out, words 3..5 and the old first word shift
/// down one slot, and the new first word (also the output) is
/// `A(s1, s1 + s2)`.
#[inline]
pub fn prng_next(state: PrngState) -> (Word, PrngState) {
    let [s1, s2, s3, s4, s5] = state.0;
    let y = avalanche(s1, s1.wrapping_add(s2));
    (y, PrngState([y, s3, s4, s5, s1]))
}

/// Expands a master key into the sixteen subkeys.
pub fn expand_key(key: &CipherKey) -> SubkeySchedule {
    let mut state = seed_from_key(key);
    for _ in 0..WARMUP_OUTPUTS {
        state.next_word();
    }
    let mut sk = [0; SUBKEY_COUNT];
    for k in sk.iter_mut() {
        *k = state.next_word();
    }
    SubkeySchedule::from_words(sk)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vectors::{XCRUSH_128, XCRUSH_256};

    const C: Word = SEED_CONSTANT;

    #[test]
    fn seed_constant_value() {
        assert_eq!(SEED_CONSTANT, 0x397b_d267_5ff9_7158);
    }

    #[test]
    fn seed_layout() {
        let k128 = CipherKey::from_words(&[0xA, 0xB]).unwrap();
        assert_eq!(seed_from_key(&k128).words(), &[0xA, 0xB, C, C, C]);
        let k192 = CipherKey::from_words(&[0xA, 0xB, 0xD]).unwrap();
        assert_eq!(seed_from_key(&k192).words(), &[0xA, 0xB, 0xD, C, C]);
        assert_eq!(
            seed_from_key(&XCRUSH_256.key).words(),
            &[0xF0E0D0C0B0A09080, 0x7060504030201000, 0xF1D3B597795B3D1F, 0x021346578A9BCEDF, C]
        );
    }

    #[test]
    fn zero_state_is_fixed_point() {
        let (y, next) = prng_next(PrngState([0; 5]));
        assert_eq!(y, 0);
        assert_eq!(next.words(), &[0; 5]);
    }

    #[test]
    fn constant_state_single_step() {
        // reference program, `N` command
        let (y, next) = prng_next(PrngState([C; 5]));
        assert_eq!(y, 0xc3fd8a81158e6ee6);
        assert_eq!(next.words(), &[0xc3fd8a81158e6ee6, C, C, C, C]);
    }

    #[test]
    fn warmup_stream_from_128_bit_seed() {
        // reference program, eleven successive `N` steps from the 128-bit
        // known-answer seed
        let expected: [Word; 11] = [
            0x41e1ff969268803b,
            0x9484ca71cebd3fd1,
            0x5674afd73f0fa628,
            0x9994c8577862f6a3,
            0x461b0f80cf317d6a,
            0x303d306196f61f9c,
            0xa97f09f4ff2b34fc,
            0x7acc204152e58782,
            0xa11b43c5c0b4f1e5,
            0x0a32e18a136c2691,
            0xd6f739b2f9128bcd,
        ];
        let mut state = seed_from_key(&XCRUSH_128.key);
        for want in expected {
            assert_eq!(state.next_word(), want);
        }
        assert_eq!(expand_key(&XCRUSH_128.key).words()[0], expected[10]);
    }

    #[test]
    fn schedule_for_256_bit_vector_key() {
        // reference program, `K 4 ...`
        let expected: [Word; 16] = [
            0xf739e5066f769ac9,
            0xcbfedfc2f0fdabab,
            0x39d2c1dad5fb49fd,
            0xfd9d5974ae5eef6b,
            0x0bbaa9f359958bd4,
            0x8a86c9c43abce3b4,
            0x7c218e696cceee62,
            0xc8577ab6be649b04,
            0xb9c7262771159412,
            0x0b3f87f48f6423bc,
            0x20bb35ab30a56594,
            0xcbfcdfe70cdcc55e,
            0xa27509b03c4b80c0,
            0x3987e9ac9592feb1,
            0xd45108f3f27ada6d,
            0x3764aea3c98acd8d,
        ];
        assert_eq!(expand_key(&XCRUSH_256.key).words(), &expected);
        assert_eq!(expand_key(&XCRUSH_256.key), expand_key(&XCRUSH_256.key));
    }

    #[test]
    fn key_word_count_validation() {
        assert_eq!(CipherKey::from_words(&[1]), Err(KeyError::WordCount(1)));
        assert_eq!(CipherKey::from_words(&[1; 5]), Err(KeyError::WordCount(5)));
        assert_eq!(CipherKey::from_words(&[1; 3]).unwrap().size(), KeySize::Bits192);
    }

    #[test]
    fn hex_parsing() {
        let k = CipherKey::from_hex("1599D14129204267 E4C91210F1C15541").unwrap();
        assert_eq!(k, XCRUSH_128.key);
        assert_eq!(CipherKey::from_hex(&"a".repeat(33)), Err(KeyError::HexLength(33)));
        assert_eq!(CipherKey::from_hex(&"a".repeat(80)), Err(KeyError::HexLength(80)));
        assert_eq!(CipherKey::from_hex(""), Err(KeyError::HexLength(0)));
        assert_eq!(CipherKey::from_hex(&"g".repeat(32)), Err(KeyError::HexDigit('g')));
        let k = CipherKey::from_hex(&"0123456789abcdef".repeat(4)).unwrap();
        assert_eq!(k.size(), KeySize::Bits256);
        let mut s = alloc::string::String::new();
        core::fmt::write(&mut s, format_args!("{k:x}")).unwrap();
        assert_eq!(s, "0123456789abcdef".repeat(4));
    }

    #[test]
    fn byte_parsing() {
        let k = CipherKey::from_bytes(&[0x11; 24]).unwrap();
        assert_eq!(k.words(), &[0x1111111111111111; 3]);
        assert_eq!(CipherKey::from_bytes(&[0; 20]), Err(KeyError::ByteLength(20)));
        assert_eq!(CipherKey::from_bytes(&[0; 40]), Err(KeyError::ByteLength(40)));
        let (bytes, len) = k.to_bytes();
        assert_eq!(&bytes[..len], &[0x11; 24]);
    }

    #[test]
    fn key_size_bits() {
        assert_eq!(KeySize::from_bits(192), Some(KeySize::Bits192));
        assert_eq!(KeySize::from_bits(100), None);
        assert_eq!(KeySize::from_bits(320), None);
    }
}
