//! The two word-level building blocks of the cipher.
//!
//! [`c_function`] compresses a 64-bit word to a rotation distance in `0..=63`.
//! [`avalanche`] adds an addend to a word and rotates the sum left by the
//! compressed addend; [`unavalanche`] undoes it. Note the rotation distance is
//! derived from the addend alone, never from the sum.
//!
//! All arithmetic wraps modulo 2^64. Rotation latency depends on the data on
//! some hardware; nothing here tries to be constant-time.

/// A 64-bit cipher word. Additions wrap modulo 2^64.
pub type Word = u64;

/// A left-rotation distance in `0..=63`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rotation(u8);

impl Rotation {
    /// Returns `None` when `bits > 63`.
    pub const fn new(bits: u8) -> Option<Self> {
        if bits < 64 {
            Some(Rotation(bits))
        } else {
            None
        }
    }

    #[inline(always)]
    pub const fn get(self) -> u32 {
        self.0 as u32
    }
}

/// Chaotic 64-to-6-bit compression used as the rotation distance.
///
/// For inputs below 64 every shifted term vanishes, so the result is the
/// input itself.
#[inline(always)]
pub const fn c_function(x: Word) -> Rotation {
    let x = (x >> 32).wrapping_add(x);
    let x = (x >> 11) ^ x;
    let x = (x >> 9).wrapping_add(x);
    let x = (x >> 6).wrapping_add(x);
    Rotation((x & 0x3f) as u8)
}

/// Keyed avalanche step: `(x + a) <<< C(a)`.
#[inline(always)]
pub const fn avalanche(x: Word, a: Word) -> Word {
    x.wrapping_add(a).rotate_left(c_function(a).get())
}

/// Inverse of [`avalanche`] for the same addend: `(y >>> C(a)) - a`.
#[inline(always)]
pub const fn unavalanche(y: Word, a: Word) -> Word {
    y.rotate_right(c_function(a).get()).wrapping_sub(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Values below were produced by the vendored reference program
    // (crates/oracle/reference, `C`/`A`/`U` driver commands).
    #[test]
    fn c_function_known_values() {
        assert_eq!(c_function(0).get(), 0);
        assert_eq!(c_function(37).get(), 37);
        assert_eq!(c_function(0x1599_D141_2920_4267).get(), 0x1b);
    }

    #[test]
    fn c_function_is_identity_below_64() {
        for x in 0..64u64 {
            assert_eq!(u64::from(c_function(x).get()), x);
        }
    }

    #[test]
    fn avalanche_known_values() {
        assert_eq!(avalanche(0xDEAD_BEEF_0000_0000, 0), 0xDEAD_BEEF_0000_0000);
        assert_eq!(avalanche(0, 1), 2);
        assert_eq!(avalanche(0x9338_1923_4608_9EEE, 0x965D_1281_0033_DDF0), 0x4ae9_118f_1f37_8a65);
    }

    #[test]
    fn unavalanche_known_values() {
        assert_eq!(unavalanche(0xDEAD_BEEF_0000_0000, 0), 0xDEAD_BEEF_0000_0000);
        assert_eq!(unavalanche(0x4ae9_118f_1f37_8a65, 0x965D_1281_0033_DDF0), 0x9338_1923_4608_9EEE);
    }

    #[test]
    fn zero_rotation_is_identity() {
        // a = 0 compresses to 0; the sum must come back unrotated
        assert_eq!(c_function(0).get(), 0);
        assert_eq!(avalanche(u64::MAX, 0), u64::MAX);
        assert_eq!(unavalanche(0x8000_0000_0000_0001, 0), 0x8000_0000_0000_0001);
    }

    #[test]
    fn rotation_bounds() {
        assert!(Rotation::new(63).is_some());
        assert!(Rotation::new(64).is_none());
    }

    proptest! {
        #[test]
        fn c_function_in_range(x in any::<u64>()) {
            prop_assert!(c_function(x).get() < 64);
        }

        #[test]
        fn unavalanche_inverts(x in any::<u64>(), a in any::<u64>()) {
            prop_assert_eq!(unavalanche(avalanche(x, a), a), x);
            prop_assert_eq!(avalanche(unavalanche(x, a), a), x);
        }
    }
}
