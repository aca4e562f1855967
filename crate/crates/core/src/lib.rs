//! XCRUSH: a 256-bit ARX block cipher built on data-dependent rotations, with
//! 128, 192 and 256-bit keys.
//!
//! The crate is `no_std` and needs only `alloc` (for the byte-stream modes and
//! the analysis reports).
//!
//! ```
//! use xcrush::{decrypt_block, encrypt_block, expand_key, Block, CipherKey};
//!
//! let key = CipherKey::from_hex("1599D14129204267 E4C91210F1C15541").unwrap();
//! let sk = expand_key(&key);
//! let p = Block::new(0x9338192346089EEE, 0x965D12810033DDF0, 0x434C5669E9E31202, 0x86416B3296055DC1);
//! let c = encrypt_block(&p, &sk);
//! assert_eq!(c.0[0], 0x2AC5C0D9B62355A2);
//! assert_eq!(decrypt_block(&c, &sk), p);
//! ```
//!
//! No security claims are made for this cipher. It is not constant-time and
//! the container format is unauthenticated.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod analysis;
pub mod cipher;
pub mod error;
pub mod keyschedule;
pub mod modes;
pub mod primitives;
pub mod vectors;

pub use cipher::{decrypt_block, encrypt_block, encrypt_block_rounds, Block, RoundCount, SubkeySchedule};
pub use error::{AnalysisError, ContainerError, ErrorKind, KeyError};
pub use keyschedule::{expand_key, prng_next, seed_from_key, CipherKey, KeySize, PrngState, SEED_CONSTANT};
pub use modes::{decrypt_stream, encrypt_stream, ContainerHeader, Mode, Nonce};
pub use primitives::{avalanche, c_function, unavalanche, Rotation, Word};
