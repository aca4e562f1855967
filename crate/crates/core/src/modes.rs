//! Byte-level encryption: ECB and CTR over 32-byte blocks, wrapped in a small
//! self-describing container.
//!
//! Container layout (32-byte header, then the body):
//!
//! | offset | size | field                                   |
//! |--------|------|-----------------------------------------|
//! | 0      | 4    | magic `XCRU`                            |
//! | 4      | 1    | version, `0x01`                         |
//! | 5      | 1    | key length in bytes: 16, 24 or 32       |
//! | 6      | 1    | mode: `0x01` ECB, `0x02` CTR            |
//! | 7      | 1    | reserved, `0x00`                        |
//! | 8      | 16   | nonce (all zero for ECB)                |
//! | 24     | 8    | plaintext length, big-endian            |
//!
//! ECB pads to a whole number of blocks with 1..=32 bytes each equal to the
//! pad length, so a block-aligned message gains a full pad block. CTR is not
//! padded; keystream block `i` is the encryption of the nonce (right-aligned
//! in a zero block) XOR `i` as a 256-bit big-endian integer.
//!
//! There is no authentication. ECB maps equal plaintext blocks to equal
//! ciphertext blocks.

use alloc::vec::Vec;

use crate::cipher::{decrypt_block, encrypt_block, Block, SubkeySchedule, BLOCK_BYTES};
use crate::error::ContainerError;
use crate::keyschedule::{expand_key, CipherKey, KeySize};

pub const MAGIC: [u8; 4] = *b"XCRU";
pub const VERSION: u8 = 0x01;
pub const HEADER_LEN: usize = 32;
pub const NONCE_LEN: usize = 16;

pub type Nonce = [u8; NONCE_LEN];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Mode {
    Ecb = 0x01,
    Ctr = 0x02,
}

impl Mode {
    pub fn from_byte(b: u8) -> Option<Self> {
        match b {
            0x01 => Some(Mode::Ecb),
            0x02 => Some(Mode::Ctr),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContainerHeader {
    pub key_size: KeySize,
    pub mode: Mode,
    pub nonce: Nonce,
    pub payload_len: u64,
}

impl ContainerHeader {
    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut out = [0; HEADER_LEN];
        out[..4].copy_from_slice(&MAGIC);
        out[4] = VERSION;
        out[5] = self.key_size.bytes() as u8;
        out[6] = self.mode as u8;
        out[7] = 0;
        out[8..24].copy_from_slice(&self.nonce);
        out[24..].copy_from_slice(&self.payload_len.to_be_bytes());
        out
    }

    /// Parses and validates the first 32 bytes of `data`.
    pub fn parse(data: &[u8]) -> Result<Self, ContainerError> {
        let h: &[u8; HEADER_LEN] = data
            .get(..HEADER_LEN)
            .and_then(|s| s.try_into().ok())
            .ok_or(ContainerError::TruncatedHeader(data.len()))?;
        let magic = [h[0], h[1], h[2], h[3]];
        if magic != MAGIC {
            return Err(ContainerError::Magic(magic));
        }
        if h[4] != VERSION {
            return Err(ContainerError::Version(h[4]));
        }
        let key_size = match h[5] {
            16 => KeySize::Bits128,
            24 => KeySize::Bits192,
            32 => KeySize::Bits256,
            other => return Err(ContainerError::KeyBytes(other)),
        };
        let mode = Mode::from_byte(h[6]).ok_or(ContainerError::Mode(h[6]))?;
        if h[7] != 0 {
            return Err(ContainerError::Reserved(h[7]));
        }
        let nonce: Nonce = h[8..24].try_into().unwrap();
        if mode == Mode::Ecb && nonce != [0; NONCE_LEN] {
            return Err(ContainerError::EcbNonce);
        }
        let payload_len = u64::from_be_bytes(h[24..].try_into().unwrap());
        Ok(ContainerHeader { key_size, mode, nonce, payload_len })
    }

    /// Body length implied by the header.
    pub fn body_len(&self) -> Option<u64> {
        match self.mode {
            Mode::Ecb => (self.payload_len / BLOCK_BYTES as u64 + 1).checked_mul(BLOCK_BYTES as u64),
            Mode::Ctr => Some(self.payload_len),
        }
    }
}

/// Encrypts a whole number of blocks in place.
///
/// # Panics
///
/// If `buf.len()` is not a multiple of 32.
pub fn ecb_encrypt_blocks(buf: &mut [u8], sk: &SubkeySchedule) {
    assert_eq!(buf.len() % BLOCK_BYTES, 0, "ECB buffer must be block aligned");
    for chunk in buf.chunks_exact_mut(BLOCK_BYTES) {
        let chunk: &mut [u8; BLOCK_BYTES] = chunk.try_into().unwrap();
        *chunk = encrypt_block(&Block::from_bytes(chunk), sk).to_bytes();
    }
}

/// Inverse of [`ecb_encrypt_blocks`]. Same alignment requirement.
pub fn ecb_decrypt_blocks(buf: &mut [u8], sk: &SubkeySchedule) {
    assert_eq!(buf.len() % BLOCK_BYTES, 0, "ECB buffer must be block aligned");
    for chunk in buf.chunks_exact_mut(BLOCK_BYTES) {
        let chunk: &mut [u8; BLOCK_BYTES] = chunk.try_into().unwrap();
        *chunk = decrypt_block(&Block::from_bytes(chunk), sk).to_bytes();
    }
}

/// Keystream block for `counter`.
#[inline]
pub fn ctr_keystream_block(sk: &SubkeySchedule, nonce: &Nonce, counter: u64) -> Block {
    let hi = u64::from_be_bytes(nonce[..8].try_into().unwrap());
    let lo = u64::from_be_bytes(nonce[8..].try_into().unwrap());
    encrypt_block(&Block([0, 0, hi, lo ^ counter]), sk)
}

/// XORs the keystream starting at block 0 into `buf`. Applying it twice is
/// the identity.
pub fn ctr_apply(buf: &mut [u8], sk: &SubkeySchedule, nonce: &Nonce) {
    for (i, chunk) in buf.chunks_mut(BLOCK_BYTES).enumerate() {
        let ks = ctr_keystream_block(sk, nonce, i as u64).to_bytes();
        for (b, k) in chunk.iter_mut().zip(ks.iter()) {
            *b ^= k;
        }
    }
}

/// Appends 1..=32 pad bytes, each equal to the pad length.
pub fn pad(data: &[u8]) -> Vec<u8> {
    let pad_len = BLOCK_BYTES - data.len() % BLOCK_BYTES;
    let mut out = Vec::with_capacity(data.len() + pad_len);
    out.extend_from_slice(data);
    out.resize(data.len() + pad_len, pad_len as u8);
    out
}

/// Strips and checks padding added by [`pad`].
pub fn unpad(data: &[u8]) -> Result<&[u8], ContainerError> {
    let &last = data.last().ok_or(ContainerError::PadValue(0))?;
    let n = usize::from(last);
    if n == 0 || n > BLOCK_BYTES || n > data.len() {
        return Err(ContainerError::PadValue(last));
    }
    let (body, padding) = data.split_at(data.len() - n);
    if padding.iter().any(|&b| b != last) {
        return Err(ContainerError::PadBytes);
    }
    Ok(body)
}

/// Produces header + ciphertext. `nonce` is ignored (written as zeros) for
/// ECB.
pub fn encrypt_stream(plaintext: &[u8], key: &CipherKey, mode: Mode, nonce: &Nonce) -> Vec<u8> {
    let sk = expand_key(key);
    let header = ContainerHeader {
        key_size: key.size(),
        mode,
        nonce: if mode == Mode::Ecb { [0; NONCE_LEN] } else { *nonce },
        payload_len: plaintext.len() as u64,
    };
    let mut out = Vec::with_capacity(HEADER_LEN + plaintext.len() + BLOCK_BYTES);
    out.extend_from_slice(&header.to_bytes());
    match mode {
        Mode::Ecb => {
            out.extend_from_slice(&pad(plaintext));
            ecb_encrypt_blocks(&mut out[HEADER_LEN..], &sk);
        }
        Mode::Ctr => {
            out.extend_from_slice(plaintext);
            ctr_apply(&mut out[HEADER_LEN..], &sk, &header.nonce);
        }
    }
    out
}

/// Parses the header, checks the body length, decrypts and removes padding.
pub fn decrypt_stream(container: &[u8], key: &CipherKey) -> Result<Vec<u8>, ContainerError> {
    let header = ContainerHeader::parse(container)?;
    if header.key_size != key.size() {
        return Err(ContainerError::KeyMismatch {
            header: header.key_size.bytes() as u8,
            supplied: key.size().bytes() as u8,
        });
    }
    let body = &container[HEADER_LEN..];
    let expected = header.body_len();
    if expected != Some(body.len() as u64) {
        return Err(ContainerError::BodyLength {
            payload_len: header.payload_len,
            expected: expected.unwrap_or(u64::MAX),
            actual: body.len() as u64,
        });
    }
    let sk = expand_key(key);
    let mut buf = body.to_vec();
    match header.mode {
        Mode::Ecb => {
            ecb_decrypt_blocks(&mut buf, &sk);
            let len = unpad(&buf)?.len();
            if len as u64 != header.payload_len {
                return Err(ContainerError::PadBytes);
            }
            buf.truncate(len);
        }
        Mode::Ctr => ctr_apply(&mut buf, &sk, &header.nonce),
    }
    Ok(buf)
}
