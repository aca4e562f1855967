//! Published known-answer vectors, one per key size.

use crate::cipher::Block;
use crate::keyschedule::CipherKey;

/// A key, plaintext and the ciphertext it must produce.
#[derive(Clone, Debug)]
pub struct KnownAnswer {
    pub name: &'static str,
    pub key: CipherKey,
    pub plaintext: Block,
    pub ciphertext: Block,
}

macro_rules! known_answer {
    ($name:ident, $label:literal, [$($k:literal),+], [$($p:literal),+], [$($c:literal),+]) => {
        pub const $name: KnownAnswer = KnownAnswer {
            name: $label,
            key: CipherKey::from_const(&[$($k),+]),
            plaintext: Block([$($p),+]),
            ciphertext: Block([$($c),+]),
        };
    };
}

known_answer!(
    XCRUSH_128,
    "XCRUSH-128",
    [0x1599D14129204267, 0xE4C91210F1C15541],
    [0x9338192346089EEE, 0x965D12810033DDF0, 0x434C5669E9E31202, 0x86416B3296055DC1],
    [0x2AC5C0D9B62355A2, 0x9DEFB4F22A3D6DBF, 0xCC18261B50072FBC, 0xCCB953C4947A6C39]
);

known_answer!(
    XCRUSH_192,
    "XCRUSH-192",
    [0x4211121041C35A31, 0xE4E4961BB81941BA, 0xCC982462195662AA],
    [0x4440306090522AB0, 0x31249688284691DF, 0x4C15654900DB1A19, 0x19A0FF64135229D2],
    [0x2FEFD41974AFDD44, 0x15BA6339E5C03563, 0x42BA28CF31B5F400, 0xCCD58FC905686D9F]
);

known_answer!(
    XCRUSH_256,
    "XCRUSH-256",
    [0xF0E0D0C0B0A09080, 0x7060504030201000, 0xF1D3B597795B3D1F, 0x021346578A9BCEDF],
    [0x311D411620304361, 0x48165C7790022614, 0x9536295B87012640, 0x396218842A490866],
    [0x000947604A76E469, 0xE34346B03745CAC9, 0x244D96ACC783C42B, 0x95406757BE5653D9]
);

pub const KNOWN_ANSWERS: [KnownAnswer; 3] = [XCRUSH_128, XCRUSH_192, XCRUSH_256];
