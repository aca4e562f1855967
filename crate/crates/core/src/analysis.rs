//! Empirical diffusion and output-distribution measurements.
//!
//! Every experiment draws its randomness from a ChaCha8 stream seeded
//! explicitly by the caller, independent of the cipher's own generator.
//! Trial `t` of an avalanche run uses stream `t` of that seed, so results do
//! not depend on how trials are scheduled.

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::cipher::{encrypt_block_rounds, Block, RoundCount};
use crate::error::AnalysisError;
use crate::keyschedule::{expand_key, seed_from_key, CipherKey, WARMUP_OUTPUTS};
use crate::primitives::{c_function, Word};

/// Bits in a block.
pub const BLOCK_BITS: usize = 256;

/// Smallest stream accepted by [`prng_sanity`].
pub const PRNG_MIN_WORDS: u64 = 1000;
/// Stream length from which the one-bit fraction bound is enforced.
pub const PRNG_BOUND_WORDS: u64 = 100_000;
/// Accepted one-bit fraction for streams of at least [`PRNG_BOUND_WORDS`].
pub const PRNG_ONES_BOUNDS: (f64, f64) = (0.49, 0.51);

/// Per-trial random generator for avalanche experiments.
pub fn trial_rng(rng_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    rng.set_stream(trial);
    rng
}

/// The 256-bit key and plaintext used by avalanche trial `trial`.
pub fn trial_inputs(rng_seed: u64, trial: u64) -> (CipherKey, Block) {
    let mut rng = trial_rng(rng_seed, trial);
    let mut words = [0 as Word; 8];
    for w in words.iter_mut() {
        *w = rng.next_u64();
    }
    let key = CipherKey::from_words(&words[..4]).expect("four words");
    (key, Block([words[4], words[5], words[6], words[7]]))
}

/// Output differences for one trial: entry `i` is `E(p) ^ E(p with bit i flipped)`.
pub fn trial_differences(rng_seed: u64, trial: u64, rounds: RoundCount, whiten: bool) -> [Block; BLOCK_BITS] {
    let (key, p) = trial_inputs(rng_seed, trial);
    let sk = expand_key(&key);
    let base = encrypt_block_rounds(&p, &sk, rounds, whiten);
    core::array::from_fn(|i| encrypt_block_rounds(&p.flip_bit(i), &sk, rounds, whiten).xor(&base))
}

/// Single-bit input flips against output flips.
#[derive(Clone, Debug, PartialEq)]
pub struct AvalancheReport {
    pub rounds: RoundCount,
    pub whiten: bool,
    pub samples: u64,
    /// Mean fraction of output bits flipped per single-bit input flip.
    pub mean_flip_fraction: f64,
    /// Fewest output bits flipped by any single input flip.
    pub min_flipped: u32,
    /// Most output bits flipped by any single input flip.
    pub max_flipped: u32,
    /// Row-major 256x256; entry `[i][j]` is the observed probability that
    /// output bit `j` flips when input bit `i` flips.
    pub matrix: Vec<f64>,
}

impl AvalancheReport {
    pub fn entry(&self, input_bit: usize, output_bit: usize) -> f64 {
        self.matrix[input_bit * BLOCK_BITS + output_bit]
    }

    pub fn matrix_mean(&self) -> f64 {
        self.matrix.iter().sum::<f64>() / self.matrix.len() as f64
    }

    /// Largest `|entry - 0.5|`.
    pub fn max_deviation(&self) -> f64 {
        self.matrix.iter().map(|p| (p - 0.5).abs()).fold(0.0, f64::max)
    }
}

/// Flip-count accumulator; trials can be merged in any order.
#[derive(Clone)]
pub struct AvalancheCounts {
    counts: Vec<u32>,
    samples: u64,
    total: u64,
    min_flipped: u32,
    max_flipped: u32,
}

impl Default for AvalancheCounts {
    fn default() -> Self {
        AvalancheCounts {
            counts: vec![0; BLOCK_BITS * BLOCK_BITS],
            samples: 0,
            total: 0,
            min_flipped: u32::MAX,
            max_flipped: 0,
        }
    }
}

impl AvalancheCounts {
    pub fn add_trial(&mut self, diffs: &[Block; BLOCK_BITS]) {
        for (i, diff) in diffs.iter().enumerate() {
            let flipped = diff.count_ones();
            self.total += u64::from(flipped);
            self.min_flipped = self.min_flipped.min(flipped);
            self.max_flipped = self.max_flipped.max(flipped);
            let row = &mut self.counts[i * BLOCK_BITS..(i + 1) * BLOCK_BITS];
            for (w, &word) in diff.0.iter().enumerate() {
                let mut bits = word;
                while bits != 0 {
                    let tz = bits.trailing_zeros() as usize;
                    row[w * 64 + 63 - tz] += 1;
                    bits &= bits - 1;
                }
            }
        }
        self.samples += 1;
    }

    pub fn merge(&mut self, other: &AvalancheCounts) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.samples += other.samples;
        self.total += other.total;
        self.min_flipped = self.min_flipped.min(other.min_flipped);
        self.max_flipped = self.max_flipped.max(other.max_flipped);
    }

    pub fn finish(self, rounds: RoundCount, whiten: bool) -> AvalancheReport {
        let n = self.samples.max(1) as f64;
        let cells = (BLOCK_BITS * BLOCK_BITS) as f64;
        AvalancheReport {
            rounds,
            whiten,
            samples: self.samples,
            mean_flip_fraction: self.total as f64 / (n * cells),
            min_flipped: if self.samples == 0 { 0 } else { self.min_flipped },
            max_flipped: self.max_flipped,
            matrix: self.counts.iter().map(|&c| f64::from(c) / n).collect(),
        }
    }
}

/// Runs `samples` trials: random 256-bit key and plaintext, each of the 256
/// plaintext bits flipped in turn, output differences accumulated.
pub fn measure_avalanche(
    rounds: RoundCount,
    whiten: bool,
    samples: u64,
    rng_seed: u64,
) -> Result<AvalancheReport, AnalysisError> {
    if samples == 0 {
        return Err(AnalysisError::TooFewSamples { min: 1, got: 0 });
    }
    let mut counts = AvalancheCounts::default();
    for trial in 0..samples {
        counts.add_trial(&trial_differences(rng_seed, trial, rounds, whiten));
    }
    Ok(counts.finish(rounds, whiten))
}

/// How inputs to the C-function are derived from the base word.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stride {
    /// `base, base + 1, base + 2, ...`
    Increment,
    /// `base` with 1 to 4 randomly chosen bits flipped; randomness seeded
    /// from `base`.
    LowHamming,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistributionReport {
    pub histogram: [u64; 64],
    pub distinct_values: u32,
    /// Against a uniform distribution over the 64 outputs.
    pub chi_square: f64,
}

impl DistributionReport {
    pub fn total(&self) -> u64 {
        self.histogram.iter().sum()
    }
}

/// Uniform-expectation chi-square over `bins`.
pub fn chi_square(bins: &[u64]) -> f64 {
    let total: u64 = bins.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let expected = total as f64 / bins.len() as f64;
    bins.iter()
        .map(|&o| {
            let d = o as f64 - expected;
            d * d / expected
        })
        .sum()
}

/// Histogram of C-function outputs over `count` closely related inputs.
pub fn measure_c_distribution(base: Word, count: u64, stride: Stride) -> Result<DistributionReport, AnalysisError> {
    if count == 0 {
        return Err(AnalysisError::TooFewSamples { min: 1, got: 0 });
    }
    let mut histogram = [0u64; 64];
    match stride {
        Stride::Increment => {
            for i in 0..count {
                histogram[c_function(base.wrapping_add(i)).get() as usize] += 1;
            }
        }
        Stride::LowHamming => {
            let mut rng = ChaCha8Rng::seed_from_u64(base);
            for _ in 0..count {
                let flips = 1 + rng.next_u32() % 4;
                let mut x = base;
                for _ in 0..flips {
                    x ^= 1 << (rng.next_u32() % 64);
                }
                histogram[c_function(x).get() as usize] += 1;
            }
        }
    }
    Ok(DistributionReport {
        distinct_values: histogram.iter().filter(|&&c| c > 0).count() as u32,
        chi_square: chi_square(&histogram),
        histogram,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PrngReport {
    pub words: u64,
    /// Fraction of one bits over all output words.
    pub ones_fraction: f64,
    /// Lag-1 correlation of successive outputs read as fractions in [0, 1).
    pub serial_correlation: f64,
    /// Output bytes binned by their top six bits, against uniform.
    pub byte_chi_square: f64,
    /// Whether `ones_fraction` lies in [`PRNG_ONES_BOUNDS`]; `None` for
    /// streams shorter than [`PRNG_BOUND_WORDS`].
    pub passed: Option<bool>,
}

/// Statistics over `n` outputs of the key-schedule generator, taken after the
/// same warm-up the key expansion uses.
pub fn prng_sanity(key: &CipherKey, n: u64) -> Result<PrngReport, AnalysisError> {
    if n < PRNG_MIN_WORDS {
        return Err(AnalysisError::TooFewSamples { min: PRNG_MIN_WORDS, got: n });
    }
    let mut state = seed_from_key(key);
    for _ in 0..WARMUP_OUTPUTS {
        state.next_word();
    }

    let mut ones = 0u64;
    let mut bins = [0u64; 64];
    let (mut sum, mut sum_sq, mut sum_lag) = (0.0f64, 0.0f64, 0.0f64);
    let (mut first, mut prev) = (0.0f64, 0.0f64);
    for i in 0..n {
        let w = state.next_word();
        ones += u64::from(w.count_ones());
        for b in w.to_be_bytes() {
            bins[usize::from(b >> 2)] += 1;
        }
        let x = w as f64 / 18_446_744_073_709_551_616.0;
        if i == 0 {
            first = x;
        } else {
            sum_lag += prev * x;
        }
        sum += x;
        sum_sq += x * x;
        prev = x;
    }

    let nf = n as f64;
    let mean = sum / nf;
    let var = sum_sq / nf - mean * mean;
    // lag-1 sums exclude the last term on the left and the first on the right
    let lag_pairs = nf - 1.0;
    let cov = sum_lag / lag_pairs - ((sum - prev) / lag_pairs) * ((sum - first) / lag_pairs);
    let serial_correlation = if var > 0.0 { cov / var } else { 0.0 };

    let ones_fraction = ones as f64 / (64.0 * nf);
    let passed =
        (n >= PRNG_BOUND_WORDS).then_some(ones_fraction >= PRNG_ONES_BOUNDS.0 && ones_fraction <= PRNG_ONES_BOUNDS.1);
    Ok(PrngReport { words: n, ones_fraction, serial_correlation, byte_chi_square: chi_square(&bins), passed })
}
