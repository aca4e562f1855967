//! Single-threaded ECB throughput measurement.
//!
//! One fixed key is expanded once. Each trial copies a deterministic
//! pseudo-random buffer into a work buffer (untimed) and encrypts it in place
//! (timed). The first trial is a discarded warm-up; the reported figure is the
//! median of the rest. Every trial's output is checksummed and must match the
//! others, which also keeps the optimizer from discarding the work.

use std::time::{Duration, Instant};

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use thiserror::Error;
use xcrush::modes::ecb_encrypt_blocks;
use xcrush::vectors::XCRUSH_256;
use xcrush::{expand_key, SubkeySchedule};

pub const MIN_BUFFER_BYTES: usize = 1 << 20;
pub const MIN_TRIALS: usize = 5;
const WORKLOAD_SEED: u64 = 0x5843_5255_5348; // "XCRUSH"
const KEY_EXPANSIONS: u32 = 100_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BenchError {
    #[error("buffer size {0} is not a multiple of 32 bytes")]
    Misaligned(usize),
    #[error("buffer size {0} is below the 1 MiB minimum")]
    TooSmall(usize),
    #[error("need at least {MIN_TRIALS} trials, got {0}")]
    TooFewTrials(usize),
    #[error("trial {trial} produced checksum {actual:016x}, expected {expected:016x}")]
    UnstableChecksum { trial: usize, expected: u64, actual: u64 },
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub buffer_bytes: usize,
    /// Timed trials, not counting the warm-up.
    pub trials: usize,
    pub cpu_hz: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct BenchResult {
    /// Bytes encrypted per trial.
    pub bytes_processed: u64,
    pub trials: usize,
    /// Wall time of the median trial.
    pub wall_time: Duration,
    /// Median bytes/second.
    pub throughput: f64,
    pub min_throughput: f64,
    pub max_throughput: f64,
    /// `cpu_hz / throughput`, when a clock rate was supplied.
    pub cycles_per_byte: Option<f64>,
    pub cpu_hz: Option<f64>,
    pub checksum: u64,
    /// Mean cost of one key expansion, measured separately.
    pub key_expansion_ns: f64,
    pub timer_resolution: Duration,
    pub pinned_cpu: Option<usize>,
    pub warnings: Vec<String>,
}

impl BenchResult {
    /// `(max - min) / median` over the timed trials.
    pub fn spread(&self) -> f64 {
        (self.max_throughput - self.min_throughput) / self.throughput
    }
}

/// The deterministic plaintext used by every run of the given size.
pub fn workload(buffer_bytes: usize) -> Vec<u8> {
    let mut buf = vec![0u8; buffer_bytes];
    ChaCha8Rng::seed_from_u64(WORKLOAD_SEED).fill_bytes(&mut buf);
    buf
}

pub fn bench_schedule() -> SubkeySchedule {
    expand_key(&XCRUSH_256.key)
}

/// Order-sensitive 64-bit fold over the buffer (length must be a multiple of 8).
pub fn checksum(buf: &[u8]) -> u64 {
    buf.chunks_exact(8).fold(0xcbf2_9ce4_8422_2325, |h, c| {
        (h ^ u64::from_be_bytes(c.try_into().unwrap())).rotate_left(23).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Smallest observable step of the monotonic clock.
pub fn timer_resolution() -> Duration {
    let mut best = Duration::MAX;
    for _ in 0..64 {
        let start = Instant::now();
        let mut now = Instant::now();
        while now == start {
            now = Instant::now();
        }
        best = best.min(now - start);
    }
    best
}

/// Pins the calling thread to the CPU it is currently running on.
#[cfg(target_os = "linux")]
pub fn pin_to_current_cpu() -> Option<usize> {
    // SAFETY: sched_getcpu has no preconditions; the cpu_set_t is zeroed and
    // only manipulated through the libc macros before being passed by pointer.
    unsafe {
        let cpu = libc::sched_getcpu();
        if cpu < 0 {
            return None;
        }
        let mut set: libc::cpu_set_t = std::mem::zeroed();
        libc::CPU_SET(cpu as usize, &mut set);
        if libc::sched_setaffinity(0, std::mem::size_of::<libc::cpu_set_t>(), &set) == 0 {
            Some(cpu as usize)
        } else {
            None
        }
    }
}

#[cfg(not(target_os = "linux"))]
pub fn pin_to_current_cpu() -> Option<usize> {
    None
}

/// Estimates the core clock from the time-stamp counter over `window`.
/// Returns `None` where no such counter is available.
pub fn estimate_cpu_hz(window: Duration) -> Option<f64> {
    #[cfg(target_arch = "x86_64")]
    {
        use std::arch::x86_64::_rdtsc;
        let t0 = Instant::now();
        #[allow(unused_unsafe)]
        // SAFETY: rdtsc is available on every x86-64 CPU.
        let c0 = unsafe { _rdtsc() };
        while t0.elapsed() < window {
            std::hint::spin_loop();
        }
        #[allow(unused_unsafe)]
        // SAFETY: as above.
        let c1 = unsafe { _rdtsc() };
        let secs = t0.elapsed().as_secs_f64();
        Some(c1.wrapping_sub(c0) as f64 / secs)
    }
    #[cfg(not(target_arch = "x86_64"))]
    {
        let _ = window;
        None
    }
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

pub fn run_bench(config: &BenchConfig) -> Result<BenchResult, BenchError> {
    let size = config.buffer_bytes;
    if size % 32 != 0 {
        return Err(BenchError::Misaligned(size));
    }
    if size < MIN_BUFFER_BYTES {
        return Err(BenchError::TooSmall(size));
    }
    if config.trials < MIN_TRIALS {
        return Err(BenchError::TooFewTrials(config.trials));
    }

    let pinned_cpu = pin_to_current_cpu();
    let source = workload(size);
    let mut work = vec![0u8; size];

    let key_start = Instant::now();
    let mut sk = bench_schedule();
    for _ in 1..KEY_EXPANSIONS {
        sk = expand_key(std::hint::black_box(&XCRUSH_256.key));
    }
    let key_expansion_ns = key_start.elapsed().as_nanos() as f64 / f64::from(KEY_EXPANSIONS);

    let mut expected = None;
    let mut times = Vec::with_capacity(config.trials);
    for trial in 0..=config.trials {
        work.copy_from_slice(&source);
        let start = Instant::now();
        ecb_encrypt_blocks(std::hint::black_box(&mut work), &sk);
        let elapsed = start.elapsed();
        let sum = checksum(&work);
        match expected {
            None => expected = Some(sum),
            Some(e) if e != sum => return Err(BenchError::UnstableChecksum { trial, expected: e, actual: sum }),
            Some(_) => {}
        }
        if trial > 0 {
            times.push(elapsed);
        }
    }

    let mut rates: Vec<f64> = times.iter().map(|t| size as f64 / t.as_secs_f64()).collect();
    rates.sort_by(f64::total_cmp);
    let throughput = median(&rates);
    let mut sorted_times = times.clone();
    sorted_times.sort();
    let wall_time = sorted_times[sorted_times.len() / 2];

    let timer_resolution = timer_resolution();
    let mut warnings = Vec::new();
    if timer_resolution.as_secs_f64() > 0.01 * sorted_times[0].as_secs_f64() {
        warnings.push(format!(
            "timer resolution {timer_resolution:?} exceeds 1% of the shortest trial ({:?}); use a larger buffer",
            sorted_times[0]
        ));
    }
    if pinned_cpu.is_none() {
        warnings.push("could not pin to a single CPU; expect scheduler jitter".to_string());
    }

    Ok(BenchResult {
        bytes_processed: size as u64,
        trials: config.trials,
        wall_time,
        throughput,
        min_throughput: rates[0],
        max_throughput: rates[rates.len() - 1],
        cycles_per_byte: config.cpu_hz.map(|hz| hz / throughput),
        cpu_hz: config.cpu_hz,
        checksum: expected.unwrap_or(0),
        key_expansion_ns,
        timer_resolution,
        pinned_cpu,
        warnings,
    })
}
