//! Acceptance criteria, run in order on one thread with one PASS/FAIL line
//! each. Exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use xcrush::analysis::{measure_avalanche, prng_sanity, PRNG_ONES_BOUNDS};
use xcrush::vectors::KNOWN_ANSWERS;
use xcrush::*;
use xcrush_cli::bench::{estimate_cpu_hz, run_bench, BenchConfig};
use xcrush_cli::kat::{run_known_answers, KatEngine, Library};
use xcrush_oracle::{check_case, parse_corpus, Oracle, CHECKED_IN_CORPUS};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn random_key(rng: &mut ChaCha8Rng, size: KeySize) -> CipherKey {
    let words: Vec<u64> = (0..size.words()).map(|_| rng.next_u64()).collect();
    CipherKey::from_words(&words).unwrap()
}

fn random_block(rng: &mut ChaCha8Rng) -> Block {
    Block(std::array::from_fn(|_| rng.next_u64()))
}

fn known_answers() -> Outcome {
    let start = Instant::now();
    let results = run_known_answers(&Library);
    let elapsed = start.elapsed();
    let failed: Vec<String> = results.iter().filter(|r| !r.passed()).map(|r| r.to_string()).collect();
    outcome(
        failed.is_empty() && results.len() == 6 && elapsed < Duration::from_secs(1),
        format!("{} of 6 checks pass in {elapsed:?} {}", 6 - failed.len(), failed.join("; ")),
    )
}

fn block_roundtrip() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xA2);
    let mut failures = 0;
    for size in KeySize::ALL {
        for _ in 0..100_000 {
            let sk = expand_key(&random_key(&mut rng, size));
            let p = random_block(&mut rng);
            if decrypt_block(&encrypt_block(&p, &sk), &sk) != p {
                failures += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        failures == 0 && elapsed < Duration::from_secs(30),
        format!("3 x 10^5 pairs, {failures} failures, {elapsed:?}"),
    )
}

fn primitive_inverse() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xA3);
    let failures = (0..1_000_000)
        .filter(|_| {
            let (x, a) = (rng.next_u64(), rng.next_u64());
            unavalanche(avalanche(x, a), a) != x
        })
        .count();
    let elapsed = start.elapsed();
    outcome(failures == 0 && elapsed < Duration::from_secs(10), format!("10^6 pairs, {failures} failures, {elapsed:?}"))
}

fn c_identity_region() -> Outcome {
    let bad: Vec<u64> = (0..64u64).filter(|&x| u64::from(c_function(x).get()) != x).collect();
    outcome(bad.is_empty(), format!("64 inputs, mismatches at {bad:?}"))
}

fn oracle_equivalence() -> Outcome {
    let oracle = match Oracle::build() {
        Ok(o) => o,
        Err(e) => return outcome(false, format!("reference build failed: {e}")),
    };
    // a fresh corpus from a seed not used for the checked-in one
    let fresh = match xcrush_oracle::corpus_with(&oracle, 403, 0xACCE) {
        Ok(text) => parse_corpus(&text).expect("oracle output parses"),
        Err(e) => return outcome(false, format!("reference run failed: {e}")),
    };
    let stored = parse_corpus(CHECKED_IN_CORPUS).expect("checked-in corpus parses");
    let random = fresh.len() - 3 + stored.len() - 3;
    let sizes_covered = KeySize::ALL.iter().all(|s| fresh[3..].iter().filter(|c| c.key.size() == *s).count() >= 100);
    let mismatches: Vec<String> = fresh
        .iter()
        .chain(&stored)
        .filter_map(|c| {
            let p = check_case(c);
            (!p.is_empty()).then(|| p.join(", "))
        })
        .collect();
    outcome(
        mismatches.is_empty() && fresh.len() - 3 >= 300 && sizes_covered,
        format!(
            "{random} random cases (fresh {} + stored {}), {} mismatches {}",
            fresh.len() - 3,
            stored.len() - 3,
            mismatches.len(),
            mismatches.first().map(String::as_str).unwrap_or("")
        ),
    )
}

fn stream_roundtrip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA6);
    let mut lengths: Vec<usize> = (0..=4096).step_by(32).collect();
    lengths.extend((0..=4096).step_by(32).filter_map(|l: usize| l.checked_sub(1)));
    lengths.extend([1, 2, 31, 33, 4095, 4096]);
    lengths.extend((0..100).map(|_| rng.next_u32() as usize % 4097));
    lengths.sort_unstable();
    lengths.dedup();
    let mut failures = Vec::new();
    for (i, &len) in lengths.iter().enumerate() {
        let key = random_key(&mut rng, KeySize::ALL[i % 3]);
        let mut msg = vec![0u8; len];
        rng.fill_bytes(&mut msg);
        let mut nonce = [0u8; 16];
        rng.fill_bytes(&mut nonce);
        for mode in [Mode::Ecb, Mode::Ctr] {
            let c = encrypt_stream(&msg, &key, mode, &nonce);
            if decrypt_stream(&c, &key).as_deref() != Ok(&msg[..]) {
                failures.push(format!("{mode:?}/{len}"));
            }
        }
    }
    let aligned = lengths.iter().filter(|l| *l % 32 == 0).count();
    outcome(
        failures.is_empty() && lengths.len() >= 200,
        format!("{} lengths ({aligned} block-aligned) x 2 modes, failures {failures:?}", lengths.len()),
    )
}

fn diffusion() -> Outcome {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut full = None;
    for rounds in [RoundCount::ONE, RoundCount::TWO, RoundCount::FULL] {
        let r = measure_avalanche(rounds, true, 10_000, 0xD1FF).unwrap();
        lines.push(format!("{}r mean {:.4} max|p-0.5| {:.4}", rounds.get(), r.mean_flip_fraction, r.max_deviation()));
        full = Some(r);
    }
    let full = full.unwrap();
    let elapsed = start.elapsed();
    let mean_ok = (full.mean_flip_fraction - 0.5).abs() <= 0.02;
    let entries_ok = full.max_deviation() <= 0.05;
    outcome(mean_ok && entries_ok && elapsed < Duration::from_secs(120), format!("{} ({elapsed:?})", lines.join(", ")))
}

fn cpu_hz() -> Option<f64> {
    estimate_cpu_hz(Duration::from_millis(250)).or_else(|| {
        let info = std::fs::read_to_string("/proc/cpuinfo").ok()?;
        let line = info.lines().find(|l| l.starts_with("cpu MHz"))?;
        line.split(':').nth(1)?.trim().parse::<f64>().ok().map(|mhz| mhz * 1e6)
    })
}

fn performance() -> Outcome {
    let hz = cpu_hz();
    let config = BenchConfig { buffer_bytes: 16 << 20, trials: 11, cpu_hz: hz };
    let mut medians = Vec::new();
    let mut cpbs = Vec::new();
    let mut checksums = Vec::new();
    for _ in 0..3 {
        match run_bench(&config) {
            Ok(r) => {
                medians.push(r.throughput);
                cpbs.extend(r.cycles_per_byte);
                checksums.push(r.checksum);
            }
            Err(e) => return outcome(false, format!("bench failed: {e}")),
        }
    }
    let lo = medians.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = medians.iter().copied().fold(0.0, f64::max);
    let variation = (hi - lo) / lo;

    // independent recomputation of the measured work
    let mut expected = xcrush_cli::bench::workload(16 << 20);
    let sk = xcrush_cli::bench::bench_schedule();
    for chunk in expected.chunks_exact_mut(32) {
        let c = encrypt_block(&Block::from_bytes(&chunk[..].try_into().unwrap()), &sk);
        chunk.copy_from_slice(&c.to_bytes());
    }
    let checksum_ok = checksums.iter().all(|&c| c == xcrush_cli::bench::checksum(&expected));

    let cpb_ok = cpbs.iter().all(|&c| c <= 100.0);
    let mib = |b: f64| b / (1 << 20) as f64;
    outcome(
        variation < 0.10 && cpb_ok && checksum_ok && hz.is_some(),
        format!(
            "medians {:.0}/{:.0}/{:.0} MiB/s (variation {:.1}%), cycles/byte {} at {}, checksum {}",
            mib(medians[0]),
            mib(medians[1]),
            mib(medians[2]),
            100.0 * variation,
            cpbs.iter().map(|c| format!("{c:.2}")).collect::<Vec<_>>().join("/"),
            hz.map_or("unknown clock".to_string(), |h| format!("{:.2} GHz", h / 1e9)),
            if checksum_ok { "verified" } else { "MISMATCH" }
        ),
    )
}

fn prng() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA9);
    let key = random_key(&mut rng, KeySize::Bits256);
    let a = prng_sanity(&key, 100_000).unwrap();
    let b = prng_sanity(&key, 100_000).unwrap();
    let in_bounds = a.ones_fraction >= PRNG_ONES_BOUNDS.0 && a.ones_fraction <= PRNG_ONES_BOUNDS.1;
    outcome(
        in_bounds && a == b && a.passed == Some(true),
        format!("one-bit fraction {:.5}, reproducible: {}", a.ones_fraction, a == b),
    )
}

// --- deliberately broken engines for the test-of-the-tests ---

#[derive(Clone, Copy)]
enum Mutation {
    ReversedRoundKeys,
    WordUpdateOrder,
    LittleEndian,
}

struct Mutant(Mutation);

impl Mutant {
    fn round(&self, t: &mut [u64; 4], rk: [u64; 4]) {
        let order: [usize; 4] = match self.0 {
            Mutation::WordUpdateOrder => [3, 2, 1, 0],
            _ => [0, 1, 2, 3],
        };
        for i in order {
            let others = t.iter().enumerate().filter(|(j, _)| *j != i).fold(0u64, |s, (_, w)| s.wrapping_add(*w));
            t[i] = avalanche(t[i], others.wrapping_add(rk[i]));
        }
    }
}

impl KatEngine for Mutant {
    fn expand_key(&self, key: &CipherKey) -> SubkeySchedule {
        expand_key(key)
    }
    fn encrypt(&self, block: &Block, sk: &SubkeySchedule) -> Block {
        let mut t = block.0;
        let rounds: [usize; 3] = match self.0 {
            Mutation::ReversedRoundKeys => [2, 1, 0],
            _ => [0, 1, 2],
        };
        for r in rounds {
            self.round(&mut t, sk.round_keys(r));
        }
        for (w, k) in t.iter_mut().zip(sk.whitening_keys()) {
            *w ^= k;
        }
        Block(t)
    }
    fn decrypt(&self, block: &Block, sk: &SubkeySchedule) -> Block {
        decrypt_block(block, sk)
    }
    fn block_from_bytes(&self, bytes: &[u8; 32]) -> Block {
        match self.0 {
            Mutation::LittleEndian => {
                Block(std::array::from_fn(|i| u64::from_le_bytes(bytes[i * 8..i * 8 + 8].try_into().unwrap())))
            }
            _ => Block::from_bytes(bytes),
        }
    }
    fn block_to_bytes(&self, block: &Block) -> [u8; 32] {
        match self.0 {
            Mutation::LittleEndian => {
                let mut out = [0; 32];
                for (c, w) in out.chunks_exact_mut(8).zip(block.0) {
                    c.copy_from_slice(&w.to_le_bytes());
                }
                out
            }
            _ => block.to_bytes(),
        }
    }
}

fn mutation_sensitivity() -> Outcome {
    // the unmutated engine must pass, otherwise the comparison means nothing
    let control_ok = run_known_answers(&Library).iter().all(|r| r.passed());
    let mut details = Vec::new();
    let mut all_caught = true;
    for (name, m) in [
        ("reversed round keys", Mutation::ReversedRoundKeys),
        ("word update order", Mutation::WordUpdateOrder),
        ("little-endian bytes", Mutation::LittleEndian),
    ] {
        let failed = run_known_answers(&Mutant(m)).iter().filter(|r| !r.passed()).count();
        all_caught &= failed > 0;
        details.push(format!("{name}: {failed}/6 checks fail"));
    }
    // a correct engine built from the same helper must pass
    let identity_ok = KNOWN_ANSWERS.iter().all(|v| {
        let m = Mutant(Mutation::LittleEndian);
        m.encrypt(&v.plaintext, &expand_key(&v.key)) == v.ciphertext
    });
    outcome(control_ok && identity_ok && all_caught, details.join(", "))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("known-answer vectors", known_answers),
        ("block round trip", block_roundtrip),
        ("avalanche inverse", primitive_inverse),
        ("C-function identity region", c_identity_region),
        ("reference oracle equivalence", oracle_equivalence),
        ("stream-mode round trip", stream_roundtrip),
        ("diffusion", diffusion),
        ("throughput stability", performance),
        ("key-schedule generator sanity", prng),
        ("mutation sensitivity", mutation_sensitivity),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.passed {
            failures += 1;
        }
        println!("{} {:2}. {name}: {}", if o.passed { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("{} of {} acceptance criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
