//! Argument parsing and subcommand dispatch.
//!
//! Exit codes: 0 success, 1 known-answer mismatch, 2 invalid arguments,
//! 3 I/O or entropy failure, 4 container format or padding error.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;
use xcrush::analysis::{measure_avalanche, measure_c_distribution, prng_sanity, Stride};
use xcrush::modes::{ContainerHeader, Nonce};
use xcrush::vectors::XCRUSH_256;
use xcrush::{decrypt_stream, encrypt_stream, CipherKey, ContainerError, KeySize, Mode, RoundCount};

use crate::bench::{estimate_cpu_hz, run_bench, BenchConfig};
use crate::kat::{run_known_answers, Library};
use crate::report::{self, Format, Metrics};

pub const SECURITY_WARNING: &str =
    "warning: no security claims are made for XCRUSH; do not rely on it to protect real data";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Container(#[from] ContainerError),
    #[error("{0} known-answer check(s) failed")]
    Mismatch(usize),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Mismatch(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::Container(_) => 4,
        }
    }
}

fn io_err(path: &Path, e: io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

#[derive(Parser, Debug)]
#[command(
    name = "xcrush",
    version,
    about = "XCRUSH block cipher: file encryption, known-answer tests, analysis, benchmarks"
)]
#[command(after_help = "Run `xcrush vectors` first after building to confirm the cipher is bit-exact.")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Encrypt a file into an XCRU container.
    Encrypt(EncryptArgs),
    /// Decrypt an XCRU container.
    Decrypt(DecryptArgs),
    /// Print a random key as hex.
    Keygen(KeygenArgs),
    /// Run the built-in known-answer tests in both directions.
    Vectors,
    /// Diffusion and distribution measurements.
    Analyze(AnalyzeArgs),
    /// Single-threaded ECB throughput.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("key_source").required(true).args(["key", "key_file"])))]
pub struct KeyArgs {
    /// Key as 32, 48 or 64 hex digits (ends up in shell history; prefer --key-file).
    #[arg(long)]
    pub key: Option<String>,
    /// File containing the key as hex; whitespace is ignored.
    #[arg(long)]
    pub key_file: Option<PathBuf>,
}

impl KeyArgs {
    fn load(&self) -> Result<CipherKey, CliError> {
        match (&self.key, &self.key_file) {
            (Some(hex), _) => {
                eprintln!("note: keys given on the command line may be recorded in shell history; prefer --key-file");
                CipherKey::from_hex(hex).map_err(|e| CliError::Usage(format!("invalid --key: {e}")))
            }
            (None, Some(path)) => {
                let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
                CipherKey::from_hex(&text)
                    .map_err(|e| CliError::Usage(format!("invalid key in {}: {e}", path.display())))
            }
            (None, None) => Err(CliError::Usage("a key is required (--key or --key-file)".into())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Ecb,
    Ctr,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Ecb => Mode::Ecb,
            ModeArg::Ctr => Mode::Ctr,
        }
    }
}

#[derive(Args, Debug)]
pub struct EncryptArgs {
    /// Input file, `-` for stdin.
    #[arg(short, long, default_value = "-")]
    pub input: PathBuf,
    /// Output file, `-` for stdout.
    #[arg(short, long, default_value = "-")]
    pub output: PathBuf,
    #[command(flatten)]
    pub key: KeyArgs,
    #[arg(long, value_enum, default_value_t = ModeArg::Ctr)]
    pub mode: ModeArg,
    /// CTR nonce as 32 hex digits; random when omitted.
    #[arg(long)]
    pub nonce: Option<String>,
}

#[derive(Args, Debug)]
pub struct DecryptArgs {
    /// Input container, `-` for stdin.
    #[arg(short, long, default_value = "-")]
    pub input: PathBuf,
    /// Output file, `-` for stdout.
    #[arg(short, long, default_value = "-")]
    pub output: PathBuf,
    #[command(flatten)]
    pub key: KeyArgs,
}

#[derive(Args, Debug)]
pub struct KeygenArgs {
    #[arg(long, default_value_t = 256, value_parser = parse_key_bits)]
    pub bits: usize,
}

fn parse_key_bits(s: &str) -> Result<usize, String> {
    let bits: usize = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    match KeySize::from_bits(bits) {
        Some(_) => Ok(bits),
        None => Err(format!("key size must be 128, 192 or 256 bits, got {bits}")),
    }
}

fn parse_u64(s: &str) -> Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("`{s}`: {e}"))
}

fn parse_rounds(s: &str) -> Result<RoundCount, String> {
    s.parse::<u8>().ok().and_then(RoundCount::new).ok_or_else(|| format!("rounds must be 1, 2 or 3, got `{s}`"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrideArg {
    Increment,
    LowHamming,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("experiment").required(true).args(["avalanche", "cdist", "prng"])))]
pub struct AnalyzeArgs {
    /// Single-bit plaintext flips against output flips.
    #[arg(long)]
    pub avalanche: bool,
    /// Spread of the rotation-distance compression over similar inputs.
    #[arg(long)]
    pub cdist: bool,
    /// Statistics of the key-schedule generator stream.
    #[arg(long)]
    pub prng: bool,

    /// Rounds to measure (1-3); all three side by side when omitted.
    #[arg(long, value_parser = parse_rounds)]
    pub rounds: Option<RoundCount>,
    /// Skip the output whitening (does not change XOR differences).
    #[arg(long)]
    pub no_whiten: bool,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 1, value_parser = parse_u64)]
    pub seed: u64,
    /// Write the 256x256 flip matrix of the last measured round count as CSV.
    #[arg(long)]
    pub matrix: Option<PathBuf>,

    /// Number of inputs (--cdist) or generator words (--prng).
    #[arg(long, default_value_t = 65_536)]
    pub count: u64,
    /// First input for --cdist (decimal or 0x-prefixed hex); derived from --seed when omitted.
    #[arg(long, value_parser = parse_u64)]
    pub base: Option<u64>,
    #[arg(long, value_enum, default_value_t = StrideArg::Increment)]
    pub stride: StrideArg,

    /// Key for --prng (hex); the 256-bit test-vector key when omitted.
    #[arg(long)]
    pub key: Option<String>,

    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Buffer size in MiB.
    #[arg(long, default_value_t = 16, conflicts_with = "bytes")]
    pub mib: usize,
    /// Buffer size in bytes (multiple of 32, at least 1 MiB).
    #[arg(long)]
    pub bytes: Option<usize>,
    #[arg(long, default_value_t = 11)]
    pub trials: usize,
    /// Core clock in Hz, for the cycles/byte estimate.
    #[arg(long, conflicts_with = "estimate_hz")]
    pub cpu_hz: Option<f64>,
    /// Estimate the clock from the time-stamp counter (x86-64 only).
    #[arg(long)]
    pub estimate_hz: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

fn read_input(path: &Path) -> Result<Vec<u8>, CliError> {
    if path == Path::new("-") {
        let mut buf = Vec::new();
        io::stdin().read_to_end(&mut buf).map_err(|e| io_err(path, e))?;
        Ok(buf)
    } else {
        fs::read(path).map_err(|e| io_err(path, e))
    }
}

fn write_output(path: &Path, data: &[u8]) -> Result<(), CliError> {
    if path == Path::new("-") {
        let mut out = io::stdout().lock();
        out.write_all(data).and_then(|_| out.flush()).map_err(|e| io_err(path, e))
    } else {
        fs::write(path, data).map_err(|e| io_err(path, e))
    }
}

fn parse_nonce(text: &str) -> Result<Nonce, CliError> {
    let bytes = hex::decode(text.trim()).map_err(|e| CliError::Usage(format!("invalid --nonce: {e}")))?;
    bytes
        .try_into()
        .map_err(|b: Vec<u8>| CliError::Usage(format!("invalid --nonce: need 32 hex digits, got {}", b.len() * 2)))
}

fn random_bytes<const N: usize>() -> Result<[u8; N], CliError> {
    let mut buf = [0u8; N];
    getrandom::fill(&mut buf).map_err(|e| CliError::Io(format!("entropy source unavailable: {e}")))?;
    Ok(buf)
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Ecb => "ECB",
        Mode::Ctr => "CTR",
    }
}

fn cmd_encrypt(args: &EncryptArgs) -> Result<(), CliError> {
    let key = args.key.load()?;
    let mode = Mode::from(args.mode);
    let nonce = match (&args.nonce, mode) {
        (Some(_), Mode::Ecb) => return Err(CliError::Usage("--nonce is only used with --mode ctr".into())),
        (Some(text), Mode::Ctr) => parse_nonce(text)?,
        (None, Mode::Ctr) => random_bytes::<16>()?,
        (None, Mode::Ecb) => [0; 16],
    };
    let plaintext = read_input(&args.input)?;
    let container = encrypt_stream(&plaintext, &key, mode, &nonce);
    write_output(&args.output, &container)?;
    eprintln!("encrypted {} bytes, mode {}, {}-bit key", plaintext.len(), mode_name(mode), key.size().bits());
    Ok(())
}

fn cmd_decrypt(args: &DecryptArgs) -> Result<(), CliError> {
    let key = args.key.load()?;
    let container = read_input(&args.input)?;
    let plaintext = decrypt_stream(&container, &key)?;
    let header = ContainerHeader::parse(&container)?;
    write_output(&args.output, &plaintext)?;
    eprintln!("decrypted {} bytes, mode {}, {}-bit key", plaintext.len(), mode_name(header.mode), key.size().bits());
    Ok(())
}

fn cmd_keygen(args: &KeygenArgs) -> Result<(), CliError> {
    let size = KeySize::from_bits(args.bits).ok_or_else(|| CliError::Usage(format!("bad key size {}", args.bits)))?;
    let bytes = random_bytes::<32>()?;
    println!("{}", hex::encode(&bytes[..size.bytes()]));
    Ok(())
}

fn cmd_vectors() -> Result<(), CliError> {
    let results = run_known_answers(&Library);
    for r in &results {
        println!("{r}");
    }
    let failed = results.iter().filter(|r| !r.passed()).count();
    if failed > 0 {
        return Err(CliError::Mismatch(failed));
    }
    println!("all {} known-answer checks passed", results.len());
    Ok(())
}

fn emit(format: Format, text: String, metrics: Metrics) {
    match format {
        Format::Text => print!("{text}"),
        Format::Kv => print!("{}", metrics.to_kv()),
    }
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<(), CliError> {
    let usage = |e: xcrush::AnalysisError| CliError::Usage(e.to_string());
    if args.avalanche {
        let rounds = match args.rounds {
            Some(r) => vec![r],
            None => vec![RoundCount::ONE, RoundCount::TWO, RoundCount::FULL],
        };
        let mut text = String::new();
        let mut metrics = Metrics::default();
        let mut last = None;
        for r in rounds {
            let report = measure_avalanche(r, !args.no_whiten, args.samples, args.seed).map_err(usage)?;
            text.push_str(&report::avalanche_text(&report));
            metrics.extend_prefixed(&format!("avalanche.r{}", r.get()), report::avalanche_metrics(&report));
            last = Some(report);
        }
        if let (Some(path), Some(report)) = (&args.matrix, &last) {
            fs::write(path, report::avalanche_matrix_csv(report)).map_err(|e| io_err(path, e))?;
        }
        emit(args.format, text, metrics);
    } else if args.cdist {
        let base = args.base.unwrap_or_else(|| {
            let mut rng = xcrush::analysis::trial_rng(args.seed, u64::MAX);
            rand_core::RngCore::next_u64(&mut rng)
        });
        let stride = match args.stride {
            StrideArg::Increment => Stride::Increment,
            StrideArg::LowHamming => Stride::LowHamming,
        };
        let report = measure_c_distribution(base, args.count, stride).map_err(usage)?;
        let mut metrics = Metrics::default();
        metrics.push("cdist.base", format!("{base:016x}"));
        metrics.extend_prefixed("cdist", report::distribution_metrics(&report));
        let text = format!("base {base:016x}\n{}", report::distribution_text(&report));
        emit(args.format, text, metrics);
    } else {
        let key = match &args.key {
            Some(hex) => CipherKey::from_hex(hex).map_err(|e| CliError::Usage(format!("invalid --key: {e}")))?,
            None => XCRUSH_256.key.clone(),
        };
        let report = prng_sanity(&key, args.count).map_err(usage)?;
        let mut metrics = Metrics::default();
        metrics.extend_prefixed("prng", report::prng_metrics(&report));
        emit(args.format, report::prng_text(&report), metrics);
    }
    Ok(())
}

fn cmd_bench(args: &BenchArgs) -> Result<(), CliError> {
    let buffer_bytes = args.bytes.unwrap_or(args.mib << 20);
    let cpu_hz = if args.estimate_hz {
        Some(estimate_cpu_hz(Duration::from_millis(200)).ok_or_else(|| {
            CliError::Usage("--estimate-hz is not supported on this architecture; pass --cpu-hz".into())
        })?)
    } else {
        args.cpu_hz
    };
    let result = run_bench(&BenchConfig { buffer_bytes, trials: args.trials, cpu_hz })
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut metrics = Metrics::default();
    metrics.extend_prefixed("bench", report::bench_metrics(&result));
    emit(args.format, report::bench_text(&result), metrics);
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Encrypt(a) => {
            eprintln!("{SECURITY_WARNING}");
            cmd_encrypt(a)
        }
        Command::Decrypt(a) => {
            eprintln!("{SECURITY_WARNING}");
            cmd_decrypt(a)
        }
        Command::Keygen(a) => cmd_keygen(a),
        Command::Vectors => cmd_vectors(),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Bench(a) => cmd_bench(a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Mismatch(1).exit_code(), 1);
        assert_eq!(CliError::Usage(String::new()).exit_code(), 2);
        assert_eq!(CliError::Io(String::new()).exit_code(), 3);
        assert_eq!(CliError::Container(ContainerError::PadBytes).exit_code(), 4);
    }

    #[test]
    fn parses_numbers() {
        assert_eq!(parse_u64("0x10"), Ok(16));
        assert_eq!(parse_u64("10"), Ok(10));
        assert!(parse_u64("ten").is_err());
        assert!(parse_rounds("4").is_err());
        assert_eq!(parse_key_bits("192"), Ok(192));
        assert!(parse_key_bits("100").is_err());
    }

    #[test]
    fn nonce_parsing() {
        assert_eq!(parse_nonce(&"ab".repeat(16)).unwrap(), [0xab; 16]);
        assert!(parse_nonce("abcd").is_err());
        assert!(parse_nonce("zz").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
