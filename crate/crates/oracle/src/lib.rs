//! Differential oracle built from the published C reference implementation.
//!
//! The reference source is compiled at runtime into a temporary directory
//! together with a small line-oriented driver (`reference/driver.cc`). The
//! driver answers one command per line, which lets tests compare the library
//! against the reference at every level: compression, avalanche, generator
//! steps, key expansion and whole-block encryption.
//!
//! Corpus format, one case per line, lowercase hex, big-endian words:
//!
//! ```text
//! keysize_hex key_hex pt_hex sk_hex ct_hex
//! ```
//!
//! `keysize_hex` is the key length in bits (`80`, `c0`, `100`), the other
//! fields are the concatenated 16-digit words with no separators.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use thiserror::Error;
use xcrush::vectors::KNOWN_ANSWERS;
use xcrush::{Block, CipherKey, KeySize, Word};

pub const REFERENCE_SOURCE: &str = include_str!("../reference/xcrush_ref.c");
pub const DRIVER_SOURCE: &str = include_str!("../reference/driver.cc");

/// Compiler used for the reference; override with `XCRUSH_ORACLE_CXX`.
pub const DEFAULT_COMPILER: &str = "c++";
const COMPILER_FLAGS: &[&str] = &["-std=c++11", "-O1", "-fwrapv", "-w"];

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("could not prepare build directory: {0}")]
    Workspace(#[source] std::io::Error),
    #[error("could not run compiler `{compiler}`: {source}")]
    CompilerMissing { compiler: String, source: std::io::Error },
    #[error("reference build failed ({status}):\n{stderr}")]
    Compile { status: std::process::ExitStatus, stderr: String },
    #[error("could not run reference program: {0}")]
    Exec(#[source] std::io::Error),
    #[error("reference program exited with {0}")]
    Status(std::process::ExitStatus),
    #[error("unexpected reference output: {0}")]
    Protocol(String),
    #[error("reference self-check failed: {0}")]
    SelfCheck(String),
}

#[derive(Debug, Error)]
#[error("corpus line {line}: {reason}")]
pub struct CorpusError {
    pub line: usize,
    pub reason: String,
}

/// The compiled reference program.
pub struct Oracle {
    _dir: tempfile::TempDir,
    exe: PathBuf,
}

impl Oracle {
    /// Compiles the vendored reference plus driver with the default compiler.
    pub fn build() -> Result<Self, OracleError> {
        let compiler = std::env::var("XCRUSH_ORACLE_CXX").unwrap_or_else(|_| DEFAULT_COMPILER.to_string());
        Self::build_with(&compiler)
    }

    pub fn build_with(compiler: &str) -> Result<Self, OracleError> {
        let dir = tempfile::tempdir().map_err(OracleError::Workspace)?;
        std::fs::write(dir.path().join("xcrush_ref.c"), REFERENCE_SOURCE).map_err(OracleError::Workspace)?;
        std::fs::write(dir.path().join("driver.cc"), DRIVER_SOURCE).map_err(OracleError::Workspace)?;
        let exe = dir.path().join("xcrush-reference");
        let out = Command::new(compiler)
            .args(COMPILER_FLAGS)
            .arg("-o")
            .arg(&exe)
            .arg(dir.path().join("driver.cc"))
            .output()
            .map_err(|source| OracleError::CompilerMissing { compiler: compiler.to_string(), source })?;
        if !out.status.success() {
            return Err(OracleError::Compile {
                status: out.status,
                stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
            });
        }
        Ok(Oracle { _dir: dir, exe })
    }

    pub fn executable(&self) -> &Path {
        &self.exe
    }

    /// Runs the reference program's own `main()` and returns its stdout.
    pub fn reference_main(&self) -> Result<String, OracleError> {
        let out = Command::new(&self.exe).arg("reference-main").output().map_err(OracleError::Exec)?;
        if !out.status.success() {
            return Err(OracleError::Status(out.status));
        }
        Ok(String::from_utf8_lossy(&out.stdout).into_owned())
    }

    /// Sends every command, returns one response line per command.
    pub fn run_batch(&self, commands: &[String]) -> Result<Vec<String>, OracleError> {
        let mut child =
            Command::new(&self.exe).stdin(Stdio::piped()).stdout(Stdio::piped()).spawn().map_err(OracleError::Exec)?;
        let mut stdin = child.stdin.take().expect("piped stdin");
        let input = commands.join("\n") + "\n";
        let writer = std::thread::spawn(move || stdin.write_all(input.as_bytes()));
        let stdout = child.stdout.take().expect("piped stdout");
        let lines: Vec<String> = BufReader::new(stdout).lines().collect::<Result<_, _>>().map_err(OracleError::Exec)?;
        writer.join().expect("writer thread").map_err(OracleError::Exec)?;
        let status = child.wait().map_err(OracleError::Exec)?;
        if !status.success() {
            return Err(OracleError::Status(status));
        }
        if lines.len() != commands.len() {
            return Err(OracleError::Protocol(format!("sent {} commands, got {} lines", commands.len(), lines.len())));
        }
        Ok(lines)
    }

    pub fn c_function(&self, inputs: &[Word]) -> Result<Vec<u32>, OracleError> {
        let cmds: Vec<String> = inputs.iter().map(|x| format!("C {x:x}")).collect();
        self.run_batch(&cmds)?
            .iter()
            .map(|l| u32::from_str_radix(l.trim(), 16).map_err(|_| OracleError::Protocol(l.clone())))
            .collect()
    }

    pub fn avalanche(&self, pairs: &[(Word, Word)]) -> Result<Vec<Word>, OracleError> {
        let cmds: Vec<String> = pairs.iter().map(|(x, a)| format!("A {x:x} {a:x}")).collect();
        self.run_batch(&cmds)?.iter().map(|l| parse_word(l)).collect()
    }

    pub fn unavalanche(&self, pairs: &[(Word, Word)]) -> Result<Vec<Word>, OracleError> {
        let cmds: Vec<String> = pairs.iter().map(|(y, a)| format!("U {y:x} {a:x}")).collect();
        self.run_batch(&cmds)?.iter().map(|l| parse_word(l)).collect()
    }

    /// One generator step per state: output word followed by the new state.
    pub fn prng_step(&self, states: &[[Word; 5]]) -> Result<Vec<(Word, [Word; 5])>, OracleError> {
        let cmds: Vec<String> = states.iter().map(|s| format!("N {}", join_hex(s, " "))).collect();
        self.run_batch(&cmds)?
            .iter()
            .map(|l| {
                let w = parse_words(l, 6)?;
                Ok((w[0], [w[1], w[2], w[3], w[4], w[5]]))
            })
            .collect()
    }

    /// First `rounds` rounds without whitening, traced with the reference
    /// avalanche function.
    pub fn rounds(&self, rounds: u8, subkeys: &[Word; 16], block: &Block) -> Result<Block, OracleError> {
        let cmd = format!("R {rounds} {} {}", join_hex(subkeys, " "), join_hex(&block.0, " "));
        let line = self.run_batch(&[cmd])?.remove(0);
        let w = parse_words(&line, 4)?;
        Ok(Block([w[0], w[1], w[2], w[3]]))
    }

    /// Expands each key and encrypts its block. The reference's own decrypt
    /// must recover the plaintext or the case is rejected.
    pub fn evaluate(&self, inputs: &[(CipherKey, Block)]) -> Result<Vec<OracleCase>, OracleError> {
        let cmds: Vec<String> = inputs
            .iter()
            .map(|(k, p)| format!("E {} {} {}", k.words().len(), join_hex(k.words(), " "), join_hex(&p.0, " ")))
            .collect();
        let lines = self.run_batch(&cmds)?;
        inputs
            .iter()
            .zip(lines)
            .map(|((key, plaintext), line)| {
                let w = parse_words(&line, 24)?;
                let decrypted = Block([w[20], w[21], w[22], w[23]]);
                if decrypted != *plaintext {
                    return Err(OracleError::SelfCheck(format!("reference decrypt does not invert encrypt: {line}")));
                }
                Ok(OracleCase {
                    key: key.clone(),
                    plaintext: *plaintext,
                    subkeys: w[..16].try_into().unwrap(),
                    ciphertext: Block([w[16], w[17], w[18], w[19]]),
                })
            })
            .collect()
    }
}

fn parse_word(s: &str) -> Result<Word, OracleError> {
    Word::from_str_radix(s.trim(), 16).map_err(|_| OracleError::Protocol(s.to_string()))
}

fn parse_words(line: &str, n: usize) -> Result<Vec<Word>, OracleError> {
    let words: Vec<Word> = line.split_whitespace().map(parse_word).collect::<Result<_, _>>()?;
    if words.len() != n {
        return Err(OracleError::Protocol(format!("expected {n} words: {line}")));
    }
    Ok(words)
}

fn join_hex(words: &[Word], sep: &str) -> String {
    let mut s = String::with_capacity(words.len() * 17);
    for (i, w) in words.iter().enumerate() {
        if i > 0 {
            s.push_str(sep);
        }
        write!(s, "{w:016x}").unwrap();
    }
    s
}

/// One key/plaintext pair with the subkeys and ciphertext the reference
/// produced for it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleCase {
    pub key: CipherKey,
    pub plaintext: Block,
    pub subkeys: [Word; 16],
    pub ciphertext: Block,
}

impl OracleCase {
    pub fn to_line(&self) -> String {
        format!(
            "{:x} {} {} {} {}",
            self.key.size().bits(),
            join_hex(self.key.words(), ""),
            join_hex(&self.plaintext.0, ""),
            join_hex(&self.subkeys, ""),
            join_hex(&self.ciphertext.0, ""),
        )
    }

    pub fn parse_line(line: &str) -> Result<Self, String> {
        let fields: Vec<&str> = line.split(' ').collect();
        let [size, key, pt, sk, ct] = fields[..] else {
            return Err(format!("expected 5 fields, got {}", fields.len()));
        };
        let bits = usize::from_str_radix(size, 16).map_err(|e| format!("keysize: {e}"))?;
        let key_size = KeySize::from_bits(bits).ok_or_else(|| format!("keysize: {bits} bits"))?;
        let key_words = split_words(key, key_size.words(), "key")?;
        let key = CipherKey::from_words(&key_words).map_err(|e| e.to_string())?;
        let pt = split_words(pt, 4, "plaintext")?;
        let sk = split_words(sk, 16, "subkeys")?;
        let ct = split_words(ct, 4, "ciphertext")?;
        Ok(OracleCase {
            key,
            plaintext: Block(pt.try_into().unwrap()),
            subkeys: sk.try_into().unwrap(),
            ciphertext: Block(ct.try_into().unwrap()),
        })
    }
}

fn split_words(field: &str, n: usize, name: &str) -> Result<Vec<Word>, String> {
    if field.len() != n * 16 || !field.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b)) {
        return Err(format!("{name}: expected {} lowercase hex digits", n * 16));
    }
    Ok((0..n).map(|i| Word::from_str_radix(&field[i * 16..(i + 1) * 16], 16).unwrap()).collect())
}

/// Corpus inputs: the three published vectors, then random cases cycling
/// through 128, 192 and 256-bit keys.
pub fn corpus_inputs(n: usize, rng_seed: u64) -> Vec<(CipherKey, Block)> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut out: Vec<(CipherKey, Block)> = KNOWN_ANSWERS.iter().take(n).map(|v| (v.key.clone(), v.plaintext)).collect();
    let mut i = 0;
    while out.len() < n {
        let size = KeySize::ALL[i % 3];
        let words: Vec<Word> = (0..size.words()).map(|_| rng.next_u64()).collect();
        let block = Block(std::array::from_fn(|_| rng.next_u64()));
        out.push((CipherKey::from_words(&words).unwrap(), block));
        i += 1;
    }
    out
}

/// Builds the reference and renders an `n`-case corpus. Deterministic in
/// `rng_seed`.
pub fn generate_oracle_corpus(n: usize, rng_seed: u64) -> Result<String, OracleError> {
    let oracle = Oracle::build()?;
    corpus_with(&oracle, n, rng_seed)
}

pub fn corpus_with(oracle: &Oracle, n: usize, rng_seed: u64) -> Result<String, OracleError> {
    let cases = oracle.evaluate(&corpus_inputs(n, rng_seed))?;
    Ok(render_corpus(&cases))
}

pub fn render_corpus(cases: &[OracleCase]) -> String {
    let mut out = String::new();
    for case in cases {
        out.push_str(&case.to_line());
        out.push('\n');
    }
    out
}

pub fn parse_corpus(text: &str) -> Result<Vec<OracleCase>, CorpusError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| OracleCase::parse_line(l).map_err(|reason| CorpusError { line: i + 1, reason }))
        .collect()
}

/// Library-side check of one case; returns a description of every mismatch.
pub fn check_case(case: &OracleCase) -> Vec<String> {
    let mut problems = Vec::new();
    let sk = xcrush::expand_key(&case.key);
    if sk.words() != &case.subkeys {
        problems.push("subkeys differ".to_string());
    }
    let ct = xcrush::encrypt_block(&case.plaintext, &sk);
    if ct != case.ciphertext {
        problems.push(format!("ciphertext {:016x?} != {:016x?}", ct.0, case.ciphertext.0));
    }
    let pt = xcrush::decrypt_block(&case.ciphertext, &sk);
    if pt != case.plaintext {
        problems.push(format!("decrypt {:016x?} != {:016x?}", pt.0, case.plaintext.0));
    }
    problems
}

/// The checked-in corpus (400 cases, seed 7).
pub const CHECKED_IN_CORPUS: &str = include_str!("../testdata/corpus_n400_seed7.txt");
pub const CHECKED_IN_CASES: usize = 400;
pub const CHECKED_IN_SEED: u64 = 7;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_roundtrip() {
        let case = OracleCase {
            key: KNOWN_ANSWERS[1].key.clone(),
            plaintext: KNOWN_ANSWERS[1].plaintext,
            subkeys: [7; 16],
            ciphertext: KNOWN_ANSWERS[1].ciphertext,
        };
        let line = case.to_line();
        assert!(line.starts_with("c0 4211121041c35a31e4e4961bb81941bacc982462195662aa 4440306090522ab0"));
        assert_eq!(OracleCase::parse_line(&line).unwrap(), case);
    }

    #[test]
    fn malformed_lines() {
        assert!(OracleCase::parse_line("80 00").is_err());
        let good = OracleCase {
            key: KNOWN_ANSWERS[0].key.clone(),
            plaintext: Block::default(),
            subkeys: [0; 16],
            ciphertext: Block::default(),
        }
        .to_line();
        assert!(OracleCase::parse_line(&good.replacen("80", "90", 1)).is_err());
        assert!(OracleCase::parse_line(&good.to_uppercase()).is_err());
        let err = parse_corpus(&format!("{good}\nbad\n")).unwrap_err();
        assert_eq!(err.line, 2);
    }

    #[test]
    fn inputs_start_with_published_vectors() {
        let inputs = corpus_inputs(10, 7);
        assert_eq!(inputs.len(), 10);
        for (v, (k, p)) in KNOWN_ANSWERS.iter().zip(&inputs) {
            assert_eq!(&v.key, k);
            assert_eq!(&v.plaintext, p);
        }
        assert_eq!(inputs[3].0.size(), KeySize::Bits128);
        assert_eq!(inputs[4].0.size(), KeySize::Bits192);
        assert_eq!(inputs[5].0.size(), KeySize::Bits256);
        assert_eq!(corpus_inputs(10, 7), inputs);
        assert_eq!(corpus_inputs(2, 7).len(), 2);
    }
}
