//! Plain-text and `key=value` renderings of analysis and bench results.
//!
//! The key-value form has one metric per line, `name=value`, with no spaces,
//! so scripts can `grep`/`cut` it. Keys are stable; new metrics are only ever
//! appended.

use std::fmt::Write as _;

use xcrush::analysis::{AvalancheReport, DistributionReport, PrngReport, BLOCK_BITS};

use crate::bench::BenchResult;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Kv,
}

/// An ordered list of named metrics.
#[derive(Default, Debug, Clone, PartialEq)]
pub struct Metrics(Vec<(String, String)>);

impl Metrics {
    pub fn push(&mut self, name: impl Into<String>, value: impl ToString) {
        self.0.push((name.into(), value.to_string()));
    }

    pub fn extend_prefixed(&mut self, prefix: &str, other: Metrics) {
        for (k, v) in other.0 {
            self.0.push((format!("{prefix}.{k}"), v));
        }
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.0.iter().find(|(k, _)| k == name).map(|(_, v)| v.as_str())
    }

    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.0 {
            writeln!(out, "{k}={v}").unwrap();
        }
        out
    }

    /// Parses the output of [`Metrics::to_kv`].
    pub fn parse_kv(text: &str) -> Option<Metrics> {
        text.lines()
            .filter(|l| !l.is_empty())
            .map(|l| l.split_once('=').map(|(k, v)| (k.to_string(), v.to_string())))
            .collect::<Option<Vec<_>>>()
            .map(Metrics)
    }
}

fn f(x: f64) -> String {
    format!("{x:.6}")
}

pub fn avalanche_metrics(r: &AvalancheReport) -> Metrics {
    let mut m = Metrics::default();
    m.push("rounds", r.rounds.get());
    m.push("whiten", r.whiten);
    m.push("samples", r.samples);
    m.push("mean_flip_fraction", f(r.mean_flip_fraction));
    m.push("min_flipped_bits", r.min_flipped);
    m.push("max_flipped_bits", r.max_flipped);
    let lo = r.matrix.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = r.matrix.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m.push("min_entry", f(lo));
    m.push("max_entry", f(hi));
    m.push("max_entry_deviation", f(r.max_deviation()));
    m
}

pub fn avalanche_text(r: &AvalancheReport) -> String {
    let mut out = String::new();
    let m = avalanche_metrics(r);
    writeln!(
        out,
        "avalanche, {} round{}{}, {} samples",
        r.rounds.get(),
        if r.rounds.get() == 1 { "" } else { "s" },
        if r.whiten { " + whitening" } else { "" },
        r.samples
    )
    .unwrap();
    writeln!(out, "  mean flip fraction   {}", m.get("mean_flip_fraction").unwrap()).unwrap();
    writeln!(out, "  flipped bits/trial   {}..{} of 256", r.min_flipped, r.max_flipped).unwrap();
    writeln!(
        out,
        "  matrix entries       {}..{} (max |p - 0.5| = {})",
        m.get("min_entry").unwrap(),
        m.get("max_entry").unwrap(),
        m.get("max_entry_deviation").unwrap()
    )
    .unwrap();
    out
}

/// The full flip matrix as CSV: 256 rows (input bit), 256 columns (output bit).
pub fn avalanche_matrix_csv(r: &AvalancheReport) -> String {
    let mut out = String::with_capacity(BLOCK_BITS * BLOCK_BITS * 9);
    for row in r.matrix.chunks(BLOCK_BITS) {
        for (j, p) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            write!(out, "{p:.6}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn distribution_metrics(r: &DistributionReport) -> Metrics {
    let mut m = Metrics::default();
    m.push("inputs", r.total());
    m.push("distinct_values", r.distinct_values);
    m.push("chi_square", f(r.chi_square));
    for (i, c) in r.histogram.iter().enumerate() {
        m.push(format!("bin.{i}"), c);
    }
    m
}

pub fn distribution_text(r: &DistributionReport) -> String {
    let mut out = String::new();
    writeln!(out, "C-function outputs over {} inputs", r.total()).unwrap();
    writeln!(out, "  distinct values  {} of 64", r.distinct_values).unwrap();
    writeln!(out, "  chi-square       {:.3} (63 degrees of freedom)", r.chi_square).unwrap();
    for (row, chunk) in r.histogram.chunks(8).enumerate() {
        write!(out, "  {:2}:", row * 8).unwrap();
        for c in chunk {
            write!(out, " {c:8}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn prng_metrics(r: &PrngReport) -> Metrics {
    let mut m = Metrics::default();
    m.push("words", r.words);
    m.push("ones_fraction", f(r.ones_fraction));
    m.push("serial_correlation", f(r.serial_correlation));
    m.push("byte_chi_square", f(r.byte_chi_square));
    m.push(
        "passed",
        match r.passed {
            Some(true) => "true",
            Some(false) => "false",
            None => "n/a",
        },
    );
    m
}

pub fn prng_text(r: &PrngReport) -> String {
    let mut out = String::new();
    writeln!(out, "key-schedule generator, {} words after warm-up", r.words).unwrap();
    writeln!(out, "  one-bit fraction    {:.6}", r.ones_fraction).unwrap();
    writeln!(out, "  serial correlation  {:.6}", r.serial_correlation).unwrap();
    writeln!(out, "  byte chi-square     {:.3} (64 bins, 63 d.o.f.)", r.byte_chi_square).unwrap();
    match r.passed {
        Some(true) => writeln!(out, "  PASS one-bit fraction within [0.49, 0.51]").unwrap(),
        Some(false) => writeln!(out, "  FAIL one-bit fraction outside [0.49, 0.51]").unwrap(),
        None => writeln!(out, "  (bound applies from 100000 words)").unwrap(),
    }
    out
}

pub fn bench_metrics(r: &BenchResult) -> Metrics {
    let mut m = Metrics::default();
    m.push("bytes_processed", r.bytes_processed);
    m.push("trials", r.trials);
    m.push("wall_time_s", format!("{:.6}", r.wall_time.as_secs_f64()));
    m.push("throughput_bps", format!("{:.0}", r.throughput));
    m.push("throughput_min_bps", format!("{:.0}", r.min_throughput));
    m.push("throughput_max_bps", format!("{:.0}", r.max_throughput));
    m.push("spread", f(r.spread()));
    if let Some(hz) = r.cpu_hz {
        m.push("cpu_hz", format!("{hz:.0}"));
    }
    if let Some(cpb) = r.cycles_per_byte {
        m.push("cycles_per_byte", format!("{cpb:.3}"));
    }
    m.push("checksum", format!("{:016x}", r.checksum));
    m.push("key_expansion_ns", format!("{:.1}", r.key_expansion_ns));
    m.push("timer_resolution_ns", r.timer_resolution.as_nanos());
    m.push("pinned_cpu", r.pinned_cpu.map_or("none".to_string(), |c| c.to_string()));
    m
}

pub fn bench_text(r: &BenchResult) -> String {
    let mut out = String::new();
    let mib = r.bytes_processed as f64 / (1 << 20) as f64;
    writeln!(out, "ECB encryption, {mib:.0} MiB buffer, median of {} trials (1 warm-up discarded)", r.trials).unwrap();
    writeln!(
        out,
        "  throughput      {:.1} MiB/s (min {:.1}, max {:.1}, spread {:.1}%)",
        r.throughput / (1 << 20) as f64,
        r.min_throughput / (1 << 20) as f64,
        r.max_throughput / (1 << 20) as f64,
        100.0 * r.spread()
    )
    .unwrap();
    match (r.cycles_per_byte, r.cpu_hz) {
        (Some(cpb), Some(hz)) => writeln!(out, "  cycles/byte     {cpb:.2} at {:.3} GHz", hz / 1e9).unwrap(),
        _ => writeln!(out, "  cycles/byte     (pass --cpu-hz or --estimate-hz)").unwrap(),
    }
    writeln!(out, "  key expansion   {:.1} ns", r.key_expansion_ns).unwrap();
    writeln!(out, "  checksum        {:016x}", r.checksum).unwrap();
    for w in &r.warnings {
        writeln!(out, "  warning: {w}").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use xcrush::analysis::{measure_avalanche, measure_c_distribution, Stride};
    use xcrush::RoundCount;

    #[test]
    fn kv_roundtrip() {
        let mut m = Metrics::default();
        m.push("a", 1);
        m.push("b.c", "x");
        let text = m.to_kv();
        assert_eq!(text, "a=1\nb.c=x\n");
        assert_eq!(Metrics::parse_kv(&text), Some(m));
        assert_eq!(Metrics::parse_kv("novalue\n"), None);
    }

    #[test]
    fn avalanche_rendering() {
        let r = measure_avalanche(RoundCount::ONE, false, 2, 1).unwrap();
        let m = avalanche_metrics(&r);
        assert_eq!(m.get("rounds"), Some("1"));
        assert_eq!(m.get("samples"), Some("2"));
        assert!(avalanche_text(&r).contains("1 round,"));
        let csv = avalanche_matrix_csv(&r);
        assert_eq!(csv.lines().count(), 256);
        assert!(csv.lines().all(|l| l.split(',').count() == 256));
    }

    #[test]
    fn distribution_rendering() {
        let r = measure_c_distribution(0, 64, Stride::Increment).unwrap();
        let m = distribution_metrics(&r);
        assert_eq!(m.get("distinct_values"), Some("64"));
        assert_eq!(m.get("bin.63"), Some("1"));
        assert!(distribution_text(&r).contains("64 of 64"));
    }
}
