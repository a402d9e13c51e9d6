//! Block-parallel range search with deterministic, resumable output.
//!
//! The range splits into fixed-size blocks; workers process blocks
//! independently and a single writer emits them in block order, so worker
//! count never changes the output bytes. After each block is written the
//! checkpoint records `(config hash, block index, byte offset)`; resuming
//! truncates the output to that offset and continues with the next block,
//! which makes a killed-and-resumed run byte-identical to an uninterrupted
//! one.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use aprime_core::almost::{failing_prime_power, is_almost_prime, weak_criterion_at_prime};
use aprime_core::arith::FactoredInteger;
use aprime_core::carmichael::{carmichael_up_to, is_carmichael, FactorSieve};
use aprime_core::filters::{run_pipeline, FilterKind, PipelineConfig, Status};

use crate::util::{fnv1a, rho_counts};
use crate::{CliError, Mode};

pub struct SearchOptions {
    pub min: u64,
    pub max: u64,
    pub mode: Mode,
    pub filters: Vec<FilterKind>,
    pub s_cap: u64,
    pub jobs: usize,
    pub block: u64,
    pub checkpoint: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub exhaustive: bool,
}

impl SearchOptions {
    fn config_hash(&self) -> u64 {
        let filters: Vec<&str> = self.filters.iter().map(|k| k.name()).collect();
        let canonical = format!(
            "min={};max={};mode={:?};filters={};s_cap={};block={};exhaustive={}",
            self.min,
            self.max,
            self.mode,
            filters.join(","),
            self.s_cap,
            self.block,
            self.exhaustive
        );
        fnv1a(canonical.as_bytes())
    }

    fn pipeline_config(&self) -> PipelineConfig {
        PipelineConfig {
            filters: self.filters.clone(),
            s_cap: self.s_cap,
            exhaustive: self.exhaustive,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RecordJson {
    n: u64,
    factors: Vec<(u64, u32)>,
    verdict: String,
    first_failure: Option<String>,
    rho: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    verdicts: Option<Vec<VerdictJson>>,
}

#[derive(Serialize, Deserialize)]
struct VerdictJson {
    filter: String,
    status: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    witness: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct CheckpointJson {
    config: String,
    last_block: usize,
    offset: u64,
}

#[derive(Default)]
struct Stats {
    scanned: u64,
    verdict_counts: BTreeMap<String, u64>,
    composite_survivors: Vec<(u64, String)>,
    first_failure_hist: BTreeMap<String, u64>,
    rho_hist: BTreeMap<String, u64>,
}

impl Stats {
    fn record(&mut self, n: u64, composite: bool, verdict: &str, first_failure: Option<&str>, rho_label: String) {
        self.scanned += 1;
        *self.verdict_counts.entry(verdict.to_string()).or_insert(0) += 1;
        if composite && verdict != "rejected" {
            self.composite_survivors.push((n, verdict.to_string()));
        }
        if verdict == "rejected" {
            let key = first_failure.unwrap_or("(none)").to_string();
            *self.first_failure_hist.entry(key).or_insert(0) += 1;
        }
        *self.rho_hist.entry(rho_label).or_insert(0) += 1;
    }

    fn merge(&mut self, other: Stats) {
        self.scanned += other.scanned;
        for (k, v) in other.verdict_counts {
            *self.verdict_counts.entry(k).or_insert(0) += v;
        }
        self.composite_survivors.extend(other.composite_survivors);
        for (k, v) in other.first_failure_hist {
            *self.first_failure_hist.entry(k).or_insert(0) += v;
        }
        for (k, v) in other.rho_hist {
            *self.rho_hist.entry(k).or_insert(0) += v;
        }
    }
}

fn is_composite_factors(factors: &[(u64, u32)]) -> bool {
    factors.len() > 1 || factors.iter().any(|&(_, e)| e > 1)
}

/// Verdict and first-failure label for one candidate in scan modes.
fn classify_scan(f: &FactoredInteger, mode: Mode) -> (&'static str, Option<String>) {
    if mode == Mode::Almost && !f.is_square_free() {
        return ("rejected", Some("square_free".to_string()));
    }
    for p in f.primes() {
        let outcome = weak_criterion_at_prime(f, p).expect("p divides n");
        if !outcome.passed() {
            return ("rejected", Some(format!("weak_criterion(p={p})")));
        }
    }
    match mode {
        Mode::Almost => ("almost-prime", None),
        Mode::Weak => match failing_prime_power(f) {
            Some(q) => ("rejected", Some(format!("power_confirm({q})"))),
            None => {
                if f.is_square_free() {
                    ("almost-prime", None)
                } else {
                    ("weakly-almost-prime", None)
                }
            }
        },
        Mode::CarmichaelFirst => unreachable!("scan modes only"),
    }
}

fn emit_record(
    out: &mut String,
    stats: &mut Stats,
    f: &FactoredInteger,
    verdict: &str,
    first_failure: Option<String>,
    verdicts: Option<Vec<VerdictJson>>,
) {
    let (over, omega) = rho_counts(f);
    if verdict == "almost-prime" && f.is_composite() {
        // a composite almost-prime must be Carmichael
        assert!(is_carmichael(f), "composite almost-prime {} is not Carmichael", f.value());
    }
    let record = RecordJson {
        n: f.value(),
        factors: f.factors().to_vec(),
        verdict: verdict.to_string(),
        first_failure: first_failure.clone(),
        rho: if omega == 0 { 0.0 } else { over as f64 / omega as f64 },
        verdicts,
    };
    out.push_str(&serde_json::to_string(&record).expect("serializable record"));
    out.push('\n');
    stats.record(
        f.value(),
        f.is_composite(),
        verdict,
        first_failure.as_deref(),
        format!("{over}/{omega}"),
    );
}

fn verdicts_json(report: &aprime_core::filters::FilterReport) -> Vec<VerdictJson> {
    report
        .verdicts
        .iter()
        .map(|(kind, v)| VerdictJson {
            filter: kind.name().to_string(),
            status: match v.status {
                Status::Pass => "pass".to_string(),
                Status::Fail => "fail".to_string(),
                Status::NotApplicable => "not-applicable".to_string(),
            },
            witness: v.witness.as_ref().map(|w| format!("{w}")),
        })
        .collect()
}

fn process_block(opts: &SearchOptions, sieve: &FactorSieve, index: usize) -> (String, Stats) {
    let lo = opts.min + index as u64 * opts.block;
    let hi = opts.max.min(lo + opts.block - 1);
    let lo = lo.max(2);
    let mut out = String::new();
    let mut stats = Stats::default();
    if lo > hi {
        return (out, stats);
    }
    match opts.mode {
        Mode::Weak | Mode::Almost => {
            for f in sieve.factor_range(lo, hi + 1) {
                let (verdict, first_failure) = classify_scan(&f, opts.mode);
                emit_record(&mut out, &mut stats, &f, verdict, first_failure, None);
            }
        }
        Mode::CarmichaelFirst => {
            let config = opts.pipeline_config();
            for f in sieve.carmichael_in_range(lo, hi + 1) {
                let report = run_pipeline(&f, &config);
                let verdict = if is_almost_prime(&f) {
                    "almost-prime"
                } else {
                    "rejected"
                };
                let first_failure = report.first_failure.map(|k| k.name().to_string());
                let verdicts = opts.exhaustive.then(|| verdicts_json(&report));
                emit_record(&mut out, &mut stats, &f, verdict, first_failure, verdicts);
            }
        }
    }
    (out, stats)
}

fn write_checkpoint(path: &PathBuf, config: u64, last_block: usize, offset: u64) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    let body = serde_json::to_string(&CheckpointJson {
        config: format!("{config:016x}"),
        last_block,
        offset,
    })
    .expect("serializable checkpoint");
    fs::write(&tmp, body)?;
    fs::rename(&tmp, path)
}

fn rebuild_stats(path: &PathBuf) -> Result<Stats, CliError> {
    let data = fs::read_to_string(path).map_err(CliError::io)?;
    let mut stats = Stats::default();
    for line in data.lines() {
        let record: RecordJson = serde_json::from_str(line)
            .map_err(|e| CliError::Usage(format!("corrupt record in output file: {e}")))?;
        let f = FactoredInteger::new(record.n, record.factors.clone())
            .map_err(|e| CliError::Usage(format!("corrupt record for n = {}: {e}", record.n)))?;
        let (over, omega) = rho_counts(&f);
        stats.record(
            record.n,
            is_composite_factors(&record.factors),
            &record.verdict,
            record.first_failure.as_deref(),
            format!("{over}/{omega}"),
        );
    }
    Ok(stats)
}

fn write_summary(stats: &Stats, w: &mut dyn Write) -> std::io::Result<()> {
    writeln!(w, "section,key,value")?;
    writeln!(w, "scanned,,{}", stats.scanned)?;
    for (verdict, count) in &stats.verdict_counts {
        writeln!(w, "verdict,{verdict},{count}")?;
    }
    for (n, verdict) in &stats.composite_survivors {
        writeln!(w, "composite_survivor,{n},{verdict}")?;
    }
    for (label, count) in &stats.first_failure_hist {
        writeln!(w, "first_failure,{label},{count}")?;
    }
    for (label, count) in &stats.rho_hist {
        writeln!(w, "rho,{label},{count}")?;
    }
    Ok(())
}

pub fn run(opts: &SearchOptions) -> Result<(), CliError> {
    let nblocks = if opts.max < opts.min {
        0
    } else {
        ((opts.max - opts.min) / opts.block + 1) as usize
    };
    let hash = opts.config_hash();

    // resume bookkeeping
    let mut start_block = 0usize;
    let mut offset = 0u64;
    let mut stats = Stats::default();
    let mut resuming = false;
    if let (Some(cp), Some(outp)) = (&opts.checkpoint, &opts.out) {
        if cp.exists() {
            let body = fs::read_to_string(cp).map_err(CliError::io)?;
            let ck: CheckpointJson = serde_json::from_str(&body)
                .map_err(|e| CliError::Usage(format!("corrupt checkpoint: {e}")))?;
            if ck.config != format!("{hash:016x}") {
                return Err(CliError::Usage(
                    "checkpoint belongs to a different configuration; refusing to resume".into(),
                ));
            }
            let meta = fs::metadata(outp).map_err(|_| {
                CliError::Usage("checkpoint present but output file is missing".into())
            })?;
            if meta.len() < ck.offset {
                return Err(CliError::Usage(
                    "output file is shorter than the checkpoint offset".into(),
                ));
            }
            let file = fs::OpenOptions::new()
                .write(true)
                .open(outp)
                .map_err(CliError::io)?;
            file.set_len(ck.offset).map_err(CliError::io)?;
            start_block = ck.last_block + 1;
            offset = ck.offset;
            resuming = true;
        }
    }

    let mut writer: Box<dyn Write> = match &opts.out {
        Some(path) => {
            let file = if resuming {
                fs::OpenOptions::new()
                    .append(true)
                    .open(path)
                    .map_err(CliError::io)?
            } else {
                fs::File::create(path).map_err(CliError::io)?
            };
            Box::new(std::io::BufWriter::new(file))
        }
        None => Box::new(std::io::BufWriter::new(std::io::stdout().lock())),
    };
    if resuming {
        if let Some(outp) = &opts.out {
            stats = rebuild_stats(outp)?;
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("worker pool: {e}")))?;
    let sieve = FactorSieve::new(opts.max.max(2));

    let chunk_len = (opts.jobs * 4).max(1);
    let mut next = start_block;
    while next < nblocks {
        let end = (next + chunk_len).min(nblocks);
        let indices: Vec<usize> = (next..end).collect();
        let results: Vec<(String, Stats)> = pool.install(|| {
            indices
                .par_iter()
                .map(|&i| process_block(opts, &sieve, i))
                .collect()
        });
        for (&i, (bytes, block_stats)) in indices.iter().zip(results) {
            writer.write_all(bytes.as_bytes()).map_err(CliError::io)?;
            writer.flush().map_err(CliError::io)?;
            offset += bytes.len() as u64;
            stats.merge(block_stats);
            if let Some(cp) = &opts.checkpoint {
                write_checkpoint(cp, hash, i, offset).map_err(CliError::io)?;
            }
        }
        next = end;
    }
    drop(writer);

    if let Some(cp) = &opts.checkpoint {
        if cp.exists() {
            fs::remove_file(cp).map_err(CliError::io)?;
        }
    }

    // summary goes to stdout when records went to a file, else to stderr
    if opts.out.is_some() {
        write_summary(&stats, &mut std::io::stdout().lock()).map_err(CliError::io)?;
    } else {
        write_summary(&stats, &mut std::io::stderr().lock()).map_err(CliError::io)?;
    }
    Ok(())
}

/// JSON lines `{"n": ..., "factors": [[p, e], ...]}` for every Carmichael
/// number up to `max`.
pub fn list_carmichael(max: u64, w: &mut dyn Write) -> std::io::Result<()> {
    #[derive(Serialize)]
    struct Line {
        n: u64,
        factors: Vec<(u64, u32)>,
    }
    for f in carmichael_up_to(max) {
        let line = Line {
            n: f.value(),
            factors: f.factors().to_vec(),
        };
        writeln!(w, "{}", serde_json::to_string(&line).expect("serializable"))?;
    }
    Ok(())
}
