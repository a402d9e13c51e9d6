//! The `stats` subcommand: per-Carmichael prime-divisor statistics.
//!
//! For each Carmichael number in range, counts the prime divisors `p` whose
//! `p - 1` has at most two distinct prime factors versus more, and emits the
//! ratio `rho = omega_gt2 / omega` as CSV.

use std::io::Write;
use std::path::PathBuf;

use aprime_core::carmichael::FactorSieve;

use crate::util::{compact_factors, rho_counts};
use crate::CliError;

pub fn run(min: u64, max: u64, out: Option<PathBuf>) -> Result<(), CliError> {
    let mut writer: Box<dyn Write> = match &out {
        Some(path) => Box::new(std::io::BufWriter::new(
            std::fs::File::create(path).map_err(CliError::io)?,
        )),
        None => Box::new(std::io::BufWriter::new(std::io::stdout().lock())),
    };
    writeln!(writer, "n,factors,omega,omega_le2,omega_gt2,rho").map_err(CliError::io)?;
    if max >= min && max >= 2 {
        let sieve = FactorSieve::new(max);
        let mut lo = min.max(2);
        const WINDOW: u64 = 1 << 16;
        while lo <= max {
            let hi = max.min(lo + WINDOW - 1);
            for f in sieve.carmichael_in_range(lo, hi + 1) {
                let (gt2, omega) = rho_counts(&f);
                writeln!(
                    writer,
                    "{},{},{omega},{},{gt2},{:.6}",
                    f.value(),
                    compact_factors(&f),
                    omega - gt2,
                    gt2 as f64 / omega as f64
                )
                .map_err(CliError::io)?;
            }
            lo = hi + 1;
        }
    }
    writer.flush().map_err(CliError::io)
}
