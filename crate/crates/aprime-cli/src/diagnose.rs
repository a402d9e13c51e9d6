//! The `test` subcommand: a full diagnosis of a single number.

use aprime_core::almost::{is_almost_prime, is_weakly_almost_prime, is_weakly_almost_prime_oracle};
use aprime_core::arith::factor;
use aprime_core::carmichael::{fermat_oracle, is_carmichael};
use aprime_core::filters::{run_pipeline, weak_criterion_witness, PipelineConfig};

use crate::util::rho_counts;
use crate::CliError;

pub fn run(n: u64, oracle_cutoff: u64, s_cap: u64) -> Result<(), CliError> {
    if n < 2 {
        return Err(CliError::Usage(format!("n must be at least 2, got {n}")));
    }
    let f = factor(n).map_err(|e| CliError::Usage(format!("{e}")))?;
    println!("n = {n} = {f}");
    println!("prime: {}", f.is_prime_value());
    println!("square-free: {}", f.is_square_free());
    println!(
        "weakly almost-prime (criterion): {}",
        is_weakly_almost_prime(&f)
    );
    if n <= oracle_cutoff {
        println!(
            "weakly almost-prime (oracle): {}",
            is_weakly_almost_prime_oracle(n)
        );
    }
    println!("almost-prime: {}", is_almost_prime(&f));
    if let Some(w) = weak_criterion_witness(&f) {
        println!("criterion witness: {w}");
    }
    println!("carmichael: {}", is_carmichael(&f));
    if n <= oracle_cutoff {
        println!("fermat congruence (oracle): {}", fermat_oracle(n));
    }
    let config = PipelineConfig {
        s_cap,
        exhaustive: true,
        ..PipelineConfig::default()
    };
    let report = run_pipeline(&f, &config);
    println!("filter pipeline:");
    print!("{report}");
    let (over, omega) = rho_counts(&f);
    println!(
        "rho: {over}/{omega} = {:.6}",
        over as f64 / omega.max(1) as f64
    );
    Ok(())
}
