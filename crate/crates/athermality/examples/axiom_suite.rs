//! The full verification suite at a reduced trial count: the four
//! relative-entropy axioms, the Renyi family checks, the free-energy
//! properties, both swap constructions, the support-containment lemma and
//! the finite-n semi-continuity chain.
//!
//! Run with: `cargo run --release --example axiom_suite`

use athermality::harness::{run_suite, HarnessConfig};

fn main() -> athermality::Result<()> {
    let config = HarnessConfig {
        master_seed: 42,
        trials: 100,
        ..HarnessConfig::default()
    };
    let outcome = run_suite(&config)?;
    for check in &outcome.report.checks {
        println!(
            "{} {:<52} trials {:>6}  max violation {:+.3e}  witnesses {}",
            if check.passed { "pass" } else { "FAIL" },
            check.check_name,
            check.trials_run,
            check.max_violation,
            check.witnesses.len()
        );
    }
    println!(
        "\nsuite {} ({} checks, {} trial rows)",
        if outcome.report.passed {
            "PASSED"
        } else {
            "FAILED"
        },
        outcome.report.checks.len(),
        outcome.rows.len()
    );
    Ok(())
}
