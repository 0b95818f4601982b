//! The two swap constructions behind catalytic thermodynamics: a bipartite
//! state sheds its correlations into a catalyst (marginal-catalytic) or
//! into correlations with the catalyst (correlated-catalytic), paying
//! exactly the mutual information in athermality.
//!
//! Run with: `cargo run --example catalytic_swaps`

use athermality::divergences::mutual_information;
use athermality::linalg::ops::{CMatrix, C64};
use athermality::linalg::{state_distance, DensityMatrix, HermitianOperator};
use athermality::thermo::{
    athermality, check_transition, construct_cc_swap, construct_mc_swap, TransitionMode,
};

fn main() -> athermality::Result<()> {
    let beta = 1.0;
    let h = HermitianOperator::from_diagonal(&[0.0, 1.0]);
    let mut bell = CMatrix::zeros(4, 4);
    for &i in &[0usize, 3] {
        for &j in &[0usize, 3] {
            bell[(i, j)] = C64::new(0.5, 0.0);
        }
    }
    let bell = DensityMatrix::new(bell)?;
    let mi = mutual_information(&bell, (2, 2))?;
    println!("input: Bell pair, I(1:2) = {mi:.9} = 2 ln 2\n");

    // marginal-catalytic: swap the system with a catalyst holding the
    // marginal product; the catalyst subsystems keep their marginals
    let mc = construct_mc_swap(&bell, &h, &h, beta)?;
    let report = check_transition(&mc, 1e-8)?;
    println!(
        "mc-swap: witness GP residual {:.3e}",
        report.witness_gp_residual
    );
    for (name, value) in &report.residuals {
        println!("  {name:<22} {value:.3e}");
    }

    // correlated-catalytic: swap only the second subsystem with the
    // catalyst; the catalyst returns exactly, now correlated with the system
    let cc = construct_cc_swap(&bell, &h, &h, beta)?;
    let report = check_transition(&cc, 1e-8)?;
    println!(
        "\ncc-swap: witness GP residual {:.3e}",
        report.witness_gp_residual
    );
    for (name, value) in &report.residuals {
        println!("  {name:<22} {value:.3e}");
    }
    let joint = cc.joint_output.as_ref().expect("construction fills it");
    let catalyst_after = joint.partial_trace(&[4, 2], &[1])?;
    println!(
        "  catalyst drift         {:.3e} (returned exactly)",
        state_distance(&catalyst_after, &cc.catalysts[0].state)
    );

    // the same output is *not* a plain catalytic transition: the catalyst
    // ends up correlated with the system
    let mut as_plain_catalytic = cc.clone();
    as_plain_catalytic.mode = TransitionMode::Catalytic;
    let plain = check_transition(&as_plain_catalytic, 1e-8)?;
    println!(
        "  as plain catalytic     residual {:.3} -> passed = {}",
        plain.max_residual, plain.passed
    );

    // the athermality drop equals the shed mutual information over beta
    let gap = athermality(&cc.source, beta).expect_finite("src")
        - athermality(&cc.target, beta).expect_finite("tgt");
    println!("\nDeltaF(source) - DeltaF(target) = {gap:.9}");
    println!("I(Bell)/beta                    = {:.9}", mi / beta);
    Ok(())
}
