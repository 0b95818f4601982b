//! Deciding whether a Gibbs-preserving channel can turn one object into
//! another: the athermality screen, the commuting linear program, and the
//! Choi-space projection solver.
//!
//! Run with: `cargo run --release --example feasibility_search`

use athermality::channels::{random_channel, QuantumChannel};
use athermality::feasibility::{
    classical_gp_feasibility, decide_feasibility, monotone_screen, solve_choi_feasibility,
    verify_witness, FeasibilityProblem,
};
use athermality::linalg::{
    random_density, random_hermitian, DensityMatrix, HermitianOperator, RngStream,
};
use athermality::thermo::{gibbs_state, modular_hamiltonian};

fn main() -> athermality::Result<()> {
    let beta = 1.0;
    let h = HermitianOperator::from_diagonal(&[0.0, 1.0]);

    // commuting qubit pair: cooling toward Gibbs is allowed...
    let cool = FeasibilityProblem::new(
        DensityMatrix::from_probabilities(&[0.9, 0.1])?,
        DensityMatrix::from_probabilities(&[0.8, 0.2])?,
        h.clone(),
        h.clone(),
        beta,
    )?;
    let report = classical_gp_feasibility(&cool)?;
    println!(
        "0.9 -> 0.8 (commuting LP): {:?}, witness residual {:.3e}",
        report.verdict, report.residual
    );
    let witness = report.witness.expect("feasible verdicts carry a witness");
    let col0 = witness.apply(&DensityMatrix::pure_basis_state(2, 0))?;
    let col1 = witness.apply(&DensityMatrix::pure_basis_state(2, 1))?;
    println!(
        "  induced stochastic matrix columns: ({:.6}, {:.6}) and ({:.6}, {:.6})",
        col0.matrix()[(0, 0)].re,
        col0.matrix()[(1, 1)].re,
        col1.matrix()[(0, 0)].re,
        col1.matrix()[(1, 1)].re
    );

    // ...while heating away from Gibbs is screened out by the monotone
    let heat = FeasibilityProblem::new(
        DensityMatrix::from_probabilities(&[0.8, 0.2])?,
        DensityMatrix::from_probabilities(&[0.9, 0.1])?,
        h.clone(),
        h.clone(),
        beta,
    )?;
    let report = decide_feasibility(&heat)?;
    println!(
        "0.8 -> 0.9: {:?} (monotone gap {:+.6})",
        report.verdict, report.monotone_gap
    );

    // a non-commuting instance with a known witness: reconstruct it blind
    let mut rng = RngStream::new(41, 0).rng();
    let raw = random_channel(3, 3, 2, &mut rng)?;
    let dep = QuantumChannel::depolarizing(3, 3);
    let hidden = QuantumChannel::mixture(&[(0.95, &raw), (0.05, &dep)])?;
    let rho = random_density(3, 3, &mut rng);
    let ham = random_hermitian(3, 1.0, &mut rng);
    let omega_image = hidden.apply(&gibbs_state(beta, &ham))?;
    let problem = FeasibilityProblem::new(
        rho.clone(),
        hidden.apply(&rho)?,
        ham,
        modular_hamiltonian(&omega_image, beta, 0.0)?,
        beta,
    )?;
    println!(
        "\nhidden-witness instance: screen gap {:+.6} (not conclusive)",
        monotone_screen(&problem)
    );
    let report = solve_choi_feasibility(&problem)?;
    println!(
        "Choi projections: {:?} after {} iterations, residual {:.3e}",
        report.verdict, report.iterations, report.residual
    );
    if let Some(found) = &report.witness {
        println!(
            "recovered witness re-verified: action residual {:.3e} (<= 1e-6)",
            verify_witness(found, &problem)
        );
    }
    Ok(())
}
