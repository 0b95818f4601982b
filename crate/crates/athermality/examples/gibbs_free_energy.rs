//! Gibbs states, modular Hamiltonians and the athermality monotone
//! `DeltaF_beta = S(rho || omega)/beta = F(rho) - F(omega)`.
//!
//! Run with: `cargo run --example gibbs_free_energy`

use athermality::linalg::{
    random_density, random_hermitian, state_distance, DensityMatrix, HermitianOperator, RngStream,
};
use athermality::thermo::{
    athermality, free_energy, gibbs_state, modular_hamiltonian, ThermoObject,
};

fn main() -> athermality::Result<()> {
    let beta = 1.0;
    let h = HermitianOperator::from_diagonal(&[0.0, 1.0]);
    let omega = gibbs_state(beta, &h);
    println!(
        "omega(beta=1, H=diag(0,1)) = diag({:.9}, {:.9})",
        omega.matrix()[(0, 0)].re,
        omega.matrix()[(1, 1)].re
    );

    // free energies: ground state, Gibbs state, maximally mixed
    for (label, state) in [
        ("ground |0><0|", DensityMatrix::pure_basis_state(2, 0)),
        ("excited |1><1|", DensityMatrix::pure_basis_state(2, 1)),
        ("Gibbs", omega.clone()),
        ("I/2", DensityMatrix::maximally_mixed(2)),
    ] {
        let obj = ThermoObject::new(state, h.clone())?;
        println!(
            "F({label:<14}) = {:+.9}    DeltaF = {:.9}",
            free_energy(&obj, beta),
            athermality(&obj, beta)
        );
    }

    // every full-rank state is the Gibbs state of its modular Hamiltonian
    let mut rng = RngStream::new(2024, 0).rng();
    let sigma = random_density(3, 3, &mut rng);
    let modular = modular_hamiltonian(&sigma, beta, 0.0)?;
    let back = gibbs_state(beta, &modular);
    println!(
        "modular round trip drift   = {:.3e}",
        state_distance(&back, &sigma)
    );

    // the athermality is gauge invariant: H and H + C are the same physics
    let rho = random_density(3, 3, &mut rng);
    let ham = random_hermitian(3, 1.0, &mut rng);
    let base = athermality(&ThermoObject::new(rho.clone(), ham.clone())?, beta)
        .expect_finite("full-rank Gibbs");
    for c in [-5.0, 1.0, 37.2] {
        let shifted = athermality(&ThermoObject::new(rho.clone(), ham.shift(c))?, beta)
            .expect_finite("full-rank Gibbs");
        println!(
            "gauge shift C = {c:>5}: |DeltaF - base| = {:.3e}",
            (shifted - base).abs()
        );
    }
    Ok(())
}
