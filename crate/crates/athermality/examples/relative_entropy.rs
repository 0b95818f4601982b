//! Entropic quantities on small states: von Neumann entropy, relative
//! entropy (including the infinite support-violation case), both Renyi
//! families, and mutual information.
//!
//! Run with: `cargo run --example relative_entropy`

use athermality::divergences::{
    mutual_information, relative_entropy, renyi_divergence, von_neumann_entropy, DivergenceSpec,
};
use athermality::linalg::ops::{CMatrix, C64};
use athermality::linalg::DensityMatrix;

fn main() -> athermality::Result<()> {
    // classical example: p = (3/4, 1/4) against the uniform reference
    let rho = DensityMatrix::from_probabilities(&[0.75, 0.25])?;
    let uniform = DensityMatrix::maximally_mixed(2);
    println!("S(rho)              = {:.12}", von_neumann_entropy(&rho));
    println!(
        "S(rho || I/2)       = {:.12}   (scalar oracle: 0.75 ln 1.5 + 0.25 ln 0.5 = {:.12})",
        relative_entropy(&rho, &uniform),
        0.75f64 * 1.5f64.ln() + 0.25 * 0.5f64.ln()
    );

    // the divergence is infinite when the support sticks out
    let pure = DensityMatrix::pure_basis_state(2, 1);
    let ground = DensityMatrix::pure_basis_state(2, 0);
    println!("S(|1><1| || |0><0|) = {}", relative_entropy(&pure, &ground));

    // Renyi orders interpolate around the relative entropy
    for spec in [
        DivergenceSpec::petz(0.5),
        DivergenceSpec::petz(2.0),
        DivergenceSpec::sandwiched(0.5),
        DivergenceSpec::sandwiched(2.0),
    ] {
        println!(
            "D[{:<22}](rho || I/2) = {:.12}",
            format!("{}, a={}", spec.family, spec.alpha),
            renyi_divergence(spec, &rho, &uniform)?
        );
    }

    // a Bell pair carries exactly two nats of mutual information
    let mut bell = CMatrix::zeros(4, 4);
    for &i in &[0usize, 3] {
        for &j in &[0usize, 3] {
            bell[(i, j)] = C64::new(0.5, 0.0);
        }
    }
    let bell = DensityMatrix::new(bell)?;
    println!(
        "I(Bell)             = {:.12}   (2 ln 2 = {:.12})",
        mutual_information(&bell, (2, 2))?,
        2.0 * 2.0f64.ln()
    );
    Ok(())
}
