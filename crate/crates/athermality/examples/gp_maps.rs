//! Gibbs-preserving maps that change the Hamiltonian: any such map is
//! implementable by borrowing an ancilla in its Gibbs state, acting with a
//! joint Gibbs-preserving channel, and discarding the ancilla.
//!
//! Run with: `cargo run --example gp_maps`

use athermality::channels::{swap_channel, QuantumChannel};
use athermality::linalg::{random_density, state_distance, HermitianOperator, RngStream};
use athermality::thermo::{gibbs_state, implement_gp_map, is_gibbs_preserving};

fn main() -> athermality::Result<()> {
    let beta = 1.0;
    let h_s = HermitianOperator::from_diagonal(&[0.0, 1.0]);
    let k_a = HermitianOperator::from_diagonal(&[0.0, 1.0]);
    let mut rng = RngStream::new(13, 0).rng();

    // the identity joint channel induces the identity map on the system
    let induced = implement_gp_map(&QuantumChannel::identity(4), &h_s, &k_a, beta)?;
    let rho = random_density(2, 2, &mut rng);
    println!(
        "identity joint: induced map moves rho by {:.3e}, GP residual {:.3e}",
        state_distance(&induced.channel.apply(&rho)?, &rho),
        induced.verify()?.residual
    );

    // a swap joint channel makes the induced map replace every input with
    // the Gibbs state
    let induced = implement_gp_map(&swap_channel(2, 2), &h_s, &k_a, beta)?;
    let omega = gibbs_state(beta, &k_a);
    println!(
        "swap joint: every output lands on omega (distance {:.3e}), GP residual {:.3e}",
        state_distance(&induced.channel.apply(&rho)?, &omega),
        induced.verify()?.residual
    );

    // a channel that is not Gibbs preserving is rejected outright
    let dep = QuantumChannel::depolarizing(2, 2);
    let check = is_gibbs_preserving(&dep, &h_s, &h_s, beta, 1e-8)?;
    println!(
        "depolarizing on a nondegenerate Hamiltonian: preserving = {}, residual {:.6}",
        check.preserving, check.residual
    );
    match implement_gp_map(&QuantumChannel::depolarizing(4, 4), &h_s, &k_a, beta) {
        Err(e) => println!("implement_gp_map rejects it: {e}"),
        Ok(_) => unreachable!("a non-GP joint channel must be rejected"),
    }
    Ok(())
}
