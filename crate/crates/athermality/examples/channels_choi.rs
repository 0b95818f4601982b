//! Quantum channels: Kraus <-> Choi conversion, composition, and the
//! rank-decreasing support-containment lemma (a channel that maps one
//! full-rank state into a subspace maps every state into that subspace).
//!
//! Run with: `cargo run --example channels_choi`

use athermality::channels::{
    check_support_containment, choi_to_kraus, compose, kraus_to_choi, random_channel,
    verify_channel_invariants, QuantumChannel,
};
use athermality::linalg::{random_density, random_isometry, state_distance, RngStream};

fn main() -> athermality::Result<()> {
    let mut rng = RngStream::new(99, 0).rng();

    // a random Stinespring channel and its full invariant check
    let t = random_channel(3, 3, 2, &mut rng)?;
    let worst = verify_channel_invariants(&t, &mut rng)?;
    println!(
        "random channel: {} Kraus operators, invariant residual {worst:.3e}",
        t.kraus().len()
    );

    // Kraus -> Choi -> Kraus preserves the action
    let j = kraus_to_choi(&t);
    println!("Choi trace = {:.12} (equals dim_in)", j.trace().re);
    let t2 = choi_to_kraus(&j, 3, 3)?;
    let rho = random_density(3, 3, &mut rng);
    println!(
        "round-trip action drift = {:.3e}",
        state_distance(&t.apply(&rho)?, &t2.apply(&rho)?)
    );

    // squeeze dimension 4 through a qubit and embed it back: every output
    // must live inside a two-dimensional subspace
    let squeeze = random_channel(4, 2, 2, &mut rng)?;
    let embed = QuantumChannel::unitary(random_isometry(4, 2, &mut rng))?;
    let rank_decreasing = compose(&embed, &squeeze)?;
    let sigma = random_density(4, 4, &mut rng);
    let report = check_support_containment(&rank_decreasing, &sigma, 200, &mut rng)?;
    println!(
        "support containment: projector rank {}, {} inputs checked, max violation {:.3e}, passed = {}",
        report.projector_rank, report.inputs_checked, report.max_violation, report.passed
    );
    Ok(())
}
