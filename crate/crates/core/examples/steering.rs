// Steering ensembles of a random two-qutrit state, truncation of light
// members, and the close pair and confusing outcome found between them.

use nonlocal::bounds::{close_pair, confusing_outcome, fod_witness_c0};
use nonlocal::states::{sample_density, sample_povm, steer, trace_distance, truncate_ensemble};

pub fn run() -> nonlocal::Result<()> {
    let rho_ab = sample_density(9, 3, 5)?;
    let y = sample_povm(3, 3, 6)?;
    let y_prime = sample_povm(3, 2, 7)?;
    let xi = steer(&rho_ab, &y)?.ensemble;
    let xi_prime = steer(&rho_ab, &y_prime)?.ensemble;
    println!("ensemble weights {:?} and {:?}", xi.weights(), xi_prime.weights());
    println!(
        "distance between averages {:.2e}",
        trace_distance(&xi.average()?, &xi_prime.average()?)?
    );

    let t = truncate_ensemble(&xi, 0.2)?;
    println!("truncating at 0.2 keeps {:?}, dropped weight {:.4}", t.kept, t.delta);

    let pair = close_pair(&xi, &xi_prime)?;
    println!(
        "close pair ({}, {}): distance {:.4}, eps {:.4}",
        pair.i0, pair.j0, pair.distance, pair.epsilon
    );
    let alice = sample_povm(3, 2, 8)?;
    let c = confusing_outcome(&xi.states()[pair.i0], &xi_prime.states()[pair.j0], &alice)?;
    println!(
        "confusing outcome {}: probabilities {:.4} and {:.4} above {:.4}",
        c.r0, c.prob_rho, c.prob_sigma, c.epsilon
    );
    println!("witness weight {:.4}", fod_witness_c0(&xi, &xi_prime, &alice)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> nonlocal::Result<()> {
    run()
}
