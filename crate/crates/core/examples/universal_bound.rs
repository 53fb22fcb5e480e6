// The universal lower bound on the fraction of determinism: the scalar
// optimization, the bound for a few scenarios, and a traced run of the
// bound chain on the singlet.

use nonlocal::boxes::quantum_box;
use nonlocal::bounds::{optimize_mu, singlet_zx_realization, theorem1_pipeline, universal_fod_bound};
use nonlocal::decomp::{bell_bound_from_fod, fod_exact};

pub fn run() -> nonlocal::Result<()> {
    let m = optimize_mu();
    println!("mu0 = {:.10}, f(mu0) = {:.7}, golden section mu0 = {:.10}", m.mu0, m.fmax, m.golden_mu0);

    for (k, l1, l2) in [(2, 2, 2), (2, 3, 3), (3, 2, 4), (4, 4, 4)] {
        let b = universal_fod_bound(k, l1, l2)?;
        println!(
            "k = {k}, l = ({l1}, {l2}): FOD >= {:.4e}, CHSH-type bound {:.5}",
            b.theorem_form,
            bell_bound_from_fod(4.0, 2.0, b.theorem_form)?
        );
    }

    let r = singlet_zx_realization();
    let trace = theorem1_pipeline(&r.rho_ab, &r.bob[0], &r.bob[1], &r.alice)?;
    println!(
        "singlet: close pair ({}, {}), c = {:.4e}, strategy {}, realized weight {:.4}",
        trace.i0, trace.j0, trace.c, trace.strategy, trace.realized_joint_min
    );
    for check in &trace.checks {
        println!("  {:<28} {:.4e} <= {:.4e}  {}", check.name, check.lhs, check.rhs, check.pass);
    }
    let exact = fod_exact(&quantum_box(&r.rho_ab, &r.alice, &r.bob)?)?;
    println!("exact FOD of the singlet box {:.4}", exact.value);
    Ok(())
}

#[allow(dead_code)]
fn main() -> nonlocal::Result<()> {
    run()
}
