// Fraction of determinism and classical fraction of noisy PR boxes and a
// quantum box, with the deterministic decomposition behind each value.

use nonlocal::boxes::{pr_box, quantum_box, CorrelationBox, Scenario};
use nonlocal::bounds::singlet_zx_realization;
use nonlocal::decomp::{bell_bound_from_fod, cf_exact, fod_exact};

pub fn run() -> nonlocal::Result<()> {
    let sc = Scenario::chsh();
    let pr = pr_box(&sc)?;
    let noise = CorrelationBox::maximally_mixed(sc.clone());
    println!("visibility      FOD       CF   CHSH bound from FOD");
    for v in [0.0, 0.3, 0.5, 0.7, 1.0] {
        let p = CorrelationBox::mixture(&[v, 1.0 - v], &[pr.clone(), noise.clone()])?;
        let fod = fod_exact(&p)?;
        let cf = cf_exact(&p)?;
        println!(
            "{v:>10.2} {:>8.4} {:>8.4} {:>10.4}",
            fod.value,
            cf.value,
            bell_bound_from_fod(4.0, 2.0, fod.value)?
        );
    }

    let r = singlet_zx_realization();
    let p = quantum_box(&r.rho_ab, &r.alice, &r.bob)?;
    let fod = fod_exact(&p)?;
    let cf = cf_exact(&p)?;
    println!("singlet with Z/X measurements: FOD {:.4} via {}", fod.value, fod.strategy);
    println!("classical fraction {:.4} from {} strategies:", cf.value, cf.decomposition.strategies.len());
    for (s, c) in cf.decomposition.strategies.iter().zip(&cf.decomposition.coefficients) {
        println!("  {c:.4}  {s}");
    }
    println!("reconstruction error {:.2e}", cf.decomposition.reconstruction_error(&p)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> nonlocal::Result<()> {
    run()
}
