// Sharper constants when Bob's two measurements have binary outcomes.

use nonlocal::bounds::{binary_bob_bounds, binary_bob_bounds_with_step};

pub fn run() -> nonlocal::Result<()> {
    for k in [2, 3] {
        let b = binary_bob_bounds(k)?;
        println!(
            "k = {k}: FOD constant {:.6} at (p0, q0) = ({:.4}, {:.4}), CF constant {:.6} at ({:.4}, {:.4})",
            b.fod_constant, b.fod_witness.p0, b.fod_witness.q0, b.cf_constant, b.cf_witness.p0, b.cf_witness.q0
        );
        println!(
            "        bounds {:.4e} / {:.4e}, CHSH {:.5} / {:.5}",
            b.fod_bound, b.cf_bound, b.chsh_fod_bell_bound, b.chsh_cf_bell_bound
        );
    }
    let coarse = binary_bob_bounds_with_step(2, 0.05)?;
    println!("coarse grid (step 0.05): FOD constant {:.6}", coarse.fod_constant);
    println!("closed form (5 - sqrt 17) / 8 = {:.6}", (5.0 - 17f64.sqrt()) / 8.0);
    Ok(())
}

#[allow(dead_code)]
fn main() -> nonlocal::Result<()> {
    run()
}
