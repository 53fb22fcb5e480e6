// Boxes in the CHSH scenario: PR box, Tsirelson box, noise, and the CHSH
// functional's deterministic and algebraic maxima.

use nonlocal::boxes::{
    bell_algebraic_max, bell_det_max_with_strategy, bell_value, pr_box, tsirelson_box, validate_ns, BellFunctional,
    CorrelationBox, Scenario,
};

pub fn run() -> nonlocal::Result<()> {
    let sc = Scenario::chsh();
    let chsh = BellFunctional::chsh();
    let (det, best) = bell_det_max_with_strategy(&chsh)?;
    println!("CHSH: deterministic max {det} (first attained by {best}), algebraic max {}", bell_algebraic_max(&chsh));

    let pr = pr_box(&sc)?;
    let singlet = tsirelson_box();
    let noise = CorrelationBox::maximally_mixed(sc.clone());
    for (name, p) in [("PR", &pr), ("singlet", &singlet), ("white noise", &noise)] {
        let ns = validate_ns(p);
        println!("{name:>12}: CHSH = {:.6}, non-signalling: {}", bell_value(&chsh, p)?, ns.pass);
    }

    // Visibility at which the PR box stops violating CHSH.
    for v in [0.25, 0.5, 0.75, 1.0] {
        let p = CorrelationBox::mixture(&[v, 1.0 - v], &[pr.clone(), noise.clone()])?;
        println!("PR with visibility {v:.2}: CHSH = {:.3}", bell_value(&chsh, &p)?);
    }

    println!("{}", singlet.to_json_string()?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> nonlocal::Result<()> {
    run()
}
