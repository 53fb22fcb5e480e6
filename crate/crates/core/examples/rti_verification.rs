// Reverse triangle inequality: a single instance, a small randomized
// campaign, the extremal qubit family and the classical sharp example.

use nonlocal::rti::{
    classical_sharp_example, default_tightness_grid, rti_campaign, sample_rti_instance, tightness_point, verify_rti,
};

pub fn run() -> nonlocal::Result<()> {
    let instance = sample_rti_instance(3, 2, 11, false)?;
    let report = verify_rti(&instance, false)?;
    println!(
        "l = {}, eps = {:.4}: ||mixture - sigma|| = {:.4} >= {:.4}",
        report.l, report.epsilon, report.lhs, report.bound
    );

    for commuting in [false, true] {
        for cell in rti_campaign(&[2, 3], &[2, 3], 200, 1, commuting)? {
            println!(
                "{:?} dim {} l {}: {} violations, {} vacuous, min slack {:.3e}",
                cell.kind, cell.dim, cell.l, cell.violations, cell.vacuous, cell.min_slack
            );
        }
    }

    println!("    r      eps   mixture  2-sqrt(2eps)  ratio");
    for r in default_tightness_grid().into_iter().step_by(3).chain([1e-3]) {
        let pt = tightness_point(r)?;
        println!(
            "{r:>5.3} {:>8.5} {:>9.5} {:>12.5} {:>6.4}",
            pt.epsilon, pt.mixture_distance, pt.sqrt_bound, pt.ratio
        );
    }

    for (l, eps) in [(2, 0.4), (3, 0.2), (4, 0.1)] {
        let w = classical_sharp_example(l, eps)?;
        println!("classical l = {l}, eps = {eps}: mixture distance {} = 2 - l eps", w.mixture_distance());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> nonlocal::Result<()> {
    run()
}
