// The dense two-phase simplex solver on a small production-planning LP.

use nonlocal::decomp::{simplex_solve, LinearProgram, Sense};

pub fn run() -> nonlocal::Result<()> {
    // maximize 3x + 5y  s.t.  x <= 4,  2y <= 12,  3x + 2y <= 18,  x + y >= 1
    let mut lp = LinearProgram::new(vec![3.0, 5.0]);
    lp.add_constraint(vec![1.0, 0.0], Sense::Le, 4.0)?;
    lp.add_constraint(vec![0.0, 2.0], Sense::Le, 12.0)?;
    lp.add_constraint(vec![3.0, 2.0], Sense::Le, 18.0)?;
    lp.add_constraint(vec![1.0, 1.0], Sense::Ge, 1.0)?;
    let sol = simplex_solve(&lp)?;
    println!("optimum {} at x = {:?} after {} pivots", sol.optimum, sol.x, sol.iterations);
    println!("largest constraint violation {:.1e}", lp.max_violation(&sol.x));

    let mut infeasible = LinearProgram::new(vec![1.0]);
    infeasible.add_constraint(vec![1.0], Sense::Le, 1.0)?;
    infeasible.add_constraint(vec![1.0], Sense::Ge, 2.0)?;
    match simplex_solve(&infeasible) {
        Err(e) => println!("x <= 1 and x >= 2: {e}"),
        Ok(s) => println!("unexpected solution {s:?}"),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> nonlocal::Result<()> {
    run()
}
