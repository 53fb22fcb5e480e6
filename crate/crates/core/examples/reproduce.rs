// Recompute every tabulated constant and print the table as CSV.

use nonlocal::report::{cmd_reproduce, Format, RunConfig};

pub fn run() -> nonlocal::Result<()> {
    let config = RunConfig {
        trials: 50,
        ..RunConfig::default()
    };
    let report = cmd_reproduce(&config)?;
    print!("{}", report.render(Format::Csv)?);
    println!("all rows pass: {}", report.all_pass);
    Ok(())
}

#[allow(dead_code)]
fn main() -> nonlocal::Result<()> {
    run()
}
