//! Runs a batch of checks from a JSON config, as the CLI does.

use mvop::cli_reports::{run, RunConfig};

fn main() -> mvop::Result<()> {
    let cfg = RunConfig::from_json(
        r#"{
            "size": 2,
            "a": [2],
            "weights": [{"family": "laguerre", "alpha": 0}, {"family": "laguerre", "alpha": 0.5}],
            "n_max": 12,
            "checks": ["orth", "norm", "recurrence", "eigen", "det", "reduce", "symmetries"]
        }"#,
    )?;
    let report = run(&cfg)?;
    for c in &report.checks {
        println!("{:<11} pass {:<5} worst {:?}", c.check.name(), c.pass, c.worst_residual);
    }
    println!("overall pass {} in {:.3} s", report.pass, report.wall_time_s);
    Ok(())
}
