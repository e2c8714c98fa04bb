// Parse a scenario, run an experiment and write its CSV.

use uwmi::harness::{parse_scenario, run_experiment, write_csv, Experiment};

const SCENARIO: &str = "\
# short sweep, simplified fields
model = simplified
draws = 300
sweep.p_dbm.start = -40
sweep.p_dbm.stop = 40
sweep.p_dbm.step = 40
";

pub fn run_example() -> uwmi::Result<()> {
    let scenario = parse_scenario(SCENARIO, "inline")?;
    let rows = run_experiment(Experiment::Fig5Reliability, &scenario)?;
    let path = std::env::temp_dir().join(format!("uwmi_fig5_{}.csv", std::process::id()));
    write_csv(&rows, std::fs::File::create(&path)?)?;
    let text = std::fs::read_to_string(&path)?;
    for line in text.lines().take(8) {
        println!("{line}");
    }
    println!("... {} rows in {}", rows.len(), path.display());
    std::fs::remove_file(&path)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> uwmi::Result<()> {
    run_example()
}
