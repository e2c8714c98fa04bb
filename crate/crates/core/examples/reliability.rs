// Worst-to-best capacity ratio over random orientations, and the
// high-SNR multiplexing gain of each strategy.

use uwmi::em::FieldModel;
use uwmi::harness::{kernels, Scenario};
use uwmi::strategies::{multiplexing_gain_estimate, reliability, Strategy};

pub fn run_example() -> uwmi::Result<()> {
    let scenario = Scenario {
        model: FieldModel::Simplified,
        ..Scenario::default()
    };
    let kernel = kernels(&scenario)?[0];
    for p_dbm in [-80.0, 40.0] {
        let lb = scenario.link_budget(p_dbm)?;
        println!("P = {p_dbm} dBm");
        for s in Strategy::ALL {
            let r = reliability(s, &kernel, &lb, 500, scenario.seed)?;
            println!("  {:<15} reliability {:.4}  (min {:.3e}, max {:.3e})", s.name(), r.reliability, r.min_capacity, r.max_capacity);
        }
    }
    let lb = scenario.link_budget(0.0)?;
    for s in [Strategy::SisoCs, Strategy::MimoMii, Strategy::MimoNoMii] {
        let g = multiplexing_gain_estimate(s, &kernel, &lb, &[1e6, 1e8], 200, scenario.seed)?;
        println!("multiplexing gain {:<12} {g:.3}", s.name());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> uwmi::Result<()> {
    run_example()
}
