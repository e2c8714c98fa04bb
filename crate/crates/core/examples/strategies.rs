// One random orientation pair evaluated under every coil strategy.

use uwmi::coupling::coupling_from_kernel;
use uwmi::em::FieldModel;
use uwmi::harness::{kernels, Scenario};
use uwmi::strategies::{orientation_draw, waterfill, Strategy};

pub fn run_example() -> uwmi::Result<()> {
    let scenario = Scenario {
        model: FieldModel::Simplified,
        ..Scenario::default()
    };
    let kernel = kernels(&scenario)?[0];
    let d = orientation_draw(scenario.seed, 0);
    let c = coupling_from_kernel(&kernel, &d.tx, &d.rx);
    for p_dbm in [-40.0, 0.0, 40.0] {
        let lb = scenario.link_budget(p_dbm)?;
        println!("P = {p_dbm} dBm, SNR proxy {:.3e}", lb.snr(c.m_star));
        for s in Strategy::ALL {
            let r = s.evaluate(&c, &lb);
            println!("  {:<15} {:>10.4} bit/s/Hz  tx {:?} rx {:?}", s.name(), r.capacity, r.selected_tx, r.selected_rx);
        }
    }
    println!("water-filling 1 W over gains [4, 1, 0.1]: {:?}", waterfill([4.0, 1.0, 0.1], 1.0)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> uwmi::Result<()> {
    run_example()
}
