// Three-slot pilot estimation of the coupling matrix and its error as the
// pilot power grows.

use uwmi::coupling::coupling_from_kernel;
use uwmi::em::FieldModel;
use uwmi::estimation::{estimate_mii, estimation_error, orthogonal_pilot_currents, simulate_measurement};
use uwmi::harness::{kernels, Scenario};
use uwmi::strategies::{dbm_to_watts, orientation_draw};

pub fn run_example() -> uwmi::Result<()> {
    let scenario = Scenario {
        model: FieldModel::Simplified,
        ..Scenario::default()
    };
    let kernel = kernels(&scenario)?[0];
    let d = orientation_draw(scenario.seed, 0);
    let truth = coupling_from_kernel(&kernel, &d.tx, &d.rx);
    let lb = scenario.link_budget(0.0)?;
    let r = scenario.coil.resistance;
    for p_dbm in [-60.0, -40.0, -20.0, 0.0, 20.0] {
        let mut total = 0.0;
        for trial in 0..50 {
            let pilots = orthogonal_pilot_currents(dbm_to_watts(p_dbm), r, trial)?;
            let meas = simulate_measurement(&[truth], &pilots, lb.noise_density, lb.angular_frequency, r, 1000 + trial)?;
            let est = estimate_mii(&meas, &pilots, r, lb.angular_frequency)?;
            total += estimation_error(&truth.m, &est[0].m)?;
        }
        println!("pilot {p_dbm:>5} dBm: mean relative error {:.3e}", total / 50.0);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> uwmi::Result<()> {
    run_example()
}
