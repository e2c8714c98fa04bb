// Field magnitude against range for the vertical coil, layered medium
// next to the unbounded water dipole.

use uwmi::em::Axis;
use uwmi::harness::{field_probe, Scenario};

pub fn run_example() -> uwmi::Result<()> {
    let rows = field_probe(&Scenario::default(), &[2.0, 5.0, 20.0, 50.0, 100.0, 200.0], &[0.0])?;
    for r in rows.iter().filter(|r| r.axis == Axis::Z) {
        println!(
            "rho {:>6} m  |h| {:.3e} A/m  unbounded {:.3e} A/m",
            r.geometry.range,
            r.field.norm(),
            r.dipole.norm()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> uwmi::Result<()> {
    run_example()
}
