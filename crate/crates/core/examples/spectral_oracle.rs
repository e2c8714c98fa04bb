// In a single unbounded medium the fully numerical spectral integral must
// reproduce the closed-form magnetic dipole.

use uwmi::em::{homogeneous_dipole_field, spectral_fields, Axis, Geometry, MediaPair, Medium, QuadratureSpec};
use uwmi::coupling::CoilSpec;

pub fn run_example() -> uwmi::Result<()> {
    let water = Medium::fresh_water();
    let media = MediaPair::homogeneous(water);
    let excitation = CoilSpec::default().excitation();
    let spec = QuadratureSpec::default();
    for (d1, d2, rho) in [(0.5, 0.3, 2.0), (1.0, 2.0, 5.0), (3.0, 0.5, 10.0)] {
        let g = Geometry::new(d1, d2, rho, 0.7)?;
        let numeric = spectral_fields(&g, &media, 1e6, &excitation, &spec)?;
        for axis in Axis::ALL {
            let closed = homogeneous_dipole_field(axis, &g, &water, 1e6, &excitation)?;
            let h = numeric[axis.index()];
            let diff = (h.rho - closed.rho).norm().hypot((h.phi - closed.phi).norm()).hypot((h.z - closed.z).norm());
            println!("d1={d1} d2={d2} rho={rho} {axis:?}: relative difference {:.2e}", diff / closed.norm());
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> uwmi::Result<()> {
    run_example()
}
