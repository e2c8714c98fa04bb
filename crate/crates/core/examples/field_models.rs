// Fields of unit-current x, y and z coils at the lake geometry, exact
// layered-medium model against the simplified far-field one.

use uwmi::em::{field_matrix, reflection_coefficients, Branch, FieldModel, Geometry, MediaPair, QuadratureSpec};
use uwmi::coupling::CoilSpec;
use num_complex::Complex64;

pub fn run_example() -> uwmi::Result<()> {
    let media = MediaPair::air_over_water();
    let geometry = Geometry::new(0.5, 0.3, 5.0, std::f64::consts::FRAC_PI_2)?;
    let excitation = CoilSpec::default().excitation();

    let r = reflection_coefficients(&media, 1e6, Complex64::new(0.0, 0.0), Branch::Physical)?;
    println!("normal incidence: R_TE = {:.4}, R_TM = {:.4}", r.te, r.tm);

    for model in [FieldModel::Exact(QuadratureSpec::default()), FieldModel::Simplified] {
        let fm = field_matrix(&geometry, &media, 1e6, &excitation, &model)?;
        println!("{} model, cylindrical (rho, phi, z) per source column:", model.name());
        for row in 0..3 {
            let cells: Vec<String> = (0..3).map(|c| format!("{:>24.3e}", fm.cylindrical[(row, c)])).collect();
            println!("  {}", cells.join(" "));
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> uwmi::Result<()> {
    run_example()
}
