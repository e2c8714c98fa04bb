// Mutual inductance between randomly oriented tri-axis coils. The
// Frobenius norm of the 3x3 coupling does not depend on orientation.

use uwmi::coupling::{aligned_frames, coupling_from_kernel, coupling_kernel, random_frame, CoilSpec};
use uwmi::em::{field_matrix, FieldModel, Geometry, MediaPair, QuadratureSpec};

pub fn run_example() -> uwmi::Result<()> {
    let coil = CoilSpec::default();
    let g = Geometry::new(0.5, 0.3, 5.0, std::f64::consts::FRAC_PI_2)?;
    let fm = field_matrix(&g, &MediaPair::air_over_water(), 1e6, &coil.excitation(), &FieldModel::Exact(QuadratureSpec::default()))?;
    let kernel = coupling_kernel(&fm, &coil);

    for seed in 0..4 {
        let c = coupling_from_kernel(&kernel, &random_frame(2 * seed), &random_frame(2 * seed + 1));
        println!("seed {seed}: |M|_F = {:.6e} H, |m_00| = {:.3e} H", c.frobenius(), c.entry(0, 0).norm());
    }

    let (tx, rx, best) = aligned_frames(&kernel);
    let c = coupling_from_kernel(&kernel, &tx, &rx);
    println!("m* = {:.4e} H, best real-axis pair {:.4e} H (m_00 = {:.4e})", c.m_star, best, c.entry(0, 0).norm());
    Ok(())
}

#[allow(dead_code)]
fn main() -> uwmi::Result<()> {
    run_example()
}
