use super::{wavenumber, Axis, CylField, Excitation, Geometry, Medium, J};
use crate::error::Result;
use nalgebra::Vector3;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Closed-form field of a magnetic dipole in an unbounded medium, Cartesian
/// components in the transmitter frame (z up).
///
/// `H = m/(4 pi) e^{jkr} [k^2 (n x m) x n / r + (3 n (n.m) - m)(1/r^3 - jk/r^2)]`
pub fn homogeneous_dipole_cartesian(
    axis: Axis,
    geometry: &Geometry,
    medium: &Medium,
    frequency: f64,
    excitation: &Excitation,
) -> Result<Vector3<Complex64>> {
    let k = wavenumber(medium, frequency)?.value();
    let (s, c) = geometry.azimuth.sin_cos();
    let r_vec = Vector3::new(geometry.range * c, geometry.range * s, geometry.height());
    let r = r_vec.norm();
    let n = r_vec / r;
    let mut m_hat = Vector3::zeros();
    m_hat[axis.index()] = 1.0;

    let transverse = n.cross(&m_hat).cross(&n);
    let near = 3.0 * n * n.dot(&m_hat) - m_hat;
    let phase = (J * k * r).exp() * excitation.moment() / (4.0 * PI);
    let radiative = k * k / r;
    let static_ = Complex64::new(1.0 / r.powi(3), 0.0) - J * k / (r * r);
    Ok(Vector3::from_fn(|i, _| {
        phase * (radiative * transverse[i] + static_ * near[i])
    }))
}

/// The same field resolved on the receiver's cylindrical unit vectors.
pub fn homogeneous_dipole_field(
    axis: Axis,
    geometry: &Geometry,
    medium: &Medium,
    frequency: f64,
    excitation: &Excitation,
) -> Result<CylField> {
    let h = homogeneous_dipole_cartesian(axis, geometry, medium, frequency, excitation)?;
    let (s, c) = geometry.azimuth.sin_cos();
    Ok(CylField {
        rho: h[0] * c + h[1] * s,
        phi: -h[0] * s + h[1] * c,
        z: h[2],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn static_limit_on_axis() {
        // Lossless medium, tiny frequency: on the dipole axis H = 2m/(4 pi r^3).
        let g = Geometry::new(2.0, 1.0, 1e-9, 0.0).unwrap();
        let e = Excitation::unit_current(0.05, 10.0);
        let h = homogeneous_dipole_field(Axis::Z, &g, &Medium::air(), 1.0, &e).unwrap();
        let expect = 2.0 * e.moment() / (4.0 * PI);
        assert!((h.z.re - expect).abs() < 1e-9 * expect);
    }

    #[test]
    fn vertical_source_has_no_azimuthal_component() {
        let g = Geometry::new(0.7, 0.2, 3.0, 1.3).unwrap();
        let e = Excitation::unit_current(0.05, 10.0);
        let h = homogeneous_dipole_field(Axis::Z, &g, &Medium::fresh_water(), 1e6, &e).unwrap();
        assert!(h.phi.norm() < 1e-15 * h.norm());
    }
}
