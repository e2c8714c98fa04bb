use super::{wavenumber, Axis, CylField, Excitation, Geometry, MediaPair, J};
use crate::error::{invalid, Result};

/// Closed-form lateral-wave fields for range much larger than both depths.
///
/// All three sources share the factor
/// `j i n_c a^2 k1^2 / (2 k2 rho^2) * exp(j k2 (d1 + d2) + j k1 rho)`;
/// the vertical coil contributes `[-1, 0, -k1/k2]` and the horizontal
/// coils `[-(k2/k1) cos psi, -j k2/(k1^2 rho) sin psi, -cos psi]`, with `psi`
/// the angle between the coil axis and the receiver direction.
///
/// The range regime is the caller's responsibility; nothing checks it.
pub fn simplified_field(
    axis: Axis,
    geometry: &Geometry,
    media: &MediaPair,
    frequency: f64,
    excitation: &Excitation,
) -> Result<CylField> {
    let rho = geometry.range;
    if !(rho > 0.0) {
        return Err(invalid("simplified model needs a positive range"));
    }
    let k1 = wavenumber(&media.upper, frequency)?.value();
    let k2 = wavenumber(&media.lower, frequency)?.value();
    let common = J * excitation.current * excitation.turns * excitation.radius.powi(2) * k1 * k1
        / (2.0 * k2 * rho * rho)
        * (J * (k2 * (geometry.tx_depth + geometry.rx_depth) + k1 * rho)).exp();

    Ok(match axis {
        Axis::Z => CylField {
            rho: -common,
            phi: common * 0.0,
            z: -k1 / k2 * common,
        },
        Axis::X | Axis::Y => {
            let (s, c) = axis.horizontal_angle(geometry.azimuth).sin_cos();
            CylField {
                rho: -(k2 / k1) * c * common,
                phi: -J * k2 / (k1 * k1 * rho) * s * common,
                z: -c * common,
            }
        }
    })
}
