use super::{exact_fields, simplified_field, Axis, CylField, Excitation, Geometry, MediaPair, QuadratureSpec};
use crate::error::Result;
use nalgebra::Matrix3;
use num_complex::Complex64;

/// Which field model backs a computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldModel {
    Simplified,
    Exact(QuadratureSpec),
}

impl FieldModel {
    pub fn name(&self) -> &'static str {
        match self {
            FieldModel::Simplified => "simplified",
            FieldModel::Exact(_) => "exact",
        }
    }
}

/// Receiver-frame rotation `L(phi)` taking `(rho, phi, z)` components to
/// Cartesian ones.
pub fn azimuth_rotation(phi: f64) -> Matrix3<f64> {
    let (s, c) = phi.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// Fields at the receiver from unit-current x, y and z transmit coils.
///
/// Column `p` is the Cartesian field of source `p`, i.e. `L(phi) H` with `H`
/// holding the cylindrical components column-wise.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldMatrix {
    pub cartesian: Matrix3<Complex64>,
    pub cylindrical: Matrix3<Complex64>,
    /// Permeability of the medium holding the receiver, H/m.
    pub rx_permeability: f64,
    pub geometry: Geometry,
}

impl FieldMatrix {
    pub fn from_cylindrical(fields: [CylField; 3], geometry: Geometry, rx_permeability: f64) -> Self {
        let cylindrical = Matrix3::from_fn(|row, col| fields[col].to_array()[row]);
        let l = azimuth_rotation(geometry.azimuth).map(|v| Complex64::new(v, 0.0));
        FieldMatrix {
            cartesian: l * cylindrical,
            cylindrical,
            rx_permeability,
            geometry,
        }
    }

    pub fn column(&self, axis: Axis) -> CylField {
        let c = self.cylindrical.column(axis.index());
        CylField {
            rho: c[0],
            phi: c[1],
            z: c[2],
        }
    }
}

/// Field matrix for coils of the given radius and turns, driven at unit
/// current.
pub fn field_matrix(
    geometry: &Geometry,
    media: &MediaPair,
    frequency: f64,
    excitation: &Excitation,
    model: &FieldModel,
) -> Result<FieldMatrix> {
    let fields = match model {
        FieldModel::Simplified => [
            simplified_field(Axis::X, geometry, media, frequency, excitation)?,
            simplified_field(Axis::Y, geometry, media, frequency, excitation)?,
            simplified_field(Axis::Z, geometry, media, frequency, excitation)?,
        ],
        FieldModel::Exact(spec) => exact_fields(geometry, media, frequency, excitation, spec)?,
    };
    Ok(FieldMatrix::from_cylindrical(fields, *geometry, media.lower.permeability()))
}
