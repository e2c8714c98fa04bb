//! Magnetic fields of x/y/z-oriented coil dipoles below a planar
//! air/water interface.
//!
//! Time convention is `e^{-jwt}` throughout, so outgoing waves carry
//! `e^{+jkr}` and Hankel functions of the first kind. The upper medium
//! (medium 1, usually air) fills depth < 0; both transceivers sit in the
//! lower medium (medium 2, water) at positive depths. The vertical axis of
//! the local frame points up, toward the interface, so the receiver's
//! height above the transmitter is `z = d1 - d2`.
//!
//! Two field models are provided: the closed-form lateral-wave
//! approximation valid when the range dwarfs both depths
//! ([`simplified_field`]) and the full two-medium Sommerfeld integrals
//! ([`exact_field`]).

mod dipole;
mod exact;
mod field_matrix;
mod simplified;

pub use dipole::{homogeneous_dipole_cartesian, homogeneous_dipole_field};
pub use exact::{
    deformed_path_integral, exact_field, exact_fields, exact_solution, reflection_coefficients, spectral_fields,
    vertical_wavenumber, Branch, ExactSolution, QuadratureSpec, Reflection, SommerfeldIntegrand,
    COMPONENTS,
};
pub use field_matrix::{azimuth_rotation, field_matrix, FieldMatrix, FieldModel};
pub use simplified::simplified_field;

use crate::error::{invalid, Result};
use num_complex::Complex64;
use std::f64::consts::TAU;

/// Vacuum permeability, H/m (CODATA 2018).
pub const MU_0: f64 = 1.256_637_062_12e-6;
/// Vacuum permittivity, F/m (CODATA 2018).
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;

pub(crate) const J: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// A homogeneous, isotropic, passive medium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Medium {
    pub relative_permeability: f64,
    pub relative_permittivity: f64,
    /// Conductivity in S/m.
    pub conductivity: f64,
}

impl Medium {
    pub fn new(relative_permeability: f64, relative_permittivity: f64, conductivity: f64) -> Result<Self> {
        let m = Medium {
            relative_permeability,
            relative_permittivity,
            conductivity,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn air() -> Self {
        Medium {
            relative_permeability: 1.0,
            relative_permittivity: 1.0,
            conductivity: 0.0,
        }
    }

    /// Lake or river water at MHz frequencies.
    pub fn fresh_water() -> Self {
        Medium {
            relative_permeability: 1.0,
            relative_permittivity: 81.0,
            conductivity: 0.1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.relative_permeability > 0.0 && self.relative_permeability.is_finite()) {
            return Err(invalid("relative permeability must be positive"));
        }
        if !(self.relative_permittivity > 0.0 && self.relative_permittivity.is_finite()) {
            return Err(invalid("relative permittivity must be positive"));
        }
        if !(self.conductivity >= 0.0 && self.conductivity.is_finite()) {
            return Err(invalid("conductivity must be non-negative"));
        }
        Ok(())
    }

    pub fn permeability(&self) -> f64 {
        self.relative_permeability * MU_0
    }

    /// Complex permittivity `eps + j sigma / w`.
    pub fn complex_permittivity(&self, angular_frequency: f64) -> Complex64 {
        Complex64::new(
            self.relative_permittivity * EPSILON_0,
            self.conductivity / angular_frequency,
        )
    }
}

/// The two half-spaces: `upper` above the interface, `lower` holding the coils.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediaPair {
    pub upper: Medium,
    pub lower: Medium,
}

impl MediaPair {
    pub fn air_over_water() -> Self {
        MediaPair {
            upper: Medium::air(),
            lower: Medium::fresh_water(),
        }
    }

    /// Both half-spaces filled with the same medium.
    pub fn homogeneous(medium: Medium) -> Self {
        MediaPair {
            upper: medium,
            lower: medium,
        }
    }
}

/// Complex propagation constant, `Im >= 0` for passive media.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wavenumber(pub Complex64);

impl Wavenumber {
    pub fn value(&self) -> Complex64 {
        self.0
    }
}

/// `k = w sqrt(mu (eps + j sigma / w))`, on the branch with non-negative
/// imaginary part.
pub fn wavenumber(medium: &Medium, frequency: f64) -> Result<Wavenumber> {
    if !(frequency > 0.0 && frequency.is_finite()) {
        return Err(invalid(format!("frequency must be positive, got {frequency}")));
    }
    medium.validate()?;
    let omega = TAU * frequency;
    let k = omega * (medium.permeability() * medium.complex_permittivity(omega)).sqrt();
    Ok(Wavenumber(if k.im < 0.0 { -k } else { k }))
}

/// Transmitter/receiver placement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    /// Transmitter depth d1, m.
    pub tx_depth: f64,
    /// Receiver depth d2, m.
    pub rx_depth: f64,
    /// Horizontal range rho, m.
    pub range: f64,
    /// Azimuth of the receiver seen from the transmitter, in [0, 2pi).
    pub azimuth: f64,
}

impl Geometry {
    pub fn new(tx_depth: f64, rx_depth: f64, range: f64, azimuth: f64) -> Result<Self> {
        if !(tx_depth > 0.0 && rx_depth > 0.0) {
            return Err(invalid("both depths must be positive"));
        }
        if !(range > 0.0 && range.is_finite()) {
            return Err(invalid("horizontal range must be positive"));
        }
        if !azimuth.is_finite() {
            return Err(invalid("azimuth must be finite"));
        }
        Ok(Geometry {
            tx_depth,
            rx_depth,
            range,
            azimuth: azimuth.rem_euclid(TAU),
        })
    }

    /// Geometry between two points given as horizontal `(x, y)` plus depth.
    pub fn between(tx: [f64; 3], rx: [f64; 3]) -> Result<Self> {
        let dx = rx[0] - tx[0];
        let dy = rx[1] - tx[1];
        Geometry::new(tx[2], rx[2], dx.hypot(dy), dy.atan2(dx))
    }

    /// Receiver height above the transmitter.
    pub fn height(&self) -> f64 {
        self.tx_depth - self.rx_depth
    }

    /// The same link with the roles of transmitter and receiver exchanged.
    pub fn reversed(&self) -> Self {
        Geometry {
            tx_depth: self.rx_depth,
            rx_depth: self.tx_depth,
            range: self.range,
            azimuth: (self.azimuth + std::f64::consts::PI).rem_euclid(TAU),
        }
    }
}

/// Orientation of a transmit dipole.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    /// Angle between a horizontal dipole's axis and the receiver direction.
    pub(crate) fn horizontal_angle(self, azimuth: f64) -> f64 {
        match self {
            Axis::Y => azimuth - std::f64::consts::FRAC_PI_2,
            _ => azimuth,
        }
    }
}

/// Coil drive: radius `a`, turns `n_c`, current `i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Excitation {
    pub radius: f64,
    pub turns: f64,
    pub current: f64,
}

impl Excitation {
    pub fn unit_current(radius: f64, turns: f64) -> Self {
        Excitation {
            radius,
            turns,
            current: 1.0,
        }
    }

    /// Magnetic dipole moment `i pi a^2 n_c`, A m^2.
    pub fn moment(&self) -> f64 {
        self.current * std::f64::consts::PI * self.radius * self.radius * self.turns
    }
}

/// Field components in the receiver's cylindrical frame, A/m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylField {
    pub rho: Complex64,
    pub phi: Complex64,
    pub z: Complex64,
}

impl CylField {
    pub fn zero() -> Self {
        let z = Complex64::new(0.0, 0.0);
        CylField { rho: z, phi: z, z }
    }

    pub fn to_array(&self) -> [Complex64; 3] {
        [self.rho, self.phi, self.z]
    }

    pub fn norm(&self) -> f64 {
        (self.rho.norm_sqr() + self.phi.norm_sqr() + self.z.norm_sqr()).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}
