use super::Scenario;
use crate::em::{field_matrix, homogeneous_dipole_field, Axis, CylField, Geometry};
use crate::error::{Error, Result};
use std::io::Write;

pub const PROBE_HEADER: [&str; 18] = [
    "model",
    "range_m",
    "azimuth_rad",
    "tx_depth_m",
    "rx_depth_m",
    "source_axis",
    "h_rho_re",
    "h_rho_im",
    "h_phi_re",
    "h_phi_im",
    "h_z_re",
    "h_z_im",
    "dipole_h_rho_re",
    "dipole_h_rho_im",
    "dipole_h_phi_re",
    "dipole_h_phi_im",
    "dipole_h_z_re",
    "dipole_h_z_im",
];

/// Field of one source axis at one grid point, next to the unbounded
/// dipole in the lower medium.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeRow {
    pub model: &'static str,
    pub geometry: Geometry,
    pub axis: Axis,
    pub field: CylField,
    pub dipole: CylField,
}

impl ProbeRow {
    /// `|h - h_dipole| / |h_dipole|`.
    pub fn relative_difference(&self) -> f64 {
        let d = CylField {
            rho: self.field.rho - self.dipole.rho,
            phi: self.field.phi - self.dipole.phi,
            z: self.field.z - self.dipole.z,
        };
        d.norm() / self.dipole.norm()
    }

    fn fields(&self) -> Vec<String> {
        let axis = match self.axis {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        };
        let mut v = vec![
            self.model.to_string(),
            self.geometry.range.to_string(),
            self.geometry.azimuth.to_string(),
            self.geometry.tx_depth.to_string(),
            self.geometry.rx_depth.to_string(),
            axis.to_string(),
        ];
        for f in [&self.field, &self.dipole] {
            for z in f.to_array() {
                v.push(z.re.to_string());
                v.push(z.im.to_string());
            }
        }
        v
    }
}

/// Unit-current fields of the scenario coil over a range/azimuth grid at
/// the scenario's transmitter and first receiver depths.
pub fn field_probe(scenario: &Scenario, ranges: &[f64], azimuths: &[f64]) -> Result<Vec<ProbeRow>> {
    scenario.validate()?;
    let excitation = scenario.coil.excitation();
    let mut rows = Vec::new();
    for &range in ranges {
        for &azimuth in azimuths {
            let g = Geometry::new(scenario.tx.depth, scenario.receivers[0].depth, range, azimuth)?;
            let fm = field_matrix(&g, &scenario.media, scenario.frequency, &excitation, &scenario.model)?;
            for axis in Axis::ALL {
                rows.push(ProbeRow {
                    model: scenario.model.name(),
                    geometry: g,
                    axis,
                    field: fm.column(axis),
                    dipole: homogeneous_dipole_field(axis, &g, &scenario.media.lower, scenario.frequency, &excitation)?,
                });
            }
        }
    }
    Ok(rows)
}

pub fn write_probe_csv<W: Write>(rows: &[ProbeRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let to_io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(PROBE_HEADER).map_err(to_io)?;
    for r in rows {
        w.write_record(r.fields()).map_err(to_io)?;
    }
    w.flush()?;
    Ok(())
}
