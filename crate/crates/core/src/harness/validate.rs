//! Invariant checks run by the `validate` subcommand.

use super::{kernels, Scenario};
use crate::coupling::{coupling_from_kernel, coupling_kernel};
use crate::em::{field_matrix, spectral_fields, Geometry, homogeneous_dipole_field, Axis, FieldModel, MediaPair, QuadratureSpec};
use crate::error::Result;
use crate::estimation::{estimate_mii, estimation_error, orthogonal_pilot_currents, simulate_measurement};
use crate::linalg::CVector3;
use crate::multiuser::{max_leakage, nullspace_precoders, select_receive_coil, UserChannel};
use crate::strategies::{coupling_draws, orientation_draw, select_siso_cs, simo_cs_capacity, waterfill};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Check { name, passed, detail }
    }
}

/// Run every check on the scenario's first receiver geometry.
pub fn validate_scenario(scenario: &Scenario, draws: usize) -> Result<Vec<Check>> {
    scenario.validate()?;
    let draws = draws.max(3);
    let kernel = kernels(scenario)?[0];
    let couplings = coupling_draws(&kernel, draws, scenario.seed);
    let mut checks = Vec::new();

    let f0 = couplings[0].frobenius();
    let spread = couplings
        .iter()
        .map(|c| (c.frobenius() - f0).abs() / f0)
        .fold(0.0, f64::max);
    checks.push(Check::new(
        "frobenius_invariance",
        spread < 1e-10,
        format!("max relative spread {spread:.2e} over {draws} frame pairs"),
    ));

    let mut entry_violations = 0;
    let mut column_violations = 0;
    for c in &couplings {
        let f = c.frobenius();
        let (p, q) = select_siso_cs(c);
        let best = c.entry(q, p).norm();
        if best < f / 3.0 * (1.0 - 1e-12) || best > c.m_star * (1.0 + 1e-12) {
            entry_violations += 1;
        }
        let tx = simo_cs_capacity(c, &scenario.link_budget(0.0)?).selected_tx[0];
        let energy: f64 = (0..3).map(|r| c.entry(r, tx).norm_sqr()).sum();
        if energy < f * f / 3.0 * (1.0 - 1e-12) || energy > c.m_star * c.m_star * (1.0 + 1e-12) {
            column_violations += 1;
        }
    }
    checks.push(Check::new(
        "best_entry_bounds",
        entry_violations == 0,
        format!("{entry_violations} violations of |M|_F/3 <= |m_pq| <= m*"),
    ));
    checks.push(Check::new(
        "best_column_bounds",
        column_violations == 0,
        format!("{column_violations} violations of |M|_F^2/3 <= column energy <= m*^2"),
    ));

    let mut leakage = 0.0f64;
    for i in 0..draws.min(500) {
        let users: Vec<UserChannel> = (0..3)
            .map(|u| {
                let d = orientation_draw(scenario.seed.wrapping_add(u as u64 + 1), i as u64);
                UserChannel {
                    id: u,
                    m: coupling_from_kernel(&kernel, &d.tx, &d.rx).m,
                }
            })
            .collect();
        let rows: Vec<CVector3> = users.iter().map(|u| u.row(select_receive_coil(u))).collect();
        let set = nullspace_precoders(&rows, 1.0)?;
        if !set.has_warning() {
            leakage = leakage.max(max_leakage(&rows, &set));
        }
    }
    checks.push(Check::new(
        "nullspace_leakage",
        leakage < 1e-10,
        format!("max cross-user leakage {leakage:.2e}"),
    ));

    let lb = scenario.link_budget(0.0)?;
    let pilots = orthogonal_pilot_currents(lb.transmit_power, scenario.coil.resistance, scenario.seed)?;
    let meas = simulate_measurement(&couplings[..3], &pilots, 0.0, lb.angular_frequency, scenario.coil.resistance, scenario.seed)?;
    let est = estimate_mii(&meas, &pilots, scenario.coil.resistance, lb.angular_frequency)?;
    let mut round_trip = 0.0f64;
    for (c, e) in couplings.iter().zip(&est) {
        round_trip = round_trip.max(estimation_error(&c.m, &e.m)?);
    }
    checks.push(Check::new(
        "estimation_round_trip",
        round_trip < 1e-10,
        format!("noiseless relative error {round_trip:.2e}"),
    ));

    let alloc = waterfill([3.0, 1.0, 0.25], 2.0)?;
    let total: f64 = alloc.iter().sum();
    checks.push(Check::new(
        "waterfill_power",
        (total - 2.0).abs() < 1e-12,
        format!("allocated {total} of 2 W"),
    ));

    let g = scenario.geometry(0)?;
    let spec = match scenario.model {
        FieldModel::Exact(q) => q,
        FieldModel::Simplified => QuadratureSpec::default(),
    };
    let homogeneous = MediaPair::homogeneous(scenario.media.lower);
    let excitation = scenario.coil.excitation();
    let probe = if g.height() == 0.0 {
        Geometry::new(g.tx_depth, g.rx_depth + 0.5, g.range, g.azimuth)?
    } else {
        g
    };
    let numeric = spectral_fields(&probe, &homogeneous, scenario.frequency, &excitation, &spec)?;
    let mut worst = 0.0f64;
    for axis in Axis::ALL {
        let h = numeric[axis.index()];
        let d = homogeneous_dipole_field(axis, &probe, &scenario.media.lower, scenario.frequency, &excitation)?;
        let diff = (h.rho - d.rho).norm().hypot((h.phi - d.phi).norm()).hypot((h.z - d.z).norm());
        worst = worst.max(diff / d.norm());
    }
    checks.push(Check::new(
        "homogeneous_reduction",
        worst < 1e-2,
        format!("numerical spectral integral vs unbounded dipole, max relative difference {worst:.2e}"),
    ));

    if let FieldModel::Exact(_) = scenario.model {
        let forward = kernel;
        let back = field_matrix(&g.reversed(), &scenario.media, scenario.frequency, &excitation, &scenario.model)?;
        let back = coupling_kernel(&back, &scenario.coil);
        let r = (back - forward.transpose()).norm() / forward.norm();
        checks.push(Check::new(
            "reciprocity",
            r < 1e-5,
            format!("|K(reversed) - K^T| / |K| = {r:.2e}"),
        ));
    }
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_pass() {
        let checks = validate_scenario(&Scenario::default(), 200).unwrap();
        assert_eq!(checks.len(), 8);
        for c in &checks {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
