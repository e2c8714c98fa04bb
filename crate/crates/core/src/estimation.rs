//! Pilot-based estimation of the coupling matrix.
//!
//! The transmitter drives three orthogonal current vectors in three time
//! slots. Each receive loop is closed over its resistance `r_c`, so by
//! Kirchhoff's voltage law it carries `i_q = -(j w / r_c) (M i_p)_q + n / r_c`.
//! Inverting the pilot matrix recovers `M` row by row, independently at
//! every receiver. Coupling between receivers is neglected.

use crate::coupling::CouplingMatrix;
use crate::em::J;
use crate::error::{invalid, Error, Result};
use crate::linalg::{bilinear, svd3, CMatrix3, CVector3};
use crate::strategies::{draw_rng, waterfill, LinkBudget, Strategy};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Transmit currents of the three pilot slots, A; column `t` is slot `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PilotBlock {
    pub currents: CMatrix3,
}

impl PilotBlock {
    pub fn slot(&self, t: usize) -> CVector3 {
        self.currents.column(t).into_owned()
    }

    /// `1/2 r_c ||i(t)||^2` for each slot, W.
    pub fn slot_powers(&self, r_c: f64) -> [f64; 3] {
        [0, 1, 2].map(|t| 0.5 * r_c * self.slot(t).norm_squared())
    }

    /// Ratio of largest to smallest singular value.
    pub fn condition_number(&self) -> f64 {
        let s = svd3(&self.currents).singular_values;
        s[0] / s[2]
    }
}

/// Gram-Schmidt on three complex Gaussian vectors, each scaled so one slot
/// dissipates `power` in the transmit coil resistance.
pub fn orthogonal_pilot_currents(power: f64, r_c: f64, seed: u64) -> Result<PilotBlock> {
    if !(power > 0.0 && power.is_finite()) {
        return Err(invalid("pilot power must be positive"));
    }
    if !(r_c > 0.0 && r_c.is_finite()) {
        return Err(invalid("coil resistance must be positive"));
    }
    let mut rng = draw_rng(seed, u64::MAX);
    let amplitude = (2.0 * power / r_c).sqrt();
    loop {
        let mut basis: Vec<CVector3> = Vec::with_capacity(3);
        for _ in 0..3 {
            let mut v = CVector3::from_fn(|_, _| complex_gaussian(&mut rng, 1.0));
            for b in &basis {
                let proj = b.dotc(&v);
                v -= b * proj;
            }
            let n = v.norm();
            if n < 1e-6 {
                break;
            }
            basis.push(v / Complex64::new(n, 0.0));
        }
        if basis.len() == 3 {
            let currents = CMatrix3::from_columns(&basis) * Complex64::new(amplitude, 0.0);
            return Ok(PilotBlock { currents });
        }
    }
}

/// Circularly symmetric complex Gaussian with `E|z|^2 = variance`.
fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    Complex64::new(s * rng.sample::<f64, _>(StandardNormal), s * rng.sample::<f64, _>(StandardNormal))
}

/// Loop currents observed at every receiver over the three pilot slots.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    /// Per receiver: entry `(q, t)` is coil `q` in slot `t`, A.
    pub loop_currents: Vec<CMatrix3>,
    /// Noise voltage variance per coil per slot, V^2 (1 Hz band).
    pub noise_variance: f64,
}

/// Induced loop currents for every receiver channel under the pilots.
pub fn simulate_measurement(
    channels: &[CouplingMatrix],
    pilots: &PilotBlock,
    noise_density: f64,
    angular_frequency: f64,
    r_c: f64,
    seed: u64,
) -> Result<MeasurementSet> {
    if !(noise_density >= 0.0 && noise_density.is_finite()) {
        return Err(invalid("noise density must be non-negative"));
    }
    if !(angular_frequency > 0.0 && r_c > 0.0) {
        return Err(invalid("frequency and resistance must be positive"));
    }
    let scale = -J * angular_frequency / r_c;
    let loop_currents = channels
        .iter()
        .enumerate()
        .map(|(l, c)| {
            let mut rng = draw_rng(seed, l as u64);
            let noise = CMatrix3::from_fn(|_, _| complex_gaussian(&mut rng, noise_density) / r_c);
            c.m * pilots.currents * scale + noise
        })
        .collect();
    Ok(MeasurementSet {
        loop_currents,
        noise_variance: noise_density,
    })
}

/// `M = (j / w) r_c I_l I_p^{-1}` for every receiver.
pub fn estimate_mii(
    meas: &MeasurementSet,
    pilots: &PilotBlock,
    r_c: f64,
    angular_frequency: f64,
) -> Result<Vec<CouplingMatrix>> {
    let s = svd3(&pilots.currents).singular_values;
    if !(s[2] > 1e-12 * s[0]) {
        return Err(invalid("pilot matrix is singular"));
    }
    let inverse = pilots
        .currents
        .try_inverse()
        .ok_or_else(|| invalid("pilot matrix is singular"))?;
    let scale = J * r_c / angular_frequency;
    Ok(meas
        .loop_currents
        .iter()
        .map(|i_l| CouplingMatrix::from_matrix(i_l * inverse * scale))
        .collect())
}

/// `||M_hat - M||_F / ||M||_F`.
pub fn estimation_error(truth: &CMatrix3, estimate: &CMatrix3) -> Result<f64> {
    let reference = truth.norm();
    if reference == 0.0 {
        return Err(Error::UndefinedError);
    }
    Ok((estimate - truth).norm() / reference)
}

/// Mutual inductances left to estimate with `receivers` tri-axis receivers.
///
/// Pair count of `3c + 3` coils, minus the couplings inside each tri-axis
/// set and between receivers; equals `9c`.
pub fn unknown_count(receivers: usize) -> usize {
    let c = receivers;
    let pairs = (3 * c + 2) * (3 * c + 3) / 2;
    let between_receivers = 9 * c * c.saturating_sub(1) / 2;
    pairs - 3 * (c + 1) - between_receivers
}

/// Capacity when every decision is made from `estimate` but the signal
/// travels through `truth`.
///
/// Selections, beam directions and power allocation use the estimate; the
/// receiver combines with its own estimate as well. Strategies that need no
/// channel knowledge are unaffected.
pub fn mismatched_capacity(strategy: Strategy, truth: &CouplingMatrix, estimate: &CouplingMatrix, lb: &LinkBudget) -> f64 {
    let g = lb.gain_per_watt();
    let p = lb.transmit_power;
    let log2_1p = |x: f64| x.ln_1p() / std::f64::consts::LN_2;
    let m = &truth.m;
    let e = &estimate.m;
    match strategy {
        Strategy::Siso | Strategy::MimoNoMii => strategy.evaluate(truth, lb).capacity,
        Strategy::SisoCs => {
            let (tx, rx) = crate::strategies::select_siso_cs(estimate);
            log2_1p(g * p * m[(rx, tx)].norm_sqr())
        }
        Strategy::SimoCs => {
            let tx = estimate.selected_column();
            let combiner = e.column(tx).into_owned();
            log2_1p(g * p * matched_gain(&combiner, &m.column(tx).into_owned()))
        }
        Strategy::MisoCsMii => {
            let rx = estimate.selected_row();
            let beam = e.row(rx).transpose();
            log2_1p(g * p * matched_gain(&beam, &m.row(rx).transpose()))
        }
        Strategy::MisoCsNoMii => {
            let rx = estimate.selected_row();
            log2_1p(g * p / 3.0 * m.row(rx).norm_squared())
        }
        Strategy::MimoMii => {
            let svd = svd3(e);
            let gains = svd.singular_values.map(|s| g * s * s);
            let alloc = waterfill(gains, p).unwrap_or([p / 3.0; 3]);
            let q = svd.v * CMatrix3::from_diagonal(&alloc.map(|a| Complex64::new(a, 0.0)).into()) * svd.v.adjoint();
            let h = CMatrix3::identity() + m * q * m.adjoint() * Complex64::new(g, 0.0);
            h.determinant().re.max(1.0).log2()
        }
    }
}

/// `|a^H b|^2 / ||a||^2`: received power fraction of a matched filter
/// built from `a` applied to channel `b`.
fn matched_gain(a: &CVector3, b: &CVector3) -> f64 {
    let n = a.norm_squared();
    if n == 0.0 {
        return 0.0;
    }
    bilinear(&a.map(|z| z.conj()), b).norm_sqr() / n
}

/// Column and row choice of the single-coil-side strategies.
trait Selection {
    fn selected_column(&self) -> usize;
    fn selected_row(&self) -> usize;
}

impl Selection for CouplingMatrix {
    fn selected_column(&self) -> usize {
        crate::strategies::simo_cs_capacity(self, &unit_budget()).selected_tx[0]
    }

    fn selected_row(&self) -> usize {
        crate::strategies::miso_cs_capacity(self, &unit_budget(), false).selected_rx[0]
    }
}

fn unit_budget() -> LinkBudget {
    LinkBudget::new(1.0, 1.0, 1.0, 1.0).expect("valid unit budget")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategies::dbm_to_watts;

    const W: f64 = 2.0 * std::f64::consts::PI * 1e6;
    const R: f64 = 0.5;

    fn channel(seed: u64) -> CouplingMatrix {
        let mut rng = draw_rng(seed, 0);
        CouplingMatrix::from_matrix(CMatrix3::from_fn(|_, _| complex_gaussian(&mut rng, 1.0) * 1e-11))
    }

    #[test]
    fn pilots_orthogonal_equal_power() {
        for seed in 0..50 {
            let p = orthogonal_pilot_currents(1e-3, R, seed).unwrap();
            assert!((p.condition_number() - 1.0).abs() < 1e-10);
            for w in p.slot_powers(R) {
                assert!((w - 1e-3).abs() < 1e-12 * 1e-3 * 1e3);
            }
        }
        assert!(orthogonal_pilot_currents(0.0, R, 1).is_err());
    }

    #[test]
    fn noiseless_round_trip() {
        let chans = [channel(1), channel(2), channel(3)];
        let pilots = orthogonal_pilot_currents(1e-4, R, 9).unwrap();
        let meas = simulate_measurement(&chans, &pilots, 0.0, W, R, 4).unwrap();
        let est = estimate_mii(&meas, &pilots, R, W).unwrap();
        assert_eq!(est.len() * 9, unknown_count(3));
        for (c, e) in chans.iter().zip(&est) {
            assert!(estimation_error(&c.m, &e.m).unwrap() < 1e-10);
        }
    }

    #[test]
    fn noiseless_signal_is_minus_j_w_over_r() {
        let c = channel(5);
        let pilots = orthogonal_pilot_currents(1e-4, R, 2).unwrap();
        let meas = simulate_measurement(&[c], &pilots, 0.0, W, R, 0).unwrap();
        let want = c.m * pilots.currents * (-J * W / R);
        assert!((meas.loop_currents[0] - want).norm() <= 1e-15 * want.norm());
    }

    #[test]
    fn zero_channel_gives_scaled_noise() {
        let zero = CouplingMatrix::from_matrix(CMatrix3::zeros());
        let pilots = orthogonal_pilot_currents(1.0, R, 2).unwrap();
        let n = 4.0;
        let mut power = 0.0;
        let trials = 2000;
        for s in 0..trials {
            let meas = simulate_measurement(&[zero], &pilots, n, W, R, s).unwrap();
            power += meas.loop_currents[0].norm_squared();
        }
        let mean = power / (9.0 * trials as f64);
        assert!((mean - n / (R * R)).abs() < 0.05 * n / (R * R), "{mean}");
    }

    #[test]
    fn singular_pilots_rejected() {
        let pilots = PilotBlock { currents: CMatrix3::from_element(Complex64::new(1.0, 0.0)) };
        let meas = MeasurementSet { loop_currents: vec![CMatrix3::zeros()], noise_variance: 0.0 };
        assert!(matches!(estimate_mii(&meas, &pilots, R, W), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn error_metric_edges() {
        let m = channel(7).m;
        assert_eq!(estimation_error(&m, &m).unwrap(), 0.0);
        assert!((estimation_error(&m, &(m * Complex64::new(2.0, 0.0))).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(estimation_error(&CMatrix3::zeros(), &m), Err(Error::UndefinedError));
    }

    #[test]
    fn unknown_count_identity() {
        for c in 1..=3 {
            assert_eq!(unknown_count(c), 9 * c);
        }
    }

    #[test]
    fn error_falls_with_pilot_power() {
        let c = channel(11);
        let n = dbm_to_watts(-140.0);
        let mut last = f64::INFINITY;
        for step in 0..5 {
            let p = dbm_to_watts(-60.0 + 10.0 * step as f64);
            let mut sum = 0.0;
            for t in 0..200 {
                let pilots = orthogonal_pilot_currents(p, R, t).unwrap();
                let meas = simulate_measurement(&[c], &pilots, n, W, R, 1000 + t).unwrap();
                let est = estimate_mii(&meas, &pilots, R, W).unwrap();
                sum += estimation_error(&c.m, &est[0].m).unwrap();
            }
            let mean = sum / 200.0;
            assert!(mean < last, "step {step}: {mean} >= {last}");
            last = mean;
        }
    }

    #[test]
    fn perfect_estimate_matches_strategy() {
        let c = channel(3);
        let lb = LinkBudget::from_dbm(1e6, 0.0, R, -140.0).unwrap();
        for s in Strategy::ALL {
            let a = mismatched_capacity(s, &c, &c, &lb);
            let b = s.evaluate(&c, &lb).capacity;
            assert!((a - b).abs() < 1e-9 * b.max(1.0), "{}: {a} vs {b}", s.name());
        }
    }

    #[test]
    fn bad_estimate_never_helps() {
        let c = channel(3);
        let lb = LinkBudget::from_dbm(1e6, 0.0, R, -140.0).unwrap();
        for seed in 0..20 {
            let e = channel(100 + seed);
            for s in Strategy::ALL {
                assert!(mismatched_capacity(s, &c, &e, &lb) <= s.evaluate(&c, &lb).capacity + 1e-9);
            }
        }
    }
}
