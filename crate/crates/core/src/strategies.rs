//! Single-user capacities of the coil-selection strategies, plus the
//! Monte Carlo reliability and multiplexing-gain estimators.
//!
//! Capacities are spectral efficiencies in bit/s/Hz: the noise density is
//! taken over a 1 Hz band. A coupling `m` between one transmit and one
//! receive coil gives SNR `|w m|^2 P / (4 r_c^2 n)`.

use crate::coupling::{coupling_from_kernel, random_frame_with, CouplingMatrix, TriAxisFrame};
use crate::error::{invalid, Result};
use crate::linalg::{frobenius, svd3, CMatrix3};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// `log2(1 + x)` through `ln_1p`, so low-SNR ratios keep full precision.
fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / std::f64::consts::LN_2
}

/// Convert a power level in dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    1e-3 * 10f64.powf(dbm / 10.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * (w / 1e-3).log10()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub angular_frequency: f64,
    /// Total transmit power P_t, W.
    pub transmit_power: f64,
    /// Coil loop resistance r_c, ohms.
    pub resistance: f64,
    /// Noise power density n, W/Hz.
    pub noise_density: f64,
}

impl LinkBudget {
    pub fn new(angular_frequency: f64, transmit_power: f64, resistance: f64, noise_density: f64) -> Result<Self> {
        let lb = LinkBudget {
            angular_frequency,
            transmit_power,
            resistance,
            noise_density,
        };
        for (name, v) in [
            ("angular frequency", angular_frequency),
            ("transmit power", transmit_power),
            ("resistance", resistance),
            ("noise density", noise_density),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(format!("{name} must be positive")));
            }
        }
        Ok(lb)
    }

    /// Budget from engineering units: frequency in Hz, power in dBm,
    /// noise in dBm/Hz.
    pub fn from_dbm(frequency: f64, power_dbm: f64, resistance: f64, noise_dbm_per_hz: f64) -> Result<Self> {
        LinkBudget::new(
            std::f64::consts::TAU * frequency,
            dbm_to_watts(power_dbm),
            resistance,
            dbm_to_watts(noise_dbm_per_hz),
        )
    }

    pub fn with_power(&self, transmit_power: f64) -> Self {
        LinkBudget {
            transmit_power,
            ..*self
        }
    }

    /// Per-watt SNR of a unit-henry coupling: `w^2 / (4 r_c^2 n)`.
    pub fn gain_per_watt(&self) -> f64 {
        self.angular_frequency.powi(2) / (4.0 * self.resistance.powi(2) * self.noise_density)
    }

    /// SNR of coupling magnitude `m` carrying the full transmit power.
    pub fn snr(&self, m: f64) -> f64 {
        self.gain_per_watt() * m * m * self.transmit_power
    }

    /// Transmit power at which coupling `m` reaches SNR `snr`.
    pub fn power_for_snr(&self, m: f64, snr: f64) -> f64 {
        snr / (self.gain_per_watt() * m * m)
    }
}

/// Outcome of one strategy on one channel draw.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyResult {
    pub capacity: f64,
    pub selected_tx: Vec<usize>,
    pub selected_rx: Vec<usize>,
    /// Power put on each transmit coil or eigen-channel, W.
    pub power_allocation: [f64; 3],
    /// `w^2 m*^2 P_t / (4 r_c^2 n)` for this channel.
    pub snr_proxy: f64,
}

/// `log2(1 + |w m|^2 P_t / (4 r_c^2 n))`
pub fn siso_capacity(m: Complex64, lb: &LinkBudget) -> f64 {
    log2_1p(lb.snr(m.norm()))
}

/// Power allocation maximizing `sum log2(1 + g_l p_l)` under `sum p_l = P`.
pub fn waterfill(gains: [f64; 3], total_power: f64) -> Result<[f64; 3]> {
    if gains.iter().any(|g| !(*g >= 0.0 && g.is_finite())) {
        return Err(invalid("water-filling gains must be finite and non-negative"));
    }
    if gains.iter().all(|&g| g == 0.0) {
        return Err(invalid("water-filling needs at least one positive gain"));
    }
    if !(total_power >= 0.0 && total_power.is_finite()) {
        return Err(invalid("water-filling power must be non-negative"));
    }
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| gains[j].partial_cmp(&gains[i]).unwrap_or(std::cmp::Ordering::Equal));
    // Active set = the k strongest channels; the water level is
    // (P + sum 1/g) / k and must exceed 1/g of every active channel.
    let mut level = 0.0;
    let mut active = 0;
    let mut inverse_sum = 0.0;
    for (k, &i) in order.iter().enumerate() {
        if gains[i] == 0.0 {
            break;
        }
        let candidate = (total_power + inverse_sum + 1.0 / gains[i]) / (k + 1) as f64;
        if candidate <= 1.0 / gains[i] {
            break;
        }
        inverse_sum += 1.0 / gains[i];
        level = candidate;
        active = k + 1;
    }
    let mut p = [0.0; 3];
    for &i in order.iter().take(active) {
        p[i] = (level - 1.0 / gains[i]).max(0.0);
    }
    Ok(p)
}

fn snr_proxy(c: &CouplingMatrix, lb: &LinkBudget) -> f64 {
    lb.snr(c.m_star)
}

/// Equal power on all transmit coils, no channel knowledge at the transmitter.
pub fn mimo_capacity_no_mii(c: &CouplingMatrix, lb: &LinkBudget) -> StrategyResult {
    let per_coil = lb.transmit_power / 3.0;
    let g = lb.gain_per_watt() * per_coil;
    let s = svd3(&c.m).singular_values;
    StrategyResult {
        capacity: s.iter().map(|x| log2_1p(g * x * x)).sum(),
        selected_tx: vec![0, 1, 2],
        selected_rx: vec![0, 1, 2],
        power_allocation: [per_coil; 3],
        snr_proxy: snr_proxy(c, lb),
    }
}

/// SVD beamforming with water-filling over the eigen-channels.
pub fn mimo_capacity_mii(c: &CouplingMatrix, lb: &LinkBudget) -> StrategyResult {
    let s = svd3(&c.m).singular_values;
    let gains = s.map(|x| lb.gain_per_watt() * x * x);
    let (capacity, power_allocation) = match waterfill(gains, lb.transmit_power) {
        Ok(p) => ((0..3).map(|l| log2_1p(gains[l] * p[l])).sum(), p),
        Err(_) => (0.0, [lb.transmit_power / 3.0; 3]),
    };
    StrategyResult {
        capacity,
        selected_tx: vec![0, 1, 2],
        selected_rx: vec![0, 1, 2],
        power_allocation,
        snr_proxy: snr_proxy(c, lb),
    }
}

/// `(p*, q*)`: transmit and receive coil of the strongest entry. Ties go to
/// the lowest `(p, q)` in lexicographic order.
pub fn select_siso_cs(c: &CouplingMatrix) -> (usize, usize) {
    let mut best = (0, 0);
    let mut best_mag = f64::MIN;
    for p in 0..3 {
        for q in 0..3 {
            let v = c.m[(q, p)].norm();
            if v > best_mag {
                best_mag = v;
                best = (p, q);
            }
        }
    }
    best
}

fn single_coil_allocation(p: usize, power: f64) -> [f64; 3] {
    let mut a = [0.0; 3];
    a[p] = power;
    a
}

/// Best single transmit/receive coil pair.
pub fn siso_cs_capacity(c: &CouplingMatrix, lb: &LinkBudget) -> StrategyResult {
    let (p, q) = select_siso_cs(c);
    StrategyResult {
        capacity: siso_capacity(c.m[(q, p)], lb),
        selected_tx: vec![p],
        selected_rx: vec![q],
        power_allocation: single_coil_allocation(p, lb.transmit_power),
        snr_proxy: snr_proxy(c, lb),
    }
}

fn column_energy(m: &CMatrix3, p: usize) -> f64 {
    (0..3).map(|q| m[(q, p)].norm_sqr()).sum()
}

fn row_energy(m: &CMatrix3, q: usize) -> f64 {
    (0..3).map(|p| m[(q, p)].norm_sqr()).sum()
}

fn argmax3(v: [f64; 3]) -> usize {
    let mut best = 0;
    for i in 1..3 {
        if v[i] > v[best] {
            best = i;
        }
    }
    best
}

/// One transmit coil, chosen for the largest receive-column energy, with
/// maximum-ratio combining over all three receive coils.
pub fn simo_cs_capacity(c: &CouplingMatrix, lb: &LinkBudget) -> StrategyResult {
    let p = argmax3([0, 1, 2].map(|p| column_energy(&c.m, p)));
    StrategyResult {
        capacity: log2_1p(lb.gain_per_watt() * lb.transmit_power * column_energy(&c.m, p)),
        selected_tx: vec![p],
        selected_rx: vec![0, 1, 2],
        power_allocation: single_coil_allocation(p, lb.transmit_power),
        snr_proxy: snr_proxy(c, lb),
    }
}

/// Receive on the coil with the strongest coupling row. With MII the
/// transmitter beamforms along the conjugate of that row at full power;
/// without it every transmit coil carries an independent signal at `P/3`.
pub fn miso_cs_capacity(c: &CouplingMatrix, lb: &LinkBudget, mii_available: bool) -> StrategyResult {
    let q = argmax3([0, 1, 2].map(|q| row_energy(&c.m, q)));
    let energy = row_energy(&c.m, q);
    let g = lb.gain_per_watt() * lb.transmit_power;
    let (capacity, power_allocation) = if mii_available {
        // |m . conj(m)/|m||^2 = |m|^2; the per-coil power follows the beam.
        let alloc = [0, 1, 2].map(|p| {
            if energy > 0.0 {
                lb.transmit_power * c.m[(q, p)].norm_sqr() / energy
            } else {
                lb.transmit_power / 3.0
            }
        });
        (log2_1p(g * energy), alloc)
    } else {
        (log2_1p(g / 3.0 * energy), [lb.transmit_power / 3.0; 3])
    };
    StrategyResult {
        capacity,
        selected_tx: vec![0, 1, 2],
        selected_rx: vec![q],
        power_allocation,
        snr_proxy: snr_proxy(c, lb),
    }
}

/// The single-user transmission schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// One unidirectional coil at each end, random orientations.
    Siso,
    SisoCs,
    SimoCs,
    MisoCsMii,
    MisoCsNoMii,
    MimoMii,
    MimoNoMii,
}

impl Strategy {
    pub const ALL: [Strategy; 7] = [
        Strategy::Siso,
        Strategy::SisoCs,
        Strategy::SimoCs,
        Strategy::MisoCsMii,
        Strategy::MisoCsNoMii,
        Strategy::MimoMii,
        Strategy::MimoNoMii,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Siso => "siso",
            Strategy::SisoCs => "siso_cs",
            Strategy::SimoCs => "simo_cs",
            Strategy::MisoCsMii => "miso_cs_mii",
            Strategy::MisoCsNoMii => "miso_cs_no_mii",
            Strategy::MimoMii => "mimo_mii",
            Strategy::MimoNoMii => "mimo_no_mii",
        }
    }

    pub fn from_name(name: &str) -> Option<Strategy> {
        Strategy::ALL.into_iter().find(|s| s.name() == name)
    }

    /// Capacity on a coupling matrix. Plain SISO uses the first coil of each
    /// frame, which is a uniformly distributed direction for Haar frames.
    pub fn evaluate(&self, c: &CouplingMatrix, lb: &LinkBudget) -> StrategyResult {
        match self {
            Strategy::Siso => StrategyResult {
                capacity: siso_capacity(c.m[(0, 0)], lb),
                selected_tx: vec![0],
                selected_rx: vec![0],
                power_allocation: single_coil_allocation(0, lb.transmit_power),
                snr_proxy: snr_proxy(c, lb),
            },
            Strategy::SisoCs => siso_cs_capacity(c, lb),
            Strategy::SimoCs => simo_cs_capacity(c, lb),
            Strategy::MisoCsMii => miso_cs_capacity(c, lb, true),
            Strategy::MisoCsNoMii => miso_cs_capacity(c, lb, false),
            Strategy::MimoMii => mimo_capacity_mii(c, lb),
            Strategy::MimoNoMii => mimo_capacity_no_mii(c, lb),
        }
    }
}

/// Random coil orientations for one Monte Carlo draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientationDraw {
    pub tx: TriAxisFrame,
    pub rx: TriAxisFrame,
}

/// Per-draw generator: the same `(seed, index)` always yields the same
/// stream, independent of scheduling.
pub fn draw_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn orientation_draw(seed: u64, index: u64) -> OrientationDraw {
    let mut rng = draw_rng(seed, index);
    let tx = random_frame_with(&mut rng);
    let rx = random_frame_with(&mut rng);
    OrientationDraw { tx, rx }
}

/// Coupling matrices of `draws` random orientation pairs, in draw order.
pub fn coupling_draws(kernel: &CMatrix3, draws: usize, seed: u64) -> Vec<CouplingMatrix> {
    (0..draws as u64)
        .into_par_iter()
        .map(|i| {
            let d = orientation_draw(seed, i);
            coupling_from_kernel(kernel, &d.tx, &d.rx)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReliabilityReport {
    pub min_capacity: f64,
    pub max_capacity: f64,
    /// `min / max`, or 0 when every draw has zero capacity.
    pub reliability: f64,
    pub draws: usize,
    pub argmin: usize,
    pub argmax: usize,
}

/// Reliability of a set of per-draw capacities.
pub fn reliability_of(capacities: &[f64]) -> ReliabilityReport {
    let mut r = ReliabilityReport {
        min_capacity: f64::INFINITY,
        max_capacity: f64::NEG_INFINITY,
        reliability: 0.0,
        draws: capacities.len(),
        argmin: 0,
        argmax: 0,
    };
    for (i, &c) in capacities.iter().enumerate() {
        if c < r.min_capacity {
            r.min_capacity = c;
            r.argmin = i;
        }
        if c > r.max_capacity {
            r.max_capacity = c;
            r.argmax = i;
        }
    }
    if r.max_capacity > 0.0 {
        r.reliability = (r.min_capacity / r.max_capacity).clamp(0.0, 1.0);
    }
    r
}

/// Monte Carlo reliability of `strategy` at fixed positions.
pub fn reliability(
    strategy: Strategy,
    kernel: &CMatrix3,
    lb: &LinkBudget,
    draws: usize,
    seed: u64,
) -> Result<ReliabilityReport> {
    if draws < 100 {
        return Err(invalid("reliability needs at least 100 draws"));
    }
    let caps: Vec<f64> = coupling_draws(kernel, draws, seed)
        .par_iter()
        .map(|c| strategy.evaluate(c, lb).capacity)
        .collect();
    Ok(reliability_of(&caps))
}

/// Slope of capacity against `log2(snr)` between the two largest points.
pub fn multiplexing_gain_from_points(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(invalid("multiplexing gain needs at least two SNR points"));
    }
    let mut p = points.to_vec();
    p.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    let (s1, c1) = p[p.len() - 2];
    let (s2, c2) = p[p.len() - 1];
    if !(s2 > s1 && s1 > 0.0) {
        return Err(invalid("SNR points must be distinct and positive"));
    }
    Ok((c2 - c1) / (s2 / s1).log2())
}

/// Multiplexing gain of `strategy` from its mean capacity over random
/// orientations at the given SNR proxies `w^2 m*^2 P / (4 r_c^2 n)`.
pub fn multiplexing_gain_estimate(
    strategy: Strategy,
    kernel: &CMatrix3,
    lb: &LinkBudget,
    snr_points: &[f64],
    draws: usize,
    seed: u64,
) -> Result<f64> {
    if snr_points.len() < 2 || snr_points.iter().any(|&s| s < 1e6) {
        return Err(invalid("multiplexing gain needs two or more SNR proxies of at least 1e6"));
    }
    let couplings = coupling_draws(kernel, draws.max(1), seed);
    let m_star = couplings[0].m_star;
    let points: Vec<(f64, f64)> = snr_points
        .iter()
        .map(|&snr| {
            let budget = lb.with_power(lb.power_for_snr(m_star, snr));
            let mean = couplings.iter().map(|c| strategy.evaluate(c, &budget).capacity).sum::<f64>()
                / couplings.len() as f64;
            (snr, mean)
        })
        .collect();
    multiplexing_gain_from_points(&points)
}

/// `||M||_F / m*`: 1 for a rank-one kernel, up to sqrt(3) for an isotropic one.
pub fn rank_one_defect(kernel: &CMatrix3) -> f64 {
    frobenius(kernel) / svd3(kernel).singular_values[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CVector3;

    fn lb() -> LinkBudget {
        LinkBudget::from_dbm(1e6, 0.0, 0.5, -140.0).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rank_one(sigma: f64) -> CouplingMatrix {
        let w = CVector3::new(c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0));
        let v = CVector3::new(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
        CouplingMatrix::from_matrix(w * v.transpose() * c(sigma, 0.0))
    }

    #[test]
    fn noise_conversion() {
        assert!((dbm_to_watts(-140.0) - 1e-17).abs() < 1e-30);
        assert!((watts_to_dbm(1.0) - 30.0).abs() < 1e-12);
    }

    #[test]
    fn siso_zero_and_doubling() {
        assert_eq!(siso_capacity(c(0.0, 0.0), &lb()), 0.0);
        let m = c(1e-9, 2e-9);
        let a = siso_capacity(m, &lb());
        let b = siso_capacity(m, &lb().with_power(2.0 * lb().transmit_power));
        assert!(lb().snr(m.norm()) > 1e6);
        assert!((b - a - 1.0).abs() < 1e-3);
    }

    #[test]
    fn waterfill_examples() {
        assert_eq!(waterfill([3.0, 0.0, 0.0], 2.0).unwrap(), [2.0, 0.0, 0.0]);
        let p = waterfill([5.0, 5.0, 5.0], 3.0).unwrap();
        assert!(p.iter().all(|x| (x - 1.0).abs() < 1e-15));
        let p = waterfill([2.0, 1.0, 0.0], 1.0).unwrap();
        assert!((p[0] - 0.75).abs() < 1e-15 && (p[1] - 0.25).abs() < 1e-15 && p[2] == 0.0);
        assert!(waterfill([0.0; 3], 1.0).is_err());
    }

    #[test]
    fn waterfill_beats_grid_search() {
        let gains = [2.0, 1.0, 0.3];
        for &total in &[0.1, 1.0, 5.0] {
            let best = waterfill(gains, total).unwrap();
            let obj = |p: [f64; 3]| (0..3).map(|l| (1.0 + gains[l] * p[l]).log2()).sum::<f64>();
            let n = 200;
            let mut grid_best = f64::MIN;
            for i in 0..=n {
                for j in 0..=(n - i) {
                    let p = [total * i as f64 / n as f64, total * j as f64 / n as f64, total * (n - i - j) as f64 / n as f64];
                    grid_best = grid_best.max(obj(p));
                }
            }
            assert!(obj(best) >= grid_best - 1e-12);
            assert!((best.iter().sum::<f64>() - total).abs() < 1e-12 * total);
        }
    }

    #[test]
    fn rank_one_mimo_mii_equals_optimal_siso() {
        let m = rank_one(1e-13);
        let r = mimo_capacity_mii(&m, &lb());
        assert!((r.capacity - siso_capacity(c(1e-13, 0.0), &lb())).abs() < 1e-12);
        assert_eq!(r.power_allocation[1], 0.0);
    }

    #[test]
    fn low_snr_mimo_no_mii_is_a_third_of_optimal() {
        let m = rank_one(1.0);
        let budget = lb().with_power(lb().power_for_snr(1.0, 1e-3));
        let ratio = mimo_capacity_no_mii(&m, &budget).capacity / siso_capacity(c(1.0, 0.0), &budget);
        assert!((ratio - 1.0 / 3.0).abs() < 0.02 / 3.0);
    }

    #[test]
    fn siso_cs_ties_and_single_entry() {
        let mut m = CMatrix3::zeros();
        m[(2, 1)] = c(0.0, 3.0);
        assert_eq!(select_siso_cs(&CouplingMatrix::from_matrix(m)), (1, 2));
        let all = CMatrix3::from_element(c(1.0, 0.0));
        assert_eq!(select_siso_cs(&CouplingMatrix::from_matrix(all)), (0, 0));
    }

    #[test]
    fn rank_one_simo_equals_optimal_siso() {
        let m = rank_one(2e-12);
        let a = simo_cs_capacity(&m, &lb()).capacity;
        let b = siso_capacity(c(2e-12, 0.0), &lb());
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn allocations_sum_to_power() {
        let m = CouplingMatrix::from_matrix(CMatrix3::from_fn(|r, k| c((r + 2 * k) as f64 * 1e-12, 1e-12)));
        for s in Strategy::ALL {
            let r = s.evaluate(&m, &lb());
            let sum: f64 = r.power_allocation.iter().sum();
            assert!((sum - lb().transmit_power).abs() <= 1e-9 * lb().transmit_power, "{s:?}");
            assert!(r.capacity >= 0.0);
        }
    }

    #[test]
    fn reliability_report_edges() {
        let r = reliability_of(&[0.0, 0.0]);
        assert_eq!(r.reliability, 0.0);
        let r = reliability_of(&[2.0, 1.0, 4.0]);
        assert_eq!((r.argmin, r.argmax), (1, 2));
        assert!((r.reliability - 0.25).abs() < 1e-15);
    }

    #[test]
    fn draws_are_schedule_independent() {
        let a = orientation_draw(9, 17);
        let b = orientation_draw(9, 17);
        assert_eq!(a, b);
        assert_ne!(a, orientation_draw(9, 18));
        assert_ne!(a, orientation_draw(10, 17));
    }

    #[test]
    fn multiplexing_gain_from_two_points() {
        let g = multiplexing_gain_from_points(&[(1e8, 30.0), (1e6, 10.0)]).unwrap();
        assert!((g - 20.0 / (100f64).log2()).abs() < 1e-12);
        assert!(multiplexing_gain_from_points(&[(1e6, 1.0)]).is_err());
    }
}
