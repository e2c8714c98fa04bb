//! Monte Carlo experiments over a scenario and their CSV output.
//!
//! All experiments reuse the same orientation draws at every power point,
//! so curves differ only through power. Results depend on the scenario and
//! seed alone, never on the number of worker threads.

mod probe;
mod scenario;
mod validate;

pub use probe::{field_probe, write_probe_csv, ProbeRow, PROBE_HEADER};
pub use scenario::{default_receiver, load_scenario, parse_scenario, Position, PowerSweep, Scenario, MAX_RECEIVERS};
pub use validate::{validate_scenario, Check};

use crate::coupling::{coupling_kernel, CouplingMatrix};
use crate::em::field_matrix;
use crate::error::{invalid, Error, Result};
use crate::estimation::{estimate_mii, estimation_error, mismatched_capacity, orthogonal_pilot_currents, simulate_measurement};
use crate::linalg::CMatrix3;
use crate::multiuser::multiuser_draws;
use crate::strategies::{coupling_draws, reliability_of, LinkBudget, ReliabilityReport, Strategy};
use rayon::prelude::*;
use std::io::Write;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "MI_SIM_THREADS";

pub const CSV_HEADER: [&str; 9] = [
    "experiment",
    "strategy",
    "power_dbm",
    "draw",
    "capacity_bphz",
    "min_c",
    "max_c",
    "reliability",
    "est_error",
];

/// Strategies whose decisions depend on the coupling estimate.
pub const ESTIMATION_STRATEGIES: [Strategy; 4] = [Strategy::SisoCs, Strategy::SimoCs, Strategy::MisoCsMii, Strategy::MimoMii];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    /// Best-orientation capacity of every strategy.
    Fig3Upper,
    /// Worst-orientation capacity of every strategy.
    Fig4Lower,
    Fig5Reliability,
    /// Per-receiver reliability under nullspace precoding.
    Fig6Multiuser,
    /// Reliability with perfect and with pilot-estimated coupling.
    Fig7Estimation,
}

impl Experiment {
    pub const ALL: [Experiment; 5] = [
        Experiment::Fig3Upper,
        Experiment::Fig4Lower,
        Experiment::Fig5Reliability,
        Experiment::Fig6Multiuser,
        Experiment::Fig7Estimation,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Fig3Upper => "fig3_upper",
            Experiment::Fig4Lower => "fig4_lower",
            Experiment::Fig5Reliability => "fig5_reliability",
            Experiment::Fig6Multiuser => "fig6_multiuser",
            Experiment::Fig7Estimation => "fig7_estimation",
        }
    }

    pub fn from_name(name: &str) -> Option<Experiment> {
        Experiment::ALL.into_iter().find(|e| e.name() == name)
    }
}

/// One CSV line. Empty optionals are written as empty fields.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment: Experiment,
    pub strategy: String,
    pub power_dbm: f64,
    pub draw: Option<usize>,
    pub capacity: Option<f64>,
    pub min_c: Option<f64>,
    pub max_c: Option<f64>,
    pub reliability: Option<f64>,
    pub est_error: Option<f64>,
}

impl ResultRow {
    fn summary(experiment: Experiment, strategy: String, power_dbm: f64, r: &ReliabilityReport) -> Self {
        ResultRow {
            experiment,
            strategy,
            power_dbm,
            draw: None,
            capacity: None,
            min_c: Some(r.min_capacity),
            max_c: Some(r.max_capacity),
            reliability: Some(r.reliability),
            est_error: None,
        }
    }

    pub fn fields(&self) -> [String; 9] {
        fn opt<T: ToString>(v: Option<T>) -> String {
            v.map(|x| x.to_string()).unwrap_or_default()
        }
        [
            self.experiment.name().to_string(),
            self.strategy.clone(),
            self.power_dbm.to_string(),
            opt(self.draw),
            opt(self.capacity),
            opt(self.min_c),
            opt(self.max_c),
            opt(self.reliability),
            opt(self.est_error),
        ]
    }
}

pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let to_io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(CSV_HEADER).map_err(to_io)?;
    for r in rows {
        w.write_record(r.fields()).map_err(to_io)?;
    }
    w.flush()?;
    Ok(())
}

/// Coupling kernel of every receiver, H.
pub fn kernels(scenario: &Scenario) -> Result<Vec<CMatrix3>> {
    (0..scenario.receivers.len())
        .map(|i| {
            let g = scenario.geometry(i)?;
            let fm = field_matrix(&g, &scenario.media, scenario.frequency, &scenario.coil.excitation(), &scenario.model)?;
            Ok(coupling_kernel(&fm, &scenario.coil))
        })
        .collect()
}

/// Worker count from `MI_SIM_THREADS`, if set.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(invalid(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        },
    }
}

/// Run on a dedicated pool of `threads` workers, or the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| invalid(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

pub fn run_experiment(experiment: Experiment, scenario: &Scenario) -> Result<Vec<ResultRow>> {
    scenario.validate()?;
    let kernels = kernels(scenario)?;
    let powers = scenario.sweep.points();
    match experiment {
        Experiment::Fig3Upper | Experiment::Fig4Lower | Experiment::Fig5Reliability => {
            single_user(experiment, scenario, &kernels[0], &powers)
        }
        Experiment::Fig6Multiuser => {
            if kernels.len() < 2 {
                return Err(invalid("fig6_multiuser needs 2 or 3 receivers"));
            }
            multiuser(scenario, &kernels, &powers)
        }
        Experiment::Fig7Estimation => estimation(scenario, &kernels[0], &powers),
    }
}

fn budgets(scenario: &Scenario, powers: &[f64]) -> Result<Vec<LinkBudget>> {
    powers.iter().map(|&p| scenario.link_budget(p)).collect()
}

fn single_user(experiment: Experiment, scenario: &Scenario, kernel: &CMatrix3, powers: &[f64]) -> Result<Vec<ResultRow>> {
    let couplings = coupling_draws(kernel, scenario.draws, scenario.seed);
    let mut rows = Vec::new();
    for (&power, lb) in powers.iter().zip(budgets(scenario, powers)?) {
        for strategy in Strategy::ALL {
            let caps: Vec<f64> = couplings.par_iter().map(|c| strategy.evaluate(c, &lb).capacity).collect();
            let r = reliability_of(&caps);
            let mut row = ResultRow::summary(experiment, strategy.name().to_string(), power, &r);
            match experiment {
                Experiment::Fig3Upper => {
                    row.draw = Some(r.argmax);
                    row.capacity = Some(r.max_capacity);
                }
                Experiment::Fig4Lower => {
                    row.draw = Some(r.argmin);
                    row.capacity = Some(r.min_capacity);
                }
                _ => {}
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Strategy label of receiver `i` in the multiuser experiment.
pub fn user_label(i: usize) -> String {
    format!("nullspace_user{i}")
}

fn multiuser(scenario: &Scenario, kernels: &[CMatrix3], powers: &[f64]) -> Result<Vec<ResultRow>> {
    let mut rows = Vec::new();
    for (&power, lb) in powers.iter().zip(budgets(scenario, powers)?) {
        let per_draw = multiuser_draws(kernels, &lb, scenario.draws, scenario.seed)?;
        for (i, r) in crate::multiuser::multiuser_reliability(&per_draw).iter().enumerate() {
            rows.push(ResultRow::summary(Experiment::Fig6Multiuser, user_label(i), power, r));
        }
    }
    Ok(rows)
}

/// Strategy label of a strategy run on estimated coupling.
pub fn estimated_label(s: Strategy) -> String {
    format!("{}_estimated", s.name())
}

/// Seed of the pilots and measurement noise of one draw.
pub fn estimation_seed(seed: u64, draw: usize) -> u64 {
    // splitmix64 finalizer keeps neighbouring draws decorrelated.
    let mut z = seed ^ 0x6a09_e667_f3bc_c909 ^ (draw as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Pilot estimate of one draw's coupling at the given transmit power; the
/// pilots use the same power as the data.
pub fn estimate_draw(scenario: &Scenario, truth: &CouplingMatrix, lb: &LinkBudget, draw: usize) -> Result<CouplingMatrix> {
    let seed = estimation_seed(scenario.seed, draw);
    let r = scenario.coil.resistance;
    let pilots = orthogonal_pilot_currents(lb.transmit_power, r, seed)?;
    let meas = simulate_measurement(std::slice::from_ref(truth), &pilots, lb.noise_density, lb.angular_frequency, r, seed)?;
    let mut est = estimate_mii(&meas, &pilots, r, lb.angular_frequency)?;
    Ok(est.remove(0))
}

fn estimation(scenario: &Scenario, kernel: &CMatrix3, powers: &[f64]) -> Result<Vec<ResultRow>> {
    let couplings = coupling_draws(kernel, scenario.draws, scenario.seed);
    let mut rows = Vec::new();
    for (&power, lb) in powers.iter().zip(budgets(scenario, powers)?) {
        let estimates: Vec<CouplingMatrix> = couplings
            .par_iter()
            .enumerate()
            .map(|(i, c)| estimate_draw(scenario, c, &lb, i))
            .collect::<Result<_>>()?;
        let errors: Vec<f64> = couplings
            .iter()
            .zip(&estimates)
            .map(|(c, e)| estimation_error(&c.m, &e.m))
            .collect::<Result<_>>()?;
        let mean_error = errors.iter().sum::<f64>() / errors.len() as f64;
        for strategy in ESTIMATION_STRATEGIES {
            let perfect: Vec<f64> = couplings.par_iter().map(|c| strategy.evaluate(c, &lb).capacity).collect();
            rows.push(ResultRow::summary(
                Experiment::Fig7Estimation,
                strategy.name().to_string(),
                power,
                &reliability_of(&perfect),
            ));
            let mismatched: Vec<f64> = couplings
                .par_iter()
                .zip(estimates.par_iter())
                .map(|(c, e)| mismatched_capacity(strategy, c, e, &lb))
                .collect();
            let mut row = ResultRow::summary(Experiment::Fig7Estimation, estimated_label(strategy), power, &reliability_of(&mismatched));
            row.est_error = Some(mean_error);
            rows.push(row);
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::em::FieldModel;

    fn small() -> Scenario {
        Scenario {
            draws: 200,
            model: FieldModel::Simplified,
            sweep: PowerSweep {
                start_dbm: -20.0,
                stop_dbm: 20.0,
                step_db: 20.0,
            },
            ..Scenario::default()
        }
    }

    #[test]
    fn csv_layout() {
        let rows = run_experiment(Experiment::Fig4Lower, &small()).unwrap();
        assert_eq!(rows.len(), 3 * Strategy::ALL.len());
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first.len(), 9);
        assert_eq!(first[0], "fig4_lower");
        assert_eq!(first[1], "siso");
        assert_eq!(first[8], "");
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let s = small();
        let a = with_threads(Some(1), || run_experiment(Experiment::Fig7Estimation, &s)).unwrap().unwrap();
        let b = with_threads(Some(3), || run_experiment(Experiment::Fig7Estimation, &s)).unwrap().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn multiuser_needs_two_receivers() {
        assert!(run_experiment(Experiment::Fig6Multiuser, &small()).is_err());
        let mut s = small();
        s.receivers = (0..3).map(default_receiver).collect();
        let rows = run_experiment(Experiment::Fig6Multiuser, &s).unwrap();
        assert_eq!(rows.len(), 9);
        assert_eq!(rows[2].strategy, "nullspace_user2");
    }

    #[test]
    fn names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(Experiment::from_name(e.name()), Some(e));
        }
        assert_eq!(Experiment::from_name("fig8"), None);
    }
}
