//! Flat `key = value` scenario files.
//!
//! Blank lines and `#` comments are ignored. Every key is optional; missing
//! keys take the lake defaults below. Receiver `N` (0-based) is configured
//! with `rx.N.x_m`, `rx.N.y_m` and `rx.N.depth_m`.

use crate::coupling::CoilSpec;
use crate::em::{FieldModel, Geometry, MediaPair, QuadratureSpec};
use crate::error::{invalid, Error, Result};
use crate::strategies::LinkBudget;
use std::fmt::Write as _;
use std::path::Path;

pub const MAX_RECEIVERS: usize = 3;

/// Horizontal position and depth of a coil centre, m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position {
    pub x: f64,
    pub y: f64,
    pub depth: f64,
}

impl Position {
    pub fn new(x: f64, y: f64, depth: f64) -> Self {
        Position { x, y, depth }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.depth]
    }
}

/// Transmit powers swept by an experiment, dBm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSweep {
    pub start_dbm: f64,
    pub stop_dbm: f64,
    pub step_db: f64,
}

impl PowerSweep {
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop_dbm - self.start_dbm) / self.step_db + 1e-9).floor() as usize;
        (0..=n).map(|i| self.start_dbm + i as f64 * self.step_db).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start_dbm.is_finite() && self.stop_dbm.is_finite()) {
            return Err(invalid("sweep bounds must be finite"));
        }
        if !(self.step_db > 0.0 && self.step_db.is_finite()) {
            return Err(invalid("sweep step must be positive"));
        }
        if self.stop_dbm < self.start_dbm {
            return Err(invalid("sweep stop must not be below its start"));
        }
        if self.points().len() > 10_000 {
            return Err(invalid("sweep has more than 10000 points"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub media: MediaPair,
    pub frequency: f64,
    pub tx: Position,
    pub receivers: Vec<Position>,
    pub coil: CoilSpec,
    pub noise_dbm_per_hz: f64,
    pub sweep: PowerSweep,
    pub draws: usize,
    pub seed: u64,
    pub model: FieldModel,
}

/// Receiver positions used when `rx.N` is not given: range 5 m at depth
/// 0.3 m on the +y, +x and -x axes.
pub fn default_receiver(index: usize) -> Position {
    match index {
        0 => Position::new(0.0, 5.0, 0.3),
        1 => Position::new(5.0, 0.0, 0.3),
        _ => Position::new(-5.0, 0.0, 0.3),
    }
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            media: MediaPair::air_over_water(),
            frequency: 1e6,
            tx: Position::new(0.0, 0.0, 0.5),
            receivers: vec![default_receiver(0)],
            coil: CoilSpec::default(),
            noise_dbm_per_hz: -140.0,
            sweep: PowerSweep {
                start_dbm: -80.0,
                stop_dbm: 40.0,
                step_db: 2.0,
            },
            draws: 2000,
            seed: 1,
            model: FieldModel::Exact(QuadratureSpec::default()),
        }
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.media.upper.validate()?;
        self.media.lower.validate()?;
        if !(self.frequency > 0.0 && self.frequency.is_finite()) {
            return Err(invalid("frequency must be positive"));
        }
        if self.receivers.is_empty() || self.receivers.len() > MAX_RECEIVERS {
            return Err(invalid(format!("receivers must be 1 to {MAX_RECEIVERS}, got {}", self.receivers.len())));
        }
        for (i, rx) in self.receivers.iter().enumerate() {
            self.geometry(i)?;
            if !(rx.x.is_finite() && rx.y.is_finite()) {
                return Err(invalid(format!("rx.{i} position must be finite")));
            }
        }
        self.coil.validate()?;
        if !self.noise_dbm_per_hz.is_finite() {
            return Err(invalid("noise density must be finite"));
        }
        self.sweep.validate()?;
        if self.draws == 0 {
            return Err(invalid("draws must be positive"));
        }
        if let FieldModel::Exact(q) = &self.model {
            q.validate()?;
        }
        Ok(())
    }

    pub fn geometry(&self, receiver: usize) -> Result<Geometry> {
        let rx = self
            .receivers
            .get(receiver)
            .ok_or_else(|| invalid(format!("no receiver {receiver}")))?;
        Geometry::between(self.tx.as_array(), rx.as_array())
    }

    pub fn link_budget(&self, power_dbm: f64) -> Result<LinkBudget> {
        LinkBudget::from_dbm(self.frequency, power_dbm, self.coil.resistance, self.noise_dbm_per_hz)
    }

    /// Canonical text form; loading it gives back an equal scenario.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        for (key, value) in self.entries() {
            let _ = writeln!(s, "{key} = {value}");
        }
        s
    }

    fn entries(&self) -> Vec<(String, String)> {
        let mut e: Vec<(String, String)> = Vec::new();
        let mut put = |k: &str, v: String| e.push((k.to_string(), v));
        for (name, m) in [("air", &self.media.upper), ("water", &self.media.lower)] {
            put(&format!("media.{name}.mu_r"), m.relative_permeability.to_string());
            put(&format!("media.{name}.eps_r"), m.relative_permittivity.to_string());
            put(&format!("media.{name}.sigma_s_per_m"), m.conductivity.to_string());
        }
        put("frequency_hz", self.frequency.to_string());
        put("tx.x_m", self.tx.x.to_string());
        put("tx.y_m", self.tx.y.to_string());
        put("tx.depth_m", self.tx.depth.to_string());
        put("receivers", self.receivers.len().to_string());
        for (i, rx) in self.receivers.iter().enumerate() {
            put(&format!("rx.{i}.x_m"), rx.x.to_string());
            put(&format!("rx.{i}.y_m"), rx.y.to_string());
            put(&format!("rx.{i}.depth_m"), rx.depth.to_string());
        }
        put("coil.radius_m", self.coil.radius.to_string());
        put("coil.turns", self.coil.turns.to_string());
        put("coil.resistance_ohm", self.coil.resistance.to_string());
        put("noise.dbm_per_hz", self.noise_dbm_per_hz.to_string());
        put("sweep.p_dbm.start", self.sweep.start_dbm.to_string());
        put("sweep.p_dbm.stop", self.sweep.stop_dbm.to_string());
        put("sweep.p_dbm.step", self.sweep.step_db.to_string());
        put("draws", self.draws.to_string());
        put("seed", self.seed.to_string());
        put("model", self.model.name().to_string());
        let q = match &self.model {
            FieldModel::Exact(q) => *q,
            FieldModel::Simplified => QuadratureSpec::default(),
        };
        put("quadrature.rel_tol", q.relative_tolerance.to_string());
        put("quadrature.k_max_factor", q.k_max_factor.to_string());
        put("quadrature.max_evaluations", q.max_evaluations.to_string());
        e
    }
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_scenario(&text, &path.display().to_string())
}

/// Parse scenario text; `origin` names the source in error messages.
pub fn parse_scenario(text: &str, origin: &str) -> Result<Scenario> {
    let err = |line: usize, message: String| Error::Parse {
        path: origin.to_string(),
        line,
        message,
    };
    let mut s = Scenario::default();
    let mut quad = QuadratureSpec::default();
    let mut exact = true;
    let mut count: Option<(usize, usize)> = None;
    let mut rx: [Option<Position>; MAX_RECEIVERS] = [None; MAX_RECEIVERS];
    let mut rx_lines = [0usize; MAX_RECEIVERS];
    let mut seen: Vec<String> = Vec::new();

    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| err(line_no, format!("expected `key = value`, got `{line}`")))?;
        if seen.iter().any(|k| k == key) {
            return Err(err(line_no, format!("duplicate key `{key}`")));
        }
        seen.push(key.to_string());
        let num = || -> Result<f64> {
            value
                .parse::<f64>()
                .map_err(|_| err(line_no, format!("`{key}` expects a number, got `{value}`")))
        };
        let int = || -> Result<u64> {
            value
                .parse::<u64>()
                .map_err(|_| err(line_no, format!("`{key}` expects a non-negative integer, got `{value}`")))
        };
        match key {
            "media.air.mu_r" => s.media.upper.relative_permeability = num()?,
            "media.air.eps_r" => s.media.upper.relative_permittivity = num()?,
            "media.air.sigma_s_per_m" => s.media.upper.conductivity = num()?,
            "media.water.mu_r" => s.media.lower.relative_permeability = num()?,
            "media.water.eps_r" => s.media.lower.relative_permittivity = num()?,
            "media.water.sigma_s_per_m" => s.media.lower.conductivity = num()?,
            "frequency_hz" => s.frequency = num()?,
            "tx.x_m" => s.tx.x = num()?,
            "tx.y_m" => s.tx.y = num()?,
            "tx.depth_m" => s.tx.depth = num()?,
            "receivers" => {
                let c = int()? as usize;
                if c == 0 || c > MAX_RECEIVERS {
                    return Err(err(line_no, format!("receivers must be 1 to {MAX_RECEIVERS}, got {c}")));
                }
                count = Some((c, line_no));
            }
            "coil.radius_m" => s.coil.radius = num()?,
            "coil.turns" => {
                s.coil.turns = u32::try_from(int()?).map_err(|_| err(line_no, "coil.turns is too large".into()))?
            }
            "coil.resistance_ohm" => s.coil.resistance = num()?,
            "noise.dbm_per_hz" => s.noise_dbm_per_hz = num()?,
            "sweep.p_dbm.start" => s.sweep.start_dbm = num()?,
            "sweep.p_dbm.stop" => s.sweep.stop_dbm = num()?,
            "sweep.p_dbm.step" => s.sweep.step_db = num()?,
            "draws" => s.draws = int()? as usize,
            "seed" => s.seed = int()?,
            "model" => {
                exact = match value {
                    "exact" => true,
                    "simplified" => false,
                    _ => return Err(err(line_no, format!("model must be `exact` or `simplified`, got `{value}`"))),
                }
            }
            "quadrature.rel_tol" => quad.relative_tolerance = num()?,
            "quadrature.k_max_factor" => quad.k_max_factor = num()?,
            "quadrature.max_evaluations" => quad.max_evaluations = int()? as usize,
            _ => {
                let Some((index, field)) = receiver_key(key) else {
                    return Err(err(line_no, format!("unknown key `{key}`")));
                };
                if index >= MAX_RECEIVERS {
                    return Err(err(line_no, format!("receiver index {index} out of range")));
                }
                let p = rx[index].get_or_insert(default_receiver(index));
                match field {
                    "x_m" => p.x = num()?,
                    "y_m" => p.y = num()?,
                    "depth_m" => p.depth = num()?,
                    _ => return Err(err(line_no, format!("unknown key `{key}`"))),
                }
                rx_lines[index] = line_no;
            }
        }
    }

    let (receivers, count_line) = count.unwrap_or((1, 0));
    for (i, given) in rx.iter().enumerate() {
        if given.is_some() && i >= receivers {
            return Err(err(rx_lines[i], format!("rx.{i} is set but receivers = {receivers}")));
        }
    }
    s.receivers = (0..receivers).map(|i| rx[i].unwrap_or(default_receiver(i))).collect();
    s.model = if exact { FieldModel::Exact(quad) } else { FieldModel::Simplified };
    s.validate().map_err(|e| err(count_line, e.to_string()))?;
    Ok(s)
}

fn receiver_key(key: &str) -> Option<(usize, &str)> {
    let rest = key.strip_prefix("rx.")?;
    let (index, field) = rest.split_once('.')?;
    Some((index.parse().ok()?, field))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::em::Medium;

    #[test]
    fn empty_file_is_default() {
        let s = parse_scenario("", "t").unwrap();
        assert_eq!(s, Scenario::default());
        assert_eq!(s.media.lower, Medium::fresh_water());
        assert_eq!(s.tx.depth, 0.5);
        assert_eq!(s.receivers, vec![Position::new(0.0, 5.0, 0.3)]);
        let g = s.geometry(0).unwrap();
        assert!((g.range - 5.0).abs() < 1e-12);
    }

    #[test]
    fn round_trip() {
        let text = "# swarm\nreceivers = 3\nrx.2.y_m = 7.5 # moved\nmodel = simplified\nseed=9\nsweep.p_dbm.step = 0.5\n";
        let s = parse_scenario(text, "t").unwrap();
        let again = parse_scenario(&s.serialize(), "t").unwrap();
        assert_eq!(s, again);
        assert_eq!(again.serialize(), s.serialize());
        assert_eq!(s.receivers[2], Position::new(-5.0, 7.5, 0.3));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_scenario("seed = 1\n\nbogus = 3\n", "f.scn").unwrap_err();
        assert_eq!(
            e,
            Error::Parse {
                path: "f.scn".into(),
                line: 3,
                message: "unknown key `bogus`".into()
            }
        );
        assert!(matches!(parse_scenario("receivers = 4", "t"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_scenario("rx.1.x_m = 2", "t"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_scenario("draws = -1", "t"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_scenario("seed = 1\nseed = 2", "t"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_scenario("sweep.p_dbm.step = 0", "t"), Err(Error::Parse { .. })));
        assert!(matches!(parse_scenario("justtext", "t"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn sweep_includes_stop() {
        let p = Scenario::default().sweep.points();
        assert_eq!(p.len(), 61);
        assert_eq!(p[0], -80.0);
        assert_eq!(*p.last().unwrap(), 40.0);
    }
}
