//! Vehicle drops on a 1-D road: Poisson point process generation and
//! trace ingestion.

use std::io::BufRead;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::resources::ResourceGrid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Vehicles per meter.
    pub density: f64,
    pub road_length: f64,
    pub wrap: bool,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            density: 0.1,
            road_length: 8000.0,
            wrap: true,
            seed: 1,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.density > 0.0) || !self.density.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "density must be positive and finite, got {}",
                self.density
            )));
        }
        if !(self.road_length > 0.0) || !self.road_length.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "road length must be positive and finite, got {}",
                self.road_length
            )));
        }
        Ok(())
    }

    /// The expected population must be at least four times the resource
    /// count so that reuse structure dominates finite-road artifacts.
    pub fn check_population(&self, grid: &ResourceGrid) -> Result<()> {
        let expected = self.density * self.road_length;
        let needed = 4.0 * grid.total() as f64;
        if expected < needed {
            return Err(Error::InvalidConfig(format!(
                "expected vehicle count {expected:.1} below 4R = {needed}"
            )));
        }
        Ok(())
    }
}

/// Sorted vehicle positions on a road segment or ring.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    positions: Vec<f64>,
    ids: Vec<u64>,
    road_length: f64,
    wrap: bool,
    time_s: Option<f64>,
}

impl Scenario {
    /// Builds a scenario from unsorted `(id, position)` pairs; sorting is
    /// stable so coincident positions keep their input order.
    pub fn new(mut vehicles: Vec<(u64, f64)>, road_length: f64, wrap: bool) -> Result<Self> {
        if !(road_length > 0.0) || !road_length.is_finite() {
            return Err(Error::InvalidConfig(format!("road length must be positive, got {road_length}")));
        }
        if let Some(&(id, x)) = vehicles
            .iter()
            .find(|(_, x)| !(x.is_finite() && *x >= 0.0 && *x < road_length))
        {
            return Err(Error::InvalidConfig(format!(
                "vehicle {id} at {x} lies outside [0, {road_length})"
            )));
        }
        vehicles.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (ids, positions) = vehicles.into_iter().unzip();
        Ok(Self {
            positions,
            ids,
            road_length,
            wrap,
            time_s: None,
        })
    }

    pub fn from_positions(positions: Vec<f64>, road_length: f64, wrap: bool) -> Result<Self> {
        Self::new(
            positions.into_iter().enumerate().map(|(i, x)| (i as u64, x)).collect(),
            road_length,
            wrap,
        )
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn ids(&self) -> &[u64] {
        &self.ids
    }

    pub fn road_length(&self) -> f64 {
        self.road_length
    }

    pub fn wrap(&self) -> bool {
        self.wrap
    }

    pub fn time_s(&self) -> Option<f64> {
        self.time_s
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Road distance between two vehicles, measured around the ring when
    /// wrapping is enabled.
    #[inline]
    pub fn distance(&self, a: usize, b: usize) -> f64 {
        separation(self.positions[a], self.positions[b], self.road_length, self.wrap)
    }
}

/// `|Δx|`, or `min(|Δx|, L - |Δx|)` on a ring.
#[inline]
pub fn separation(xa: f64, xb: f64, road_length: f64, wrap: bool) -> f64 {
    let d = (xa - xb).abs();
    if wrap {
        d.min(road_length - d)
    } else {
        d
    }
}

/// Homogeneous PPP drop: Poisson count, i.i.d. uniform positions, sorted.
pub fn generate_ppp(cfg: &ScenarioConfig) -> Result<Scenario> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mean = cfg.density * cfg.road_length;
    let count = Poisson::new(mean)
        .map_err(|e| Error::InvalidConfig(format!("Poisson mean {mean}: {e}")))?
        .sample(&mut rng) as usize;
    let positions = (0..count)
        .map(|_| rng.random::<f64>() * cfg.road_length)
        .collect();
    Scenario::from_positions(positions, cfg.road_length, cfg.wrap)
}

/// How a trace maps onto the simulated road.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceFormat {
    pub road_length_m: f64,
    pub wrap: bool,
}

pub const TRACE_HEADER: &str = "time_s,vehicle_id,position_m";

/// Reads a `time_s,vehicle_id,position_m` CSV trace into one scenario per
/// snapshot time. Positions must already be projected onto the road axis.
pub fn load_trace<R: BufRead>(source: R, format: TraceFormat) -> Result<Vec<Scenario>> {
    let mut out = Vec::new();
    let mut current: Option<(f64, Vec<(u64, f64)>)> = None;
    let mut saw_header = false;
    for (idx, line) in source.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::Parse {
            line: lineno,
            msg: e.to_string(),
        })?;
        let line = line.trim_end_matches('\r').trim();
        if line.is_empty() {
            continue;
        }
        if !saw_header {
            let header: Vec<&str> = line.trim_start_matches('\u{feff}').split(',').map(str::trim).collect();
            if header != ["time_s", "vehicle_id", "position_m"] {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("expected header `{TRACE_HEADER}`"),
                });
            }
            saw_header = true;
            continue;
        }
        let (t, id, x) = parse_record(line).map_err(|msg| Error::Parse { line: lineno, msg })?;
        if x >= format.road_length_m {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("position {x} beyond road length {}", format.road_length_m),
            });
        }
        match &mut current {
            Some((ct, vehicles)) if *ct == t => vehicles.push((id, x)),
            Some((ct, _)) if t < *ct => {
                return Err(Error::Format(format!(
                    "timestamps not sorted: {t} after {ct} at line {lineno}"
                )))
            }
            _ => {
                if let Some((ct, vehicles)) = current.take() {
                    out.push(snapshot(ct, vehicles, format)?);
                }
                current = Some((t, vec![(id, x)]));
            }
        }
    }
    if let Some((ct, vehicles)) = current {
        out.push(snapshot(ct, vehicles, format)?);
    }
    Ok(out)
}

fn parse_record(line: &str) -> std::result::Result<(f64, u64, f64), String> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    if fields.len() != 3 {
        return Err(format!("expected 3 fields, found {}", fields.len()));
    }
    let t: f64 = fields[0]
        .parse()
        .map_err(|_| format!("bad time `{}`", fields[0]))?;
    let id: u64 = fields[1]
        .parse()
        .map_err(|_| format!("bad vehicle id `{}`", fields[1]))?;
    let x: f64 = fields[2]
        .parse()
        .map_err(|_| format!("bad position `{}`", fields[2]))?;
    if !t.is_finite() {
        return Err(format!("non-finite time `{}`", fields[0]));
    }
    if !(x.is_finite() && x >= 0.0) {
        return Err(format!("position must be finite and >= 0, got {x}"));
    }
    Ok((t, id, x))
}

fn snapshot(t: f64, vehicles: Vec<(u64, f64)>, format: TraceFormat) -> Result<Scenario> {
    let mut seen = std::collections::HashSet::with_capacity(vehicles.len());
    if let Some((id, _)) = vehicles.iter().find(|(id, _)| !seen.insert(*id)) {
        return Err(Error::Format(format!("vehicle {id} appears twice at time {t}")));
    }
    let mut s = Scenario::new(vehicles, format.road_length_m, format.wrap)?;
    s.time_s = Some(t);
    Ok(s)
}

/// Free-flow traffic on a ring: a PPP drop whose vehicles keep constant
/// Gaussian speeds (clamped at zero). Returns one snapshot every `dt_s`.
pub fn moving_ppp_trace(
    cfg: &ScenarioConfig,
    snapshots: usize,
    dt_s: f64,
    speed_mean_mps: f64,
    speed_sd_mps: f64,
) -> Result<Vec<Scenario>> {
    let start = generate_ppp(&ScenarioConfig { wrap: true, ..cfg.clone() })?;
    let speed = rand_distr::Normal::new(speed_mean_mps, speed_sd_mps.max(0.0))
        .map_err(|e| Error::InvalidConfig(format!("speed law: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9e37_79b9_7f4a_7c15);
    let v: Vec<f64> = (0..start.len()).map(|_| speed.sample(&mut rng).max(0.0)).collect();
    let l = cfg.road_length;
    (0..snapshots)
        .map(|k| {
            let t = k as f64 * dt_s;
            let vehicles = start
                .positions()
                .iter()
                .zip(&v)
                .enumerate()
                .map(|(id, (&x, &s))| (id as u64, (x + s * t).rem_euclid(l)))
                .collect();
            let mut snap = Scenario::new(vehicles, l, true)?;
            snap.time_s = Some(t);
            Ok(snap)
        })
        .collect()
}

/// Writes snapshots in the trace CSV format accepted by [`load_trace`].
pub fn write_trace<W: std::io::Write>(snapshots: &[Scenario], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{TRACE_HEADER}")?;
    for (k, s) in snapshots.iter().enumerate() {
        let t = s.time_s.unwrap_or(k as f64);
        for (id, x) in s.ids.iter().zip(&s.positions) {
            writeln!(out, "{t},{id},{x}")?;
        }
    }
    Ok(())
}

/// Vehicles per meter in one snapshot.
pub fn empirical_density(s: &Scenario) -> f64 {
    s.len() as f64 / s.road_length
}

#[cfg(test)]
mod tests {
    use super::*;

    const FMT: TraceFormat = TraceFormat {
        road_length_m: 1000.0,
        wrap: false,
    };

    #[test]
    fn ppp_mean_count_and_determinism() {
        let cfg = ScenarioConfig {
            density: 0.125,
            road_length: 16000.0,
            wrap: true,
            seed: 3,
        };
        let mean: f64 = (0..200)
            .map(|s| generate_ppp(&ScenarioConfig { seed: s, ..cfg.clone() }).unwrap().len() as f64)
            .sum::<f64>()
            / 200.0;
        // sd of the mean = sqrt(2000/200)
        assert!((mean - 2000.0).abs() < 4.0 * (2000.0f64 / 200.0).sqrt(), "{mean}");
        let a = generate_ppp(&cfg).unwrap();
        let b = generate_ppp(&cfg).unwrap();
        assert_eq!(a, b);
        let mut resorted = a.positions().to_vec();
        resorted.sort_by(f64::total_cmp);
        assert_eq!(resorted, a.positions());
        assert!(a.positions().iter().all(|&x| (0.0..16000.0).contains(&x)));
    }

    #[test]
    fn ppp_rejects_bad_config() {
        for cfg in [
            ScenarioConfig { density: 0.0, ..Default::default() },
            ScenarioConfig { density: f64::NAN, ..Default::default() },
            ScenarioConfig { road_length: -1.0, ..Default::default() },
            ScenarioConfig { road_length: f64::INFINITY, ..Default::default() },
        ] {
            assert!(generate_ppp(&cfg).is_err());
        }
    }

    #[test]
    fn population_check() {
        let g = ResourceGrid::new(100, 1).unwrap();
        let ok = ScenarioConfig { density: 0.1, road_length: 4000.0, ..Default::default() };
        assert!(ok.check_population(&g).is_ok());
        let small = ScenarioConfig { road_length: 3000.0, ..ok };
        assert!(small.check_population(&g).is_err());
    }

    #[test]
    fn ring_distance() {
        let s = Scenario::from_positions(vec![10.0, 990.0], 1000.0, true).unwrap();
        assert!((s.distance(0, 1) - 20.0).abs() < 1e-12);
        let s = Scenario::from_positions(vec![10.0, 990.0], 1000.0, false).unwrap();
        assert!((s.distance(0, 1) - 980.0).abs() < 1e-12);
    }

    #[test]
    fn trace_two_snapshots() {
        let csv = "time_s,vehicle_id,position_m\r\n0.0,1,30\r\n0.0,2,10\r\n0.0,3,20\r\n0.1,1,31\r\n0.1,2,11.5\r\n0.1,3,22\r\n";
        let snaps = load_trace(csv.as_bytes(), FMT).unwrap();
        assert_eq!(snaps.len(), 2);
        assert_eq!(snaps[0].positions(), &[10.0, 20.0, 30.0]);
        assert_eq!(snaps[0].ids(), &[2, 3, 1]);
        assert_eq!(snaps[1].positions(), &[11.5, 22.0, 31.0]);
        assert_eq!(snaps[1].time_s(), Some(0.1));
    }

    #[test]
    fn trace_empty_and_errors() {
        assert!(load_trace("".as_bytes(), FMT).unwrap().is_empty());
        assert!(load_trace("time_s,vehicle_id,position_m\n".as_bytes(), FMT).unwrap().is_empty());
        match load_trace("time_s,vehicle_id,position_m\n0,1,5\n0,2,-3\n".as_bytes(), FMT) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        match load_trace("time_s,vehicle_id,position_m\n0,1,5\n0,x,3\n".as_bytes(), FMT) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            load_trace("time_s,vehicle_id,position_m\n1,1,5\n0,1,3\n".as_bytes(), FMT),
            Err(Error::Format(_))
        ));
        assert!(matches!(
            load_trace("t,id,x\n1,1,5\n".as_bytes(), FMT),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn moving_trace_round_trips_through_csv() {
        let cfg = ScenarioConfig { density: 0.05, road_length: 2000.0, wrap: true, seed: 8 };
        let snaps = moving_ppp_trace(&cfg, 3, 0.1, 30.0, 3.0).unwrap();
        assert_eq!(snaps.len(), 3);
        assert_eq!(snaps[0].len(), snaps[2].len());
        let mut buf = Vec::new();
        write_trace(&snaps, &mut buf).unwrap();
        let fmt = TraceFormat { road_length_m: 2000.0, wrap: true };
        let back = load_trace(buf.as_slice(), fmt).unwrap();
        assert_eq!(back.len(), 3);
        for (a, b) in snaps.iter().zip(&back) {
            assert_eq!(a.ids(), b.ids());
            assert_eq!(a.positions(), b.positions());
        }
    }

    #[test]
    fn density_examples() {
        let s = Scenario::from_positions((0..100).map(|i| i as f64 * 10.0).collect(), 1000.0, false).unwrap();
        assert!((empirical_density(&s) - 0.1).abs() < 1e-15);
        let e = Scenario::from_positions(vec![], 1000.0, false).unwrap();
        assert_eq!(empirical_density(&e), 0.0);
        let s = Scenario::from_positions(vec![0.0; 2015], 16000.0, true).unwrap();
        assert!((empirical_density(&s) - 0.1259375).abs() < 1e-12);
    }
}
