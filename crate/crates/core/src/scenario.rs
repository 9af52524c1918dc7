//! Ground stations, shell geometry and per-slot GSL assignments.
//!
//! The assignment generator places both shells on idealised circular Walker
//! orbits and links every ground station to the highest-elevation visible
//! satellite of each shell. Traces produced elsewhere can be loaded from CSV
//! instead.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Read;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{SatIndex, ShellConfig};

pub type GsId = u32;

/// Earth gravitational parameter, km^3/s^2.
pub const MU_EARTH: f64 = 398_600.4418;
/// Mean Earth radius, km.
pub const EARTH_RADIUS_KM: f64 = 6371.0;
/// Earth sidereal rotation rate, rad/s.
pub const EARTH_ROTATION_RAD_S: f64 = 7.292_115_9e-5;

pub const DEFAULT_SLOT_INTERVAL_S: f64 = 300.0;
pub const DEFAULT_MIN_ELEVATION_DEG: f64 = 25.0;

/// Upper bound on the tie-breaking perturbation added to elevations.
const MAX_JITTER_RAD: f64 = 1e-9;

pub const TRACE_HEADER: &str = "slot,gs_id,shell,sat_index";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundStation {
    pub gs_id: GsId,
    pub name: String,
    pub lat_deg: f64,
    pub lon_deg: f64,
}

impl GroundStation {
    fn validate(&self, key: &str) -> Result<()> {
        if !(-90.0..=90.0).contains(&self.lat_deg) {
            return Err(Error::config(
                format!("{key}.lat_deg"),
                format!("must lie in [-90, 90] (got {})", self.lat_deg),
            ));
        }
        if !(-180.0..180.0).contains(&self.lon_deg) {
            return Err(Error::config(
                format!("{key}.lon_deg"),
                format!("must lie in [-180, 180) (got {})", self.lon_deg),
            ));
        }
        Ok(())
    }

    /// Earth-fixed position on the spherical Earth, km.
    pub fn ecef(&self) -> [f64; 3] {
        let (lat, lon) = (self.lat_deg.to_radians(), self.lon_deg.to_radians());
        [
            EARTH_RADIUS_KM * lat.cos() * lon.cos(),
            EARTH_RADIUS_KM * lat.cos() * lon.sin(),
            EARTH_RADIUS_KM * lat.sin(),
        ]
    }
}

/// Shell A holds the source satellite, shell B the destination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellPair {
    pub a: ShellConfig,
    pub b: ShellConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ShellSide {
    A,
    B,
}

impl ShellSide {
    pub fn as_str(&self) -> &'static str {
        match self {
            ShellSide::A => "A",
            ShellSide::B => "B",
        }
    }
}

/// GSLs held by one ground station in one slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GslLinks {
    pub sat_a: Option<SatIndex>,
    pub sat_b: Option<SatIndex>,
}

impl GslLinks {
    pub fn is_full(&self) -> bool {
        self.sat_a.is_some() && self.sat_b.is_some()
    }

    fn side_mut(&mut self, side: ShellSide) -> &mut Option<SatIndex> {
        match side {
            ShellSide::A => &mut self.sat_a,
            ShellSide::B => &mut self.sat_b,
        }
    }
}

/// Validated per-slot GSL assignments.
#[derive(Debug, Clone, PartialEq)]
pub struct GslTrace {
    slot_interval_s: f64,
    slots: Vec<BTreeMap<GsId, GslLinks>>,
}

impl GslTrace {
    /// Checks that every index belongs to its shell and every slot has at
    /// least one ground station linked to both shells.
    pub fn new(
        slots: Vec<BTreeMap<GsId, GslLinks>>,
        slot_interval_s: f64,
        shells: &ShellPair,
    ) -> Result<Self> {
        if slots.is_empty() {
            return Err(Error::config("n_slots", "trace has no slots"));
        }
        if !(slot_interval_s >= 0.0) {
            return Err(Error::config("slot_interval_s", "must be non-negative"));
        }
        for (slot, links) in slots.iter().enumerate() {
            for l in links.values() {
                if let Some(s) = l.sat_a {
                    shells.a.check_index(s)?;
                }
                if let Some(s) = l.sat_b {
                    shells.b.check_index(s)?;
                }
            }
            if !links.values().any(GslLinks::is_full) {
                return Err(Error::UnroutableSlot { slot });
            }
        }
        Ok(GslTrace {
            slot_interval_s,
            slots,
        })
    }

    pub fn n_slots(&self) -> usize {
        self.slots.len()
    }

    pub fn slot_interval_s(&self) -> f64 {
        self.slot_interval_s
    }

    pub fn slots(&self) -> &[BTreeMap<GsId, GslLinks>] {
        &self.slots
    }

    /// Number of ground stations linked to both shells, per slot.
    pub fn coverage(&self) -> Vec<usize> {
        self.slots
            .iter()
            .map(|s| s.values().filter(|l| l.is_full()).count())
            .collect()
    }

    /// All ground-station ids that appear anywhere in the trace.
    pub fn gs_ids(&self) -> Vec<GsId> {
        let mut ids: Vec<GsId> = self.slots.iter().flat_map(|s| s.keys().copied()).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    /// Trace restricted to the given ground stations.
    pub fn restrict(&self, keep: &[GsId], shells: &ShellPair) -> Result<GslTrace> {
        let slots = self
            .slots
            .iter()
            .map(|s| {
                s.iter()
                    .filter(|(g, _)| keep.contains(g))
                    .map(|(g, l)| (*g, *l))
                    .collect()
            })
            .collect();
        GslTrace::new(slots, self.slot_interval_s, shells)
    }

    /// Canonical CSV: header, then rows ordered by slot, gs_id, shell.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        out.push_str(TRACE_HEADER);
        out.push('\n');
        for (slot, links) in self.slots.iter().enumerate() {
            for (gs, l) in links {
                for (side, sat) in [(ShellSide::A, l.sat_a), (ShellSide::B, l.sat_b)] {
                    if let Some(sat) = sat {
                        let _ = writeln!(out, "{slot},{gs},{},{sat}", side.as_str());
                    }
                }
            }
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_csv_string())?;
        Ok(())
    }
}

/// Parses a trace CSV. Slots must be numbered from 0 without gaps.
pub fn parse_gsl_trace(
    reader: impl Read,
    shells: &ShellPair,
    slot_interval_s: f64,
) -> Result<GslTrace> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::None)
        .from_reader(reader);
    let mut rows = rdr.records();

    let header = match rows.next() {
        None => {
            return Err(Error::TraceParse {
                line: 1,
                message: "empty file".into(),
            })
        }
        Some(r) => r.map_err(|e| csv_error(e, 1))?,
    };
    if header.iter().collect::<Vec<_>>().join(",") != TRACE_HEADER {
        return Err(Error::TraceParse {
            line: 1,
            message: format!("expected header `{TRACE_HEADER}`"),
        });
    }

    let mut slots: Vec<BTreeMap<GsId, GslLinks>> = Vec::new();
    for row in rows {
        let row = row.map_err(|e| csv_error(e, 0))?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != 4 {
            return Err(Error::TraceParse {
                line,
                message: format!("expected 4 fields, found {}", row.len()),
            });
        }
        let field = |i: usize, name: &str| -> Result<u64> {
            row[i].parse::<u64>().map_err(|_| Error::TraceParse {
                line,
                message: format!("`{name}` must be a non-negative integer (got `{}`)", &row[i]),
            })
        };
        let slot = field(0, "slot")? as usize;
        let gs_id = GsId::try_from(field(1, "gs_id")?).map_err(|_| Error::TraceParse {
            line,
            message: "`gs_id` too large".into(),
        })?;
        let side = match &row[2] {
            "A" => ShellSide::A,
            "B" => ShellSide::B,
            other => {
                return Err(Error::TraceParse {
                    line,
                    message: format!("`shell` must be A or B (got `{other}`)"),
                })
            }
        };
        let sat = field(3, "sat_index")? as SatIndex;
        match side {
            ShellSide::A => shells.a.check_index(sat)?,
            ShellSide::B => shells.b.check_index(sat)?,
        }

        if slot >= slots.len() {
            slots.resize_with(slot + 1, BTreeMap::new);
        }
        let entry = slots[slot].entry(gs_id).or_default().side_mut(side);
        if entry.is_some() {
            return Err(Error::DuplicateEntry {
                slot,
                gs_id,
                shell: side.as_str().into(),
            });
        }
        *entry = Some(sat);
    }
    GslTrace::new(slots, slot_interval_s, shells)
}

fn csv_error(e: csv::Error, fallback_line: u64) -> Error {
    let line = e.position().map_or(fallback_line, |p| p.line());
    Error::TraceParse {
        line,
        message: e.to_string(),
    }
}

pub fn load_gsl_trace(path: impl AsRef<Path>, shells: &ShellPair) -> Result<GslTrace> {
    let file = fs::File::open(path)?;
    parse_gsl_trace(file, shells, DEFAULT_SLOT_INTERVAL_S)
}

fn default_slot_interval() -> f64 {
    DEFAULT_SLOT_INTERVAL_S
}

fn default_min_elevation() -> f64 {
    DEFAULT_MIN_ELEVATION_DEG
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub shell_a: ShellConfig,
    pub shell_b: ShellConfig,
    pub ground_stations: Vec<GroundStation>,
    pub n_slots: usize,
    #[serde(default = "default_slot_interval")]
    pub slot_interval_s: f64,
    #[serde(default = "default_min_elevation")]
    pub min_elevation_deg: f64,
    /// Zero disables elevation jitter.
    #[serde(default)]
    pub rng_seed: u64,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        self.shell_a.validate("shell_a")?;
        self.shell_b.validate("shell_b")?;
        if self.ground_stations.is_empty() {
            return Err(Error::config("ground_stations", "must not be empty"));
        }
        let mut ids: Vec<GsId> = Vec::with_capacity(self.ground_stations.len());
        for (i, gs) in self.ground_stations.iter().enumerate() {
            gs.validate(&format!("ground_stations[{i}]"))?;
            ids.push(gs.gs_id);
        }
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::config(
                "ground_stations",
                format!("duplicate gs_id {}", w[0]),
            ));
        }
        if self.n_slots == 0 {
            return Err(Error::config("n_slots", "must be >= 1"));
        }
        if !(self.slot_interval_s >= 0.0) || !self.slot_interval_s.is_finite() {
            return Err(Error::config(
                "slot_interval_s",
                format!("must be a non-negative number (got {})", self.slot_interval_s),
            ));
        }
        if !(-90.0..=90.0).contains(&self.min_elevation_deg) {
            return Err(Error::config(
                "min_elevation_deg",
                format!("must lie in [-90, 90] (got {})", self.min_elevation_deg),
            ));
        }
        Ok(())
    }

    pub fn shells(&self) -> ShellPair {
        ShellPair {
            a: self.shell_a.clone(),
            b: self.shell_b.clone(),
        }
    }

    /// Reads a TOML document, or JSON when the file ends in `.json`, and
    /// validates it.
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)?;
        let cfg: ScenarioConfig = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| Error::ConfigParse(e.to_string()))?
        } else {
            toml::from_str(&text).map_err(|e| Error::ConfigParse(e.to_string()))?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario config serializes to TOML")
    }
}

/// Orbital angular rate of a circular orbit at `altitude_km`, rad/s.
pub fn mean_motion(altitude_km: f64) -> f64 {
    let r = EARTH_RADIUS_KM + altitude_km;
    (MU_EARTH / (r * r * r)).sqrt()
}

/// Earth-fixed positions (km) of every satellite in `shell` after `time_s`
/// seconds, in index order.
///
/// Plane `p` has right ascension `2*pi*p/n_planes`; satellite `q` starts at
/// argument of latitude `2*pi*q/sats_per_plane`. No inter-plane phasing.
pub fn propagate_shell(shell: &ShellConfig, time_s: f64) -> Vec<(SatIndex, [f64; 3])> {
    use std::f64::consts::TAU;
    let r = EARTH_RADIUS_KM + shell.altitude_km;
    let advance = mean_motion(shell.altitude_km) * time_s;
    let (sin_i, cos_i) = shell.inclination_deg.to_radians().sin_cos();
    let (sin_e, cos_e) = (EARTH_ROTATION_RAD_S * time_s).sin_cos();

    let mut out = Vec::with_capacity(shell.n_satellites());
    for p in 0..shell.n_planes {
        let (sin_raan, cos_raan) = (TAU * p as f64 / shell.n_planes as f64).sin_cos();
        for q in 0..shell.sats_per_plane {
            let u = TAU * q as f64 / shell.sats_per_plane as f64 + advance;
            let (sin_u, cos_u) = u.sin_cos();
            let x = r * (cos_raan * cos_u - sin_raan * sin_u * cos_i);
            let y = r * (sin_raan * cos_u + cos_raan * sin_u * cos_i);
            let z = r * sin_u * sin_i;
            // inertial -> Earth-fixed
            let pos = [cos_e * x + sin_e * y, -sin_e * x + cos_e * y, z];
            out.push((p * shell.sats_per_plane + q, pos));
        }
    }
    out
}

/// Elevation of `sat` above the local horizon of ground point `gs`, radians.
pub fn elevation_rad(gs: [f64; 3], sat: [f64; 3]) -> f64 {
    let d = [sat[0] - gs[0], sat[1] - gs[1], sat[2] - gs[2]];
    let dn = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    let gn = (gs[0] * gs[0] + gs[1] * gs[1] + gs[2] * gs[2]).sqrt();
    let s = (d[0] * gs[0] + d[1] * gs[1] + d[2] * gs[2]) / (dn * gn);
    s.clamp(-1.0, 1.0).asin()
}

/// Highest-elevation satellite at or above `min_elev_rad`. Ties go to the
/// lowest index.
pub fn best_visible(
    gs: [f64; 3],
    positions: &[(SatIndex, [f64; 3])],
    min_elev_rad: f64,
    jitter: Option<&[f64]>,
) -> Option<(SatIndex, f64)> {
    let mut best: Option<(SatIndex, f64, f64)> = None;
    for &(idx, pos) in positions {
        let el = elevation_rad(gs, pos);
        if el < min_elev_rad {
            continue;
        }
        let key = el + jitter.map_or(0.0, |j| j[idx]);
        if best.map_or(true, |(_, _, k)| key > k) {
            best = Some((idx, el, key));
        }
    }
    best.map(|(idx, el, _)| (idx, el))
}

fn jitter_table(seed: u64, stream: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    (0..n).map(|_| rng.gen_range(0.0..MAX_JITTER_RAD)).collect()
}

/// Per-slot GSL assignment from idealised orbit geometry.
pub fn generate_gsl_trace(cfg: &ScenarioConfig) -> Result<GslTrace> {
    cfg.validate()?;
    let min_el = cfg.min_elevation_deg.to_radians();
    let gs_pos: Vec<(GsId, [f64; 3])> = cfg
        .ground_stations
        .iter()
        .map(|g| (g.gs_id, g.ecef()))
        .collect();
    let (jit_a, jit_b) = if cfg.rng_seed == 0 {
        (None, None)
    } else {
        (
            Some(jitter_table(cfg.rng_seed, 0, cfg.shell_a.n_satellites())),
            Some(jitter_table(cfg.rng_seed, 1, cfg.shell_b.n_satellites())),
        )
    };

    let slots: Vec<BTreeMap<GsId, GslLinks>> = (0..cfg.n_slots)
        .into_par_iter()
        .map(|slot| {
            let t = slot as f64 * cfg.slot_interval_s;
            let pos_a = propagate_shell(&cfg.shell_a, t);
            let pos_b = propagate_shell(&cfg.shell_b, t);
            gs_pos
                .iter()
                .filter_map(|&(gs, g)| {
                    let links = GslLinks {
                        sat_a: best_visible(g, &pos_a, min_el, jit_a.as_deref()).map(|b| b.0),
                        sat_b: best_visible(g, &pos_b, min_el, jit_b.as_deref()).map(|b| b.0),
                    };
                    (links.sat_a.is_some() || links.sat_b.is_some()).then_some((gs, links))
                })
                .collect()
        })
        .collect();
    GslTrace::new(slots, cfg.slot_interval_s, &cfg.shells())
}
