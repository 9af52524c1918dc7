//! Bundled scenarios: Starlink shell 1 against the OneWeb primary shell, at
//! normal scale and with twice as many satellites per plane.
//!
//! The ground-station list in `data/ground_stations.csv` is a representative
//! set of 165 gateway-like sites; swap in another list with
//! [`load_ground_stations`].

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{SatIndex, ShellConfig};
use crate::scenario::{GroundStation, ScenarioConfig, DEFAULT_MIN_ELEVATION_DEG};

const GROUND_STATIONS_CSV: &str = include_str!("../data/ground_stations.csv");

pub const PRESET_NAMES: [&str; 2] = ["starlink_oneweb", "starlink_oneweb_2x"];

/// Source (shell A) and destination (shell B) satellites of the single-pair
/// experiment.
pub const REFERENCE_PAIR: (SatIndex, SatIndex) = (1, 159);

pub const PRESET_SLOTS: usize = 60;
pub const PRESET_SLOT_INTERVAL_S: f64 = 300.0;

pub fn starlink_shell1() -> ShellConfig {
    ShellConfig {
        shell_id: "starlink-550".into(),
        n_planes: 72,
        sats_per_plane: 22,
        altitude_km: 550.0,
        inclination_deg: 53.0,
    }
}

pub fn oneweb_primary() -> ShellConfig {
    ShellConfig {
        shell_id: "oneweb-1200".into(),
        n_planes: 18,
        sats_per_plane: 40,
        altitude_km: 1200.0,
        inclination_deg: 87.9,
    }
}

fn doubled(mut shell: ShellConfig) -> ShellConfig {
    shell.sats_per_plane *= 2;
    shell.shell_id.push_str("-2x");
    shell
}

pub fn parse_ground_stations(text: &str) -> Result<Vec<GroundStation>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for row in rdr.deserialize() {
        let gs: GroundStation = row.map_err(|e| Error::ConfigParse(e.to_string()))?;
        out.push(gs);
    }
    Ok(out)
}

/// Reads a `gs_id,name,lat_deg,lon_deg` CSV.
pub fn load_ground_stations(path: impl AsRef<Path>) -> Result<Vec<GroundStation>> {
    parse_ground_stations(&fs::read_to_string(path)?)
}

pub fn bundled_ground_stations() -> Vec<GroundStation> {
    parse_ground_stations(GROUND_STATIONS_CSV).expect("bundled ground station list parses")
}

pub fn starlink_oneweb() -> ScenarioConfig {
    ScenarioConfig {
        shell_a: starlink_shell1(),
        shell_b: oneweb_primary(),
        ground_stations: bundled_ground_stations(),
        n_slots: PRESET_SLOTS,
        slot_interval_s: PRESET_SLOT_INTERVAL_S,
        min_elevation_deg: DEFAULT_MIN_ELEVATION_DEG,
        rng_seed: 0,
    }
}

pub fn starlink_oneweb_2x() -> ScenarioConfig {
    ScenarioConfig {
        shell_a: doubled(starlink_shell1()),
        shell_b: doubled(oneweb_primary()),
        ..starlink_oneweb()
    }
}

pub fn preset(name: &str) -> Result<ScenarioConfig> {
    match name {
        "starlink_oneweb" => Ok(starlink_oneweb()),
        "starlink_oneweb_2x" => Ok(starlink_oneweb_2x()),
        other => Err(Error::config(
            "preset",
            format!("unknown preset `{other}` (valid: {})", PRESET_NAMES.join(", ")),
        )),
    }
}
