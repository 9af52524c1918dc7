//! +Grid torus arithmetic for a single orbital shell.
//!
//! Satellites are numbered row-major by plane: index `s` sits in plane
//! `s / sats_per_plane` at slot `s % sats_per_plane`. Every satellite links
//! to its two in-plane neighbours and to the same slot in both adjacent
//! planes, so the shell is a 2D torus and shortest paths decompose into an
//! independent ring distance per axis.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Satellite index local to one shell.
pub type SatIndex = usize;

/// Hop count along ISLs.
pub type Hops = u32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShellConfig {
    pub shell_id: String,
    /// Number of orbital planes.
    pub n_planes: usize,
    /// Satellites per plane.
    pub sats_per_plane: usize,
    pub altitude_km: f64,
    pub inclination_deg: f64,
}

impl ShellConfig {
    pub fn new(
        shell_id: impl Into<String>,
        n_planes: usize,
        sats_per_plane: usize,
        altitude_km: f64,
        inclination_deg: f64,
    ) -> Result<Self> {
        let shell = ShellConfig {
            shell_id: shell_id.into(),
            n_planes,
            sats_per_plane,
            altitude_km,
            inclination_deg,
        };
        shell.validate("shell")?;
        Ok(shell)
    }

    /// Checks the shell invariants. `key` prefixes the field name in errors
    /// (e.g. `shell_a` gives `shell_a.altitude_km`).
    pub fn validate(&self, key: &str) -> Result<()> {
        if self.n_planes == 0 {
            return Err(Error::config(format!("{key}.n_planes"), "must be >= 1"));
        }
        if self.sats_per_plane == 0 {
            return Err(Error::config(
                format!("{key}.sats_per_plane"),
                "must be >= 1",
            ));
        }
        if !(self.altitude_km > 0.0) || !self.altitude_km.is_finite() {
            return Err(Error::config(
                format!("{key}.altitude_km"),
                format!("must be > 0 (got {})", self.altitude_km),
            ));
        }
        if !(0.0..=180.0).contains(&self.inclination_deg) {
            return Err(Error::config(
                format!("{key}.inclination_deg"),
                format!("must lie in [0, 180] (got {})", self.inclination_deg),
            ));
        }
        Ok(())
    }

    pub fn n_satellites(&self) -> usize {
        self.n_planes * self.sats_per_plane
    }

    pub fn check_index(&self, s: SatIndex) -> Result<()> {
        if s < self.n_satellites() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                shell: self.shell_id.clone(),
                index: s,
                bound: self.n_satellites(),
            })
        }
    }

    pub fn index_to_grid(&self, s: SatIndex) -> Result<GridCoord> {
        self.check_index(s)?;
        Ok(GridCoord {
            x: s / self.sats_per_plane,
            y: s % self.sats_per_plane,
        })
    }

    pub fn grid_to_index(&self, c: GridCoord) -> SatIndex {
        c.x * self.sats_per_plane + c.y
    }

    pub fn hop_components(&self, s1: SatIndex, s2: SatIndex) -> Result<HopVector> {
        let a = self.index_to_grid(s1)?;
        let b = self.index_to_grid(s2)?;
        Ok(HopVector {
            x: ring_hops(a.x, b.x, self.n_planes),
            y: ring_hops(a.y, b.y, self.sats_per_plane),
        })
    }

    pub fn total_hops(&self, s1: SatIndex, s2: SatIndex) -> Result<Hops> {
        self.hop_components(s1, s2).map(|h| h.total())
    }
}

/// Position of a satellite on the torus: `x` is the plane, `y` the slot
/// within the plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridCoord {
    pub x: usize,
    pub y: usize,
}

/// Shortest-path hop count split into inter-plane (`x`) and intra-plane (`y`)
/// components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct HopVector {
    pub x: Hops,
    pub y: Hops,
}

impl HopVector {
    pub fn total(self) -> Hops {
        self.x + self.y
    }
}

/// Distance between positions `a` and `b` on a ring of `n` nodes.
pub fn ring_hops(a: usize, b: usize, n: usize) -> Hops {
    debug_assert!(n >= 1 && a < n && b < n);
    let d = a.abs_diff(b);
    d.min(n - d) as Hops
}
