//! Per-ground-station path records between a source satellite in shell A and
//! a destination satellite in shell B.
//!
//! A candidate path climbs from the source to the satellite that ground
//! station `g` sees in shell A, drops to `g`, goes back up to `g`'s shell-B
//! satellite and travels to the destination. Only the ISL legs are counted;
//! the ground crossing is free.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Hops, SatIndex};
use crate::scenario::{GsId, GslLinks, GslTrace, ShellPair};

/// Hop decomposition of one candidate path through ground station `gs_id`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PathRecord {
    pub gs_id: GsId,
    /// Inter-plane hops in shell A.
    pub dxa: Hops,
    /// Intra-plane hops in shell A.
    pub dya: Hops,
    /// Inter-plane hops in shell B.
    pub dxb: Hops,
    /// Intra-plane hops in shell B.
    pub dyb: Hops,
    pub dist: Hops,
}

impl PathRecord {
    pub fn new(gs_id: GsId, dxa: Hops, dya: Hops, dxb: Hops, dyb: Hops) -> Self {
        PathRecord {
            gs_id,
            dxa,
            dya,
            dxb,
            dyb,
            dist: dxa + dya + dxb + dyb,
        }
    }

    pub fn components(&self) -> [Hops; 4] {
        [self.dxa, self.dya, self.dxb, self.dyb]
    }
}

/// Path records for every slot of a query, `D[slot]` sorted by `gs_id`.
pub type RoutingData = Vec<Vec<PathRecord>>;

/// Builds the candidate set for one slot. Ground stations missing a link in
/// either shell are skipped.
pub fn compute_slot_records(
    slot: usize,
    src: SatIndex,
    dst: SatIndex,
    slot_links: &BTreeMap<GsId, GslLinks>,
    shells: &ShellPair,
) -> Result<Vec<PathRecord>> {
    shells.a.check_index(src)?;
    shells.b.check_index(dst)?;
    let mut records = Vec::with_capacity(slot_links.len());
    for (&gs_id, links) in slot_links {
        let (Some(sat_a), Some(sat_b)) = (links.sat_a, links.sat_b) else {
            continue;
        };
        let ha = shells.a.hop_components(src, sat_a)?;
        let hb = shells.b.hop_components(dst, sat_b)?;
        records.push(PathRecord::new(gs_id, ha.x, ha.y, hb.x, hb.y));
    }
    if records.is_empty() {
        return Err(Error::UnroutableSlot { slot });
    }
    Ok(records)
}

pub fn build_routing_data(
    src: SatIndex,
    dst: SatIndex,
    trace: &GslTrace,
    shells: &ShellPair,
) -> Result<RoutingData> {
    trace
        .slots()
        .iter()
        .enumerate()
        .map(|(slot, links)| compute_slot_records(slot, src, dst, links, shells))
        .collect()
}
