#![allow(dead_code)]

use std::collections::{BTreeMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shellroute::{GslLinks, GslTrace, GsId, PathRecord, RoutingData, ShellConfig, ShellPair};

/// BFS distances from `from` over an explicitly built +Grid torus.
pub fn bfs_torus(shell: &ShellConfig, from: usize) -> Vec<u32> {
    let (p, s) = (shell.n_planes, shell.sats_per_plane);
    let mut adj = vec![Vec::with_capacity(4); p * s];
    for x in 0..p {
        for y in 0..s {
            let u = x * s + y;
            adj[u].push(((x + 1) % p) * s + y);
            adj[u].push(((x + p - 1) % p) * s + y);
            adj[u].push(x * s + (y + 1) % s);
            adj[u].push(x * s + (y + s - 1) % s);
        }
    }
    let mut dist = vec![u32::MAX; p * s];
    dist[from] = 0;
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if dist[v] == u32::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

pub fn shell(id: &str, p: usize, s: usize) -> ShellConfig {
    ShellConfig::new(id, p, s, 550.0, 53.0).unwrap()
}

pub fn preset_shells() -> ShellPair {
    ShellPair {
        a: shellroute::presets::starlink_shell1(),
        b: shellroute::presets::oneweb_primary(),
    }
}

/// Random routing data: `1..=max_g` candidates per slot drawn from gs ids
/// `0..max_g`, hop components below `max_hop`.
pub fn random_routing_data(rng: &mut ChaCha8Rng, max_g: u32, max_t: usize, max_hop: u32) -> RoutingData {
    let t = rng.gen_range(1..=max_t);
    (0..t)
        .map(|_| {
            let mut ids: Vec<GsId> = (0..max_g).filter(|_| rng.gen_bool(0.7)).collect();
            if ids.is_empty() {
                ids.push(rng.gen_range(0..max_g));
            }
            ids.into_iter()
                .map(|g| {
                    PathRecord::new(
                        g,
                        rng.gen_range(0..max_hop),
                        rng.gen_range(0..max_hop),
                        rng.gen_range(0..max_hop),
                        rng.gen_range(0..max_hop),
                    )
                })
                .collect()
        })
        .collect()
}

/// Synthetic GSL trace: every station's satellites random-walk over the
/// torus from slot to slot, with occasional link dropouts.
pub fn synthetic_trace(seed: u64, n_gs: u32, n_slots: usize, shells: &ShellPair) -> GslTrace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let step = |rng: &mut ChaCha8Rng, sh: &ShellConfig, s: usize| {
        let (mut x, mut y) = (s / sh.sats_per_plane, s % sh.sats_per_plane);
        y = (y + rng.gen_range(0..=2)) % sh.sats_per_plane;
        if rng.gen_bool(0.2) {
            x = (x + 1) % sh.n_planes;
        }
        x * sh.sats_per_plane + y
    };
    let mut cur: Vec<(usize, usize)> = (0..n_gs)
        .map(|_| {
            (
                rng.gen_range(0..shells.a.n_satellites()),
                rng.gen_range(0..shells.b.n_satellites()),
            )
        })
        .collect();
    let mut slots = Vec::with_capacity(n_slots);
    for _ in 0..n_slots {
        let mut m = BTreeMap::new();
        for (g, c) in cur.iter_mut().enumerate() {
            c.0 = step(&mut rng, &shells.a, c.0);
            c.1 = step(&mut rng, &shells.b, c.1);
            let links = GslLinks {
                sat_a: (!rng.gen_bool(0.1)).then_some(c.0),
                sat_b: (!rng.gen_bool(0.1)).then_some(c.1),
            };
            m.insert(g as GsId, links);
        }
        // keep every slot routable
        if !m.values().any(GslLinks::is_full) {
            m.insert(0, GslLinks { sat_a: Some(cur[0].0), sat_b: Some(cur[0].1) });
        }
        slots.push(m);
    }
    GslTrace::new(slots, 300.0, shells).unwrap()
}
