//! Greedy comparison strategies: per-slot minimum hop count, and the adaptive
//! scheme that prefers paths similar to the previous slot's choice.

use crate::error::{Error, Result};
use crate::metrics::{delta_isl, Weights};
use crate::pathcalc::PathRecord;
use crate::solver::{check_routing_data, RouteSolution, Strategy};

pub const DEFAULT_SIMILARITY_THRESHOLD: f64 = 0.6;

/// First record with the smallest `dist`. Records are gs_id-sorted, so ties
/// resolve to the lowest gs_id.
fn shortest<'a>(candidates: impl IntoIterator<Item = &'a PathRecord>) -> Option<&'a PathRecord> {
    candidates
        .into_iter()
        .fold(None, |best: Option<&PathRecord>, r| match best {
            Some(b) if b.dist <= r.dist => Some(b),
            _ => Some(r),
        })
}

pub fn min_hop_route(data: &[Vec<PathRecord>], w: &Weights) -> Result<RouteSolution> {
    check_routing_data(data)?;
    let records = data
        .iter()
        .map(|slot| *shortest(slot).expect("slot checked non-empty"))
        .collect();
    Ok(RouteSolution::from_records(Strategy::MinHop, records, *w))
}

/// `1 - delta_isl / max(dist)`, clamped to [0, 1]; two zero-hop paths are
/// fully similar.
pub fn path_similarity(p: &PathRecord, q: &PathRecord) -> f64 {
    let longest = p.dist.max(q.dist);
    if longest == 0 {
        return 1.0;
    }
    let delta = delta_isl(p, q);
    if delta >= longest {
        0.0
    } else {
        (longest - delta) as f64 / longest as f64
    }
}

/// Each slot keeps to candidates whose similarity to the previous choice is at
/// least `threshold` and takes the shortest of them; with no such candidate it
/// takes the shortest path overall.
pub fn adaptive_route(
    data: &[Vec<PathRecord>],
    threshold: f64,
    w: &Weights,
) -> Result<RouteSolution> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::config(
            "similarity_threshold",
            format!("must lie in [0, 1] (got {threshold})"),
        ));
    }
    check_routing_data(data)?;
    let mut records: Vec<PathRecord> = Vec::with_capacity(data.len());
    for slot in data {
        let choice = match records.last() {
            None => shortest(slot),
            Some(prev) => {
                shortest(slot.iter().filter(|c| path_similarity(c, prev) >= threshold))
                    .or_else(|| shortest(slot))
            }
        };
        records.push(*choice.expect("slot checked non-empty"));
    }
    Ok(RouteSolution::from_records(Strategy::Adaptive, records, *w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::GsId;

    fn rec(g: GsId, c: [u32; 4]) -> PathRecord {
        PathRecord::new(g, c[0], c[1], c[2], c[3])
    }

    #[test]
    fn min_hop_picks_shortest_lowest_id() {
        let w = Weights::default();
        let data = vec![
            vec![rec(0, [1, 1, 1, 1]), rec(1, [2, 2, 1, 1])],
            vec![rec(0, [3, 0, 0, 0]), rec(2, [0, 0, 0, 3]), rec(5, [1, 0, 0, 0])],
            vec![rec(0, [3, 0, 0, 0]), rec(2, [0, 0, 0, 3])],
        ];
        let sol = min_hop_route(&data, &w).unwrap();
        assert_eq!(sol.gs_sequence, vec![0, 5, 0]);
        assert_eq!(sol.strategy, Strategy::MinHop);
    }

    #[test]
    fn similarity_examples() {
        let p = rec(0, [3, 3, 2, 2]);
        let q = rec(1, [1, 1, 1, 1]);
        assert_eq!(path_similarity(&p, &p), 1.0);
        let s = path_similarity(&p, &q);
        assert!((s - 0.4).abs() < 1e-15);
        assert!(s < DEFAULT_SIMILARITY_THRESHOLD);
        assert_eq!(path_similarity(&rec(0, [0; 4]), &rec(1, [0; 4])), 1.0);
        // delta 4 exceeds both lengths
        assert_eq!(path_similarity(&rec(0, [2, 0, 0, 0]), &rec(1, [0, 2, 0, 0])), 0.0);
        // exactly at the threshold: 1 - 4/10
        let a = rec(0, [3, 3, 2, 2]);
        let b = rec(1, [2, 2, 1, 1]);
        assert!(path_similarity(&a, &b) >= DEFAULT_SIMILARITY_THRESHOLD);
    }

    #[test]
    fn adaptive_sticks_with_similar_path() {
        let w = Weights::default();
        let data = vec![
            vec![rec(0, [2, 2, 2, 2]), rec(1, [4, 4, 4, 4])],
            // gs1 is shorter but dissimilar to (2,2,2,2); gs0 repeats
            vec![rec(0, [2, 2, 2, 2]), rec(1, [0, 0, 0, 1])],
        ];
        let sol = adaptive_route(&data, 0.6, &w).unwrap();
        assert_eq!(sol.gs_sequence, vec![0, 0]);
        assert_eq!(min_hop_route(&data, &w).unwrap().gs_sequence, vec![0, 1]);
    }

    #[test]
    fn adaptive_falls_back_to_shortest() {
        let w = Weights::default();
        let data = vec![
            vec![rec(0, [5, 5, 0, 0])],
            vec![rec(0, [0, 0, 5, 6]), rec(1, [0, 0, 5, 5])],
        ];
        let sol = adaptive_route(&data, 0.6, &w).unwrap();
        assert_eq!(sol.gs_sequence, vec![0, 1]);
    }

    #[test]
    fn zero_threshold_equals_min_hop() {
        let w = Weights::default();
        let data = vec![
            vec![rec(3, [1, 1, 1, 1]), rec(4, [2, 2, 1, 1])],
            vec![rec(3, [3, 3, 2, 2]), rec(4, [2, 2, 1, 1]), rec(9, [0, 0, 1, 5])],
        ];
        assert_eq!(
            adaptive_route(&data, 0.0, &w).unwrap().gs_sequence,
            min_hop_route(&data, &w).unwrap().gs_sequence
        );
    }

    #[test]
    fn bad_threshold_rejected() {
        let data = vec![vec![rec(0, [0; 4])]];
        assert!(adaptive_route(&data, 1.5, &Weights::default()).is_err());
        assert!(adaptive_route(&data, -0.1, &Weights::default()).is_err());
    }
}
