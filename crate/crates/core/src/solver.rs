//! Dynamic programming over (time slot, ground station) states minimising the
//! cumulative integrated routing cost, plus an exhaustive enumerator used as a
//! test oracle.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{delta_isl, Weights};
use crate::pathcalc::PathRecord;
use crate::scenario::GsId;

/// Default cap on the number of sequences [`brute_force_solve`] enumerates.
pub const DEFAULT_ORACLE_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    #[serde(alias = "dp_irc")]
    DpIrc,
    #[serde(alias = "min_hop")]
    MinHop,
    Adaptive,
    #[serde(alias = "brute_force")]
    BruteForce,
}

impl Strategy {
    pub const ROUTING: [Strategy; 3] = [Strategy::DpIrc, Strategy::MinHop, Strategy::Adaptive];

    pub fn as_str(&self) -> &'static str {
        match self {
            Strategy::DpIrc => "dp-irc",
            Strategy::MinHop => "min-hop",
            Strategy::Adaptive => "adaptive",
            Strategy::BruteForce => "brute-force",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dp-irc" | "dp_irc" => Ok(Strategy::DpIrc),
            "min-hop" | "min_hop" => Ok(Strategy::MinHop),
            "adaptive" => Ok(Strategy::Adaptive),
            _ => Err(Error::config(
                "strategy",
                format!("unknown strategy `{s}` (valid: dp-irc, min-hop, adaptive)"),
            )),
        }
    }
}

/// The ground station chosen in every slot together with its path record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteSolution {
    pub strategy: Strategy,
    pub gs_sequence: Vec<GsId>,
    pub records: Vec<PathRecord>,
    pub cumulative_irc: f64,
    /// `cumulative_irc` times `weights.denominator()`, exact.
    pub cumulative_irc_scaled: i64,
    pub weights: Weights,
}

impl RouteSolution {
    /// Wraps a chosen record sequence, computing its cumulative IRC.
    pub fn from_records(strategy: Strategy, records: Vec<PathRecord>, weights: Weights) -> Self {
        let scaled = sequence_cost(&records, &weights);
        RouteSolution {
            strategy,
            gs_sequence: records.iter().map(|r| r.gs_id).collect(),
            cumulative_irc: weights.unscale(scaled),
            cumulative_irc_scaled: scaled,
            records,
            weights,
        }
    }

    pub fn n_slots(&self) -> usize {
        self.records.len()
    }
}

/// Scaled cumulative IRC of a record sequence: `alpha * dist` for the first
/// slot, full IRC for every later one.
pub fn sequence_cost(records: &[PathRecord], w: &Weights) -> i64 {
    let Some(first) = records.first() else {
        return 0;
    };
    let mut cost = w.scaled_cost(first.dist, 0);
    for pair in records.windows(2) {
        cost += w.scaled_cost(pair[1].dist, delta_isl(&pair[1], &pair[0]));
    }
    cost
}

pub(crate) fn check_routing_data(data: &[Vec<PathRecord>]) -> Result<()> {
    if data.is_empty() {
        return Err(Error::config("routing_data", "needs at least one slot"));
    }
    if let Some(slot) = data.iter().position(|d| d.is_empty()) {
        return Err(Error::UnroutableSlot { slot });
    }
    Ok(())
}

/// Filled DP and predecessor tables. Values are scaled by the weight
/// denominator; row `j` has one entry per candidate of slot `j`.
#[derive(Debug, Clone)]
pub struct DpTable {
    pub cost: Vec<Vec<i64>>,
    pub prev: Vec<Vec<Option<usize>>>,
}

impl DpTable {
    pub fn build(data: &[Vec<PathRecord>], w: &Weights) -> Result<Self> {
        check_routing_data(data)?;
        let mut cost: Vec<Vec<i64>> = Vec::with_capacity(data.len());
        let mut prev: Vec<Vec<Option<usize>>> = Vec::with_capacity(data.len());

        cost.push(data[0].iter().map(|p| w.scaled_cost(p.dist, 0)).collect());
        prev.push(vec![None; data[0].len()]);

        for j in 1..data.len() {
            let (before, here) = (&data[j - 1], &data[j]);
            let mut row = vec![i64::MAX; here.len()];
            let mut back = vec![None; here.len()];
            for (i, p) in here.iter().enumerate() {
                for (k, q) in before.iter().enumerate() {
                    let c = cost[j - 1][k] + w.scaled_cost(p.dist, delta_isl(p, q));
                    // strict: the earliest predecessor wins ties
                    if c < row[i] {
                        row[i] = c;
                        back[i] = Some(k);
                    }
                }
            }
            cost.push(row);
            prev.push(back);
        }
        Ok(DpTable { cost, prev })
    }

    /// Candidate positions of the optimal sequence, first slot first.
    pub fn backtrack(&self) -> Vec<usize> {
        let last = self.cost.last().expect("table has at least one row");
        let mut m = argmin_first(last);
        let mut path = Vec::with_capacity(self.cost.len());
        for j in (0..self.cost.len()).rev() {
            path.push(m);
            if let Some(k) = self.prev[j][m] {
                m = k;
            }
        }
        path.reverse();
        path
    }
}

fn argmin_first(values: &[i64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v < values[best] {
            best = i;
        }
    }
    best
}

/// Optimal ground-station sequence under cumulative IRC.
pub fn dp_irc_solve(data: &[Vec<PathRecord>], w: &Weights) -> Result<RouteSolution> {
    let table = DpTable::build(data, w)?;
    let path = table.backtrack();
    let records: Vec<PathRecord> = path.iter().enumerate().map(|(j, &i)| data[j][i]).collect();
    let scaled = table.cost[data.len() - 1][path[data.len() - 1]];
    Ok(RouteSolution {
        strategy: Strategy::DpIrc,
        gs_sequence: records.iter().map(|r| r.gs_id).collect(),
        records,
        cumulative_irc: w.unscale(scaled),
        cumulative_irc_scaled: scaled,
        weights: *w,
    })
}

pub fn brute_force_solve(data: &[Vec<PathRecord>], w: &Weights) -> Result<RouteSolution> {
    brute_force_solve_capped(data, w, DEFAULT_ORACLE_CAP)
}

/// Enumerates every ground-station sequence. Ties go to the lexicographically
/// smallest sequence.
pub fn brute_force_solve_capped(
    data: &[Vec<PathRecord>],
    w: &Weights,
    cap: u128,
) -> Result<RouteSolution> {
    check_routing_data(data)?;
    let sequences = data
        .iter()
        .try_fold(1u128, |acc, d| acc.checked_mul(d.len() as u128))
        .unwrap_or(u128::MAX);
    if sequences > cap {
        return Err(Error::OracleTooLarge { sequences, cap });
    }

    let mut idx = vec![0usize; data.len()];
    let mut best: Option<(i64, Vec<usize>)> = None;
    loop {
        let records: Vec<PathRecord> = idx.iter().enumerate().map(|(j, &i)| data[j][i]).collect();
        let cost = sequence_cost(&records, w);
        // records are gs_id-sorted, so odometer order is lexicographic
        if best.as_ref().map_or(true, |(c, _)| cost < *c) {
            best = Some((cost, idx.clone()));
        }
        // odometer increment, last slot fastest
        let mut j = data.len();
        loop {
            if j == 0 {
                let (_, idx) = best.expect("at least one sequence");
                let records = idx.iter().enumerate().map(|(j, &i)| data[j][i]).collect();
                return Ok(RouteSolution::from_records(Strategy::BruteForce, records, *w));
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < data[j].len() {
                break;
            }
            idx[j] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(g: GsId, c: [u32; 4]) -> PathRecord {
        PathRecord::new(g, c[0], c[1], c[2], c[3])
    }

    fn worked_example() -> Vec<Vec<PathRecord>> {
        vec![
            vec![rec(0, [1, 1, 1, 1]), rec(1, [2, 2, 1, 1])],
            vec![rec(0, [3, 3, 2, 2]), rec(1, [2, 2, 1, 1])],
        ]
    }

    #[test]
    fn single_slot_uses_alpha_times_dist() {
        let data = vec![worked_example().remove(0)];
        let sol = dp_irc_solve(&data, &Weights::default()).unwrap();
        assert_eq!(sol.gs_sequence, vec![0]);
        assert_eq!(sol.cumulative_irc, 2.0);
        assert_eq!(brute_force_solve(&data, &Weights::default()).unwrap().cumulative_irc, 2.0);
    }

    #[test]
    fn worked_two_slot_example() {
        let w = Weights::default();
        let table = DpTable::build(&worked_example(), &w).unwrap();
        // scaled by 2: slot 0 = [4, 6]; slot 1 gs0 ties at 20 from both, gs1 ties at 12
        assert_eq!(table.cost, vec![vec![4, 6], vec![20, 12]]);
        assert_eq!(table.prev[1], vec![Some(0), Some(0)]);

        let sol = dp_irc_solve(&worked_example(), &w).unwrap();
        assert_eq!(sol.cumulative_irc, 6.0);
        assert_eq!(sol.gs_sequence, vec![0, 1]);
        assert_eq!(sol.strategy, Strategy::DpIrc);

        let oracle = brute_force_solve(&worked_example(), &w).unwrap();
        assert_eq!(oracle.cumulative_irc, 6.0);
        assert_eq!(oracle.gs_sequence, vec![0, 1]);
        assert_eq!(oracle.strategy, Strategy::BruteForce);
    }

    #[test]
    fn dp_total_matches_recomputation() {
        let w = Weights::from_alpha(0.3).unwrap();
        let sol = dp_irc_solve(&worked_example(), &w).unwrap();
        assert_eq!(sol.cumulative_irc_scaled, sequence_cost(&sol.records, &w));
        for (r, g) in sol.records.iter().zip(&sol.gs_sequence) {
            assert_eq!(r.gs_id, *g);
        }
    }

    #[test]
    fn zero_beta_picks_per_slot_minimum() {
        let data = vec![
            vec![rec(0, [3, 0, 0, 0]), rec(1, [1, 0, 0, 1]), rec(2, [0, 2, 0, 0])],
            vec![rec(0, [0, 0, 0, 1]), rec(1, [5, 5, 5, 5])],
        ];
        let sol = dp_irc_solve(&data, &Weights::from_alpha(1.0).unwrap()).unwrap();
        assert_eq!(sol.gs_sequence, vec![1, 0]);
    }

    #[test]
    fn empty_slots_are_errors() {
        let w = Weights::default();
        assert!(matches!(
            dp_irc_solve(&[vec![rec(0, [0; 4])], vec![]], &w),
            Err(Error::UnroutableSlot { slot: 1 })
        ));
        assert!(dp_irc_solve(&[], &w).is_err());
        assert!(brute_force_solve(&[vec![]], &w).is_err());
    }

    #[test]
    fn oracle_cap_enforced() {
        let slot: Vec<PathRecord> = (0..10).map(|g| rec(g, [g, 0, 0, 0])).collect();
        let data = vec![slot; 7];
        match brute_force_solve(&data, &Weights::default()) {
            Err(Error::OracleTooLarge { sequences, cap }) => {
                assert_eq!(sequences, 10_000_000);
                assert_eq!(cap, DEFAULT_ORACLE_CAP);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn strategy_parsing() {
        assert_eq!("dp-irc".parse::<Strategy>().unwrap(), Strategy::DpIrc);
        assert_eq!("min_hop".parse::<Strategy>().unwrap(), Strategy::MinHop);
        let err = "fastest".parse::<Strategy>().unwrap_err().to_string();
        assert!(err.contains("dp-irc, min-hop, adaptive"));
    }
}
