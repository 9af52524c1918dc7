//! Switching cost, integrated routing cost (IRC) and per-run statistics.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Hops;
use crate::pathcalc::PathRecord;
use crate::scenario::GsId;
use crate::solver::RouteSolution;

/// Largest denominator tried when recovering a rational weight.
const MAX_RATIONAL_DEN: i64 = 1_000_000;
/// Fallback fixed-point denominator for weights with no small rational form.
const FIXED_POINT_DEN: i64 = 1 << 32;

/// Hop-count weight `alpha` and switching weight `beta`, with
/// `alpha + beta = 1`.
///
/// The weights are also held as integers over a common denominator so that
/// cost accumulation and tie detection happen in exact arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWeights", into = "RawWeights")]
pub struct Weights {
    alpha: f64,
    beta: f64,
    alpha_num: i64,
    beta_num: i64,
    den: i64,
}

#[derive(Serialize, Deserialize)]
struct RawWeights {
    alpha: f64,
    beta: f64,
}

impl TryFrom<RawWeights> for Weights {
    type Error = Error;
    fn try_from(raw: RawWeights) -> Result<Self> {
        Weights::new(raw.alpha, raw.beta)
    }
}

impl From<Weights> for RawWeights {
    fn from(w: Weights) -> Self {
        RawWeights {
            alpha: w.alpha,
            beta: w.beta,
        }
    }
}

impl Weights {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::config("alpha", format!("must lie in [0, 1] (got {alpha})")));
        }
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::config("beta", format!("must lie in [0, 1] (got {beta})")));
        }
        if (alpha + beta - 1.0).abs() > 1e-12 {
            return Err(Error::config(
                "beta",
                format!("alpha + beta must equal 1 (got {alpha} + {beta})"),
            ));
        }
        let (alpha_num, den) = rational_approx(alpha);
        Ok(Weights {
            alpha,
            beta,
            alpha_num,
            beta_num: den - alpha_num,
            den,
        })
    }

    /// Weights with `beta = 1 - alpha`.
    pub fn from_alpha(alpha: f64) -> Result<Self> {
        Self::new(alpha, 1.0 - alpha)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Common denominator of the integer weight representation.
    pub fn denominator(&self) -> i64 {
        self.den
    }

    /// IRC scaled by [`Self::denominator`], exact.
    pub fn scaled_cost(&self, dist: Hops, delta: Hops) -> i64 {
        self.alpha_num * dist as i64 + self.beta_num * delta as i64
    }

    pub fn unscale(&self, scaled: i64) -> f64 {
        scaled as f64 / self.den as f64
    }
}

impl Default for Weights {
    fn default() -> Self {
        Weights::new(0.5, 0.5).expect("0.5/0.5 is valid")
    }
}

/// Best rational `n / d` for `x` in [0, 1] with `d <= MAX_RATIONAL_DEN`,
/// falling back to 32-bit fixed point when no such fraction is within 1e-12.
fn rational_approx(x: f64) -> (i64, i64) {
    // Continued-fraction convergents.
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
    let mut frac = x;
    loop {
        let a = frac.floor();
        let (p2, q2) = (a as i64 * p1 + p0, a as i64 * q1 + q0);
        if q2 > MAX_RATIONAL_DEN {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        if (x - p1 as f64 / q1 as f64).abs() <= 1e-12 {
            return (p1, q1);
        }
        let rem = frac - a;
        if rem < 1e-15 {
            break;
        }
        frac = 1.0 / rem;
    }
    ((x * FIXED_POINT_DEN as f64).round() as i64, FIXED_POINT_DEN)
}

/// Sum of absolute per-axis hop changes across both shells.
pub fn delta_isl(p: &PathRecord, q: &PathRecord) -> Hops {
    p.components()
        .iter()
        .zip(q.components())
        .map(|(a, b)| a.abs_diff(b))
        .sum()
}

/// Integrated routing cost of choosing `p_t` after `p_prev`.
pub fn irc(p_t: &PathRecord, p_prev: &PathRecord, w: &Weights) -> f64 {
    w.alpha * p_t.dist as f64 + w.beta * delta_isl(p_t, p_prev) as f64
}

/// `delta / prev_total_hops`; `None` when the previous path had zero hops but
/// the path changed, since the ratio is undefined there.
pub fn switching_rate(delta: Hops, prev_total_hops: Hops) -> Option<f64> {
    match (delta, prev_total_hops) {
        (0, 0) => Some(0.0),
        (_, 0) => None,
        (d, h) => Some(d as f64 / h as f64),
    }
}

/// Population variance of per-station selection counts. Stations absent from
/// `loads` count as zero.
pub fn gs_load_variance(loads: &BTreeMap<GsId, u64>, n_stations: usize) -> f64 {
    assert!(n_stations >= 1, "n_stations must be positive");
    assert!(loads.len() <= n_stations, "more loaded stations than stations");
    let n = n_stations as f64;
    let mean = loads.values().sum::<u64>() as f64 / n;
    let loaded: f64 = loads.values().map(|&c| (c as f64 - mean).powi(2)).sum();
    let idle = (n_stations - loads.len()) as f64 * mean * mean;
    (loaded + idle) / n
}

/// Per-slot series and totals derived from one [`RouteSolution`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSeries {
    pub per_slot_hops: Vec<Hops>,
    /// Slot 0 is always 0.
    pub per_slot_delta_isl: Vec<Hops>,
    /// Slot 0 is always `Some(0.0)`; `None` marks an undefined rate.
    pub per_slot_switching_rate: Vec<Option<f64>>,
    /// Includes slot 0.
    pub cumulative_distance: u64,
    pub cumulative_irc: f64,
    /// Running IRC total after each slot.
    pub per_slot_cumulative_irc: Vec<f64>,
    pub gs_load: BTreeMap<GsId, u64>,
}

impl MetricSeries {
    /// Mean switching rate over slots `1..T`, skipping undefined rates.
    /// `None` if no slot contributes.
    pub fn mean_switching_rate(&self) -> Option<f64> {
        let rates: Vec<f64> = self
            .per_slot_switching_rate
            .iter()
            .skip(1)
            .flatten()
            .copied()
            .collect();
        if rates.is_empty() {
            None
        } else {
            Some(rates.iter().sum::<f64>() / rates.len() as f64)
        }
    }

    pub fn mean_distance(&self) -> f64 {
        self.cumulative_distance as f64 / self.per_slot_hops.len() as f64
    }
}

pub fn summarize(solution: &RouteSolution) -> MetricSeries {
    let records = &solution.records;
    assert!(!records.is_empty(), "solution has no slots");
    let w = &solution.weights;

    let per_slot_hops: Vec<Hops> = records.iter().map(|r| r.dist).collect();
    let mut per_slot_delta_isl = vec![0];
    let mut per_slot_switching_rate = vec![Some(0.0)];
    let mut scaled = w.scaled_cost(records[0].dist, 0);
    let mut per_slot_cumulative_irc = vec![w.unscale(scaled)];
    for pair in records.windows(2) {
        let (prev, cur) = (&pair[0], &pair[1]);
        let delta = delta_isl(cur, prev);
        per_slot_delta_isl.push(delta);
        per_slot_switching_rate.push(switching_rate(delta, prev.dist));
        scaled += w.scaled_cost(cur.dist, delta);
        per_slot_cumulative_irc.push(w.unscale(scaled));
    }

    let mut gs_load = BTreeMap::new();
    for r in records {
        *gs_load.entry(r.gs_id).or_insert(0) += 1;
    }

    MetricSeries {
        cumulative_distance: per_slot_hops.iter().map(|&h| h as u64).sum(),
        per_slot_hops,
        per_slot_delta_isl,
        per_slot_switching_rate,
        cumulative_irc: w.unscale(scaled),
        per_slot_cumulative_irc,
        gs_load,
    }
}
