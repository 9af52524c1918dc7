//! Multi-pair, multi-strategy experiment campaigns and their CSV reports.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{adaptive_route, min_hop_route, DEFAULT_SIMILARITY_THRESHOLD};
use crate::error::{Error, Result};
use crate::grid::{SatIndex, ShellConfig};
use crate::metrics::{gs_load_variance, summarize, MetricSeries, Weights};
use crate::pathcalc::{build_routing_data, RoutingData};
use crate::presets;
use crate::scenario::{generate_gsl_trace, load_gsl_trace, GsId, GslTrace, ScenarioConfig, ShellPair};
use crate::solver::{dp_irc_solve, RouteSolution, Strategy};

pub const DEFAULT_PAIR_COUNT: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSample {
    pub count: usize,
    pub seed: u64,
}

impl Default for PairSample {
    fn default() -> Self {
        PairSample {
            count: DEFAULT_PAIR_COUNT,
            seed: 1,
        }
    }
}

fn default_strategies() -> Vec<Strategy> {
    Strategy::ROUTING.to_vec()
}

fn default_threshold() -> f64 {
    DEFAULT_SIMILARITY_THRESHOLD
}

/// Campaign description. Exactly one of `preset`, `scenario` or `trace`
/// provides the GSL assignments; a trace is read against `shell_a`/`shell_b`
/// (default: the Starlink/OneWeb shells).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Campaign {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shell_a: Option<ShellConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shell_b: Option<ShellConfig>,
    /// Explicit `(src, dst)` pairs; overrides `pair_sample`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<(SatIndex, SatIndex)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair_sample: Option<PairSample>,
    #[serde(default = "default_strategies")]
    pub strategies: Vec<Strategy>,
    #[serde(default)]
    pub weights: Weights,
    #[serde(default = "default_threshold")]
    pub similarity_threshold: f64,
    /// Ground-station counts to evaluate; the full set when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gs_subset_sizes: Option<Vec<usize>>,
    #[serde(default)]
    pub subset_seed: u64,
}

impl Campaign {
    /// Campaign over a bundled preset with default settings.
    pub fn for_preset(name: &str) -> Self {
        Campaign {
            preset: Some(name.into()),
            scenario: None,
            trace: None,
            shell_a: None,
            shell_b: None,
            pairs: None,
            pair_sample: None,
            strategies: default_strategies(),
            weights: Weights::default(),
            similarity_threshold: DEFAULT_SIMILARITY_THRESHOLD,
            gs_subset_sizes: None,
            subset_seed: 0,
        }
    }

    /// Reads TOML, or JSON for `.json` files. A run manifest is accepted as
    /// well. Relative trace paths resolve against the file's directory.
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)?;
        let mut c: Campaign = if path.extension().is_some_and(|e| e == "json") {
            let value: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| Error::ConfigParse(e.to_string()))?;
            let inner = match value.get("campaign") {
                Some(c) => c.clone(),
                None => value,
            };
            serde_json::from_value(inner).map_err(|e| Error::ConfigParse(e.to_string()))?
        } else {
            toml::from_str(&text).map_err(|e| Error::ConfigParse(e.to_string()))?
        };
        if let Some(t) = c.trace.as_mut() {
            if t.is_relative() {
                if let Some(dir) = path.parent() {
                    *t = dir.join(&*t);
                }
            }
        }
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        let sources = [
            self.preset.is_some(),
            self.scenario.is_some(),
            self.trace.is_some(),
        ];
        if sources.iter().filter(|&&s| s).count() != 1 {
            return Err(Error::config(
                "preset",
                "exactly one of `preset`, `scenario`, `trace` must be given",
            ));
        }
        if self.trace.is_none() && (self.shell_a.is_some() || self.shell_b.is_some()) {
            return Err(Error::config("shell_a", "shells may only accompany `trace`"));
        }
        if self.strategies.is_empty() {
            return Err(Error::config("strategies", "must not be empty"));
        }
        if let Some(s) = self.strategies.iter().find(|s| **s == Strategy::BruteForce) {
            return Err(Error::config("strategies", format!("`{s}` is not a campaign strategy")));
        }
        if !(0.0..=1.0).contains(&self.similarity_threshold) {
            return Err(Error::config(
                "similarity_threshold",
                format!("must lie in [0, 1] (got {})", self.similarity_threshold),
            ));
        }
        match (&self.pairs, &self.pair_sample) {
            (Some(p), _) if p.is_empty() => {
                return Err(Error::config("pairs", "must not be empty"));
            }
            (None, Some(s)) if s.count == 0 => {
                return Err(Error::config("pair_sample.count", "must be >= 1"));
            }
            _ => {}
        }
        Ok(())
    }

    fn prepare(&self) -> Result<Prepared> {
        self.validate()?;
        let (shells, trace, gs_ids) = if let Some(path) = &self.trace {
            let shells = ShellPair {
                a: self.shell_a.clone().unwrap_or_else(presets::starlink_shell1),
                b: self.shell_b.clone().unwrap_or_else(presets::oneweb_primary),
            };
            shells.a.validate("shell_a")?;
            shells.b.validate("shell_b")?;
            let trace = load_gsl_trace(path, &shells)?;
            let ids = trace.gs_ids();
            (shells, trace, ids)
        } else {
            let cfg = match (&self.preset, &self.scenario) {
                (Some(name), _) => presets::preset(name)?,
                (None, Some(cfg)) => cfg.clone(),
                (None, None) => unreachable!("validated"),
            };
            let trace = generate_gsl_trace(&cfg)?;
            let mut ids: Vec<GsId> = cfg.ground_stations.iter().map(|g| g.gs_id).collect();
            ids.sort_unstable();
            (cfg.shells(), trace, ids)
        };

        let pairs = match &self.pairs {
            Some(p) => p.clone(),
            None => sample_pairs(&shells, self.pair_sample.unwrap_or_default())?,
        };
        for (i, &(src, dst)) in pairs.iter().enumerate() {
            shells.a.check_index(src).map_err(|e| annotate(i, src, dst, e))?;
            shells.b.check_index(dst).map_err(|e| annotate(i, src, dst, e))?;
        }

        let sizes = self.gs_subset_sizes.clone().unwrap_or_else(|| vec![gs_ids.len()]);
        if sizes.is_empty() {
            return Err(Error::config("gs_subset_sizes", "must not be empty"));
        }
        if let Some(&k) = sizes.iter().find(|&&k| k == 0 || k > gs_ids.len()) {
            return Err(if k == 0 {
                Error::config("gs_subset_sizes", "sizes must be >= 1")
            } else {
                Error::SubsetTooLarge {
                    requested: k,
                    available: gs_ids.len(),
                }
            });
        }
        Ok(Prepared {
            shells,
            trace,
            gs_ids,
            pairs,
            sizes,
        })
    }
}

struct Prepared {
    shells: ShellPair,
    trace: GslTrace,
    gs_ids: Vec<GsId>,
    pairs: Vec<(SatIndex, SatIndex)>,
    sizes: Vec<usize>,
}

fn annotate(pair_id: usize, src: SatIndex, dst: SatIndex, e: Error) -> Error {
    Error::Pair {
        pair_id,
        src,
        dst,
        source: Box::new(e),
    }
}

/// Distinct `(src, dst)` pairs drawn uniformly from the two shells.
pub fn sample_pairs(shells: &ShellPair, sample: PairSample) -> Result<Vec<(SatIndex, SatIndex)>> {
    let (na, nb) = (shells.a.n_satellites(), shells.b.n_satellites());
    if sample.count > na * nb {
        return Err(Error::config(
            "pair_sample.count",
            format!("{} exceeds the {} possible pairs", sample.count, na * nb),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(sample.seed);
    let mut seen = BTreeSet::new();
    let mut pairs = Vec::with_capacity(sample.count);
    while pairs.len() < sample.count {
        let p = (rng.gen_range(0..na), rng.gen_range(0..nb));
        if seen.insert(p) {
            pairs.push(p);
        }
    }
    Ok(pairs)
}

/// Seeded uniform sample of `k` stations without replacement, returned in
/// ascending id order.
pub fn subset_ground_stations(gs: &[GsId], k: usize, seed: u64) -> Result<Vec<GsId>> {
    if k > gs.len() {
        return Err(Error::SubsetTooLarge {
            requested: k,
            available: gs.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked: Vec<GsId> = gs.choose_multiple(&mut rng, k).copied().collect();
    picked.sort_unstable();
    Ok(picked)
}

/// Runs `strategy` on prepared routing data.
pub fn route(
    strategy: Strategy,
    data: &RoutingData,
    weights: &Weights,
    similarity_threshold: f64,
) -> Result<RouteSolution> {
    match strategy {
        Strategy::DpIrc => dp_irc_solve(data, weights),
        Strategy::MinHop => min_hop_route(data, weights),
        Strategy::Adaptive => adaptive_route(data, similarity_threshold, weights),
        Strategy::BruteForce => crate::solver::brute_force_solve(data, weights),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub pair_id: usize,
    pub src: SatIndex,
    pub dst: SatIndex,
    pub gs_count: usize,
    pub strategy: Strategy,
    pub solution: RouteSolution,
    pub metrics: MetricSeries,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateRow {
    pub strategy: Strategy,
    pub gs_count: usize,
    /// Mean over pairs of each pair's mean switching rate.
    pub mean_switching_rate: Option<f64>,
    pub mean_cumulative_distance: f64,
    pub mean_cumulative_irc: f64,
    /// Variance of selection counts summed over all pairs.
    pub gs_load_variance: f64,
    pub total_load: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub package: String,
    pub version: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub cells_completed: usize,
    pub campaign: Campaign,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignReport {
    pub cells: Vec<CellResult>,
    pub aggregates: Vec<AggregateRow>,
    pub manifest: Manifest,
}

impl CampaignReport {
    pub fn cells_for(&self, strategy: Strategy, gs_count: usize) -> impl Iterator<Item = &CellResult> {
        self.cells
            .iter()
            .filter(move |c| c.strategy == strategy && c.gs_count == gs_count)
    }

    pub fn aggregate(&self, strategy: Strategy, gs_count: usize) -> Option<&AggregateRow> {
        self.aggregates
            .iter()
            .find(|a| a.strategy == strategy && a.gs_count == gs_count)
    }

    /// Per-slot CSV over every cell.
    pub fn slots_csv(&self) -> String {
        let mut out = String::from(
            "pair_id,strategy,gs_count,slot,gs_selected,hops,delta_isl,switching_rate,cumulative_irc\n",
        );
        for c in &self.cells {
            let m = &c.metrics;
            for t in 0..m.per_slot_hops.len() {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    c.pair_id,
                    c.strategy,
                    c.gs_count,
                    t,
                    c.solution.gs_sequence[t],
                    m.per_slot_hops[t],
                    m.per_slot_delta_isl[t],
                    fmt_opt(m.per_slot_switching_rate[t]),
                    fmt_f(m.per_slot_cumulative_irc[t]),
                );
            }
        }
        out
    }

    /// One row per (pair, strategy, gs_count).
    pub fn pairs_csv(&self) -> String {
        let mut out = String::from(
            "pair_id,src,dst,strategy,gs_count,mean_switching_rate,cumulative_distance,cumulative_irc\n",
        );
        for c in &self.cells {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                c.pair_id,
                c.src,
                c.dst,
                c.strategy,
                c.gs_count,
                fmt_opt(c.metrics.mean_switching_rate()),
                c.metrics.cumulative_distance,
                fmt_f(c.metrics.cumulative_irc),
            );
        }
        out
    }

    pub fn aggregate_csv(&self) -> String {
        let mut out = String::from(
            "strategy,gs_count,mean_switching_rate,mean_cumulative_distance,gs_load_variance\n",
        );
        for a in &self.aggregates {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                a.strategy,
                a.gs_count,
                fmt_opt(a.mean_switching_rate),
                fmt_f(a.mean_cumulative_distance),
                fmt_f(a.gs_load_variance),
            );
        }
        out
    }

    pub fn manifest_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.manifest).expect("manifest serializes");
        s.push('\n');
        s
    }

    /// Writes `slots.csv`, `pairs.csv`, `aggregate.csv` and `manifest.json`.
    pub fn write_to_dir(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        fs::write(dir.join("slots.csv"), self.slots_csv())?;
        fs::write(dir.join("pairs.csv"), self.pairs_csv())?;
        fs::write(dir.join("aggregate.csv"), self.aggregate_csv())?;
        fs::write(dir.join("manifest.json"), self.manifest_json())?;
        Ok(())
    }
}

fn fmt_f(x: f64) -> String {
    format!("{x:.6}")
}

/// Undefined values are written as empty fields.
fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f).unwrap_or_default()
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

fn aggregate(cells: &[CellResult], strategies: &[Strategy], sizes: &[usize]) -> Vec<AggregateRow> {
    let mut rows = Vec::new();
    for &k in sizes {
        for &s in strategies {
            let group: Vec<&CellResult> = cells
                .iter()
                .filter(|c| c.strategy == s && c.gs_count == k)
                .collect();
            if group.is_empty() {
                continue;
            }
            let mut loads: BTreeMap<GsId, u64> = BTreeMap::new();
            for c in &group {
                for (g, n) in &c.metrics.gs_load {
                    *loads.entry(*g).or_insert(0) += n;
                }
            }
            rows.push(AggregateRow {
                strategy: s,
                gs_count: k,
                mean_switching_rate: mean(group.iter().filter_map(|c| c.metrics.mean_switching_rate())),
                mean_cumulative_distance: mean(
                    group.iter().map(|c| c.metrics.cumulative_distance as f64),
                )
                .unwrap_or(0.0),
                mean_cumulative_irc: mean(group.iter().map(|c| c.metrics.cumulative_irc))
                    .unwrap_or(0.0),
                gs_load_variance: gs_load_variance(&loads, k),
                total_load: loads.values().sum(),
            });
        }
    }
    rows
}

fn run_pair(
    c: &Campaign,
    shells: &ShellPair,
    trace: &GslTrace,
    gs_count: usize,
    pair_id: usize,
    (src, dst): (SatIndex, SatIndex),
) -> Result<Vec<CellResult>> {
    let data = build_routing_data(src, dst, trace, shells)?;
    c.strategies
        .iter()
        .map(|&strategy| {
            let solution = route(strategy, &data, &c.weights, c.similarity_threshold)?;
            let metrics = summarize(&solution);
            Ok(CellResult {
                pair_id,
                src,
                dst,
                gs_count,
                strategy,
                solution,
                metrics,
            })
        })
        .collect()
}

/// Runs the campaign, keeping every cell completed before the first failure.
pub fn run_campaign_partial(c: &Campaign) -> (CampaignReport, Option<Error>) {
    let mut resolved = c.clone();
    let mut cells = Vec::new();
    let mut failure = None;
    let mut sizes = Vec::new();

    match c.prepare() {
        Err(e) => failure = Some(e),
        Ok(p) => {
            resolved.pairs = Some(p.pairs.clone());
            if let Some(t) = resolved.trace.as_mut() {
                if let Ok(abs) = fs::canonicalize(&*t) {
                    *t = abs;
                }
            }
            sizes = p.sizes.clone();
            'subsets: for &k in &p.sizes {
                let trace = if k == p.gs_ids.len() {
                    p.trace.clone()
                } else {
                    let keep = match subset_ground_stations(&p.gs_ids, k, c.subset_seed) {
                        Ok(keep) => keep,
                        Err(e) => {
                            failure = Some(e);
                            break;
                        }
                    };
                    match p.trace.restrict(&keep, &p.shells) {
                        Ok(t) => t,
                        Err(e) => {
                            failure = Some(e);
                            break;
                        }
                    }
                };
                let results: Vec<Result<Vec<CellResult>>> = p
                    .pairs
                    .par_iter()
                    .enumerate()
                    .map(|(i, &pair)| {
                        run_pair(c, &p.shells, &trace, k, i, pair)
                            .map_err(|e| annotate(i, pair.0, pair.1, e))
                    })
                    .collect();
                for r in results {
                    match r {
                        Ok(mut v) => cells.append(&mut v),
                        Err(e) => {
                            failure = Some(e);
                            break 'subsets;
                        }
                    }
                }
            }
        }
    }

    let aggregates = aggregate(&cells, &c.strategies, &sizes);
    let manifest = Manifest {
        package: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        status: if failure.is_some() { "failed" } else { "complete" }.into(),
        error: failure.as_ref().map(|e| e.to_string()),
        cells_completed: cells.len(),
        campaign: resolved,
    };
    (
        CampaignReport {
            cells,
            aggregates,
            manifest,
        },
        failure,
    )
}

/// Runs `f` on a worker pool capped at `jobs` threads (all cores when `None`).
pub fn with_jobs<R: Send>(jobs: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        if n == 0 {
            return Err(Error::config("jobs", "must be >= 1"));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::config("jobs", e.to_string()))?;
    Ok(pool.install(f))
}

pub fn run_campaign(c: &Campaign) -> Result<CampaignReport> {
    match run_campaign_partial(c) {
        (report, None) => Ok(report),
        (_, Some(e)) => Err(e),
    }
}
