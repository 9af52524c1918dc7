//! Inter-shell routing for multi-shell LEO constellations.
//!
//! A source satellite in shell A reaches a destination in shell B through a
//! ground station that holds a link to both shells. For every time slot
//! [`pathcalc`] turns the GSL assignment into one candidate path per ground
//! station; [`solver`] then picks the station sequence minimising the
//! cumulative integrated routing cost, a weighted sum of path hop count and
//! hop changes between consecutive slots. [`baselines`] holds the greedy
//! comparison strategies and [`experiments`] runs multi-pair campaigns.

pub mod baselines;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod metrics;
pub mod pathcalc;
pub mod presets;
pub mod scenario;
pub mod solver;

pub use baselines::{adaptive_route, min_hop_route, path_similarity};
pub use error::{Error, Result};
pub use experiments::{run_campaign, Campaign, CampaignReport};
pub use grid::{ring_hops, GridCoord, HopVector, Hops, SatIndex, ShellConfig};
pub use metrics::{delta_isl, gs_load_variance, irc, summarize, switching_rate, MetricSeries, Weights};
pub use pathcalc::{build_routing_data, compute_slot_records, PathRecord, RoutingData};
pub use scenario::{
    generate_gsl_trace, load_gsl_trace, GroundStation, GsId, GslLinks, GslTrace, ScenarioConfig,
    ShellPair,
};
pub use solver::{brute_force_solve, dp_irc_solve, RouteSolution, Strategy};
