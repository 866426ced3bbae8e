//! Causal-effect estimation for observational studies where the
//! treatment time is unknown and only a later event proxy is observed.
//!
//! The library estimates how far before an observed event the latent
//! treatment could plausibly have acted — the last plausible
//! randomized-experiment day — by scanning matched treated/control
//! difference series, then truncates the analysis window accordingly
//! before estimating per-day effects on held-out units.
//!
//! The pipeline, end to end:
//!
//! 1. [`matching`] fits a ridge-penalized propensity model and pairs
//!    treated with control units.
//! 2. [`estimator`] finds each pair's last plausible experiment day and
//!    aggregates the implied window lengths.
//! 3. [`study`] splits units into a pilot (window estimation) and a
//!    main study (effect estimation) so no unit informs both.
//! 4. [`sim`] and [`datagen`] provide fully synthetic benchmarks and a
//!    population-proportional tradezone generator for panel data.

pub mod datagen;
pub mod error;
pub mod estimator;
pub mod matching;
pub mod model;
pub mod rng;
pub mod sim;
pub mod study;

pub use error::{Error, Result};
pub use estimator::{
    aggregate, estimate_pair_lapret, heuristic_ranges, Aggregation, HeuristicRanges, LapretParams,
    PairLapret, PilotResult,
};
pub use matching::{fit_propensity, match_units, MatchSet, PropensityModel};
pub use model::{
    build_pair, impute_treatment, Day, MatchedPair, OutcomeAccess, PotentialOutcomePair,
    TreatmentAssignment, UnitSeries,
};
pub use sim::{generate, surface, sweep, Contamination, Scenario, ScenarioSpec, SweepGrid};
pub use study::{
    estimate_effects, run_main, run_pilot, sensitivity_sweep, split, EffectEstimate, StudyConfig,
    StudyPlan, StudyResult, Transform,
};
