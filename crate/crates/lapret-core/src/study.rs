//! The full study design: a stratified pilot/main split, pilot window
//! estimation, main-study truncation to the causal window, and
//! per-relative-day effect estimates with normal-approximation
//! confidence intervals.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{aggregate, estimate_pair_lapret, Aggregation, LapretParams, PilotResult};
use crate::matching::{fit_propensity, match_units};
use crate::model::{build_pair, Day, OutcomeAccess, UnitSeries};
use crate::rng;

/// Outcome transform applied before any matching or estimation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Transform {
    Levels,
    /// Day-over-day differences; removes unit-level baselines.
    LaggedDiff,
}

/// A resolved pilot/main split plus the analysis configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyPlan {
    pub pilot_unit_ids: BTreeSet<String>,
    pub main_unit_ids: BTreeSet<String>,
    pub params: LapretParams,
    pub aggregation: Aggregation,
    pub transform: Transform,
    pub seed: u64,
}

/// One average effect at a day relative to the event (0 = event day).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectEstimate {
    pub relative_day: Day,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_pairs: usize,
}

/// Pilot window estimate plus the main-study per-day effects.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub pilot: PilotResult,
    pub effects: Vec<EffectEstimate>,
    pub causal_window_days: Day,
}

/// Shared configuration for pilot and main runs built by callers of
/// [`split`] and [`sensitivity_sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub params: LapretParams,
    pub aggregation: Aggregation,
    pub transform: Transform,
    pub caliper: Option<f64>,
}

fn stratum_ids(units: &[UnitSeries], treated: bool) -> Vec<String> {
    let mut ids: Vec<String> = units
        .iter()
        .filter(|u| u.event_indicator == treated)
        .map(|u| u.unit_id.clone())
        .collect();
    ids.sort();
    ids
}

/// Splits units into disjoint pilot and main sets, stratified by the
/// event indicator so both strata appear in both halves.
pub fn split(
    units: &[UnitSeries],
    pilot_fraction: f64,
    seed: u64,
    config: &StudyConfig,
) -> Result<StudyPlan> {
    if !(pilot_fraction > 0.0 && pilot_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "pilot fraction must lie in (0, 1), got {pilot_fraction}"
        )));
    }
    let mut treated = stratum_ids(units, true);
    let mut control = stratum_ids(units, false);
    if treated.len() < 2 {
        return Err(Error::TooFewUnits {
            needed: 2,
            got: treated.len(),
            stratum: "treated",
        });
    }
    if control.len() < 2 {
        return Err(Error::TooFewUnits {
            needed: 2,
            got: control.len(),
            stratum: "control",
        });
    }

    let total = units.len();
    let target = ((pilot_fraction * total as f64).round() as usize).clamp(2, total - 2);
    let n_pilot_treated = ((pilot_fraction * treated.len() as f64).round() as usize)
        .clamp(1, treated.len() - 1);
    let n_pilot_control = target
        .saturating_sub(n_pilot_treated)
        .clamp(1, control.len() - 1);

    treated.shuffle(&mut rng::stream(seed, &[rng::label("split"), 1]));
    control.shuffle(&mut rng::stream(seed, &[rng::label("split"), 0]));

    let mut pilot = BTreeSet::new();
    let mut main = BTreeSet::new();
    for (i, id) in treated.into_iter().enumerate() {
        if i < n_pilot_treated {
            pilot.insert(id);
        } else {
            main.insert(id);
        }
    }
    for (i, id) in control.into_iter().enumerate() {
        if i < n_pilot_control {
            pilot.insert(id);
        } else {
            main.insert(id);
        }
    }
    Ok(StudyPlan {
        pilot_unit_ids: pilot,
        main_unit_ids: main,
        params: config.params,
        aggregation: config.aggregation,
        transform: config.transform,
        seed,
    })
}

fn apply_transform(units: Vec<UnitSeries>, transform: Transform) -> Result<Vec<UnitSeries>> {
    match transform {
        Transform::Levels => Ok(units),
        Transform::LaggedDiff => units.into_iter().map(|u| u.lagged_diff()).collect(),
    }
}

fn select_units(units: &[UnitSeries], ids: &BTreeSet<String>) -> Vec<UnitSeries> {
    units
        .iter()
        .filter(|u| ids.contains(&u.unit_id))
        .cloned()
        .collect()
}

/// Matches the given units and returns treated/control series pairs in
/// match order.
fn matched_series(
    units: Vec<UnitSeries>,
    caliper: Option<f64>,
) -> Result<Vec<(UnitSeries, UnitSeries)>> {
    let model = fit_propensity(&units)?;
    let match_set = match_units(&units, &model, caliper)?;
    let lookup = |id: &str| units.iter().find(|u| u.unit_id == id).unwrap().clone();
    Ok(match_set
        .pairs
        .iter()
        .map(|(t, c)| (lookup(t), lookup(c)))
        .collect())
}

/// Runs the pilot: transform, match, estimate per-pair windows and
/// aggregate.
pub fn run_pilot(
    units: &[UnitSeries],
    plan: &StudyPlan,
    caliper: Option<f64>,
) -> Result<PilotResult> {
    let selected = apply_transform(select_units(units, &plan.pilot_unit_ids), plan.transform)?;
    if selected.iter().filter(|u| u.event_indicator).count() == 0 {
        return Err(Error::TooFewUnits {
            needed: 1,
            got: 0,
            stratum: "treated",
        });
    }
    let pairs = matched_series(selected, caliper)?;
    let per_pair: Result<Vec<_>> = pairs
        .iter()
        .enumerate()
        .map(|(i, (t, c))| {
            let pair = build_pair(t, c, i as u64)?;
            estimate_pair_lapret(&pair, &plan.params)
        })
        .collect();
    Ok(aggregate(&per_pair?, plan.aggregation))
}

/// Per-relative-day mean pair differences with 95% normal confidence
/// intervals, reading outcomes only inside `[event - window, event]`.
pub fn estimate_effects<S: OutcomeAccess>(
    pairs: &[(S, S)],
    window: Day,
) -> Result<Vec<EffectEstimate>> {
    let mut effects = Vec::with_capacity(window as usize + 1);
    for tau in -window..=0 {
        let mut diffs = Vec::with_capacity(pairs.len());
        for (treated, control) in pairs {
            let event = treated
                .event_time()
                .ok_or(Error::EmptyWindow(tau))?;
            let day = event + tau;
            if let (Some(yt), Some(yc)) = (treated.outcome_at(day), control.outcome_at(day)) {
                diffs.push(yt - yc);
            }
        }
        if diffs.is_empty() {
            return Err(Error::EmptyWindow(tau));
        }
        let n = diffs.len() as f64;
        let mean = diffs.iter().sum::<f64>() / n;
        let sd = if diffs.len() > 1 {
            (diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        let half_width = 1.96 * sd / n.sqrt();
        effects.push(EffectEstimate {
            relative_day: tau,
            estimate: mean,
            ci_low: mean - half_width,
            ci_high: mean + half_width,
            n_pairs: diffs.len(),
        });
    }
    Ok(effects)
}

/// Runs the main study on the units the pilot never saw: matches them,
/// truncates each pair to the causal window implied by the pilot and
/// estimates per-day effects.
pub fn run_main(
    units: &[UnitSeries],
    plan: &StudyPlan,
    pilot: &PilotResult,
    caliper: Option<f64>,
) -> Result<StudyResult> {
    let shared = plan
        .pilot_unit_ids
        .intersection(&plan.main_unit_ids)
        .count();
    if shared > 0 {
        return Err(Error::PilotOverlap(shared));
    }
    let selected = apply_transform(select_units(units, &plan.main_unit_ids), plan.transform)?;
    let pairs = matched_series(selected, caliper)?;
    let window = pilot.d_floor.unwrap_or(0).max(0);
    let effects = estimate_effects(&pairs, window)?;
    Ok(StudyResult {
        pilot: pilot.clone(),
        effects,
        causal_window_days: window,
    })
}

/// Runs the full pilot+main pipeline once per labeled dataset.
pub fn sensitivity_sweep(
    datasets: &[(String, Vec<UnitSeries>)],
    pilot_fraction: f64,
    config: &StudyConfig,
    seed: u64,
) -> Result<Vec<(String, StudyResult)>> {
    if datasets.is_empty() {
        return Err(Error::InvalidParameter("no datasets to sweep".into()));
    }
    let mut out = Vec::with_capacity(datasets.len());
    for (i, (label, units)) in datasets.iter().enumerate() {
        let run_seed = rng::derive_seed(seed, &[rng::label("sensitivity"), i as u64]);
        let plan = split(units, pilot_fraction, run_seed, config)?;
        let pilot = run_pilot(units, &plan, config.caliper)?;
        let result = run_main(units, &plan, &pilot, config.caliper)?;
        out.push((label.clone(), result));
    }
    Ok(out)
}
