//! Per-pair LaPRET estimation, aggregation of the event-to-LaPRET gaps
//! into a single window estimate, and data-driven ranges for the two
//! tuning parameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Day, MatchedPair};

/// Tuning parameters of the LaPRET rule. `alpha` scales the tolerated
/// level difference; `epsilon` bounds the tolerated rate of change.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LapretParams {
    pub alpha: f64,
    pub epsilon: f64,
}

impl LapretParams {
    pub fn new(alpha: f64, epsilon: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite() && epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "alpha and epsilon must be finite and positive, got ({alpha}, {epsilon})"
            )));
        }
        Ok(Self { alpha, epsilon })
    }
}

/// One pair's estimated last plausible randomization day and its gap to
/// the event. Both are absent when the pair shows no detectable effect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairLapret {
    pub pair_id: u64,
    pub lapret_day: Option<Day>,
    pub d_i: Option<Day>,
}

/// How per-pair gaps are folded into the study-level estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Aggregation {
    /// Mean of the gaps from pairs that detected a LaPRET.
    Mean,
    /// Minimum detected gap; conservative under unit-varying gaps.
    Min,
    /// Mean over all pairs with undetected pairs contributing zero.
    /// This is the quantity the simulation sweeps report: it vanishes
    /// when detections vanish instead of going undefined.
    MeanZeroFill,
}

/// Aggregated pilot output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PilotResult {
    pub per_pair: Vec<PairLapret>,
    pub d_hat: Option<f64>,
    pub d_floor: Option<Day>,
    pub aggregation: Aggregation,
    pub n_detected: usize,
}

/// Suggested bounds for `alpha` and `epsilon`, computed from pooled
/// absolute differences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeuristicRanges {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub epsilon_min: f64,
    pub epsilon_max: f64,
}

/// Finds the pair's last plausible randomization day.
///
/// The estimate is the latest day `t` before the pair's event at which
/// the level difference is below a `1/alpha` fraction of its maximum,
/// its rate of change is below `epsilon`, and a later rate-of-change
/// spike (above `epsilon`) followed by a calm day (below `epsilon`)
/// occurs no later than the event day. Days on which the backward
/// difference is undefined fail the rate conditions.
pub fn estimate_pair_lapret(pair: &MatchedPair, params: &LapretParams) -> Result<PairLapret> {
    let event = pair.event_time;
    let pre_event_days = pair.delta.keys().filter(|&&t| t < event).count();
    if pre_event_days < 4 {
        return Err(Error::WindowTooShort {
            pair_id: pair.pair_id,
        });
    }

    let max_abs = pair
        .delta
        .iter()
        .filter(|(&t, _)| t <= event)
        .map(|(_, v)| v.abs())
        .fold(0.0f64, f64::max);
    let level_threshold = max_abs / params.alpha;
    let eps = params.epsilon;

    // calm_after[s] = does some day s2 in (s, event] have |ddelta| < eps
    let days: Vec<Day> = pair.delta.keys().copied().filter(|&t| t <= event).collect();
    let mut lapret_day = None;
    for &t in days.iter().rev() {
        if t >= event {
            continue;
        }
        if pair.delta[&t].abs() >= level_threshold {
            continue;
        }
        match pair.ddelta.get(&t) {
            Some(d) if d.abs() < eps => {}
            _ => continue,
        }
        // scan for the spike/calm tail t < s1 < s2 <= event
        let mut spiked = false;
        let mut tail_ok = false;
        for &s in days.iter().filter(|&&s| s > t) {
            if let Some(d) = pair.ddelta.get(&s) {
                if spiked && d.abs() < eps {
                    tail_ok = true;
                    break;
                }
                if d.abs() > eps {
                    spiked = true;
                }
            }
        }
        if tail_ok {
            lapret_day = Some(t);
            break;
        }
    }

    Ok(PairLapret {
        pair_id: pair.pair_id,
        lapret_day,
        d_i: lapret_day.map(|t| event - t),
    })
}

/// Folds per-pair gaps into the study-level window estimate; `d_floor`
/// is the integer part of `d_hat`.
pub fn aggregate(per_pair: &[PairLapret], method: Aggregation) -> PilotResult {
    let detected: Vec<f64> = per_pair
        .iter()
        .filter_map(|p| p.d_i)
        .map(f64::from)
        .collect();
    let n_detected = detected.len();
    let d_hat = if n_detected == 0 {
        None
    } else {
        match method {
            Aggregation::Mean => Some(detected.iter().sum::<f64>() / n_detected as f64),
            Aggregation::Min => detected.iter().copied().reduce(f64::min),
            Aggregation::MeanZeroFill => {
                Some(detected.iter().sum::<f64>() / per_pair.len() as f64)
            }
        }
    };
    PilotResult {
        per_pair: per_pair.to_vec(),
        d_hat,
        d_floor: d_hat.map(|d| d.floor() as Day),
        aggregation: method,
        n_detected,
    }
}

fn range_from_pool(pool: &[f64]) -> Result<(f64, f64)> {
    let n = pool.len() as f64;
    let max = pool.iter().copied().fold(0.0f64, f64::max);
    let mean = pool.iter().sum::<f64>() / n;
    let var = pool.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let se = var.sqrt() / n.sqrt();
    if mean + se == 0.0 {
        return Err(Error::DegenerateInput);
    }
    Ok((max / (mean + 3.0 * se), max / (mean + se)))
}

/// Data-driven bounds for `alpha` (from pooled |delta|) and `epsilon`
/// (from pooled |ddelta|): maximum over mean plus three (lower bound)
/// or one (upper bound) standard errors of the pooled absolute values.
pub fn heuristic_ranges(pairs: &[MatchedPair]) -> Result<HeuristicRanges> {
    let deltas: Vec<f64> = pairs
        .iter()
        .flat_map(|p| p.delta.values())
        .map(|v| v.abs())
        .collect();
    let ddeltas: Vec<f64> = pairs
        .iter()
        .flat_map(|p| p.ddelta.values())
        .map(|v| v.abs())
        .collect();
    if deltas.len() < 2 || ddeltas.len() < 2 {
        return Err(Error::InvalidParameter(
            "need at least two pooled delta and ddelta values".into(),
        ));
    }
    let (alpha_min, alpha_max) = range_from_pool(&deltas)?;
    let (epsilon_min, epsilon_max) = range_from_pool(&ddeltas)?;
    Ok(HeuristicRanges {
        alpha_min,
        alpha_max,
        epsilon_min,
        epsilon_max,
    })
}
