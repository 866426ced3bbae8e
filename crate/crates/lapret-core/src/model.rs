//! Shared data model: unit-level outcome series, the observed event
//! proxy, imputed treatment assignments and matched treated/control
//! pairs with their difference series.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Days are 1-based integers; there is no sub-daily resolution.
pub type Day = i32;

/// Read access to one unit's daily outcomes.
///
/// The study pipeline reads outcomes only through this trait so tests
/// can interpose an access-tracking wrapper.
pub trait OutcomeAccess {
    fn outcome_at(&self, day: Day) -> Option<f64>;
    fn event_time(&self) -> Option<Day>;
}

/// One unit's daily outcome series, covariates and observed event proxy.
///
/// Outcome days form a contiguous integer range; `event_time` is present
/// iff `event_indicator` is set and always lies inside the day range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitSeries {
    pub unit_id: String,
    first_day: Day,
    outcomes: Vec<f64>,
    pub covariates: Vec<f64>,
    pub event_indicator: bool,
    pub event_time: Option<Day>,
}

impl UnitSeries {
    /// Builds a series whose outcomes cover `first_day..first_day + len`.
    pub fn new(
        unit_id: impl Into<String>,
        first_day: Day,
        outcomes: Vec<f64>,
        covariates: Vec<f64>,
        event_time: Option<Day>,
    ) -> Result<Self> {
        let unit_id = unit_id.into();
        if let Some(t) = event_time {
            let last = first_day + outcomes.len() as Day - 1;
            if t < first_day || t > last {
                return Err(Error::EventOutOfRange { unit_id, day: t });
            }
        }
        Ok(Self {
            unit_id,
            first_day,
            outcomes,
            covariates,
            event_indicator: event_time.is_some(),
            event_time,
        })
    }

    pub fn first_day(&self) -> Day {
        self.first_day
    }

    pub fn last_day(&self) -> Day {
        self.first_day + self.outcomes.len() as Day - 1
    }

    pub fn outcome(&self, day: Day) -> Option<f64> {
        if day < self.first_day || day > self.last_day() {
            None
        } else {
            Some(self.outcomes[(day - self.first_day) as usize])
        }
    }

    pub fn days(&self) -> impl Iterator<Item = Day> + '_ {
        self.first_day..=self.last_day()
    }

    /// Day-over-day differences y*(t) = y(t) - y(t-1); the first day is
    /// dropped, so the result covers `first_day + 1..=last_day`.
    pub fn lagged_diff(&self) -> Result<UnitSeries> {
        if self.outcomes.len() < 2 {
            return Err(Error::NonContiguousDays {
                unit_id: self.unit_id.clone(),
            });
        }
        let diffs: Vec<f64> = self.outcomes.windows(2).map(|w| w[1] - w[0]).collect();
        if let Some(t) = self.event_time {
            if t <= self.first_day {
                return Err(Error::EventOutOfRange {
                    unit_id: self.unit_id.clone(),
                    day: t,
                });
            }
        }
        UnitSeries::new(
            self.unit_id.clone(),
            self.first_day + 1,
            diffs,
            self.covariates.clone(),
            self.event_time,
        )
    }
}

impl OutcomeAccess for UnitSeries {
    fn outcome_at(&self, day: Day) -> Option<f64> {
        self.outcome(day)
    }

    fn event_time(&self) -> Option<Day> {
        self.event_time
    }
}

/// An imputed treatment indicator for one (unit, replicate).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreatmentAssignment {
    pub unit_id: String,
    pub z: bool,
    pub replicate_index: u32,
}

/// A matched treated/control pairing with its difference series.
///
/// `delta[t]` is the treated-minus-control outcome on day `t`, defined
/// on the intersection of both day ranges; `ddelta[t] = delta[t] -
/// delta[t-1]` is its backward first difference, undefined on the first
/// shared day.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchedPair {
    pub pair_id: u64,
    pub treated_id: String,
    pub control_id: String,
    pub delta: BTreeMap<Day, f64>,
    pub ddelta: BTreeMap<Day, f64>,
    pub event_time: Day,
}

/// Control and treated potential-outcome surfaces with their ground
/// truth; only simulated data carries this.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialOutcomePair {
    pub unit_id: String,
    pub first_day: Day,
    pub control_surface: Vec<f64>,
    pub treated_surface: Vec<f64>,
    /// Absent when the treatment has no effect and the notion is
    /// undefined. The unobservable treatment time itself is never
    /// represented; it is only constrained to precede this day.
    pub true_lapret: Option<Day>,
    pub true_event_time: Day,
}

/// Forms the difference series for a treated/control pairing.
pub fn build_pair(treated: &UnitSeries, control: &UnitSeries, pair_id: u64) -> Result<MatchedPair> {
    if !treated.event_indicator || treated.event_time.is_none() || control.event_indicator {
        return Err(Error::RoleMismatch { pair_id });
    }
    let start = treated.first_day().max(control.first_day());
    let end = treated.last_day().min(control.last_day());
    let overlap = if end >= start {
        (end - start + 1) as usize
    } else {
        0
    };
    if overlap < 3 {
        return Err(Error::OverlapTooShort { pair_id, overlap });
    }
    let mut delta = BTreeMap::new();
    for day in start..=end {
        let d = treated.outcome(day).unwrap() - control.outcome(day).unwrap();
        delta.insert(day, d);
    }
    let mut ddelta = BTreeMap::new();
    for day in (start + 1)..=end {
        ddelta.insert(day, delta[&day] - delta[&(day - 1)]);
    }
    Ok(MatchedPair {
        pair_id,
        treated_id: treated.unit_id.clone(),
        control_id: control.unit_id.clone(),
        delta,
        ddelta,
        event_time: treated.event_time.unwrap(),
    })
}

/// Imputes treatment indicators from the event proxy.
///
/// Each replicate flips every unit's indicator independently with
/// probability `eta / 2`, which realizes an expected correlation of
/// `1 - eta` with the proxy on balanced data.
pub fn impute_treatment(
    units: &[UnitSeries],
    eta: f64,
    replicates: u32,
    seed: u64,
) -> Result<Vec<TreatmentAssignment>> {
    if !(0.0..1.0).contains(&eta) || !eta.is_finite() {
        return Err(Error::InvalidEta(eta));
    }
    if replicates == 0 {
        return Err(Error::InvalidParameter("replicates must be >= 1".into()));
    }
    let flip_prob = eta / 2.0;
    let mut out = Vec::with_capacity(units.len() * replicates as usize);
    for r in 0..replicates {
        let mut rng = rng::stream(seed, &[rng::label("impute"), u64::from(r)]);
        for unit in units {
            let flip = flip_prob > 0.0 && rng.random::<f64>() < flip_prob;
            out.push(TreatmentAssignment {
                unit_id: unit.unit_id.clone(),
                z: unit.event_indicator != flip,
                replicate_index: r,
            });
        }
    }
    Ok(out)
}
