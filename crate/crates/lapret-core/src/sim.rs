//! Simulation scenarios: idealized response surfaces, noisy
//! potential-outcome generation with event-day contamination, and the
//! window-estimate sweep over the tuning-parameter grid.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{aggregate, estimate_pair_lapret, Aggregation, LapretParams};
use crate::model::{build_pair, Day, PotentialOutcomePair, UnitSeries};
use crate::rng;

/// Simulated horizon: the largest scenario landmark is day 14 and the
/// contamination can push an event one day further.
pub const SIM_LAST_DAY: Day = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scenario {
    One,
    Two,
    Three,
}

impl Scenario {
    pub fn index(self) -> u8 {
        match self {
            Scenario::One => 1,
            Scenario::Two => 2,
            Scenario::Three => 3,
        }
    }

    pub fn from_index(k: u8) -> Result<Self> {
        match k {
            1 => Ok(Scenario::One),
            2 => Ok(Scenario::Two),
            3 => Ok(Scenario::Three),
            other => Err(Error::UnknownScenario(other)),
        }
    }
}

/// Event-day perturbation: a shift of -1/0/+1 days with model-specific
/// probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Contamination {
    F1,
    F2,
    F3,
    F4,
}

impl Contamination {
    /// Probabilities of a shift of (-1, 0, +1).
    pub fn probabilities(self) -> (f64, f64, f64) {
        match self {
            Contamination::F1 => (0.0, 1.0, 0.0),
            Contamination::F2 => (0.25, 0.5, 0.25),
            Contamination::F3 => (0.1, 0.5, 0.4),
            Contamination::F4 => (0.4, 0.5, 0.1),
        }
    }

    fn sample<R: Rng>(self, rng: &mut R) -> Day {
        let (down, stay, _) = self.probabilities();
        let u: f64 = rng.random();
        if u < down {
            -1
        } else if u < down + stay {
            0
        } else {
            1
        }
    }
}

impl fmt::Display for Contamination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Contamination::F1 => "f1",
            Contamination::F2 => "f2",
            Contamination::F3 => "f3",
            Contamination::F4 => "f4",
        };
        f.write_str(s)
    }
}

impl FromStr for Contamination {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "f1" => Ok(Contamination::F1),
            "f2" => Ok(Contamination::F2),
            "f3" => Ok(Contamination::F3),
            "f4" => Ok(Contamination::F4),
            other => Err(Error::UnknownContamination(other.to_string())),
        }
    }
}

/// Full parameterization of one simulated dataset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub scenario: Scenario,
    pub sigma: f64,
    pub contamination: Contamination,
    pub n_units: usize,
    pub seed: u64,
}

impl ScenarioSpec {
    pub fn new(
        scenario: Scenario,
        sigma: f64,
        contamination: Contamination,
        n_units: usize,
        seed: u64,
    ) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma must be finite and non-negative, got {sigma}"
            )));
        }
        if n_units == 0 || n_units % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "n_units must be positive and even, got {n_units}"
            )));
        }
        Ok(Self {
            scenario,
            sigma,
            contamination,
            n_units,
            seed,
        })
    }
}

/// Idealized response surfaces and landmarks for one scenario; the
/// control surface is identically zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceDef {
    pub scenario: Scenario,
    pub true_lapret: Day,
    pub true_event: Day,
}

impl SurfaceDef {
    pub fn mu0(&self, _day: Day) -> f64 {
        0.0
    }

    pub fn mu1(&self, day: Day) -> f64 {
        mu1_at(self.scenario, f64::from(day))
    }
}

fn mu1_at(scenario: Scenario, t: f64) -> f64 {
    match scenario {
        Scenario::One | Scenario::Two => (2.0 * PI / 15.0 * (t - 3.5)).sin().max(0.0),
        Scenario::Three => {
            let wave = (3.5 * PI / 15.0 * (t - 2.5)).sin();
            if (wave <= 0.0 && t < 4.0) || (wave >= 0.0 && t > 10.0) {
                0.0
            } else {
                wave
            }
        }
    }
}

/// Landmarks and treated response surface for a scenario.
pub fn surface(scenario: Scenario) -> SurfaceDef {
    let (true_lapret, true_event) = match scenario {
        Scenario::One => (3, 14),
        Scenario::Two => (3, 9),
        Scenario::Three => (2, 14),
    };
    SurfaceDef {
        scenario,
        true_lapret,
        true_event,
    }
}

/// Draws one dataset: per unit, noisy treated and control surfaces on
/// days 1..=16 plus a contaminated event day for the treated half.
///
/// Unit `i` is treated when `i < n_units / 2`; the sweep pairs treated
/// unit `j` with control unit `n/2 + j`.
pub fn generate(spec: &ScenarioSpec) -> Result<(Vec<PotentialOutcomePair>, Vec<UnitSeries>)> {
    let def = surface(spec.scenario);
    let n = spec.n_units;
    let scen = u64::from(spec.scenario.index());
    let mut potentials = Vec::with_capacity(n);
    let mut observed = Vec::with_capacity(n);
    for i in 0..n {
        let mut unit_rng = rng::stream(spec.seed, &[rng::label("sim"), scen, i as u64]);
        let mut control = Vec::with_capacity(SIM_LAST_DAY as usize);
        let mut treated = Vec::with_capacity(SIM_LAST_DAY as usize);
        for day in 1..=SIM_LAST_DAY {
            control.push(draw_normal(&mut unit_rng, def.mu0(day), spec.sigma));
            treated.push(draw_normal(&mut unit_rng, def.mu1(day), spec.sigma));
        }
        let shift = spec.contamination.sample(&mut unit_rng);
        let event_time = def.true_event + shift;
        let is_treated = i < n / 2;
        let unit_id = format!("u{i:05}");
        potentials.push(PotentialOutcomePair {
            unit_id: unit_id.clone(),
            first_day: 1,
            control_surface: control.clone(),
            treated_surface: treated.clone(),
            true_lapret: Some(def.true_lapret),
            true_event_time: def.true_event,
        });
        let (outcomes, event) = if is_treated {
            (treated, Some(event_time))
        } else {
            (control, None)
        };
        observed.push(UnitSeries::new(unit_id, 1, outcomes, vec![], event)?);
    }
    Ok((potentials, observed))
}

fn draw_normal<R: Rng>(rng: &mut R, mean: f64, sigma: f64) -> f64 {
    if sigma == 0.0 {
        mean
    } else {
        Normal::new(mean, sigma).unwrap().sample(rng)
    }
}

/// One sweep cell: the window estimate for a (sigma, contamination,
/// alpha, epsilon) combination. `d_hat` is the zero-filled mean over all
/// pairs, so it reflects vanishing detections as a vanishing window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub epsilon: f64,
    pub sigma: f64,
    pub contamination: Contamination,
    pub d_hat: f64,
    pub d_floor: Day,
    pub n_detected: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub scenario: Scenario,
    pub rows: Vec<SweepRow>,
}

/// The tuning-parameter grid of the reported sweeps.
pub struct SweepGrid {
    pub sigmas: Vec<f64>,
    pub contaminations: Vec<Contamination>,
    pub alphas: Vec<f64>,
    pub epsilons: Vec<f64>,
}

impl Default for SweepGrid {
    fn default() -> Self {
        SweepGrid {
            sigmas: vec![0.005, 0.01, 0.015, 0.02],
            contaminations: vec![
                Contamination::F1,
                Contamination::F2,
                Contamination::F3,
                Contamination::F4,
            ],
            // arithmetic sequence 1, 6, 11, ..., 96
            alphas: (0..20).map(|k| 1.0 + 5.0 * f64::from(k)).collect(),
            epsilons: vec![0.0001, 0.02, 0.2, 0.3, 0.4, 0.5],
        }
    }
}

/// Runs the grid: one dataset per (sigma, contamination) cell shared
/// across the (alpha, epsilon) grid, treated unit `j` paired with
/// control unit `j` (no matching).
pub fn sweep(scenario: Scenario, grid: &SweepGrid, n_units: usize, seed: u64) -> Result<SweepResult> {
    if grid.sigmas.is_empty()
        || grid.contaminations.is_empty()
        || grid.alphas.is_empty()
        || grid.epsilons.is_empty()
    {
        return Err(Error::InvalidParameter("empty sweep grid".into()));
    }
    let mut rows = Vec::new();
    for (si, &sigma) in grid.sigmas.iter().enumerate() {
        for (fi, &contamination) in grid.contaminations.iter().enumerate() {
            let cell_seed = rng::derive_seed(seed, &[rng::label("cell"), si as u64, fi as u64]);
            let spec = ScenarioSpec::new(scenario, sigma, contamination, n_units, cell_seed)?;
            let (_, units) = generate(&spec)?;
            let half = n_units / 2;
            let pairs: Result<Vec<_>> = (0..half)
                .map(|j| build_pair(&units[j], &units[half + j], j as u64))
                .collect();
            let pairs = pairs?;
            for &alpha in &grid.alphas {
                for &epsilon in &grid.epsilons {
                    let params = LapretParams::new(alpha, epsilon)?;
                    let per_pair: Result<Vec<_>> = pairs
                        .iter()
                        .map(|p| estimate_pair_lapret(p, &params))
                        .collect();
                    let pilot = aggregate(&per_pair?, Aggregation::MeanZeroFill);
                    rows.push(SweepRow {
                        alpha,
                        epsilon,
                        sigma,
                        contamination,
                        d_hat: pilot.d_hat.unwrap_or(0.0),
                        d_floor: pilot.d_floor.unwrap_or(0),
                        n_detected: pilot.n_detected,
                    });
                }
            }
        }
    }
    Ok(SweepResult { scenario, rows })
}

impl SweepResult {
    /// CSV with header `alpha,epsilon,sigma,contamination,d_hat,d_floor,n_detected`.
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record([
            "alpha",
            "epsilon",
            "sigma",
            "contamination",
            "d_hat",
            "d_floor",
            "n_detected",
        ])?;
        for row in &self.rows {
            w.write_record([
                row.alpha.to_string(),
                row.epsilon.to_string(),
                row.sigma.to_string(),
                row.contamination.to_string(),
                row.d_hat.to_string(),
                row.d_floor.to_string(),
                row.n_detected.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}
