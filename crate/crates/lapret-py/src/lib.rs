//! Python bindings for the LaPRET estimation library.
//!
//! Build with `cargo build -p lapret-py --release`, then import the
//! produced `liblapret.so` as `lapret` (rename or symlink; see
//! `python/smoke_test.py` for a self-contained loader).

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use lapret_core::sim::{Scenario, SweepGrid};
use lapret_core::{Day, LapretParams, MatchedPair, UnitSeries};

fn to_py_err(err: lapret_core::Error) -> PyErr {
    PyValueError::new_err(err.to_string())
}

/// Builds a matched pair from an explicit day → delta map; the
/// day-over-day differences are derived internally.
fn pair_from_delta(delta: &BTreeMap<Day, f64>, event_day: Day, pair_id: u64) -> MatchedPair {
    let mut ddelta = BTreeMap::new();
    for (&day, &value) in delta {
        if let Some(&prev) = delta.get(&(day - 1)) {
            ddelta.insert(day, value - prev);
        }
    }
    MatchedPair {
        pair_id,
        treated_id: format!("t{pair_id}"),
        control_id: format!("c{pair_id}"),
        delta: delta.clone(),
        ddelta,
        event_time: event_day,
    }
}

/// Treated-minus-control mean surface value μ₁(day) for a benchmark
/// scenario (1, 2 or 3).
#[pyfunction]
fn surface_value(scenario: u8, day: Day) -> PyResult<f64> {
    let scenario = Scenario::from_index(scenario).map_err(to_py_err)?;
    Ok(lapret_core::surface(scenario).mu1(day))
}

/// `(true_lapret_day, true_event_day)` for a benchmark scenario.
#[pyfunction]
fn landmarks(scenario: u8) -> PyResult<(Day, Day)> {
    let scenario = Scenario::from_index(scenario).map_err(to_py_err)?;
    let def = lapret_core::surface(scenario);
    Ok((def.true_lapret, def.true_event))
}

/// Last plausible experiment day for one pair's delta series; returns
/// `(lapret_day, gap_days)` or `None` when no day qualifies.
#[pyfunction]
fn estimate_lapret(
    delta: BTreeMap<Day, f64>,
    event_day: Day,
    alpha: f64,
    epsilon: f64,
) -> PyResult<Option<(Day, Day)>> {
    let params = LapretParams::new(alpha, epsilon).map_err(to_py_err)?;
    let pair = pair_from_delta(&delta, event_day, 0);
    let result = lapret_core::estimate_pair_lapret(&pair, &params).map_err(to_py_err)?;
    Ok(result.lapret_day.zip(result.d_i))
}

/// Runs one simulated benchmark cell; returns
/// `(d_hat, d_floor, n_detected)`.
#[pyfunction]
#[pyo3(signature = (scenario, sigma, contamination, alpha, epsilon, n=600, seed=0))]
fn simulate_cell(
    scenario: u8,
    sigma: f64,
    contamination: &str,
    alpha: f64,
    epsilon: f64,
    n: usize,
    seed: u64,
) -> PyResult<(f64, Day, usize)> {
    let scenario = Scenario::from_index(scenario).map_err(to_py_err)?;
    let contamination = contamination.parse().map_err(to_py_err)?;
    let grid = SweepGrid {
        sigmas: vec![sigma],
        contaminations: vec![contamination],
        alphas: vec![alpha],
        epsilons: vec![epsilon],
    };
    let result = lapret_core::sweep(scenario, &grid, n, seed).map_err(to_py_err)?;
    let row = &result.rows[0];
    Ok((row.d_hat, row.d_floor, row.n_detected))
}

/// Suggested `(alpha_min, alpha_max, epsilon_min, epsilon_max)` from a
/// list of per-pair `(delta_by_day, event_day)` tuples.
#[pyfunction]
fn heuristic_ranges(
    pairs: Vec<(BTreeMap<Day, f64>, Day)>,
) -> PyResult<(f64, f64, f64, f64)> {
    let pairs: Vec<MatchedPair> = pairs
        .iter()
        .enumerate()
        .map(|(i, (delta, event))| pair_from_delta(delta, *event, i as u64))
        .collect();
    let r = lapret_core::heuristic_ranges(&pairs).map_err(to_py_err)?;
    Ok((r.alpha_min, r.alpha_max, r.epsilon_min, r.epsilon_max))
}

/// Resamples event indicators with per-unit flip probability `eta/2`;
/// returns one list of booleans per replicate.
#[pyfunction]
#[pyo3(signature = (indicators, eta, replicates=1, seed=0))]
fn impute(
    indicators: Vec<bool>,
    eta: f64,
    replicates: u32,
    seed: u64,
) -> PyResult<Vec<Vec<bool>>> {
    let units: Vec<UnitSeries> = indicators
        .iter()
        .enumerate()
        .map(|(i, &z)| {
            UnitSeries::new(
                format!("u{i:06}"),
                1,
                vec![0.0],
                vec![],
                z.then_some(1),
            )
            .expect("one-day series is valid")
        })
        .collect();
    let assignments =
        lapret_core::impute_treatment(&units, eta, replicates, seed).map_err(to_py_err)?;
    let mut out = vec![Vec::with_capacity(indicators.len()); replicates as usize];
    for a in assignments {
        out[a.replicate_index as usize].push(a.z);
    }
    Ok(out)
}

#[pymodule]
fn lapret(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(surface_value, m)?)?;
    m.add_function(wrap_pyfunction!(landmarks, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_lapret, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_cell, m)?)?;
    m.add_function(wrap_pyfunction!(heuristic_ranges, m)?)?;
    m.add_function(wrap_pyfunction!(impute, m)?)?;
    Ok(())
}
