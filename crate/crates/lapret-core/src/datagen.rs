//! Synthetic tradezone construction from DMA-level inputs, plus CSV
//! ingestion and validation for externally supplied panels.
//!
//! Each DMA (a super-metropolitan area) receives a number of tradezones
//! proportional to its population; every tradezone inherits the DMA's
//! covariates and draws its daily outcome from a zero-truncated normal
//! centered on the DMA's outcome curve. Event days for treated
//! tradezones are sampled proportionally to snowfall on days above the
//! treatment threshold.

use std::collections::BTreeMap;
use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Day, UnitSeries};
use crate::rng;

/// One DMA's population, covariates, outcome curve and snowfall series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DmaRecord {
    pub dma_id: String,
    pub population: u64,
    pub covariates: Vec<f64>,
    /// Day → mean outcome μ_i(t).
    pub outcomes: BTreeMap<Day, f64>,
    /// Day → cumulative snowfall in kg/m².
    pub snowfall: BTreeMap<Day, f64>,
}

/// Parameters of the tradezone generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub sigma: f64,
    pub snow_threshold_h: f64,
    pub control_threshold_l: f64,
    pub total_tradezones: usize,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(sigma: f64, seed: u64) -> Result<Self> {
        Self::with_thresholds(sigma, 1.0, 0.3, 3676, seed)
    }

    pub fn with_thresholds(
        sigma: f64,
        snow_threshold_h: f64,
        control_threshold_l: f64,
        total_tradezones: usize,
        seed: u64,
    ) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        if !(control_threshold_l < snow_threshold_h) {
            return Err(Error::InvalidParameter(format!(
                "control threshold {control_threshold_l} must be below snow threshold {snow_threshold_h}"
            )));
        }
        Ok(Self {
            sigma,
            snow_threshold_h,
            control_threshold_l,
            total_tradezones,
            seed,
        })
    }
}

/// Largest-remainder apportionment of `total` tradezones proportional
/// to population, with every DMA receiving at least one and remainder
/// ties broken toward the smaller `dma_id`.
pub fn allocate_tradezones(
    dmas: &[DmaRecord],
    total: usize,
) -> Result<BTreeMap<String, usize>> {
    if total < dmas.len() {
        return Err(Error::TotalTooSmall {
            total,
            dmas: dmas.len(),
        });
    }
    let pop_sum: u64 = dmas.iter().map(|d| d.population).sum();
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut remainders: Vec<(f64, String)> = Vec::with_capacity(dmas.len());
    let mut assigned = 0usize;
    for dma in dmas {
        let quota = total as f64 * dma.population as f64 / pop_sum as f64;
        let base = quota.floor() as usize;
        assigned += base;
        counts.insert(dma.dma_id.clone(), base);
        remainders.push((quota - base as f64, dma.dma_id.clone()));
    }
    // Distribute the leftover seats to the largest remainders; ties go
    // to the smaller dma_id.
    remainders.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    for (_, id) in remainders.iter().take(total - assigned) {
        *counts.get_mut(id).unwrap() += 1;
    }
    // Guarantee the floor of one by taking seats from the largest
    // allocations.
    loop {
        let Some(starved) = counts
            .iter()
            .find(|(_, &c)| c == 0)
            .map(|(id, _)| id.clone())
        else {
            break;
        };
        let donor = counts
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
            .map(|(id, _)| id.clone())
            .unwrap();
        *counts.get_mut(&donor).unwrap() -= 1;
        *counts.get_mut(&starved).unwrap() += 1;
    }
    Ok(counts)
}

/// Draws from Normal(mean, sigma²) truncated below at zero by
/// rejection.
fn truncated_normal<R: Rng>(rng: &mut R, mean: f64, sigma: f64) -> f64 {
    loop {
        let z: f64 = rng.sample(StandardNormal);
        let x = mean + sigma * z;
        if x >= 0.0 {
            return x;
        }
    }
}

fn eligible_days(dma: &DmaRecord, threshold: f64) -> Vec<(Day, f64)> {
    dma.snowfall
        .iter()
        .filter(|(_, &s)| s > threshold)
        .map(|(&d, &s)| (d, s))
        .collect()
}

/// Samples a day with probability proportional to its snowfall.
fn sample_event_day<R: Rng>(rng: &mut R, days: &[(Day, f64)]) -> Day {
    let total: f64 = days.iter().map(|(_, s)| s).sum();
    let mut u = rng.random::<f64>() * total;
    for &(day, snow) in days {
        u -= snow;
        if u <= 0.0 {
            return day;
        }
    }
    days.last().unwrap().0
}

/// Builds the synthetic tradezone panel. Treated tradezones come from
/// DMAs with at least one snowfall day above `h`; controls come from
/// DMAs whose snowfall never exceeds `l`; every other DMA is excluded.
pub fn generate_tradezones(
    dmas: &[DmaRecord],
    spec: &GeneratorSpec,
) -> Result<Vec<UnitSeries>> {
    let counts = allocate_tradezones(dmas, spec.total_tradezones)?;
    let any_treated = dmas
        .iter()
        .any(|d| d.snowfall.values().any(|&s| s > spec.snow_threshold_h));
    let any_control = dmas
        .iter()
        .any(|d| d.snowfall.values().all(|&s| s <= spec.control_threshold_l));
    if !any_treated {
        return Err(Error::NoTreatedDmas);
    }
    if !any_control {
        return Err(Error::NoControlDmas);
    }

    let mut units = Vec::new();
    for dma in dmas {
        let eligible = eligible_days(dma, spec.snow_threshold_h);
        let max_snow = dma.snowfall.values().cloned().fold(0.0f64, f64::max);
        let treated = !eligible.is_empty();
        if !treated && max_snow > spec.control_threshold_l {
            // Intermediate DMA: neither clearly hit nor clearly spared.
            continue;
        }
        let first_day = *dma.outcomes.keys().next().unwrap();
        let means: Vec<f64> = dma.outcomes.values().cloned().collect();
        for j in 0..counts[&dma.dma_id] {
            let mut stream = rng::stream(
                spec.seed,
                &[rng::label("datagen"), rng::label(&dma.dma_id), j as u64],
            );
            let outcomes: Vec<f64> = means
                .iter()
                .map(|&m| truncated_normal(&mut stream, m, spec.sigma))
                .collect();
            let event_time = treated.then(|| sample_event_day(&mut stream, &eligible));
            units.push(UnitSeries::new(
                format!("{}-tz{j:04}", dma.dma_id),
                first_day,
                outcomes,
                dma.covariates.clone(),
                event_time,
            )?);
        }
    }
    Ok(units)
}

fn schema_err(file: &Path, message: impl Into<String>) -> Error {
    Error::Schema {
        file: file.display().to_string(),
        message: message.into(),
    }
}

fn parse_f64(file: &Path, field: &str, raw: &str) -> Result<f64> {
    raw.trim()
        .parse::<f64>()
        .map_err(|_| schema_err(file, format!("cannot parse {field} value {raw:?} as a number")))
}

fn parse_day(file: &Path, raw: &str) -> Result<Day> {
    let day: Day = raw
        .trim()
        .parse()
        .map_err(|_| schema_err(file, format!("cannot parse day value {raw:?}")))?;
    if day < 1 {
        return Err(schema_err(file, format!("day must be ≥ 1, got {day}")));
    }
    Ok(day)
}

fn check_header(file: &Path, got: &csv::StringRecord, want: &[&str]) -> Result<()> {
    let got: Vec<&str> = got.iter().map(str::trim).collect();
    if got != want {
        return Err(schema_err(
            file,
            format!("expected header {}, got {}", want.join(","), got.join(",")),
        ));
    }
    Ok(())
}

/// Collects per-unit day→value maps, rejecting duplicate (unit, day)
/// rows.
fn read_day_map(
    file: &Path,
    rows: impl Iterator<Item = Result<(String, Day, f64)>>,
) -> Result<BTreeMap<String, BTreeMap<Day, f64>>> {
    let mut map: BTreeMap<String, BTreeMap<Day, f64>> = BTreeMap::new();
    for row in rows {
        let (unit_id, day, value) = row?;
        if map.entry(unit_id.clone()).or_default().insert(day, value).is_some() {
            return Err(Error::DuplicateRow { unit_id, day });
        }
    }
    if map.is_empty() {
        return Err(schema_err(file, "no data rows"));
    }
    Ok(map)
}

fn contiguous_outcomes(unit_id: &str, days: &BTreeMap<Day, f64>) -> Result<(Day, Vec<f64>)> {
    let first = *days.keys().next().unwrap();
    let last = *days.keys().last().unwrap();
    if (last - first + 1) as usize != days.len() {
        return Err(Error::NonContiguousDays {
            unit_id: unit_id.to_string(),
        });
    }
    Ok((first, days.values().cloned().collect()))
}

/// Reads and validates the panel/covariates/events CSV triple.
pub fn ingest(
    panel_csv: &Path,
    covariates_csv: &Path,
    events_csv: &Path,
) -> Result<Vec<UnitSeries>> {
    // Panel: unit_id,day,outcome.
    let mut reader = csv::Reader::from_path(panel_csv)?;
    check_header(panel_csv, reader.headers()?, &["unit_id", "day", "outcome"])?;
    let rows = reader.records().map(|rec| -> Result<(String, Day, f64)> {
        let rec = rec?;
        if rec.len() != 3 {
            return Err(schema_err(panel_csv, format!("row has {} fields, expected 3", rec.len())));
        }
        Ok((
            rec[0].trim().to_string(),
            parse_day(panel_csv, &rec[1])?,
            parse_f64(panel_csv, "outcome", &rec[2])?,
        ))
    });
    let panel = read_day_map(panel_csv, rows)?;

    // Covariates: unit_id,c1..ck — every panel unit must appear, all
    // rows the same width.
    let mut reader = csv::Reader::from_path(covariates_csv)?;
    let headers = reader.headers()?.clone();
    if headers.get(0).map(str::trim) != Some("unit_id") {
        return Err(schema_err(covariates_csv, "first column must be unit_id"));
    }
    let width = headers.len() - 1;
    let mut covariates: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for rec in reader.records() {
        let rec = rec?;
        if rec.len() != width + 1 {
            return Err(schema_err(
                covariates_csv,
                format!("row has {} covariates, expected {width}", rec.len() - 1),
            ));
        }
        let unit_id = rec[0].trim().to_string();
        if !panel.contains_key(&unit_id) {
            return Err(schema_err(
                covariates_csv,
                format!("covariates row for unknown unit {unit_id}"),
            ));
        }
        let values: Result<Vec<f64>> = rec
            .iter()
            .skip(1)
            .map(|v| parse_f64(covariates_csv, "covariate", v))
            .collect();
        if covariates.insert(unit_id.clone(), values?).is_some() {
            return Err(schema_err(
                covariates_csv,
                format!("duplicate covariates row for unit {unit_id}"),
            ));
        }
    }

    // Events: unit_id,event_indicator,event_day (day empty for
    // controls).
    let mut reader = csv::Reader::from_path(events_csv)?;
    check_header(
        events_csv,
        reader.headers()?,
        &["unit_id", "event_indicator", "event_day"],
    )?;
    let mut events: BTreeMap<String, Option<Day>> = BTreeMap::new();
    for rec in reader.records() {
        let rec = rec?;
        if rec.len() != 3 {
            return Err(schema_err(events_csv, format!("row has {} fields, expected 3", rec.len())));
        }
        let unit_id = rec[0].trim().to_string();
        if !panel.contains_key(&unit_id) {
            return Err(Error::DanglingEvent { unit_id });
        }
        let indicator = match rec[1].trim() {
            "0" => false,
            "1" => true,
            other => {
                return Err(schema_err(
                    events_csv,
                    format!("event_indicator must be 0 or 1, got {other:?}"),
                ))
            }
        };
        let day_raw = rec[2].trim();
        let event_day = match (indicator, day_raw.is_empty()) {
            (true, false) => Some(parse_day(events_csv, day_raw)?),
            (false, true) => None,
            _ => return Err(Error::EventInconsistent { unit_id }),
        };
        if events.insert(unit_id.clone(), event_day).is_some() {
            return Err(schema_err(
                events_csv,
                format!("duplicate events row for unit {unit_id}"),
            ));
        }
    }

    let mut units = Vec::with_capacity(panel.len());
    for (unit_id, days) in &panel {
        let Some(&event_time) = events.get(unit_id) else {
            return Err(schema_err(
                events_csv,
                format!("no events row for unit {unit_id}"),
            ));
        };
        let Some(cov) = covariates.get(unit_id) else {
            return Err(schema_err(
                covariates_csv,
                format!("no covariates row for unit {unit_id}"),
            ));
        };
        let (first_day, outcomes) = contiguous_outcomes(unit_id, days)?;
        units.push(UnitSeries::new(
            unit_id.clone(),
            first_day,
            outcomes,
            cov.clone(),
            event_time,
        )?);
    }
    Ok(units)
}

/// Writes units back out in the panel/covariates/events schemas.
pub fn write_units(
    units: &[UnitSeries],
    panel_csv: &Path,
    covariates_csv: &Path,
    events_csv: &Path,
) -> Result<()> {
    let mut panel = csv::Writer::from_path(panel_csv)?;
    panel.write_record(["unit_id", "day", "outcome"])?;
    for unit in units {
        for day in unit.days() {
            panel.write_record([
                unit.unit_id.as_str(),
                &day.to_string(),
                &unit.outcome(day).unwrap().to_string(),
            ])?;
        }
    }
    panel.flush()?;

    let width = units.iter().map(|u| u.covariates.len()).max().unwrap_or(0);
    let mut cov = csv::Writer::from_path(covariates_csv)?;
    let mut header = vec!["unit_id".to_string()];
    header.extend((1..=width).map(|i| format!("c{i}")));
    cov.write_record(&header)?;
    for unit in units {
        let mut row = vec![unit.unit_id.clone()];
        row.extend(unit.covariates.iter().map(|v| v.to_string()));
        cov.write_record(&row)?;
    }
    cov.flush()?;

    let mut events = csv::Writer::from_path(events_csv)?;
    events.write_record(["unit_id", "event_indicator", "event_day"])?;
    for unit in units {
        events.write_record([
            unit.unit_id.as_str(),
            if unit.event_indicator { "1" } else { "0" },
            &unit.event_time.map(|d| d.to_string()).unwrap_or_default(),
        ])?;
    }
    events.flush()?;
    Ok(())
}

/// Reads the DMA input pair: `dma.csv` (populations and covariates)
/// and `dma_panel.csv` (daily outcome and snowfall).
pub fn read_dmas(dma_csv: &Path, dma_panel_csv: &Path) -> Result<Vec<DmaRecord>> {
    let mut reader = csv::Reader::from_path(dma_csv)?;
    let headers = reader.headers()?.clone();
    if headers.get(0).map(str::trim) != Some("dma_id")
        || headers.get(1).map(str::trim) != Some("population")
    {
        return Err(schema_err(dma_csv, "header must start dma_id,population"));
    }
    let width = headers.len() - 2;
    let mut dmas: BTreeMap<String, (u64, Vec<f64>)> = BTreeMap::new();
    for rec in reader.records() {
        let rec = rec?;
        if rec.len() != width + 2 {
            return Err(schema_err(dma_csv, "ragged covariate row"));
        }
        let dma_id = rec[0].trim().to_string();
        let population: u64 = rec[1]
            .trim()
            .parse()
            .map_err(|_| schema_err(dma_csv, format!("bad population {:?}", &rec[1])))?;
        if population == 0 {
            return Err(schema_err(dma_csv, format!("population must be > 0 for {dma_id}")));
        }
        let cov: Result<Vec<f64>> = rec
            .iter()
            .skip(2)
            .map(|v| parse_f64(dma_csv, "covariate", v))
            .collect();
        if dmas.insert(dma_id.clone(), (population, cov?)).is_some() {
            return Err(schema_err(dma_csv, format!("duplicate row for DMA {dma_id}")));
        }
    }

    let mut reader = csv::Reader::from_path(dma_panel_csv)?;
    check_header(
        dma_panel_csv,
        reader.headers()?,
        &["dma_id", "day", "outcome", "snowfall_kg_m2"],
    )?;
    let mut outcomes: BTreeMap<String, BTreeMap<Day, f64>> = BTreeMap::new();
    let mut snowfall: BTreeMap<String, BTreeMap<Day, f64>> = BTreeMap::new();
    for rec in reader.records() {
        let rec = rec?;
        if rec.len() != 4 {
            return Err(schema_err(dma_panel_csv, format!("row has {} fields, expected 4", rec.len())));
        }
        let dma_id = rec[0].trim().to_string();
        if !dmas.contains_key(&dma_id) {
            return Err(schema_err(
                dma_panel_csv,
                format!("panel row for unknown DMA {dma_id}"),
            ));
        }
        let day = parse_day(dma_panel_csv, &rec[1])?;
        let outcome = parse_f64(dma_panel_csv, "outcome", &rec[2])?;
        let snow = parse_f64(dma_panel_csv, "snowfall_kg_m2", &rec[3])?;
        if snow < 0.0 {
            return Err(schema_err(dma_panel_csv, format!("negative snowfall on day {day}")));
        }
        if outcomes.entry(dma_id.clone()).or_default().insert(day, outcome).is_some() {
            return Err(Error::DuplicateRow { unit_id: dma_id, day });
        }
        snowfall.entry(dma_id).or_default().insert(day, snow);
    }

    let mut out = Vec::with_capacity(dmas.len());
    for (dma_id, (population, covariates)) in dmas {
        let Some(days) = outcomes.remove(&dma_id) else {
            return Err(schema_err(
                dma_panel_csv,
                format!("no panel rows for DMA {dma_id}"),
            ));
        };
        contiguous_outcomes(&dma_id, &days)?;
        out.push(DmaRecord {
            snowfall: snowfall.remove(&dma_id).unwrap(),
            dma_id,
            population,
            covariates,
            outcomes: days,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;

    fn dma(
        id: &str,
        population: u64,
        mu: &[(Day, f64)],
        snow: &[(Day, f64)],
    ) -> DmaRecord {
        DmaRecord {
            dma_id: id.to_string(),
            population,
            covariates: vec![population as f64, 1.0],
            outcomes: mu.iter().cloned().collect(),
            snowfall: snow.iter().cloned().collect(),
        }
    }

    fn flat_mu(level: f64, days: Day) -> Vec<(Day, f64)> {
        (1..=days).map(|d| (d, level)).collect()
    }

    fn flat_snow(level: f64, days: Day) -> Vec<(Day, f64)> {
        (1..=days).map(|d| (d, level)).collect()
    }

    fn spiked_snow(days: Day, spikes: &[(Day, f64)]) -> Vec<(Day, f64)> {
        let mut snow: BTreeMap<Day, f64> = (1..=days).map(|d| (d, 0.0)).collect();
        for &(d, s) in spikes {
            snow.insert(d, s);
        }
        snow.into_iter().collect()
    }

    #[test]
    fn allocation_matches_exact_proportions() {
        let dmas = vec![
            dma("a", 100, &flat_mu(1.0, 2), &flat_snow(0.0, 2)),
            dma("b", 300, &flat_mu(1.0, 2), &flat_snow(0.0, 2)),
        ];
        let counts = allocate_tradezones(&dmas, 4).unwrap();
        assert_eq!(counts["a"], 1);
        assert_eq!(counts["b"], 3);
    }

    #[test]
    fn allocation_tie_goes_to_smallest_id() {
        let dmas = vec![
            dma("d2", 1, &flat_mu(1.0, 2), &flat_snow(0.0, 2)),
            dma("d1", 1, &flat_mu(1.0, 2), &flat_snow(0.0, 2)),
            dma("d3", 1, &flat_mu(1.0, 2), &flat_snow(0.0, 2)),
        ];
        let counts = allocate_tradezones(&dmas, 4).unwrap();
        assert_eq!(counts["d1"], 2);
        assert_eq!(counts["d2"], 1);
        assert_eq!(counts["d3"], 1);
    }

    #[test]
    fn allocation_sums_to_total_over_79_dmas() {
        let dmas: Vec<DmaRecord> = (0..79)
            .map(|i| {
                dma(
                    &format!("dma{i:03}"),
                    1000 + 37 * i * i,
                    &flat_mu(1.0, 2),
                    &flat_snow(0.0, 2),
                )
            })
            .collect();
        let counts = allocate_tradezones(&dmas, 3676).unwrap();
        assert_eq!(counts.values().sum::<usize>(), 3676);
        assert!(counts.values().all(|&c| c >= 1));
    }

    #[test]
    fn allocation_guarantees_a_floor_of_one() {
        let dmas = vec![
            dma("tiny", 1, &flat_mu(1.0, 2), &flat_snow(0.0, 2)),
            dma("huge", 1_000_000, &flat_mu(1.0, 2), &flat_snow(0.0, 2)),
        ];
        let counts = allocate_tradezones(&dmas, 5).unwrap();
        assert_eq!(counts["tiny"], 1);
        assert_eq!(counts["huge"], 4);
    }

    #[test]
    fn allocation_rejects_tiny_totals() {
        let dmas = vec![
            dma("a", 1, &flat_mu(1.0, 2), &flat_snow(0.0, 2)),
            dma("b", 1, &flat_mu(1.0, 2), &flat_snow(0.0, 2)),
        ];
        assert!(matches!(
            allocate_tradezones(&dmas, 1),
            Err(Error::TotalTooSmall { total: 1, dmas: 2 })
        ));
    }

    fn two_dma_world(snow_spikes: &[(Day, f64)]) -> Vec<DmaRecord> {
        vec![
            dma("snowy", 100, &flat_mu(10.0, 20), &spiked_snow(20, snow_spikes)),
            dma("sunny", 100, &flat_mu(10.0, 20), &flat_snow(0.0, 20)),
        ]
    }

    #[test]
    fn single_eligible_day_pins_every_event() {
        let dmas = two_dma_world(&[(7, 5.0)]);
        let spec = GeneratorSpec::with_thresholds(0.5, 1.0, 0.3, 40, 1).unwrap();
        let units = generate_tradezones(&dmas, &spec).unwrap();
        for u in units.iter().filter(|u| u.event_indicator) {
            assert_eq!(u.event_time, Some(7));
        }
        assert!(units.iter().any(|u| u.event_indicator));
    }

    #[test]
    fn event_day_frequencies_track_snowfall() {
        let dmas = vec![
            dma("snowy", 10_000, &flat_mu(10.0, 20), &spiked_snow(20, &[(5, 1.0), (6, 3.0)])),
            dma("sunny", 1, &flat_mu(10.0, 20), &flat_snow(0.0, 20)),
        ];
        let spec = GeneratorSpec::with_thresholds(0.5, 0.5, 0.3, 10_001, 2).unwrap();
        let units = generate_tradezones(&dmas, &spec).unwrap();
        let treated: Vec<_> = units.iter().filter(|u| u.event_indicator).collect();
        assert_eq!(treated.len(), 10_000);
        let at6 = treated.iter().filter(|u| u.event_time == Some(6)).count();
        let frac = at6 as f64 / treated.len() as f64;
        assert!((frac - 0.75).abs() < 0.02, "P(day 6) = {frac}");
    }

    #[test]
    fn small_sigma_concentrates_on_the_mean() {
        let sigma = 1e-3;
        let dmas = two_dma_world(&[(7, 5.0)]);
        let spec = GeneratorSpec::with_thresholds(sigma, 1.0, 0.3, 50, 3).unwrap();
        let units = generate_tradezones(&dmas, &spec).unwrap();
        for u in &units {
            for d in u.days() {
                assert!((u.outcome(d).unwrap() - 10.0).abs() < 5.0 * sigma);
            }
        }
    }

    #[test]
    fn outcomes_are_never_negative() {
        let dmas = vec![
            dma("snowy", 100, &flat_mu(0.5, 20), &spiked_snow(20, &[(7, 5.0)])),
            dma("sunny", 100, &flat_mu(0.5, 20), &flat_snow(0.0, 20)),
        ];
        let spec = GeneratorSpec::with_thresholds(10.0, 1.0, 0.3, 500, 4).unwrap();
        let units = generate_tradezones(&dmas, &spec).unwrap();
        for u in &units {
            for d in u.days() {
                assert!(u.outcome(d).unwrap() >= 0.0);
            }
        }
    }

    #[test]
    fn intermediate_dmas_are_excluded() {
        let dmas = vec![
            dma("snowy", 100, &flat_mu(10.0, 20), &spiked_snow(20, &[(7, 5.0)])),
            dma("slushy", 100, &flat_mu(10.0, 20), &spiked_snow(20, &[(8, 0.6)])),
            dma("sunny", 100, &flat_mu(10.0, 20), &flat_snow(0.0, 20)),
        ];
        let spec = GeneratorSpec::with_thresholds(0.5, 1.0, 0.3, 90, 5).unwrap();
        let units = generate_tradezones(&dmas, &spec).unwrap();
        assert!(units.iter().all(|u| !u.unit_id.starts_with("slushy")));
        let treated: BTreeSet<_> = units
            .iter()
            .filter(|u| u.event_indicator)
            .map(|u| u.unit_id.clone())
            .collect();
        let control: BTreeSet<_> = units
            .iter()
            .filter(|u| !u.event_indicator)
            .map(|u| u.unit_id.clone())
            .collect();
        assert!(treated.is_disjoint(&control));
        assert!(!treated.is_empty() && !control.is_empty());
    }

    #[test]
    fn generation_is_bitwise_reproducible() {
        let dmas = two_dma_world(&[(7, 5.0), (12, 2.0)]);
        let spec = GeneratorSpec::with_thresholds(2.0, 1.0, 0.3, 60, 6).unwrap();
        let a = generate_tradezones(&dmas, &spec).unwrap();
        let b = generate_tradezones(&dmas, &spec).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn missing_strata_are_rejected() {
        let all_sunny = vec![
            dma("s1", 100, &flat_mu(1.0, 5), &flat_snow(0.0, 5)),
            dma("s2", 100, &flat_mu(1.0, 5), &flat_snow(0.0, 5)),
        ];
        let spec = GeneratorSpec::with_thresholds(1.0, 1.0, 0.3, 10, 0).unwrap();
        assert!(matches!(
            generate_tradezones(&all_sunny, &spec),
            Err(Error::NoTreatedDmas)
        ));
        let all_snowy = vec![
            dma("s1", 100, &flat_mu(1.0, 5), &flat_snow(5.0, 5)),
            dma("s2", 100, &flat_mu(1.0, 5), &flat_snow(5.0, 5)),
        ];
        assert!(matches!(
            generate_tradezones(&all_snowy, &spec),
            Err(Error::NoControlDmas)
        ));
    }

    #[test]
    fn generated_medians_track_input_medians() {
        let sigma = 1.0;
        let dmas = vec![
            dma("snowy", 100, &flat_mu(13.0, 30), &spiked_snow(30, &[(15, 5.0)])),
            dma("sunny", 100, &flat_mu(13.0, 30), &flat_snow(0.0, 30)),
        ];
        let spec = GeneratorSpec::with_thresholds(sigma, 1.0, 0.3, 400, 7).unwrap();
        let units = generate_tradezones(&dmas, &spec).unwrap();
        let per_dma = 200.0f64;
        let mut values: Vec<f64> = units
            .iter()
            .flat_map(|u| u.days().map(|d| u.outcome(d).unwrap()).collect::<Vec<_>>())
            .collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = values[values.len() / 2];
        assert!((median - 13.0).abs() <= 2.0 * sigma / per_dma.sqrt());
    }

    #[test]
    fn write_then_ingest_round_trips() {
        let dmas = two_dma_world(&[(7, 5.0)]);
        let spec = GeneratorSpec::with_thresholds(1.0, 1.0, 0.3, 30, 8).unwrap();
        let mut units = generate_tradezones(&dmas, &spec).unwrap();
        units.sort_by(|a, b| a.unit_id.cmp(&b.unit_id));
        let dir = tempfile::tempdir().unwrap();
        let panel = dir.path().join("panel.csv");
        let cov = dir.path().join("covariates.csv");
        let events = dir.path().join("events.csv");
        write_units(&units, &panel, &cov, &events).unwrap();
        let back = ingest(&panel, &cov, &events).unwrap();
        assert_eq!(units, back);
    }

    fn write_file(path: &Path, contents: &str) {
        std::fs::write(path, contents).unwrap();
    }

    fn minimal_files(dir: &Path) -> (std::path::PathBuf, std::path::PathBuf, std::path::PathBuf) {
        let panel = dir.join("panel.csv");
        let cov = dir.join("covariates.csv");
        let events = dir.join("events.csv");
        write_file(
            &panel,
            "unit_id,day,outcome\nu1,1,1.0\nu1,2,2.0\nu2,1,1.5\nu2,2,2.5\n",
        );
        write_file(&cov, "unit_id,c1\nu1,0.3\nu2,0.7\n");
        write_file(&events, "unit_id,event_indicator,event_day\nu1,1,2\nu2,0,\n");
        (panel, cov, events)
    }

    #[test]
    fn minimal_files_ingest_cleanly() {
        let dir = tempfile::tempdir().unwrap();
        let (panel, cov, events) = minimal_files(dir.path());
        let units = ingest(&panel, &cov, &events).unwrap();
        assert_eq!(units.len(), 2);
        assert_eq!(units[0].unit_id, "u1");
        assert_eq!(units[0].event_time, Some(2));
        assert_eq!(units[1].covariates, vec![0.7]);
    }

    #[test]
    fn duplicate_panel_rows_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let (panel, cov, events) = minimal_files(dir.path());
        write_file(
            &panel,
            "unit_id,day,outcome\nu1,1,1.0\nu1,1,9.0\nu1,2,2.0\nu2,1,1.5\nu2,2,2.5\n",
        );
        match ingest(&panel, &cov, &events) {
            Err(Error::DuplicateRow { unit_id, day }) => {
                assert_eq!(unit_id, "u1");
                assert_eq!(day, 1);
            }
            other => panic!("expected duplicate-row error, got {other:?}"),
        }
    }

    #[test]
    fn dangling_event_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let (panel, cov, events) = minimal_files(dir.path());
        write_file(
            &events,
            "unit_id,event_indicator,event_day\nu1,1,2\nu2,0,\nghost,0,\n",
        );
        assert!(matches!(
            ingest(&panel, &cov, &events),
            Err(Error::DanglingEvent { unit_id }) if unit_id == "ghost"
        ));
    }

    #[test]
    fn non_contiguous_days_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let (panel, cov, events) = minimal_files(dir.path());
        write_file(
            &panel,
            "unit_id,day,outcome\nu1,1,1.0\nu1,3,2.0\nu2,1,1.5\nu2,2,2.5\n",
        );
        assert!(matches!(
            ingest(&panel, &cov, &events),
            Err(Error::NonContiguousDays { unit_id }) if unit_id == "u1"
        ));
    }

    #[test]
    fn inconsistent_event_rows_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let (panel, cov, events) = minimal_files(dir.path());
        write_file(&events, "unit_id,event_indicator,event_day\nu1,1,\nu2,0,\n");
        assert!(matches!(
            ingest(&panel, &cov, &events),
            Err(Error::EventInconsistent { unit_id }) if unit_id == "u1"
        ));
    }

    #[test]
    fn missing_events_row_is_a_schema_error() {
        let dir = tempfile::tempdir().unwrap();
        let (panel, cov, events) = minimal_files(dir.path());
        write_file(&events, "unit_id,event_indicator,event_day\nu1,1,2\n");
        assert!(matches!(
            ingest(&panel, &cov, &events),
            Err(Error::Schema { .. })
        ));
    }

    #[test]
    fn dma_inputs_round_trip_through_csv() {
        let dir = tempfile::tempdir().unwrap();
        let dma_csv = dir.path().join("dma.csv");
        let panel_csv = dir.path().join("dma_panel.csv");
        write_file(&dma_csv, "dma_id,population,c1,c2\nd1,100,0.5,1.5\nd2,200,0.25,2.5\n");
        write_file(
            &panel_csv,
            "dma_id,day,outcome,snowfall_kg_m2\n\
             d1,1,10,0\nd1,2,11,2.5\nd2,1,20,0\nd2,2,21,0\n",
        );
        let dmas = read_dmas(&dma_csv, &panel_csv).unwrap();
        assert_eq!(dmas.len(), 2);
        assert_eq!(dmas[0].dma_id, "d1");
        assert_eq!(dmas[0].population, 100);
        assert_eq!(dmas[0].covariates, vec![0.5, 1.5]);
        assert_eq!(dmas[0].outcomes[&2], 11.0);
        assert_eq!(dmas[0].snowfall[&2], 2.5);
    }

    #[test]
    fn negative_snowfall_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let dma_csv = dir.path().join("dma.csv");
        let panel_csv = dir.path().join("dma_panel.csv");
        write_file(&dma_csv, "dma_id,population,c1\nd1,100,0.5\n");
        write_file(&panel_csv, "dma_id,day,outcome,snowfall_kg_m2\nd1,1,10,-1\n");
        assert!(matches!(
            read_dmas(&dma_csv, &panel_csv),
            Err(Error::Schema { .. })
        ));
    }
}
