//! Property tests for the library's structural invariants.
//!
//! These cover the guarantees the rest of the codebase leans on:
//! pair construction arithmetic, estimator equivariances, heuristic
//! ordering, matching uniqueness, and zero-noise determinism.

use std::collections::HashSet;

use proptest::prelude::*;

use lapret_core::{
    aggregate, build_pair, estimate_pair_lapret, fit_propensity, heuristic_ranges,
    impute_treatment, match_units, Aggregation, Day, LapretParams, MatchedPair, UnitSeries,
};

fn unit(id: &str, outcomes: Vec<f64>, covs: Vec<f64>, event: Option<Day>) -> UnitSeries {
    UnitSeries::new(id, 1, outcomes, covs, event).expect("valid series")
}

fn pair_from_outcomes(treated: Vec<f64>, control: Vec<f64>, event: Day) -> MatchedPair {
    let t = unit("t", treated, vec![], Some(event));
    let c = unit("c", control, vec![], None);
    build_pair(&t, &c, 0).expect("valid pair")
}

/// Outcome vectors long enough for the estimator's four-pre-event-day
/// requirement, with the event on the penultimate day.
fn outcome_pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Day)> {
    (6usize..20).prop_flat_map(|len| {
        (
            proptest::collection::vec(-10.0..10.0f64, len),
            proptest::collection::vec(-10.0..10.0f64, len),
            Just(len as Day - 1),
        )
    })
}

proptest! {
    // Summing ddelta over (a, b] telescopes back to delta[b] − delta[a].
    #[test]
    fn ddelta_telescopes((treated, control, event) in outcome_pair()) {
        let pair = pair_from_outcomes(treated, control, event);
        let days: Vec<Day> = pair.delta.keys().copied().collect();
        for (i, &a) in days.iter().enumerate() {
            for &b in &days[i + 1..] {
                let summed: f64 = pair
                    .ddelta
                    .range(a + 1..=b)
                    .map(|(_, v)| v)
                    .sum();
                let direct = pair.delta[&b] - pair.delta[&a];
                prop_assert!((summed - direct).abs() < 1e-9);
            }
        }
    }

    // Swapping the two outcome series negates every delta entry.
    #[test]
    fn role_swap_negates_delta((treated, control, event) in outcome_pair()) {
        let fwd = pair_from_outcomes(treated.clone(), control.clone(), event);
        let rev = pair_from_outcomes(control, treated, event);
        for (day, v) in &fwd.delta {
            prop_assert_eq!(*v, -rev.delta[day]);
        }
    }

    // Multiplying both outcome series by c > 0 while scaling epsilon by
    // c leaves the estimate unchanged.
    #[test]
    fn estimate_is_scale_equivariant(
        (treated, control, event) in outcome_pair(),
        c in 0.01..100.0f64,
        alpha in 1.0..50.0f64,
        epsilon in 0.01..5.0f64,
    ) {
        let base = pair_from_outcomes(treated.clone(), control.clone(), event);
        let scaled = pair_from_outcomes(
            treated.iter().map(|y| y * c).collect(),
            control.iter().map(|y| y * c).collect(),
            event,
        );
        let got = estimate_pair_lapret(
            &scaled,
            &LapretParams::new(alpha, epsilon * c).unwrap(),
        ).unwrap();
        let want = estimate_pair_lapret(
            &base,
            &LapretParams::new(alpha, epsilon).unwrap(),
        ).unwrap();
        prop_assert_eq!(got.lapret_day, want.lapret_day);
        prop_assert_eq!(got.d_i, want.d_i);
    }

    // Raising alpha can only move the detected day earlier or drop it.
    #[test]
    fn alpha_shrinks_detection(
        (treated, control, event) in outcome_pair(),
        alpha in 1.0..20.0f64,
        factor in 1.0..10.0f64,
        epsilon in 0.01..5.0f64,
    ) {
        let pair = pair_from_outcomes(treated, control, event);
        let lo = estimate_pair_lapret(
            &pair,
            &LapretParams::new(alpha, epsilon).unwrap(),
        ).unwrap();
        let hi = estimate_pair_lapret(
            &pair,
            &LapretParams::new(alpha * factor, epsilon).unwrap(),
        ).unwrap();
        match (lo.lapret_day, hi.lapret_day) {
            (Some(a), Some(b)) => prop_assert!(b <= a),
            (None, Some(_)) => prop_assert!(false, "detection appeared at higher alpha"),
            _ => {}
        }
    }

    // A flat delta series never produces a detection.
    #[test]
    fn flat_delta_is_never_detected(
        level in -10.0..10.0f64,
        len in 6usize..20,
        alpha in 1.0..100.0f64,
        epsilon in 0.001..10.0f64,
    ) {
        let series = vec![level; len];
        let pair = pair_from_outcomes(series.clone(), series, len as Day - 1);
        let result = estimate_pair_lapret(
            &pair,
            &LapretParams::new(alpha, epsilon).unwrap(),
        ).unwrap();
        prop_assert_eq!(result.lapret_day, None);
        prop_assert_eq!(result.d_i, None);
    }

    // The heuristic ranges come out ordered for any valid input.
    #[test]
    fn heuristic_ranges_are_ordered((treated, control, event) in outcome_pair()) {
        let pair = pair_from_outcomes(treated, control, event);
        if let Ok(r) = heuristic_ranges(std::slice::from_ref(&pair)) {
            prop_assert!(r.alpha_min <= r.alpha_max);
            prop_assert!(r.epsilon_min <= r.epsilon_max);
        }
    }

    // Min aggregation never exceeds mean aggregation.
    #[test]
    fn min_aggregate_is_conservative(gaps in proptest::collection::vec(1i32..30, 1..40)) {
        let per_pair: Vec<_> = gaps
            .iter()
            .enumerate()
            .map(|(i, &d)| lapret_core::PairLapret {
                pair_id: i as u64,
                lapret_day: Some(1),
                d_i: Some(d),
            })
            .collect();
        let min = aggregate(&per_pair, Aggregation::Min);
        let mean = aggregate(&per_pair, Aggregation::Mean);
        prop_assert!(min.d_hat.unwrap() <= mean.d_hat.unwrap());
        prop_assert!(min.d_floor.unwrap() <= mean.d_floor.unwrap());
    }

    // Imputation with eta = 0 reproduces the observed indicators for
    // every seed and replicate count.
    #[test]
    fn zero_eta_imputation_is_identity(
        flags in proptest::collection::vec(any::<bool>(), 1..50),
        seed in any::<u64>(),
        replicates in 1u32..5,
    ) {
        let units: Vec<UnitSeries> = flags
            .iter()
            .enumerate()
            .map(|(i, &z)| unit(&format!("u{i:03}"), vec![0.0], vec![], z.then_some(1)))
            .collect();
        let assignments = impute_treatment(&units, 0.0, replicates, seed).unwrap();
        prop_assert_eq!(assignments.len(), flags.len() * replicates as usize);
        for a in &assignments {
            let idx: usize = a.unit_id[1..].parse().unwrap();
            prop_assert_eq!(a.z, flags[idx]);
        }
    }

    // Matching never reuses a control and never exceeds the smaller arm.
    #[test]
    fn matching_is_without_replacement(
        covs in proptest::collection::vec((-3.0..3.0f64, any::<bool>()), 4..40),
    ) {
        let units: Vec<UnitSeries> = covs
            .iter()
            .enumerate()
            .map(|(i, &(x, z))| {
                unit(&format!("u{i:03}"), vec![0.0; 8], vec![x], z.then_some(4))
            })
            .collect();
        let n_treated = units.iter().filter(|u| u.event_indicator).count();
        let n_control = units.len() - n_treated;
        prop_assume!(n_treated > 0 && n_control > 0);
        let model = fit_propensity(&units).unwrap();
        let matches = match_units(&units, &model, None).unwrap();
        let controls: HashSet<_> = matches.pairs.iter().map(|(_, c)| c).collect();
        let treateds: HashSet<_> = matches.pairs.iter().map(|(t, _)| t).collect();
        prop_assert_eq!(controls.len(), matches.pairs.len());
        prop_assert_eq!(treateds.len(), matches.pairs.len());
        prop_assert!(matches.pairs.len() <= n_treated.min(n_control));
        prop_assert_eq!(
            matches.pairs.len() + matches.unmatched_treated.len(),
            n_treated
        );
    }
}
