//! Propensity-score matching: a ridge-penalized logistic regression of
//! the event indicator on covariates, fit by iteratively reweighted
//! least squares, and greedy 1:1 nearest-neighbor pairing on the logit
//! scale without replacement.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::UnitSeries;

/// Ridge penalty on the coefficients. Keeps the optimum finite under
/// complete separation, which duplicated within-DMA covariates make
/// common.
pub const RIDGE_LAMBDA: f64 = 1e-6;

const MAX_ITERATIONS: u32 = 100;
const COEF_TOLERANCE: f64 = 1e-10;

/// A fitted propensity model on standardized covariates.
///
/// `coefficients[0]` is the intercept; the remaining entries apply to
/// covariates standardized by the stored per-column mean and scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropensityModel {
    pub coefficients: Vec<f64>,
    pub converged: bool,
    pub iterations: u32,
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
}

impl PropensityModel {
    pub fn dim(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Linear predictor (log-odds) for a raw covariate vector.
    pub fn logit(&self, covariates: &[f64], unit_id: &str) -> Result<f64> {
        if covariates.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                unit_id: unit_id.to_string(),
                got: covariates.len(),
            });
        }
        let mut eta = self.coefficients[0];
        for (j, &x) in covariates.iter().enumerate() {
            eta += self.coefficients[j + 1] * (x - self.means[j]) / self.scales[j];
        }
        Ok(eta)
    }

    /// Fitted probability of carrying the event indicator.
    pub fn score(&self, covariates: &[f64], unit_id: &str) -> Result<f64> {
        Ok(sigmoid(self.logit(covariates, unit_id)?))
    }
}

/// A 1:1 matching without replacement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchSet {
    /// (treated_id, control_id) pairs in processing order.
    pub pairs: Vec<(String, String)>,
    pub unmatched_treated: Vec<String>,
    pub caliper: Option<f64>,
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Per-column mean and sample standard deviation; zero-variance columns
/// get unit scale.
fn standardization(units: &[UnitSeries], dim: usize) -> (Vec<f64>, Vec<f64>) {
    let n = units.len() as f64;
    let mut means = vec![0.0; dim];
    for u in units {
        for (j, &x) in u.covariates.iter().enumerate() {
            means[j] += x;
        }
    }
    for m in &mut means {
        *m /= n;
    }
    let mut scales = vec![0.0; dim];
    for u in units {
        for (j, &x) in u.covariates.iter().enumerate() {
            scales[j] += (x - means[j]).powi(2);
        }
    }
    for s in &mut scales {
        *s = if n > 1.0 { (*s / (n - 1.0)).sqrt() } else { 0.0 };
        if *s == 0.0 || !s.is_finite() {
            *s = 1.0;
        }
    }
    (means, scales)
}

/// Fits the propensity model by Newton steps on the ridge-penalized
/// negative log-likelihood (the penalty covers every coefficient,
/// intercept included).
pub fn fit_propensity(units: &[UnitSeries]) -> Result<PropensityModel> {
    let n_treated = units.iter().filter(|u| u.event_indicator).count();
    if n_treated == 0 || n_treated == units.len() {
        return Err(Error::NoVariation);
    }
    let dim = units[0].covariates.len();
    for u in units {
        if u.covariates.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                unit_id: u.unit_id.clone(),
                got: u.covariates.len(),
            });
        }
        if u.covariates.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite covariate for unit {}",
                u.unit_id
            )));
        }
    }

    let (means, scales) = standardization(units, dim);
    let n = units.len();
    let p = dim + 1;
    let mut design = DMatrix::zeros(n, p);
    let mut y = DVector::zeros(n);
    for (i, u) in units.iter().enumerate() {
        design[(i, 0)] = 1.0;
        for j in 0..dim {
            design[(i, j + 1)] = (u.covariates[j] - means[j]) / scales[j];
        }
        y[i] = if u.event_indicator { 1.0 } else { 0.0 };
    }

    let mut beta = DVector::zeros(p);
    let mut converged = false;
    let mut iterations = 0;
    for iter in 1..=MAX_ITERATIONS {
        iterations = iter;
        let eta = &design * &beta;
        let probs = eta.map(sigmoid);
        // gradient of the penalized objective
        let mut grad = design.transpose() * (&probs - &y);
        grad += RIDGE_LAMBDA * &beta;
        // Hessian X' W X + lambda I
        let mut hess = DMatrix::zeros(p, p);
        for i in 0..n {
            let w = probs[i] * (1.0 - probs[i]);
            for a in 0..p {
                for b in 0..p {
                    hess[(a, b)] += w * design[(i, a)] * design[(i, b)];
                }
            }
        }
        for a in 0..p {
            hess[(a, a)] += RIDGE_LAMBDA;
        }
        let step = hess
            .clone()
            .lu()
            .solve(&grad)
            .ok_or(Error::SingularDesign)?;
        if step.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularDesign);
        }
        beta -= &step;
        if step.amax() < COEF_TOLERANCE {
            converged = true;
            break;
        }
    }

    Ok(PropensityModel {
        coefficients: beta.iter().copied().collect(),
        converged,
        iterations,
        means,
        scales,
    })
}

/// Greedy nearest-neighbor matching on the logit scale.
///
/// Treated units are processed in descending propensity order (ties by
/// ascending unit id); each takes the unused control with the smallest
/// absolute logit distance (ties again by ascending unit id). Pairs
/// beyond the caliper stay unmatched.
pub fn match_units(
    units: &[UnitSeries],
    model: &PropensityModel,
    caliper: Option<f64>,
) -> Result<MatchSet> {
    let mut treated: Vec<(&UnitSeries, f64)> = Vec::new();
    let mut controls: Vec<(&UnitSeries, f64, bool)> = Vec::new();
    for u in units {
        let logit = model.logit(&u.covariates, &u.unit_id)?;
        if u.event_indicator {
            treated.push((u, logit));
        } else {
            controls.push((u, logit, false));
        }
    }
    treated.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap()
            .then_with(|| a.0.unit_id.cmp(&b.0.unit_id))
    });
    controls.sort_by(|a, b| a.0.unit_id.cmp(&b.0.unit_id));

    let mut pairs = Vec::new();
    let mut unmatched = Vec::new();
    for (t, t_logit) in &treated {
        let mut best: Option<(usize, f64)> = None;
        for (idx, (_, c_logit, used)) in controls.iter().enumerate() {
            if *used {
                continue;
            }
            let dist = (t_logit - c_logit).abs();
            // ascending id order makes strict < a smallest-id tie-break
            if best.map_or(true, |(_, d)| dist < d) {
                best = Some((idx, dist));
            }
        }
        match best {
            Some((idx, dist)) if caliper.map_or(true, |c| dist <= c) => {
                controls[idx].2 = true;
                pairs.push((t.unit_id.clone(), controls[idx].0.unit_id.clone()));
            }
            _ => unmatched.push(t.unit_id.clone()),
        }
    }
    Ok(MatchSet {
        pairs,
        unmatched_treated: unmatched,
        caliper,
    })
}
