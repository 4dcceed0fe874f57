use std::fmt::Write;

use serde::Serialize;

use super::calibration::{
    calibration_score, jackknife_compare, regression_area, BinRow, ForecastOutcome, JackknifeResult, PairedForecast,
    JACKKNIFE_MIN,
};
use super::independence::independence_posterior_with_priors;
use crate::error::{Error, Result};
use crate::inference::posterior_with_priors;
use crate::kb::{eval_priors, KnowledgeBase, Priors};
use crate::simulate::CaseRecord;

/// Default number of calibration bins.
pub const DEFAULT_BINS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelScore {
    pub calibration: f64,
    pub bins: Vec<BinRow>,
    /// `None` when fewer than three distinct forecasts occur.
    pub regression_area: Option<f64>,
}

/// Forecasts and target-disease likelihoods of both models for one case.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseForecast {
    pub case_id: u64,
    pub true_disease: String,
    pub outcome: bool,
    pub causal: f64,
    pub independence: f64,
    pub causal_likelihood: f64,
    pub independence_likelihood: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationReport {
    pub target: String,
    pub n_cases: usize,
    pub bins: usize,
    /// Priors used for every case instead of the patient-conditioned ones.
    pub priors_override: Option<Priors>,
    pub causal: ModelScore,
    pub independence: ModelScore,
    /// `None` below the jackknife's minimum sample size.
    pub jackknife: Option<JackknifeResult>,
    pub cases: Vec<CaseForecast>,
}

fn model_score(data: &[ForecastOutcome], bins: usize) -> Result<ModelScore> {
    let s = calibration_score(data, bins)?;
    let regression_area = match regression_area(data) {
        Ok(a) => Some(a),
        Err(Error::UndefinedFit(_) | Error::InsufficientData { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(ModelScore { calibration: s.score, bins: s.bins, regression_area })
}

/// Score the causal and independence models' forecasts of `target` over a
/// labelled case set.
pub fn run_benchmark(
    kb: &KnowledgeBase,
    cases: &[CaseRecord],
    target: &str,
    priors_override: Option<&Priors>,
    bins: usize,
) -> Result<CalibrationReport> {
    if kb.disease(target).is_none() {
        return Err(Error::UnknownDisease(target.to_string()));
    }
    if cases.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let mut forecasts = Vec::with_capacity(cases.len());
    for case in cases {
        let priors = match priors_override {
            Some(p) => p.clone(),
            None => eval_priors(kb, &case.patient)?,
        };
        let causal = posterior_with_priors(kb, &priors, &case.patient, &case.findings)?;
        let indep = independence_posterior_with_priors(kb, &priors, &case.patient, &case.findings)?;
        forecasts.push(CaseForecast {
            case_id: case.case_id,
            true_disease: case.true_disease.clone(),
            outcome: case.true_disease == target,
            causal: causal.get(target).clamp(0.0, 1.0),
            independence: indep.get(target).clamp(0.0, 1.0),
            causal_likelihood: causal.decomposition[target].in_tree_likelihood,
            independence_likelihood: indep.decomposition[target].in_tree_likelihood,
        });
    }
    let column = |pick: fn(&CaseForecast) -> f64| -> Vec<ForecastOutcome> {
        forecasts.iter().map(|c| ForecastOutcome::new(c.case_id, pick(c), c.outcome)).collect()
    };
    let causal = model_score(&column(|c| c.causal), bins)?;
    let independence = model_score(&column(|c| c.independence), bins)?;
    let jackknife = if forecasts.len() >= JACKKNIFE_MIN {
        let paired: Vec<PairedForecast> = forecasts
            .iter()
            .map(|c| PairedForecast { causal: c.causal, independence: c.independence, outcome: c.outcome })
            .collect();
        Some(jackknife_compare(&paired, bins)?)
    } else {
        None
    };
    Ok(CalibrationReport {
        target: target.to_string(),
        n_cases: forecasts.len(),
        bins,
        priors_override: priors_override.cloned(),
        causal,
        independence,
        jackknife,
        cases: forecasts,
    })
}

fn opt(v: Option<f64>, prec: usize) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.prec$}"))
}

impl CalibrationReport {
    /// Plain-text summary with the per-bin reliability table.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "target: {}   cases: {}   bins: {}", self.target, self.n_cases, self.bins);
        if let Some(p) = &self.priors_override {
            let list: Vec<String> = p.iter().map(|(d, v)| format!("{d}={v}")).collect();
            let _ = writeln!(s, "priors override: {}", list.join(", "));
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "{:<14}{:>14}{:>18}", "model", "calibration", "regression area");
        for (name, m) in [("causal", &self.causal), ("independence", &self.independence)] {
            let _ = writeln!(s, "{:<14}{:>14.6}{:>18}", name, m.calibration, opt(m.regression_area, 6));
        }
        let _ = writeln!(s);
        let _ = writeln!(
            s,
            "{:<13}{:>6}{:>10}{:>10}{:>8}{:>10}{:>10}",
            "bin", "n", "causal p", "obs", "n", "indep p", "obs"
        );
        for (c, i) in self.causal.bins.iter().zip(&self.independence.bins) {
            let _ = writeln!(
                s,
                "[{:.2}, {:.2}]{:>6}{:>10}{:>10}{:>8}{:>10}{:>10}",
                c.lower,
                c.upper,
                c.n,
                opt(c.mean_forecast, 3),
                opt(c.observed_frequency, 3),
                i.n,
                opt(i.mean_forecast, 3),
                opt(i.observed_frequency, 3)
            );
        }
        let _ = writeln!(s);
        match &self.jackknife {
            Some(j) if j.tie => {
                let _ = writeln!(s, "jackknife: delta {:.6}, identical columns (tie)", j.delta);
            }
            Some(j) => {
                let _ = writeln!(
                    s,
                    "jackknife: delta (indep - causal) {:.6}, estimate {:.6}, se {:.6}, t {}, df {}, p {}",
                    j.delta,
                    j.estimate,
                    j.standard_error,
                    opt(j.t_statistic, 3),
                    j.degrees_of_freedom,
                    j.p_value.map_or("-".into(), |p| format!("{p:.3e}"))
                );
            }
            None => {
                let _ = writeln!(s, "jackknife: needs at least {JACKKNIFE_MIN} cases");
            }
        }
        s
    }
}
