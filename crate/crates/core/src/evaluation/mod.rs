//! Calibration comparison between the causal model and a naive-independence
//! baseline that multiplies path likelihoods symptom by symptom.

mod benchmark;
mod calibration;
mod independence;

pub use benchmark::{run_benchmark, CalibrationReport, CaseForecast, ModelScore, DEFAULT_BINS};
pub use calibration::{
    calibration_score, fit_area, jackknife_compare, quadratic_fit, regression_area, regression_area_points, BinRow,
    CalibrationScore, ForecastOutcome, JackknifeResult, PairedForecast, AREA_STEP, JACKKNIFE_MIN,
};
pub use independence::{independence_likelihood, independence_likelihood_with, independence_posterior_with_priors};
