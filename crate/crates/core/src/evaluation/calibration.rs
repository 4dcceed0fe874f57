use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// One probabilistic forecast and what actually happened.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ForecastOutcome {
    pub case_id: u64,
    pub forecast: f64,
    pub outcome: bool,
}

impl ForecastOutcome {
    pub fn new(case_id: u64, forecast: f64, outcome: bool) -> Self {
        Self { case_id, forecast, outcome }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinRow {
    pub lower: f64,
    pub upper: f64,
    pub n: usize,
    /// `None` for empty bins.
    pub mean_forecast: Option<f64>,
    pub observed_frequency: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationScore {
    pub score: f64,
    pub bins: Vec<BinRow>,
}

fn bin_of(f: f64, bins: usize) -> usize {
    ((f * bins as f64).floor() as usize).min(bins - 1)
}

fn check_forecast(f: f64) -> Result<()> {
    if (0.0..=1.0).contains(&f) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("forecast {f} outside [0, 1]")))
    }
}

/// Per-bin running sums: count, forecast sum, outcome sum.
#[derive(Clone)]
struct BinSums(Vec<(usize, f64, f64)>);

impl BinSums {
    fn new(forecasts: impl Iterator<Item = (f64, bool)>, bins: usize) -> Self {
        let mut sums = vec![(0, 0.0, 0.0); bins];
        for (f, o) in forecasts {
            let b = &mut sums[bin_of(f, bins)];
            b.0 += 1;
            b.1 += f;
            b.2 += if o { 1.0 } else { 0.0 };
        }
        Self(sums)
    }

    /// `(1/N) Σ_b n_b (p̄_b − ō_b)²`, optionally with one case removed.
    fn score(&self, without: Option<(f64, bool)>) -> f64 {
        let skip = without.map(|(f, o)| (bin_of(f, self.0.len()), f, if o { 1.0 } else { 0.0 }));
        let mut total = 0usize;
        let mut acc = 0.0;
        for (i, &(n, sf, so)) in self.0.iter().enumerate() {
            let (n, sf, so) = match skip {
                Some((b, f, o)) if b == i => (n - 1, sf - f, so - o),
                _ => (n, sf, so),
            };
            if n == 0 {
                continue;
            }
            let nf = n as f64;
            let d = sf / nf - so / nf;
            acc += nf * d * d;
            total += n;
        }
        if total == 0 {
            0.0
        } else {
            acc / total as f64
        }
    }
}

/// Reliability term of the probability score over `bins` equal-width bins.
/// A forecast of exactly 1 falls in the last bin.
pub fn calibration_score(data: &[ForecastOutcome], bins: usize) -> Result<CalibrationScore> {
    if data.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    if bins == 0 {
        return Err(Error::InvalidArgument("bin count must be at least 1".into()));
    }
    for d in data {
        check_forecast(d.forecast)?;
    }
    let sums = BinSums::new(data.iter().map(|d| (d.forecast, d.outcome)), bins);
    let width = 1.0 / bins as f64;
    let rows = sums
        .0
        .iter()
        .enumerate()
        .map(|(i, &(n, sf, so))| BinRow {
            lower: i as f64 * width,
            upper: if i + 1 == bins { 1.0 } else { (i + 1) as f64 * width },
            n,
            mean_forecast: (n > 0).then(|| sf / n as f64),
            observed_frequency: (n > 0).then(|| so / n as f64),
        })
        .collect();
    Ok(CalibrationScore { score: sums.score(None), bins: rows })
}

/// Grid step for [`regression_area`].
pub const AREA_STEP: f64 = 1e-3;

/// Least-squares `y ≈ c0 + c1·x + c2·x²`.
pub fn quadratic_fit(points: &[(f64, f64)]) -> Result<[f64; 3]> {
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < 3 {
        return Err(Error::UndefinedFit(format!("{} distinct forecast value(s), need 3", xs.len())));
    }
    // Normal equations on x centred at its mean for conditioning.
    let mean = points.iter().map(|p| p.0).sum::<f64>() / points.len() as f64;
    let mut m = [[0.0f64; 4]; 3];
    for &(x, y) in points {
        let u = x - mean;
        let basis = [1.0, u, u * u];
        for r in 0..3 {
            for c in 0..3 {
                m[r][c] += basis[r] * basis[c];
            }
            m[r][3] += basis[r] * y;
        }
    }
    for col in 0..3 {
        let pivot = (col..3).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs())).unwrap_or(col);
        m.swap(col, pivot);
        if m[col][col].abs() < 1e-300 {
            return Err(Error::UndefinedFit("singular normal equations".into()));
        }
        let pivot_row = m[col];
        for (r, row) in m.iter_mut().enumerate() {
            if r != col {
                let k = row[col] / pivot_row[col];
                for (v, p) in row.iter_mut().zip(pivot_row).skip(col) {
                    *v -= k * p;
                }
            }
        }
    }
    let (a, b, c) = (m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]);
    // expand a + b(x − μ) + c(x − μ)²
    Ok([a - b * mean + c * mean * mean, b - 2.0 * c * mean, c])
}

/// `∫₀¹ |fit(x) − x| dx` by the trapezoid rule with spacing `step`.
pub fn fit_area(coef: &[f64; 3], step: f64) -> f64 {
    let n = (1.0 / step).round() as usize;
    let g = |i: usize| {
        let x = i as f64 / n as f64;
        (coef[0] + coef[1] * x + coef[2] * x * x - x).abs()
    };
    let inner: f64 = (1..n).map(g).sum();
    (inner + 0.5 * (g(0) + g(n))) / n as f64
}

/// Area between a quadratic fitted to `(forecast, outcome)` and the identity.
pub fn regression_area(data: &[ForecastOutcome]) -> Result<f64> {
    for d in data {
        check_forecast(d.forecast)?;
    }
    let points: Vec<(f64, f64)> = data.iter().map(|d| (d.forecast, if d.outcome { 1.0 } else { 0.0 })).collect();
    regression_area_points(&points)
}

/// [`regression_area`] for real-valued responses.
pub fn regression_area_points(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::InsufficientData { needed: 3, got: points.len() });
    }
    Ok(fit_area(&quadratic_fit(points)?, AREA_STEP))
}

/// Paired comparison of two forecast columns for the same cases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairedForecast {
    pub causal: f64,
    pub independence: f64,
    pub outcome: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JackknifeResult {
    /// `score_independence − score_causal` on the full sample.
    pub delta: f64,
    /// Mean of the leave-one-out pseudo-values.
    pub estimate: f64,
    pub standard_error: f64,
    pub t_statistic: Option<f64>,
    pub degrees_of_freedom: usize,
    /// Two-sided; `None` when the pseudo-values have zero variance.
    pub p_value: Option<f64>,
    pub tie: bool,
}

/// Minimum sample size for [`jackknife_compare`].
pub const JACKKNIFE_MIN: usize = 10;

/// Leave-one-out jackknife on the difference of calibration scores, with a
/// two-sided t test on `N − 1` degrees of freedom.
pub fn jackknife_compare(paired: &[PairedForecast], bins: usize) -> Result<JackknifeResult> {
    let n = paired.len();
    if n < JACKKNIFE_MIN {
        return Err(Error::InsufficientData { needed: JACKKNIFE_MIN, got: n });
    }
    if bins == 0 {
        return Err(Error::InvalidArgument("bin count must be at least 1".into()));
    }
    for p in paired {
        check_forecast(p.causal)?;
        check_forecast(p.independence)?;
    }
    let causal = BinSums::new(paired.iter().map(|p| (p.causal, p.outcome)), bins);
    let indep = BinSums::new(paired.iter().map(|p| (p.independence, p.outcome)), bins);
    let delta = indep.score(None) - causal.score(None);
    let nf = n as f64;
    let pseudo: Vec<f64> = paired
        .iter()
        .map(|p| {
            let loo = indep.score(Some((p.independence, p.outcome))) - causal.score(Some((p.causal, p.outcome)));
            nf * delta - (nf - 1.0) * loo
        })
        .collect();
    let estimate = pseudo.iter().sum::<f64>() / nf;
    let var = pseudo.iter().map(|v| (v - estimate).powi(2)).sum::<f64>() / (nf - 1.0);
    let standard_error = (var / nf).sqrt();
    let df = n - 1;
    if !(standard_error > 0.0) {
        return Ok(JackknifeResult {
            delta,
            estimate,
            standard_error: 0.0,
            t_statistic: None,
            degrees_of_freedom: df,
            p_value: None,
            tie: true,
        });
    }
    let t = estimate / standard_error;
    let dist = StudentsT::new(0.0, 1.0, df as f64).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let p = 2.0 * dist.sf(t.abs());
    Ok(JackknifeResult {
        delta,
        estimate,
        standard_error,
        t_statistic: Some(t),
        degrees_of_freedom: df,
        p_value: Some(p.min(1.0)),
        tie: false,
    })
}
