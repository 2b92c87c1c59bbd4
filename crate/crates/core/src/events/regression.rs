//! Events-vs-size regression with per-point prediction intervals.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::EventsError;
use crate::ingest::CountryCode;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    /// `x = log10(as_count)`, `y = log10(1 + events)`.
    #[default]
    LogLog,
    Identity,
}

impl Transform {
    fn x(self, as_count: f64) -> f64 {
        match self {
            Transform::LogLog => as_count.log10(),
            Transform::Identity => as_count,
        }
    }

    fn y(self, events: f64) -> f64 {
        match self {
            Transform::LogLog => events.ln_1p() / std::f64::consts::LN_10,
            Transform::Identity => events,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegressionPoint {
    pub country: CountryCode,
    pub as_count: f64,
    pub event_count: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FittedPoint {
    pub country: CountryCode,
    pub x: f64,
    pub y: f64,
    pub fitted: f64,
    pub residual: f64,
    pub lower: f64,
    pub upper: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegressionFit {
    pub transform: Transform,
    pub level: f64,
    pub n: usize,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Residual standard error on `n - 2` degrees of freedom.
    pub residual_se: f64,
    pub t_crit: f64,
    pub x_mean: f64,
    pub sxx: f64,
    pub points: Vec<FittedPoint>,
}

impl RegressionFit {
    /// Prediction interval for a new observation at transformed `x`.
    pub fn prediction_interval(&self, x: f64) -> (f64, f64) {
        let y = self.intercept + self.slope * x;
        let dx = x - self.x_mean;
        let half = self.t_crit
            * self.residual_se
            * (1.0 + 1.0 / self.n as f64 + dx * dx / self.sxx).sqrt();
        (y - half, y + half)
    }

    pub fn flagged(&self) -> impl Iterator<Item = &FittedPoint> {
        self.points.iter().filter(|p| p.flagged)
    }
}

/// Ordinary least squares of events on AS count. Countries lying above the
/// upper prediction bound at `level` are flagged.
pub fn event_regression(
    points: &[RegressionPoint],
    level: f64,
    transform: Transform,
) -> Result<RegressionFit, EventsError> {
    if !(level > 0.0 && level < 1.0) {
        return Err(EventsError::InvalidLevel(level));
    }
    let n = points.len();
    if n < 3 {
        return Err(EventsError::TooFewPoints(n));
    }
    if let Some(p) = points.iter().find(|p| !(p.as_count > 0.0)) {
        return Err(EventsError::NonPositiveAsCount(p.country));
    }
    let xs: Vec<f64> = points.iter().map(|p| transform.x(p.as_count)).collect();
    let ys: Vec<f64> = points.iter().map(|p| transform.y(p.event_count)).collect();
    let nf = n as f64;
    let x_mean = xs.iter().sum::<f64>() / nf;
    let y_mean = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean).powi(2)).sum();
    if sxx <= f64::EPSILON * nf * x_mean.abs().max(1.0) {
        return Err(EventsError::ZeroVariance);
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - x_mean) * (y - y_mean)).sum();
    let syy: f64 = ys.iter().map(|y| (y - y_mean).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { (1.0 - sse / syy).max(0.0) };
    let df = nf - 2.0;
    let residual_se = (sse / df).sqrt();
    let t_crit = StudentsT::new(0.0, 1.0, df)
        .expect("df is positive")
        .inverse_cdf(0.5 + level / 2.0);
    let mut fit = RegressionFit {
        transform,
        level,
        n,
        slope,
        intercept,
        r_squared,
        residual_se,
        t_crit,
        x_mean,
        sxx,
        points: Vec::with_capacity(n),
    };
    for ((p, x), y) in points.iter().zip(xs).zip(ys) {
        let fitted = intercept + slope * x;
        let (lower, upper) = fit.prediction_interval(x);
        let tol = 1e-9 * upper.abs().max(1.0);
        fit.points.push(FittedPoint {
            country: p.country,
            x,
            y,
            fitted,
            residual: y - fitted,
            lower,
            upper,
            flagged: y > upper + tol,
        });
    }
    Ok(fit)
}
