//! Data-scaling laws and loss-to-metric models.
//!
//! Training loss against training tokens is fit as a line in natural-log
//! space, `ln L = slope·ln D + intercept`, which is the power law
//! `L = exp(intercept)·D^slope`. Downstream metrics are fit against the log
//! of a loss, `metric = slope·ln(loss) + intercept`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
}

/// Loss against training tokens in log-log space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    /// Negative of the decay exponent.
    pub slope: f64,
    pub intercept: f64,
}

impl PowerLawFit {
    pub const fn new(slope: f64, intercept: f64) -> Self {
        PowerLawFit { slope, intercept }
    }

    /// Decay exponent of `L = scale / D^exponent`.
    pub fn exponent(&self) -> f64 {
        -self.slope
    }

    pub fn scale(&self) -> f64 {
        self.intercept.exp()
    }
}

impl From<LineFit> for PowerLawFit {
    fn from(l: LineFit) -> Self {
        PowerLawFit::new(l.slope, l.intercept)
    }
}

/// Metric against log loss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricFit {
    pub slope: f64,
    pub intercept: f64,
}

impl MetricFit {
    pub const fn new(slope: f64, intercept: f64) -> Self {
        MetricFit { slope, intercept }
    }
}

impl From<LineFit> for MetricFit {
    fn from(l: LineFit) -> Self {
        MetricFit::new(l.slope, l.intercept)
    }
}

/// Published coefficient pairs, usable as fixtures.
pub mod fixtures {
    use super::{MetricFit, PowerLawFit};

    /// OCR training loss against training tokens.
    pub const OCR_LOSS: PowerLawFit = PowerLawFit::new(-0.1817, -0.7011);
    /// Grounding training loss against training tokens.
    pub const GROUNDING_LOSS: PowerLawFit = PowerLawFit::new(-0.0785, -0.0745);
    /// ChartQA accuracy against OCR loss.
    pub const CHARTQA: MetricFit = MetricFit::new(-0.0968, 0.7139);
    /// InfographicVQA accuracy against OCR loss.
    pub const INFOVQA: MetricFit = MetricFit::new(-0.1488, 0.5319);
}

/// Ordinary least squares in the given coordinates.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() {
        return Err(Error::invalid(format!(
            "got {} x values and {} y values",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 {
        return Err(Error::SingularFit(format!("need at least 2 points, got {}", xs.len())));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::invalid("fit inputs must be finite"));
    }
    if xs.iter().all(|&x| x == xs[0]) {
        return Err(Error::SingularFit("all x values are identical".into()));
    }

    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - mean_x;
        sxx += dx * dx;
        sxy += dx * (y - mean_y);
    }
    if !(sxx > 0.0) {
        return Err(Error::SingularFit("x values have no spread".into()));
    }
    let slope = sxy / sxx;
    Ok(LineFit {
        slope,
        intercept: mean_y - slope * mean_x,
    })
}

pub fn predict_loss(fit: &PowerLawFit, tokens: f64) -> Result<f64> {
    if !(tokens.is_finite() && tokens > 0.0) {
        return Err(Error::invalid(format!("token count must be positive, got {tokens}")));
    }
    Ok(fit.intercept.exp() * tokens.powf(fit.slope))
}

pub fn predict_metric(fit: &MetricFit, loss: f64) -> Result<f64> {
    if !(loss.is_finite() && loss > 0.0) {
        return Err(Error::invalid(format!("loss must be positive, got {loss}")));
    }
    Ok(fit.slope * loss.ln() + fit.intercept)
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use proptest::prelude::*;

    /// Normal equations with raw sums, solved by Cramer's rule.
    fn normal_equations(xs: &[f64], ys: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let sx: f64 = xs.iter().sum();
        let sy: f64 = ys.iter().sum();
        let sxx: f64 = xs.iter().map(|x| x * x).sum();
        let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
        let det = n * sxx - sx * sx;
        ((n * sxy - sx * sy) / det, (sxx * sy - sx * sxy) / det)
    }

    #[test]
    fn recovers_exact_line() {
        let xs: Vec<f64> = (0..20).map(|i| 18.0 + i as f64 * 0.5).collect();
        let ys: Vec<f64> = xs.iter().map(|x| -0.1817 * x - 0.7011).collect();
        let f = fit_line(&xs, &ys).unwrap();
        assert!((f.slope + 0.1817).abs() < 1e-9);
        assert!((f.intercept + 0.7011).abs() < 1e-9);
    }

    #[test]
    fn two_points() {
        let f = fit_line(&[0.0, 1.0], &[1.0, 3.0]).unwrap();
        assert_eq!((f.slope, f.intercept), (2.0, 1.0));
    }

    #[test]
    fn noisy_matches_normal_equations() {
        let xs: Vec<f64> = (0..40).map(|i| i as f64 * 0.25).collect();
        let ys: Vec<f64> = xs
            .iter()
            .enumerate()
            .map(|(i, x)| 1.5 * x - 2.0 + ((i * 7919) % 13) as f64 * 0.1 - 0.6)
            .collect();
        let f = fit_line(&xs, &ys).unwrap();
        let (s, b) = normal_equations(&xs, &ys);
        assert!((f.slope - s).abs() < 1e-9);
        assert!((f.intercept - b).abs() < 1e-9);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(fit_line(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0]), Err(Error::SingularFit(_))));
        assert!(matches!(fit_line(&[1.0], &[1.0]), Err(Error::SingularFit(_))));
        assert!(fit_line(&[1.0, 2.0], &[1.0]).is_err());
        assert!(fit_line(&[1.0, f64::INFINITY], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn loss_predictions() {
        let flat = PowerLawFit::new(0.0, 0.0);
        assert_eq!(predict_loss(&flat, 12345.0).unwrap(), 1.0);
        let inv = PowerLawFit::new(-1.0, 0.0);
        assert!((predict_loss(&inv, 10.0).unwrap() - 0.1).abs() < 1e-15);
        // exp(-0.7011)·(1e12)^(-0.1817), evaluated at 40 digits with mpmath
        let want = 0.003274282438124472;
        let got = predict_loss(&OCR_LOSS, 1e12).unwrap();
        assert!((got - want).abs() < 1e-15, "{got}");
        assert!(predict_loss(&OCR_LOSS, 0.0).is_err());
    }

    #[test]
    fn metric_predictions() {
        assert_eq!(predict_metric(&CHARTQA, 1.0).unwrap(), 0.7139);
        assert_eq!(predict_metric(&INFOVQA, 1.0).unwrap(), 0.5319);
        let flat = MetricFit::new(0.0, 0.42);
        assert_eq!(predict_metric(&flat, 3.7).unwrap(), 0.42);
        assert!(predict_metric(&CHARTQA, -1.0).is_err());
    }

    #[test]
    fn power_law_terms_from_line() {
        assert_eq!(GROUNDING_LOSS.exponent(), 0.0785);
        assert!((OCR_LOSS.scale() - (-0.7011f64).exp()).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn round_trip(slope in -1.0f64..0.0, intercept in -3.0f64..3.0) {
            let fit = PowerLawFit::new(slope, intercept);
            let ds: Vec<f64> = (0..30).map(|i| 1e8 * 1.4f64.powi(i)).collect();
            let ls: Vec<f64> = ds.iter().map(|&d| predict_loss(&fit, d).unwrap()).collect();
            let xs: Vec<f64> = ds.iter().map(|d| d.ln()).collect();
            let ys: Vec<f64> = ls.iter().map(|l| l.ln()).collect();
            let f = fit_line(&xs, &ys).unwrap();
            prop_assert!((f.slope - slope).abs() < 1e-9);
            prop_assert!((f.intercept - intercept).abs() < 1e-9);
        }

        #[test]
        fn shift_and_residuals(ys in proptest::collection::vec(-5.0f64..5.0, 3..30), c in -10.0f64..10.0) {
            let xs: Vec<f64> = (0..ys.len()).map(|i| i as f64 * 0.3 - 1.0).collect();
            let f = fit_line(&xs, &ys).unwrap();
            let shifted: Vec<f64> = ys.iter().map(|y| y + c).collect();
            let g = fit_line(&xs, &shifted).unwrap();
            prop_assert!((g.slope - f.slope).abs() < 1e-9);
            prop_assert!((g.intercept - f.intercept - c).abs() < 1e-9);

            let r: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| y - (f.slope * x + f.intercept)).collect();
            prop_assert!(r.iter().sum::<f64>().abs() < 1e-8);
            prop_assert!(r.iter().zip(&xs).map(|(r, x)| r * x).sum::<f64>().abs() < 1e-8);
        }
    }
}
