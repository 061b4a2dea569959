//! Fit a power law to loss vs. training tokens, then map loss to a downstream metric.
//!
//! cargo run --example scaling_fit

use vlplan::scaling::{fit_line, fixtures, predict_loss, predict_metric, PowerLawFit};

fn main() -> vlplan::Result<()> {
    // noisy samples around the OCR loss curve, tokens counted in billions
    let tokens: Vec<f64> = (0..10).map(|i| 2f64.powi(i)).collect();
    let noise = [0.01, -0.02, 0.005, 0.0, -0.01, 0.015, -0.005, 0.02, -0.015, 0.01];
    let loss: Vec<f64> = tokens
        .iter()
        .zip(noise)
        .map(|(&d, e)| predict_loss(&fixtures::OCR_LOSS, d).map(|l| l * (1.0 + e)))
        .collect::<vlplan::Result<_>>()?;

    let xs: Vec<f64> = tokens.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = loss.iter().map(|l| l.ln()).collect();
    let fit = PowerLawFit::from(fit_line(&xs, &ys)?);
    println!("refit: exponent {:.4} scale {:.4}", fit.exponent(), fit.scale());
    println!("reference: exponent {:.4}", fixtures::OCR_LOSS.exponent());

    for d in [10.0, 100.0, 1000.0] {
        let l = predict_loss(&fit, d)?;
        println!(
            "{d:>6}B tokens: loss {l:.4}, ChartQA {:.3}, InfoVQA {:.3}",
            predict_metric(&fixtures::CHARTQA, l)?,
            predict_metric(&fixtures::INFOVQA, l)?,
        );
    }
    Ok(())
}
