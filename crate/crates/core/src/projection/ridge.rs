//! Closed-form ridge regression on standardized features.
//!
//! Features are z-scored and the target centered, so the intercept is the
//! target mean and stays unpenalized; the weights solve
//! `(X'X + lambda I) w = X'y` on the standardized design matrix.

use serde::{Deserialize, Serialize};

use crate::numeric::{solve_linear, Scaler};
use crate::projection::TrainingExample;
use crate::{CampError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RidgeModel {
    pub innings: u8,
    pub lambda: f64,
    /// Weights in standardized feature space.
    pub weights: Vec<f64>,
    /// Mean of the training target.
    pub intercept: f64,
    pub scaler: Scaler,
}

/// Fit from raw feature rows and targets.
pub fn ridge_fit_raw(
    xs: &[Vec<f64>],
    ys: &[f64],
    lambda: f64,
    innings: u8,
) -> Result<RidgeModel> {
    if xs.len() < 2 {
        return Err(CampError::validation("ridge: need at least 2 examples"));
    }
    if xs.len() != ys.len() {
        return Err(CampError::validation("ridge: feature/target length mismatch"));
    }
    if lambda < 0.0 {
        return Err(CampError::validation("ridge: lambda must be >= 0"));
    }
    let scaler = Scaler::fit(xs)?;
    let z: Vec<Vec<f64>> = xs.iter().map(|x| scaler.transform(x)).collect();
    let n = z.len();
    let d = z[0].len();
    let y_mean = ys.iter().sum::<f64>() / n as f64;

    let mut gram = vec![vec![0.0; d]; d];
    let mut xty = vec![0.0; d];
    for (row, y) in z.iter().zip(ys) {
        let yc = y - y_mean;
        for i in 0..d {
            xty[i] += row[i] * yc;
            for j in i..d {
                gram[i][j] += row[i] * row[j];
            }
        }
    }
    // Mirror the computed upper triangle.
    #[allow(clippy::needless_range_loop)]
    for i in 0..d {
        for j in 0..i {
            gram[i][j] = gram[j][i];
        }
        gram[i][i] += lambda;
    }
    let weights = solve_linear(gram, xty)?;
    Ok(RidgeModel {
        innings,
        lambda,
        weights,
        intercept: y_mean,
        scaler,
    })
}

/// Fit from training examples of one innings.
pub fn ridge_fit(examples: &[TrainingExample], lambda: f64, innings: u8) -> Result<RidgeModel> {
    let xs: Vec<Vec<f64>> = examples.iter().map(|e| e.features.clone()).collect();
    let ys: Vec<f64> = examples.iter().map(|e| e.actual_remaining).collect();
    ridge_fit_raw(&xs, &ys, lambda, innings)
}

impl RidgeModel {
    /// Prediction for a raw feature row, clamped at zero.
    pub fn predict(&self, features: &[f64]) -> f64 {
        self.predict_unclamped(features).max(0.0)
    }

    pub fn predict_unclamped(&self, features: &[f64]) -> f64 {
        let z = self.scaler.transform(features);
        self.intercept + z.iter().zip(&self.weights).map(|(a, b)| a * b).sum::<f64>()
    }

    /// Coefficients expressed in the original (unstandardized) feature space.
    pub fn raw_coefficients(&self) -> (Vec<f64>, f64) {
        let weights: Vec<f64> = self
            .weights
            .iter()
            .zip(&self.scaler.stds)
            .map(|(w, s)| w / s)
            .collect();
        let shift: f64 = weights
            .iter()
            .zip(&self.scaler.means)
            .map(|(w, m)| w * m)
            .sum();
        (weights, self.intercept - shift)
    }
}
