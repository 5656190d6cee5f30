//! Linear least-squares fits: straight lines and truncated Fourier series.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Weighted straight-line fit `y = slope * x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope, scaled by the residual variance.
    pub slope_stderr: f64,
    /// Unweighted root-mean-square residual.
    pub residual_rms: f64,
}

impl LineFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

pub fn fit_line(x: &[f64], y: &[f64], weights: Option<&[f64]>) -> Result<LineFit> {
    if x.len() != y.len() {
        return Err(Error::InvalidArgument(format!(
            "x has {} samples but y has {}",
            x.len(),
            y.len()
        )));
    }
    if let Some(w) = weights {
        if w.len() != x.len() {
            return Err(Error::InvalidArgument(format!(
                "{} weights for {} samples",
                w.len(),
                x.len()
            )));
        }
        if w.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidArgument("weights must be finite and > 0".into()));
        }
    }
    if x.len() < 2 || x.iter().all(|&v| v == x[0]) {
        return Err(Error::Degenerate("need at least two distinct x values".into()));
    }

    let weight = |i: usize| weights.map_or(1.0, |w| w[i]);
    let n = x.len();
    let total: f64 = (0..n).map(weight).sum();
    let x_mean = (0..n).map(|i| weight(i) * x[i]).sum::<f64>() / total;
    let y_mean = (0..n).map(|i| weight(i) * y[i]).sum::<f64>() / total;

    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 0..n {
        let dx = x[i] - x_mean;
        sxx += weight(i) * dx * dx;
        sxy += weight(i) * dx * (y[i] - y_mean);
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;

    let mut weighted_sq = 0.0;
    let mut plain_sq = 0.0;
    for i in 0..n {
        let r = y[i] - (slope * x[i] + intercept);
        weighted_sq += weight(i) * r * r;
        plain_sq += r * r;
    }
    let slope_stderr = if n > 2 {
        (weighted_sq / (n - 2) as f64 / sxx).sqrt()
    } else {
        0.0
    };

    Ok(LineFit {
        slope,
        intercept,
        slope_stderr,
        residual_rms: (plain_sq / n as f64).sqrt(),
    })
}

/// `offset + Σ_j (cos[j] cos((j+1)φ) + sin[j] sin((j+1)φ))`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicFit {
    pub offset: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
    pub residual_rms: f64,
}

impl HarmonicFit {
    pub fn eval(&self, phase: f64) -> f64 {
        let mut v = self.offset;
        for (j, (c, s)) in self.cos.iter().zip(&self.sin).enumerate() {
            let arg = (j + 1) as f64 * phase;
            v += c * arg.cos() + s * arg.sin();
        }
        v
    }

    /// Phase at which the first harmonic peaks, in `(-π, π]`.
    pub fn first_harmonic_phase(&self) -> f64 {
        self.sin[0].atan2(self.cos[0])
    }

    pub fn first_harmonic_amplitude(&self) -> f64 {
        self.sin[0].hypot(self.cos[0])
    }

    /// `(max - min) / (max + min)` of the fitted curve over one period.
    pub fn contrast(&self, samples: usize) -> f64 {
        let (lo, hi) = (0..samples)
            .map(|i| self.eval(std::f64::consts::TAU * i as f64 / samples as f64))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            });
        (hi - lo) / (hi + lo)
    }
}

/// Least-squares fit of a Fourier series with harmonics `1..=order`.
pub fn fit_harmonics(phases: &[f64], values: &[f64], order: usize) -> Result<HarmonicFit> {
    if phases.len() != values.len() {
        return Err(Error::InvalidArgument(format!(
            "{} phases but {} values",
            phases.len(),
            values.len()
        )));
    }
    if order == 0 {
        return Err(Error::InvalidArgument("harmonic order must be >= 1".into()));
    }
    let cols = 2 * order + 1;
    if phases.len() < cols {
        return Err(Error::Degenerate(format!(
            "{} samples cannot determine {cols} Fourier coefficients",
            phases.len()
        )));
    }

    let design = DMatrix::from_fn(phases.len(), cols, |row, col| {
        let phi = phases[row];
        match col {
            0 => 1.0,
            c => {
                let harmonic = ((c + 1) / 2) as f64;
                if c % 2 == 1 {
                    (harmonic * phi).cos()
                } else {
                    (harmonic * phi).sin()
                }
            }
        }
    });
    let rhs = DVector::from_column_slice(values);
    let svd = design.clone().svd(true, true);
    let largest = svd.singular_values.max();
    if svd.singular_values.min() <= 1e-12 * largest.max(1.0) {
        return Err(Error::Degenerate(
            "phase samples do not resolve every harmonic".into(),
        ));
    }
    let coef = svd
        .solve(&rhs, 0.0)
        .map_err(|e| Error::Degenerate(e.to_string()))?;
    let residual = &design * &coef - rhs;

    Ok(HarmonicFit {
        offset: coef[0],
        cos: (0..order).map(|j| coef[2 * j + 1]).collect(),
        sin: (0..order).map(|j| coef[2 * j + 2]).collect(),
        residual_rms: (residual.norm_squared() / phases.len() as f64).sqrt(),
    })
}
