//! Precision statistics for a small sample of measured quantity values.
//!
//! The pipeline is: shift values so the scale starts at 0, take the mean and
//! the n-1 sample standard deviation `s`, de-bias it to `s* = s / c4(n)`,
//! approximate the standard error of `s*` from the standard error of the
//! sample variance, build a two-sided 95% t interval with n-1 degrees of
//! freedom, and report the coefficient of variation with the small-sample
//! correction `CV* = (1 + 1/(4n)) · CV`.
//!
//! All values are assumed to come from a normal distribution; nothing here
//! tests that assumption.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::special;

/// Caveat attached to rendered precision tables.
pub const NORMALITY_CAVEAT: &str = "Assumes measured quantity values are normally distributed; \
the stdev CI uses an approximate standard error of s* and t quantiles with n-1 degrees of freedom.";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("at least 2 values are required, got {n}")]
    InvalidSampleSize { n: usize },
    #[error("value {value} at position {index} is below the scale minimum {scale_min}")]
    ValueBelowScale {
        index: usize,
        value: f64,
        scale_min: f64,
    },
    #[error("value at position {index} is not a finite number")]
    NonFiniteValue { index: usize },
    #[error("shifted mean is 0, coefficient of variation is undefined")]
    DegenerateMean,
    #[error("probability must lie strictly between 0 and 1, got {0}")]
    InvalidProbability(f64),
    #[error("degrees of freedom must be at least 1, got {0}")]
    InvalidDf(u32),
}

pub type Result<T> = std::result::Result<T, StatsError>;

/// A closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }
}

/// Precision of one group of measured quantity values, all statistics
/// computed on shifted values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecisionResult {
    pub n: usize,
    pub mean: f64,
    /// n-1 sample standard deviation.
    pub s: f64,
    /// Unbiased standard deviation `s / c4(n)`.
    pub s_star: f64,
    /// Approximate standard error of `s_star`.
    pub se_s_star: f64,
    pub ci95: Interval,
    /// Coefficient of variation in percent.
    pub cv: f64,
    /// Small-sample corrected coefficient of variation in percent.
    pub cv_star: f64,
    /// Set when all values are equal: the standard error is 0 and the
    /// interval collapses to a point.
    pub degenerate_spread: bool,
}

/// Mean and n-1 standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleStats {
    pub mean: f64,
    pub s: f64,
}

/// Translates values so that the scale's lower end sits at 0.
pub fn shift_values(values: &[f64], scale_min: f64) -> Result<Vec<f64>> {
    values
        .iter()
        .enumerate()
        .map(|(index, &value)| {
            if !value.is_finite() {
                Err(StatsError::NonFiniteValue { index })
            } else if value < scale_min {
                Err(StatsError::ValueBelowScale {
                    index,
                    value,
                    scale_min,
                })
            } else {
                Ok(value - scale_min)
            }
        })
        .collect()
}

/// Normal-theory bias correction `E[s] = c4(n) · σ`:
/// `c4(n) = √(2/(n-1)) · Γ(n/2) / Γ((n-1)/2)`.
pub fn c4(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(StatsError::InvalidSampleSize { n });
    }
    let n = n as f64;
    let log_ratio = special::ln_gamma(n / 2.0) - special::ln_gamma((n - 1.0) / 2.0);
    Ok((2.0 / (n - 1.0)).sqrt() * log_ratio.exp())
}

pub fn sample_stats(values: &[f64]) -> Result<SampleStats> {
    let n = values.len();
    if n < 2 {
        return Err(StatsError::InvalidSampleSize { n });
    }
    // Rounding in the sum must not give a constant sample a nonzero spread.
    if values.iter().all(|v| *v == values[0]) {
        return Ok(SampleStats {
            mean: values[0],
            s: 0.0,
        });
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    Ok(SampleStats {
        mean,
        s: (ss / (n - 1) as f64).sqrt(),
    })
}

pub fn unbiased_stdev(s: f64, n: usize) -> Result<f64> {
    Ok(s / c4(n)?)
}

/// Approximate standard error of `s*`.
///
/// Uses `se(s²) = √(2σ⁴/(n-1))` with σ taken as `s`, then
/// `se(s*) ≈ se(s²) / (2σ)` with σ taken as `s*`. Returns 0 for a zero spread.
pub fn stdev_stderr(s: f64, s_star: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(StatsError::InvalidSampleSize { n });
    }
    if s_star == 0.0 {
        return Ok(0.0);
    }
    let se_variance = s * s * (2.0 / (n - 1) as f64).sqrt();
    Ok(se_variance / (2.0 * s_star))
}

/// Quantile function of Student's t distribution.
pub fn t_quantile(p: f64, df: u32) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(StatsError::InvalidProbability(p));
    }
    if df < 1 {
        return Err(StatsError::InvalidDf(df));
    }
    Ok(special::student_t_inv_cdf(p, df as f64))
}

/// Two-sided 95% interval `s* ∓ t(0.975, n-1) · se`.
pub fn stdev_ci95(s_star: f64, se: f64, n: usize) -> Result<Interval> {
    if n < 2 {
        return Err(StatsError::InvalidSampleSize { n });
    }
    let t = t_quantile(0.975, (n - 1) as u32)?;
    Ok(ci_with_quantile(s_star, se, t))
}

pub(crate) fn ci_with_quantile(s_star: f64, se: f64, t: f64) -> Interval {
    let half = t * se;
    Interval {
        lo: s_star - half,
        hi: s_star + half,
    }
}

/// Small-sample correction factor applied to the coefficient of variation.
pub fn cv_correction(n: usize) -> f64 {
    1.0 + 1.0 / (4.0 * n as f64)
}

/// Full precision computation for one group of raw values.
pub fn cv_star_pipeline(values: &[f64], scale_min: f64) -> Result<PrecisionResult> {
    let n = values.len();
    if n < 2 {
        return Err(StatsError::InvalidSampleSize { n });
    }
    let shifted = shift_values(values, scale_min)?;
    let SampleStats { mean, s } = sample_stats(&shifted)?;
    if mean == 0.0 {
        return Err(StatsError::DegenerateMean);
    }
    let s_star = unbiased_stdev(s, n)?;
    let se_s_star = stdev_stderr(s, s_star, n)?;
    let ci95 = stdev_ci95(s_star, se_s_star, n)?;
    let cv = 100.0 * s_star / mean;
    Ok(PrecisionResult {
        n,
        mean,
        s,
        s_star,
        se_s_star,
        ci95,
        cv,
        cv_star: cv_correction(n) * cv,
        degenerate_spread: s_star == 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn shift_examples() {
        let shifted = shift_values(&[5.64, 6.30], 1.0).unwrap();
        assert_abs_diff_eq!(shifted[0], 4.64, epsilon = 1e-12);
        assert_abs_diff_eq!(shifted[1], 5.30, epsilon = 1e-12);
        assert_eq!(
            shift_values(&[0.428, 0.600], 0.0).unwrap(),
            vec![0.428, 0.600]
        );
        assert_eq!(
            shift_values(&[91.0, 96.75], 0.0).unwrap(),
            vec![91.0, 96.75]
        );
    }

    #[test]
    fn shift_rejects_values_below_scale() {
        let err = shift_values(&[3.0, 0.5], 1.0).unwrap_err();
        assert_eq!(
            err,
            StatsError::ValueBelowScale {
                index: 1,
                value: 0.5,
                scale_min: 1.0
            }
        );
        assert_eq!(
            shift_values(&[f64::NAN], 0.0).unwrap_err(),
            StatsError::NonFiniteValue { index: 0 }
        );
    }

    #[test]
    fn c4_rejects_small_n() {
        assert_eq!(c4(1), Err(StatsError::InvalidSampleSize { n: 1 }));
        assert_eq!(c4(0), Err(StatsError::InvalidSampleSize { n: 0 }));
    }

    #[test]
    fn c4_frozen_values() {
        assert_abs_diff_eq!(c4(2).unwrap(), 0.797885, epsilon = 5e-7);
        assert_abs_diff_eq!(c4(7).unwrap(), 0.959369, epsilon = 5e-7);
        assert_abs_diff_eq!(c4(8).unwrap(), 0.965030, epsilon = 5e-7);
    }

    #[test]
    fn c4_increases_toward_one() {
        let mut prev = 0.0;
        for n in 2..2000 {
            let c = c4(n).unwrap();
            assert!(c > prev && c < 1.0, "c4({n}) = {c}");
            prev = c;
        }
        assert!(1.0 - c4(1999).unwrap() < 2e-4);
    }

    #[test]
    fn sample_stats_examples() {
        let st = sample_stats(&[4.64, 5.30]).unwrap();
        assert_abs_diff_eq!(st.mean, 4.97, epsilon = 1e-12);
        assert_abs_diff_eq!(st.s, (5.30f64 - 4.64).abs() / 2f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(st.s, 0.4667, epsilon = 5e-5);

        let st = sample_stats(&[91.0, 96.75]).unwrap();
        assert_abs_diff_eq!(st.mean, 93.875, epsilon = 1e-12);
        assert_abs_diff_eq!(st.s, 4.066, epsilon = 5e-4);

        let st = sample_stats(&[2.5, 2.5, 2.5]).unwrap();
        assert_eq!(st.mean, 2.5);
        assert_eq!(st.s, 0.0);

        assert_eq!(
            sample_stats(&[1.0]),
            Err(StatsError::InvalidSampleSize { n: 1 })
        );
    }

    #[test]
    fn unbiased_stdev_examples() {
        assert_abs_diff_eq!(unbiased_stdev(4.066, 2).unwrap(), 5.096, epsilon = 5e-4);
        assert_abs_diff_eq!(unbiased_stdev(1.238, 7).unwrap(), 1.290, epsilon = 5e-4);
        assert_eq!(unbiased_stdev(0.0, 5).unwrap(), 0.0);
        assert!(unbiased_stdev(1.0, 1).is_err());
    }

    #[test]
    fn stderr_examples() {
        let se = stdev_stderr(1.238, 1.290, 7).unwrap();
        assert_abs_diff_eq!(se, 0.3431, epsilon = 5e-4);
        assert_abs_diff_eq!(se * t_quantile(0.975, 6).unwrap(), 0.840, epsilon = 1e-3);

        let se = stdev_stderr(4.066, 5.096, 2).unwrap();
        assert_abs_diff_eq!(se, 2.294, epsilon = 5e-4);
        assert_abs_diff_eq!(se * t_quantile(0.975, 1).unwrap(), 29.15, epsilon = 0.01);

        assert_eq!(stdev_stderr(0.0, 0.0, 5).unwrap(), 0.0);
    }

    #[test]
    fn t_quantile_examples_and_errors() {
        assert_abs_diff_eq!(t_quantile(0.975, 1).unwrap(), 12.7062, epsilon = 5e-4);
        assert_abs_diff_eq!(t_quantile(0.975, 6).unwrap(), 2.4469, epsilon = 5e-4);
        for df in [1, 4, 17] {
            assert_eq!(t_quantile(0.5, df).unwrap(), 0.0);
            assert_abs_diff_eq!(
                t_quantile(0.1, df).unwrap(),
                -t_quantile(0.9, df).unwrap(),
                epsilon = 1e-12
            );
        }
        assert_eq!(t_quantile(0.0, 3), Err(StatsError::InvalidProbability(0.0)));
        assert_eq!(t_quantile(1.0, 3), Err(StatsError::InvalidProbability(1.0)));
        assert!(matches!(
            t_quantile(f64::NAN, 3),
            Err(StatsError::InvalidProbability(_))
        ));
        assert_eq!(t_quantile(0.9, 0), Err(StatsError::InvalidDf(0)));
    }

    #[test]
    fn ci_examples() {
        let ci = stdev_ci95(1.290, 0.3431, 7).unwrap();
        assert_abs_diff_eq!(ci.lo, 0.45, epsilon = 0.005);
        assert_abs_diff_eq!(ci.hi, 2.13, epsilon = 0.005);
        let ci = stdev_ci95(1.0222, 0.3542, 4).unwrap();
        assert_abs_diff_eq!(ci.lo, -0.11, epsilon = 0.005);
        assert_abs_diff_eq!(ci.hi, 2.15, epsilon = 0.005);
        let ci = stdev_ci95(0.7, 0.0, 5).unwrap();
        assert_eq!((ci.lo, ci.hi), (0.7, 0.7));
    }

    #[test]
    fn pipeline_examples() {
        let r = cv_star_pipeline(&[84.51, 84.50, 87.46, 85.60, 84.20, 86.61, 86.20], 0.0).unwrap();
        assert_abs_diff_eq!(r.cv_star, 1.562, epsilon = 5e-4);

        let r = cv_star_pipeline(&[91.0, 96.75], 0.0).unwrap();
        assert_abs_diff_eq!(r.cv_star, 6.107, epsilon = 5e-4);

        let r = cv_star_pipeline(&[30.65, 30.65, 29.13, 30.65, 29.96], 0.0).unwrap();
        assert_abs_diff_eq!(r.cv_star, 2.487, epsilon = 5e-4);
        assert_abs_diff_eq!(r.ci95.lo, 0.095, epsilon = 5e-4);
        assert_abs_diff_eq!(r.ci95.hi, 1.34, epsilon = 5e-3);
    }

    #[test]
    fn pipeline_two_point_closed_form() {
        // n = 2: s = |a-b|/√2, s* = s·√(π/2), se = √2·s²/(2 s*), t = tan(0.475π).
        let (a, b, lo) = (3.25, 4.9, 1.0);
        let r = cv_star_pipeline(&[a, b], lo).unwrap();
        let s = (a - b).abs() / 2f64.sqrt();
        let s_star = s * (std::f64::consts::PI / 2.0).sqrt();
        let mean = (a + b) / 2.0 - lo;
        let se = 2f64.sqrt() * s * s / (2.0 * s_star);
        let t = (0.475 * std::f64::consts::PI).tan();
        assert_abs_diff_eq!(r.s, s, epsilon = 1e-12);
        assert_abs_diff_eq!(r.s_star, s_star, epsilon = 1e-12);
        assert_abs_diff_eq!(r.se_s_star, se, epsilon = 1e-12);
        assert_abs_diff_eq!(r.ci95.hi, s_star + t * se, epsilon = 1e-10);
        assert_abs_diff_eq!(r.cv_star, 1.125 * 100.0 * s_star / mean, epsilon = 1e-10);
    }

    #[test]
    fn pipeline_degenerate_inputs() {
        assert_eq!(
            cv_star_pipeline(&[1.0, 1.0], 1.0),
            Err(StatsError::DegenerateMean)
        );
        assert_eq!(
            cv_star_pipeline(&[1.0], 0.0),
            Err(StatsError::InvalidSampleSize { n: 1 })
        );
        let r = cv_star_pipeline(&[4.0, 4.0, 4.0], 0.0).unwrap();
        assert!(r.degenerate_spread);
        assert_eq!(r.cv_star, 0.0);
        assert_eq!((r.ci95.lo, r.ci95.hi), (0.0, 0.0));
    }
}
