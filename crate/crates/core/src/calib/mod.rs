//! Calibration analysis of predictive distributions.
//!
//! A perfectly calibrated estimator produces errors `ε = y - m(x)` distributed
//! as `N(0, u(x)²)`. Two views are provided: the global calibration curve
//! (coverage of central intervals against their nominal level) and the
//! extended reliability diagram, which bins predictions by uncertainty and
//! compares per-bin error mean and spread with `0` and the bin centre.

mod normal;

pub use normal::{inverse_normal_cdf, normal_cdf, normal_pdf};

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)] // float math is inherent once std is linked (tests)
use num_traits::Float;

use crate::uq::PredictiveDistribution;
use crate::{Error, Result};

/// Number of samples a bin must exceed to be displayed.
pub const DEFAULT_MIN_COUNT: usize = 50;
pub const DEFAULT_N_ALPHAS: usize = 101;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluationRecord {
    pub mean: f64,
    pub uncertainty: f64,
    pub truth: f64,
    /// `truth - mean`.
    pub error: f64,
}

impl EvaluationRecord {
    pub fn new(mean: f64, uncertainty: f64, truth: f64) -> Self {
        Self {
            mean,
            uncertainty,
            truth,
            error: truth - mean,
        }
    }
}

pub fn make_records(distributions: &[PredictiveDistribution], truths: &[f64]) -> Result<Vec<EvaluationRecord>> {
    if distributions.len() != truths.len() {
        return Err(Error::LengthMismatch {
            left: distributions.len(),
            right: truths.len(),
        });
    }
    Ok(distributions
        .iter()
        .zip(truths)
        .map(|(d, &t)| EvaluationRecord::new(d.mean, d.std, t))
        .collect())
}

fn check_records(records: &[EvaluationRecord]) -> Result<()> {
    if records.is_empty() {
        return Err(Error::Empty("evaluation records"));
    }
    for (i, r) in records.iter().enumerate() {
        if !(r.uncertainty >= 0.0 && r.uncertainty.is_finite()) || !r.error.is_finite() {
            return Err(Error::NonFinite(format!(
                "record {i}: uncertainty {} error {}",
                r.uncertainty, r.error
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationCurve {
    /// `(alpha_predicted, alpha_observed)`, `alpha_predicted` from 0 to 1.
    pub points: Vec<(f64, f64)>,
    pub miscalibration_area: f64,
}

/// Observed coverage of the central intervals `mean ± z u` with
/// `z = Φ⁻¹((1 + α)/2)` on an even grid of `n_alphas` levels in `[0, 1]`.
/// The miscalibration area is the trapezoidal integral of
/// `|alpha_observed - alpha_predicted|`.
pub fn calibration_curve(records: &[EvaluationRecord], n_alphas: usize) -> Result<CalibrationCurve> {
    check_records(records)?;
    if n_alphas < 2 {
        return Err(Error::Config(format!("need at least 2 alpha levels, got {n_alphas}")));
    }
    // Smallest z covering each record: |ε| / u, with 0/0 → 0 and ε/0 → ∞.
    let mut ratios: Vec<f64> = records
        .iter()
        .map(|r| {
            let e = r.error.abs();
            if e == 0.0 {
                0.0
            } else if r.uncertainty == 0.0 {
                f64::INFINITY
            } else {
                e / r.uncertainty
            }
        })
        .collect();
    ratios.sort_by(f64::total_cmp);
    let n = ratios.len() as f64;

    let points: Vec<(f64, f64)> = (0..n_alphas)
        .map(|k| {
            let alpha = k as f64 / (n_alphas - 1) as f64;
            let observed = if k == n_alphas - 1 {
                1.0
            } else {
                let z = inverse_normal_cdf(0.5 * (1.0 + alpha));
                ratios.partition_point(|&r| r <= z) as f64 / n
            };
            (alpha, observed)
        })
        .collect();
    let miscalibration_area = points
        .windows(2)
        .map(|w| {
            let (a0, o0) = w[0];
            let (a1, o1) = w[1];
            0.5 * (a1 - a0) * ((o0 - a0).abs() + (o1 - a1).abs())
        })
        .sum();
    Ok(CalibrationCurve {
        points,
        miscalibration_area,
    })
}

/// One bin `[(β-1)Δu, βΔu)` of an extended reliability diagram.
#[derive(Debug, Clone, PartialEq)]
pub struct ReliabilityBin {
    /// β, starting at 1.
    pub index: usize,
    pub lower: f64,
    pub upper: f64,
    /// `(β - ½)Δu`, the uncertainty attributed to every member.
    pub center: f64,
    pub count: usize,
    pub error_mean: f64,
    /// Bessel-corrected; NaN for a single member.
    pub error_std: f64,
    /// `count ≤ min_count`: kept for raw counts but not for display.
    pub suppressed: bool,
}

impl ReliabilityBin {
    pub fn theoretical_mean(&self) -> f64 {
        0.0
    }

    pub fn theoretical_std(&self) -> f64 {
        self.center
    }

    pub fn contains(&self, uncertainty: f64) -> bool {
        bin_index(uncertainty, self.upper - self.lower) == self.index
    }
}

fn bin_index(uncertainty: f64, delta_u: f64) -> usize {
    (uncertainty / delta_u).floor() as usize + 1
}

/// Groups records into equidistant uncertainty bins of width `delta_u` and
/// reports per-bin error statistics. Only non-empty bins are returned, in
/// increasing order of β.
pub fn extended_reliability(records: &[EvaluationRecord], delta_u: f64, min_count: usize) -> Result<Vec<ReliabilityBin>> {
    check_records(records)?;
    if !(delta_u > 0.0 && delta_u.is_finite()) {
        return Err(Error::Config(format!("bin width must be positive, got {delta_u}")));
    }
    if min_count < 2 {
        return Err(Error::Config(format!("min_count must be at least 2, got {min_count}")));
    }
    let mut groups: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for r in records {
        groups.entry(bin_index(r.uncertainty, delta_u)).or_default().push(r.error);
    }
    Ok(groups
        .into_iter()
        .map(|(index, errors)| {
            let count = errors.len();
            let mean = errors.iter().sum::<f64>() / count as f64;
            let std = if count > 1 {
                let ss: f64 = errors.iter().map(|e| (e - mean) * (e - mean)).sum();
                (ss / (count - 1) as f64).sqrt()
            } else {
                f64::NAN
            };
            ReliabilityBin {
                index,
                lower: (index - 1) as f64 * delta_u,
                upper: index as f64 * delta_u,
                center: (index as f64 - 0.5) * delta_u,
                count,
                error_mean: mean,
                error_std: std,
                suppressed: count <= min_count,
            }
        })
        .collect())
}

/// Empirical errors of one bin next to the predicted `N(0, u_β²)` density.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorHistogram {
    /// `counts.len() + 1` edges; empty for an empty bin.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    /// Predicted density at each histogram-bin centre.
    pub predicted_density: Vec<f64>,
    /// Kolmogorov–Smirnov distance between the errors and `N(0, u_β²)`.
    pub ks_statistic: f64,
}

impl ErrorHistogram {
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

pub fn per_bin_error_histogram(
    records: &[EvaluationRecord],
    bin: &ReliabilityBin,
    n_hist_bins: usize,
) -> Result<ErrorHistogram> {
    if n_hist_bins == 0 {
        return Err(Error::Config("histogram needs at least one bin".into()));
    }
    let errors: Vec<f64> = records
        .iter()
        .filter(|r| bin.contains(r.uncertainty))
        .map(|r| r.error)
        .collect();
    if errors.is_empty() {
        return Ok(ErrorHistogram {
            edges: Vec::new(),
            counts: Vec::new(),
            predicted_density: Vec::new(),
            ks_statistic: f64::NAN,
        });
    }
    let sigma = bin.center;
    let max_abs = errors.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let half = (4.0 * sigma).max(max_abs).max(f64::MIN_POSITIVE);
    let width = 2.0 * half / n_hist_bins as f64;
    let edges: Vec<f64> = (0..=n_hist_bins).map(|i| -half + i as f64 * width).collect();
    let mut counts = alloc::vec![0usize; n_hist_bins];
    for e in &errors {
        let k = (((e + half) / width).floor() as usize).min(n_hist_bins - 1);
        counts[k] += 1;
    }
    let predicted_density = (0..n_hist_bins)
        .map(|i| {
            let c = -half + (i as f64 + 0.5) * width;
            normal_pdf(c / sigma) / sigma
        })
        .collect();
    Ok(ErrorHistogram {
        edges,
        counts,
        predicted_density,
        ks_statistic: ks_statistic(&errors, sigma),
    })
}

/// Two-sided Kolmogorov–Smirnov statistic of `samples` against `N(0, sigma²)`.
pub fn ks_statistic(samples: &[f64], sigma: f64) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = normal_cdf(x / sigma);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}
