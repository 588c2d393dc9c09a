//! Root-test radius of convergence estimation.
//!
//! Works on `ln |c_k|` so that coefficient streams far outside the `f64`
//! range (factorials, their reciprocals) are handled. The tail window is
//! `k ∈ [K/2, K]`.
//!
//! Three stages:
//! 1. Growth trend. The Theil–Sen slope of `ln |c_k|^{1/k}` against `ln k`
//!    is ≈ +1 for `k!`-like growth and ≈ −1 for `1/k!`-like decay, and near 0
//!    for anything with a finite nonzero radius. Large positive → `Zero`,
//!    large negative (or median root below the floor) → `Infinite`.
//! 2. Envelope fit. Plain roots `|c_k|^{1/k}` converge only like
//!    `1 + O(ln k / k)`, which is off by more than 10% at `K = 200` for
//!    streams such as `e^{2√k}·r^{-k}`. When the tail is smooth, a running
//!    maximum of `ln |c_k|` is fitted to `α + βk + γ√k + δ ln k` and the radius
//!    is `e^{−β}`.
//! 3. Median fallback. Irregular tails (oscillating magnitudes, sparse
//!    patterns the envelope cannot bridge) use the median of the roots.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub const MIN_COEFFICIENTS: usize = 16;
/// Median roots below this are read as "decaying faster than any geometric".
pub const INFINITE_FLOOR: f64 = 1e-9;
const TREND_THRESHOLD: f64 = 0.4;
const FIT_RMS_LIMIT: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Radius {
    Finite(f64),
    Infinite,
    Zero,
}

impl Radius {
    pub fn value(&self) -> f64 {
        match self {
            Radius::Finite(r) => *r,
            Radius::Infinite => f64::INFINITY,
            Radius::Zero => 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RadiusMethod {
    Median,
    EnvelopeFit,
    Trend,
    AllZeroTail,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RadiusEstimate {
    pub radius: Radius,
    /// Inclusive index range of the tail window.
    pub window: (usize, usize),
    /// max − min of the tail roots `|c_k|^{1/k}`.
    pub confidence_spread: f64,
    pub method: RadiusMethod,
    /// Set when every tail coefficient is zero (reported as `Infinite`).
    pub all_zero_tail: bool,
}

/// Estimate the radius from `ln |c_k|` values (`None` marks a zero
/// coefficient), `k = 0..=K`.
pub fn radius_estimate(log_mags: &[Option<f64>]) -> Result<RadiusEstimate> {
    if log_mags.len() < MIN_COEFFICIENTS {
        return Err(Error::TooFewCoefficients { needed: MIN_COEFFICIENTS, got: log_mags.len() });
    }
    let k_max = log_mags.len() - 1;
    let lo = (k_max / 2).max(1);
    let window = (lo, k_max);
    let tail: Vec<(usize, f64)> = (lo..=k_max)
        .filter_map(|k| log_mags[k].filter(|v| v.is_finite()).map(|v| (k, v)))
        .collect();
    if tail.is_empty() {
        return Ok(RadiusEstimate {
            radius: Radius::Infinite,
            window,
            confidence_spread: 0.0,
            method: RadiusMethod::AllZeroTail,
            all_zero_tail: true,
        });
    }
    let log_roots: Vec<f64> = tail.iter().map(|&(k, l)| l / k as f64).collect();
    let roots: Vec<f64> = log_roots.iter().map(|v| v.exp()).collect();
    let spread = roots.iter().cloned().fold(f64::MIN, f64::max) - roots.iter().cloned().fold(f64::MAX, f64::min);
    let median_log_root = median(&log_roots);
    let mk = |radius, method| RadiusEstimate { radius, window, confidence_spread: spread, method, all_zero_tail: false };

    if tail.len() >= 3 {
        let xs: Vec<f64> = tail.iter().map(|&(k, _)| (k as f64).ln()).collect();
        let slope = theil_sen(&xs, &log_roots);
        if slope > TREND_THRESHOLD {
            return Ok(mk(Radius::Zero, RadiusMethod::Trend));
        }
        if slope < -TREND_THRESHOLD {
            return Ok(mk(Radius::Infinite, RadiusMethod::Trend));
        }
    }
    if median_log_root < INFINITE_FLOOR.ln() {
        return Ok(mk(Radius::Infinite, RadiusMethod::Median));
    }
    let median_radius = (-median_log_root).exp();
    if let Some(fit) = envelope_fit(log_mags, lo, k_max) {
        if fit.rms < FIT_RMS_LIMIT && fit.radius > 0.5 * median_radius && fit.radius < 2.0 * median_radius {
            return Ok(mk(Radius::Finite(fit.radius), RadiusMethod::EnvelopeFit));
        }
    }
    Ok(mk(Radius::Finite(median_radius), RadiusMethod::Median))
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

fn theil_sen(xs: &[f64], ys: &[f64]) -> f64 {
    let mut slopes = Vec::with_capacity(xs.len() * xs.len() / 2);
    for i in 0..xs.len() {
        for j in (i + 1)..xs.len() {
            let dx = xs[j] - xs[i];
            if dx != 0.0 {
                slopes.push((ys[j] - ys[i]) / dx);
            }
        }
    }
    if slopes.is_empty() {
        0.0
    } else {
        median(&slopes)
    }
}

struct Fit {
    radius: f64,
    rms: f64,
}

fn envelope_fit(log_mags: &[Option<f64>], lo: usize, hi: usize) -> Option<Fit> {
    let w = (log_mags.len() / 40).max(2);
    let mut pts = Vec::new();
    for k in (lo + w)..=hi.saturating_sub(w) {
        let env = (k - w..=k + w)
            .filter_map(|j| log_mags[j].filter(|v| v.is_finite()))
            .fold(f64::NEG_INFINITY, f64::max);
        if env.is_finite() {
            pts.push((k as f64, env));
        }
    }
    if pts.len() < 8 {
        return None;
    }
    // centre and scale k for conditioning
    let k0 = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
    let basis = |k: f64| [1.0, (k - k0) / k0, k.sqrt() - k0.sqrt(), (k / k0).ln()];
    let a = DMatrix::from_fn(pts.len(), 4, |i, j| basis(pts[i].0)[j]);
    let b = DVector::from_iterator(pts.len(), pts.iter().map(|p| p.1));
    let svd = a.clone().svd(true, true);
    let coef = svd.solve(&b, 1e-12).ok()?;
    let resid = &a * &coef - &b;
    let rms = (resid.norm_squared() / pts.len() as f64).sqrt();
    let beta = coef[1] / k0;
    Some(Fit { radius: (-beta).exp(), rms })
}
