//! Alpha magnitude dimension estimates: convergence in the sample size,
//! log-log curves, windowed least squares and subsample sweeps.
//!
//! All logarithms are natural. Window bounds apply to `ln t`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::metric::PointCloud;
use crate::pmag::{alpha_barcode, alpha_magnitude, log_grid, MagnitudeFunction};
use crate::samplers::{sample, SamplerKind, SamplerSpec};

pub const CONVERGENCE_THRESHOLD: f64 = 1e-5;
/// Largest sample the default convergence schedule reaches.
pub const SCHEDULE_CAP: usize = 5_000_000;
pub const MIN_WINDOW_POINTS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    /// `(n, |1·X_n|_α)` for every sample size visited.
    pub samples: Vec<(usize, f64)>,
    pub converged: bool,
    pub final_n: usize,
    pub threshold: f64,
}

/// Doubling from `start` while not above `cap`.
pub fn doubling_schedule(start: usize, cap: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut n = start.max(1);
    while n <= cap {
        out.push(n);
        n *= 2;
    }
    out
}

/// Samples each `n` of the schedule and evaluates the alpha magnitude at
/// `t = 1`, stopping at the first successive difference below `threshold`.
pub fn check_convergence(
    spec: &SamplerSpec,
    schedule: &[usize],
    threshold: f64,
) -> Result<ConvergenceReport> {
    if schedule.len() < 2 {
        return Err(Error::BadConfig("convergence schedule needs at least two sizes".into()));
    }
    if schedule.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::BadConfig("convergence schedule must not decrease".into()));
    }
    if !(threshold > 0.0) {
        return Err(Error::BadConfig(format!("threshold {threshold} must be positive")));
    }
    let mut samples: Vec<(usize, f64)> = Vec::new();
    let mut converged = false;
    for &n in schedule {
        let value = alpha_magnitude(&sample(&spec.with_n(n))?, 1.0)?;
        if let Some(&(_, prev)) = samples.last() {
            converged = (value - prev).abs() < threshold;
        }
        samples.push((n, value));
        if converged {
            break;
        }
    }
    let final_n = samples.last().map_or(0, |s| s.0);
    Ok(ConvergenceReport {
        samples,
        converged,
        final_n,
        threshold,
    })
}

/// `(ln t, ln |tX|_α)` over a log-spaced grid; the barcode is computed once.
pub fn loglog_curve(
    cloud: &PointCloud,
    t_min: f64,
    t_max: f64,
    per_decade: usize,
) -> Result<Vec<(f64, f64)>> {
    if !(t_min < t_max) {
        return Err(Error::BadConfig(format!("need t_min < t_max, got {t_min} and {t_max}")));
    }
    let f = MagnitudeFunction::Barcode(alpha_barcode(cloud)?);
    loglog_of(&f, &log_grid(t_min, t_max, per_decade)?, Execution::default())
}

pub fn loglog_of(f: &MagnitudeFunction, grid: &[f64], exec: Execution) -> Result<Vec<(f64, f64)>> {
    let values = f.evaluate_grid(grid, exec)?;
    Ok(grid.iter().zip(values).map(|(t, m)| (t.ln(), m.ln())).collect())
}

/// A closed range of `ln t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub low: f64,
    pub high: f64,
}

impl Window {
    pub fn new(low: f64, high: f64) -> Result<Self> {
        if !(low < high) || !low.is_finite() || !high.is_finite() {
            return Err(Error::BadConfig(format!("window [{low}, {high}] is empty")));
        }
        Ok(Window { low, high })
    }

    pub fn t_range(&self) -> (f64, f64) {
        (self.low.exp(), self.high.exp())
    }
}

/// Window `[low, ln(n) - high_offset]` for a sample of size `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowRule {
    pub low: f64,
    pub high_offset: f64,
}

impl WindowRule {
    pub const STANDARD: WindowRule = WindowRule {
        low: 1.75,
        high_offset: 2.0,
    };
    /// Shifted toward small `t`; tuned on logistic-map attractor samples.
    pub const FEIGENBAUM: WindowRule = WindowRule {
        low: 0.0,
        high_offset: 5.0,
    };

    pub fn for_kind(kind: SamplerKind) -> Self {
        match kind {
            SamplerKind::Feigenbaum => WindowRule::FEIGENBAUM,
            _ => WindowRule::STANDARD,
        }
    }

    pub fn resolve(&self, n: usize) -> Result<Window> {
        Window::new(self.low, (n as f64).ln() - self.high_offset)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionEstimate {
    pub slope: f64,
    pub intercept: f64,
    pub window: Window,
    pub r_squared: f64,
    /// Curve points inside the window.
    pub points_used: usize,
    /// Cloud size the window was derived from, when known.
    pub sample_size: Option<usize>,
    /// Base of the logarithms in the curve and the window.
    pub log_base: String,
}

/// Least squares fit of `ln |tX|` against `ln t` over the window.
///
/// Points are sorted before summation, so the result does not depend on the
/// order of `curve`.
pub fn estimate_dimension(curve: &[(f64, f64)], window: Window) -> Result<DimensionEstimate> {
    let mut pts: Vec<(f64, f64)> = curve
        .iter()
        .copied()
        .filter(|&(x, _)| x >= window.low && x <= window.high)
        .collect();
    if pts.len() < MIN_WINDOW_POINTS {
        return Err(Error::TooFewPoints {
            found: pts.len(),
            needed: MIN_WINDOW_POINTS,
        });
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in &pts {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::BadConfig("all curve points share one abscissa".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = pts
        .iter()
        .map(|&(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(DimensionEstimate {
        slope,
        intercept,
        window,
        r_squared,
        points_used: pts.len(),
        sample_size: None,
        log_base: "e".into(),
    })
}

/// Curve over the window of `rule` and the fitted estimate for one cloud.
pub fn dimension_of_cloud(
    cloud: &PointCloud,
    rule: WindowRule,
    per_decade: usize,
) -> Result<(Vec<(f64, f64)>, DimensionEstimate)> {
    let window = rule.resolve(cloud.len())?;
    let (t_min, t_max) = window.t_range();
    let curve = loglog_curve(cloud, t_min, t_max, per_decade)?;
    let mut est = estimate_dimension(&curve, window)?;
    est.sample_size = Some(cloud.len());
    Ok((curve, est))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub size: usize,
    pub estimate: DimensionEstimate,
}

#[derive(Debug, Clone, Copy)]
pub struct SweepConfig {
    pub rule: WindowRule,
    pub per_decade: usize,
    pub seed: u64,
    pub exec: Execution,
}

/// `count` sizes log-spaced from `min` to `max` inclusive, deduplicated.
pub fn log_spaced_sizes(min: usize, max: usize, count: usize) -> Vec<usize> {
    if count <= 1 || min >= max {
        return vec![max];
    }
    let (lo, hi) = ((min as f64).ln(), (max as f64).ln());
    let mut out: Vec<usize> = (0..count)
        .map(|k| (lo + (hi - lo) * k as f64 / (count - 1) as f64).exp().round() as usize)
        .collect();
    out[0] = min;
    out[count - 1] = max;
    out.dedup();
    out
}

/// Uniform subsample without replacement; the full cloud when `size` covers it.
pub fn subsample(cloud: &PointCloud, size: usize, seed: u64) -> Result<PointCloud> {
    if size == 0 || size > cloud.len() {
        return Err(Error::BadSize {
            size,
            available: cloud.len(),
        });
    }
    if size == cloud.len() {
        return Ok(cloud.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(size as u64);
    let mut idx = rand::seq::index::sample(&mut rng, cloud.len(), size).into_vec();
    idx.sort_unstable();
    cloud.subset(&idx)
}

/// One dimension estimate per subsample size, each with its own window.
pub fn subsample_sweep(
    cloud: &PointCloud,
    sizes: &[usize],
    cfg: SweepConfig,
) -> Result<Vec<SweepEntry>> {
    if let Some(&size) = sizes.iter().find(|&&s| s == 0 || s > cloud.len()) {
        return Err(Error::BadSize {
            size,
            available: cloud.len(),
        });
    }
    cfg.exec
        .map(sizes, |&size| {
            let sub = subsample(cloud, size, cfg.seed)?;
            let (_, estimate) = dimension_of_cloud(&sub, cfg.rule, cfg.per_decade)?;
            Ok(SweepEntry { size, estimate })
        })
        .into_iter()
        .collect()
}
