//! Persistent magnitude of barcodes and the alpha, Čech and Rips magnitude
//! functions of point clouds.
//!
//! For a barcode `{[a, b)}` in degrees `k`,
//! `|tM| = Σ_k (-1)^k Σ (e^{-a t} - e^{-b t})` with `e^{-∞ t} = 0`.
//! Endpoints scale linearly with the space, so one barcode serves every `t`.

use crate::complex::{alpha_complex, build_cech, build_rips, RIPS_FULL_MAX_POINTS};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::metric::{DistanceMatrix, PointCloud};
use crate::oracles::ClosedForm;
use crate::persistence::{compute_persistence, Barcode};

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidScale(t))
    }
}

/// Persistent magnitude of a barcode at scale `t`.
///
/// Terms are accumulated in the barcode's canonical order (degree, then
/// birth) with compensated summation.
pub fn persistent_magnitude(b: &Barcode, t: f64) -> Result<f64> {
    check_t(t)?;
    Ok(evaluate(b, t))
}

fn evaluate(b: &Barcode, t: f64) -> f64 {
    let mut acc = CompensatedSum::default();
    for i in b.intervals() {
        let birth = (-i.birth * t).exp();
        let death = if i.is_infinite() { 0.0 } else { (-i.death * t).exp() };
        let term = birth - death;
        acc.add(if i.degree % 2 == 0 { term } else { -term });
    }
    acc.value()
}

/// Barcode of the alpha filtration of a cloud in R^1 or R^2.
pub fn alpha_barcode(cloud: &PointCloud) -> Result<Barcode> {
    compute_persistence(&alpha_complex(cloud)?)
}

/// `|tX|_α` via complex construction, reduction and barcode evaluation.
pub fn alpha_magnitude(cloud: &PointCloud, t: f64) -> Result<f64> {
    check_t(t)?;
    persistent_magnitude(&alpha_barcode(cloud)?, t)
}

/// `|tX|_α` for points on the line from the gaps alone:
/// `n - Σ e^{-t·gap/2}` over the `n - 1` consecutive gaps.
pub fn alpha_magnitude_1d(sorted_points: &[f64], t: f64) -> Result<f64> {
    check_t(t)?;
    if sorted_points.is_empty() {
        return Err(Error::EmptyCloud);
    }
    if let Some(i) = sorted_points.windows(2).position(|w| !(w[0] < w[1])) {
        return Err(Error::NotSorted(i + 1));
    }
    let mut acc = CompensatedSum::default();
    acc.add(1.0);
    for w in sorted_points.windows(2) {
        acc.add(1.0 - (-t * 0.5 * (w[1] - w[0])).exp());
    }
    Ok(acc.value())
}

/// `|tX|_Čech` from the brute-force Čech complex (small clouds only).
pub fn cech_magnitude(cloud: &PointCloud, t: f64) -> Result<f64> {
    check_t(t)?;
    let k = build_cech(cloud, cloud.len().saturating_sub(1))?;
    persistent_magnitude(&compute_persistence(&k)?, t)
}

/// Barcode of the full Vietoris–Rips filtration.
pub fn rips_barcode(d: &DistanceMatrix) -> Result<Barcode> {
    if d.len() > RIPS_FULL_MAX_POINTS {
        return Err(Error::TooLarge {
            size: d.len(),
            limit: RIPS_FULL_MAX_POINTS,
            what: "full Vietoris-Rips complex",
        });
    }
    compute_persistence(&build_rips(d, d.len() - 1)?)
}

/// `|tX|_Rips` from the full Vietoris–Rips barcode.
pub fn rips_magnitude(d: &DistanceMatrix, t: f64) -> Result<f64> {
    check_t(t)?;
    persistent_magnitude(&rips_barcode(d)?, t)
}

/// An evaluable magnitude function, from a barcode or a closed form.
#[derive(Debug, Clone, PartialEq)]
pub enum MagnitudeFunction {
    Barcode(Barcode),
    ClosedForm(ClosedForm),
}

impl MagnitudeFunction {
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        match self {
            MagnitudeFunction::Barcode(b) => persistent_magnitude(b, t),
            MagnitudeFunction::ClosedForm(c) => c.evaluate(t),
        }
    }

    /// Evaluates every grid point, in grid order.
    pub fn evaluate_grid(&self, t_grid: &[f64], exec: Execution) -> Result<Vec<f64>> {
        if let Some(&t) = t_grid.iter().find(|&&t| check_t(t).is_err()) {
            return Err(Error::InvalidScale(t));
        }
        exec.map(t_grid, |&t| self.evaluate(t)).into_iter().collect()
    }
}

/// One point of an alpha magnitude curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub t: f64,
    pub magnitude: f64,
}

/// The alpha magnitude curve over a grid, plus a diagnostic flag.
#[derive(Debug, Clone, PartialEq)]
pub struct MagnitudeCurve {
    pub points: Vec<CurvePoint>,
    /// False if the sampled values ever decrease along increasing `t`.
    pub monotone: bool,
}

/// Computes the barcode once and evaluates it on every grid point.
pub fn magnitude_curve(cloud: &PointCloud, t_grid: &[f64]) -> Result<MagnitudeCurve> {
    let f = MagnitudeFunction::Barcode(alpha_barcode(cloud)?);
    curve_from_function(&f, t_grid, Execution::default())
}

pub fn curve_from_function(
    f: &MagnitudeFunction,
    t_grid: &[f64],
    exec: Execution,
) -> Result<MagnitudeCurve> {
    let values = f.evaluate_grid(t_grid, exec)?;
    let points: Vec<CurvePoint> = t_grid
        .iter()
        .zip(values)
        .map(|(&t, magnitude)| CurvePoint { t, magnitude })
        .collect();
    let mut sorted = points.clone();
    sorted.sort_by(|a, b| a.t.total_cmp(&b.t));
    let monotone = sorted
        .windows(2)
        .all(|w| w[1].magnitude >= w[0].magnitude - 1e-12 * w[0].magnitude.abs().max(1.0));
    Ok(MagnitudeCurve { points, monotone })
}

/// `n` log-spaced values per decade starting at `t_min`, up to `t_max`
/// (inclusive up to rounding). `t_min == t_max` yields a single point.
pub fn log_grid(t_min: f64, t_max: f64, per_decade: usize) -> Result<Vec<f64>> {
    check_t(t_min)?;
    check_t(t_max)?;
    if t_max < t_min {
        return Err(Error::BadConfig(format!("t_max {t_max} < t_min {t_min}")));
    }
    if per_decade == 0 {
        return Err(Error::BadConfig("per-decade must be positive".into()));
    }
    let decades = (t_max / t_min).log10();
    let steps = (decades * per_decade as f64 + 1e-9).floor() as usize;
    Ok((0..=steps)
        .map(|k| t_min * 10f64.powf(k as f64 / per_decade as f64))
        .collect())
}

/// Default grid density for log-log work.
pub const DEFAULT_PER_DECADE: usize = 200;
