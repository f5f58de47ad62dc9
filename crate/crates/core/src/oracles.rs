//! Closed-form alpha magnitude functions of spaces whose barcodes (or their
//! limits) are known exactly. Used as ground truth for the pipeline and as
//! synthetic curves for the dimension estimator.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tail bound for the Cantor series: the j-th term is at most (1/6)(2/3)^j.
const CANTOR_TERMS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClosedForm {
    Interval { a: f64, b: f64 },
    UnionOfIntervals { intervals: Vec<(f64, f64)> },
    /// Middle-thirds Cantor set; evaluable only at powers of three.
    Cantor,
    Circle,
    /// The (n+1)^2 lattice points of the unit square with spacing 1/n.
    GridSquare { n: u32 },
    /// A finite subset of the line, sorted increasing.
    Finite1d { points: Vec<f64> },
}

impl ClosedForm {
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidScale(t));
        }
        match self {
            ClosedForm::Interval { a, b } => oracle_interval(*a, *b, t),
            ClosedForm::UnionOfIntervals { intervals } => oracle_union_intervals(intervals, t),
            ClosedForm::Cantor => {
                let k = (t.ln() / 3f64.ln()).round();
                if k < 0.0 || (3f64.powi(k as i32) - t).abs() > 1e-12 * t {
                    return Err(Error::BadConfig(format!(
                        "Cantor oracle is only available at t = 3^k, got {t}"
                    )));
                }
                Ok(oracle_cantor(k as u32))
            }
            ClosedForm::Circle => Ok(oracle_circle(t)),
            ClosedForm::GridSquare { n } => oracle_grid_square(*n, t),
            ClosedForm::Finite1d { points } => crate::pmag::alpha_magnitude_1d(points, t),
        }
    }
}

/// `|t[a, b]|_α = 1 + t(b - a)/2`.
pub fn oracle_interval(a: f64, b: f64, t: f64) -> Result<f64> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::BadInterval(a, b));
    }
    Ok(1.0 + t * (b - a) / 2.0)
}

/// Checks that intervals are nondegenerate, ordered and pairwise disjoint.
pub fn validate_intervals(intervals: &[(f64, f64)]) -> Result<()> {
    if intervals.is_empty() {
        return Err(Error::BadConfig("no intervals".into()));
    }
    for &(a, b) in intervals {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::BadInterval(a, b));
        }
    }
    if let Some(w) = intervals.windows(2).find(|w| !(w[0].1 < w[1].0)) {
        return Err(Error::BadConfig(format!(
            "intervals {:?} and {:?} overlap or are out of order",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// `1 + Σ t·l_i/2 + Σ (1 - e^{-t·g_j/2})` over lengths `l_i` and gaps `g_j`,
/// for disjoint ordered intervals inside [0, 1/2].
pub fn oracle_union_intervals(intervals: &[(f64, f64)], t: f64) -> Result<f64> {
    validate_intervals(intervals)?;
    if intervals[0].0 < 0.0 || intervals[intervals.len() - 1].1 > 0.5 {
        return Err(Error::BadConfig("intervals must lie inside [0, 1/2]".into()));
    }
    let lengths: f64 = intervals.iter().map(|(a, b)| t * (b - a) / 2.0).sum();
    let gaps: f64 = intervals
        .windows(2)
        .map(|w| -(-t * (w[1].0 - w[0].1) / 2.0).exp_m1())
        .sum();
    Ok(1.0 + lengths + gaps)
}

/// `|C|_α = 1 + Σ_{j≥0} 2^j (1 - e^{-(1/2)(1/3)^{j+1}})`.
pub fn cantor_magnitude() -> f64 {
    cantor_series(1.0)
}

/// `1 + Σ_{j≥0} 2^j (1 - e^{-(t/2)(1/3)^{j+1}})`: the gap sum of tC.
pub(crate) fn cantor_series(t: f64) -> f64 {
    let mut acc = crate::pmag::CompensatedSum::default();
    acc.add(1.0);
    for j in (0..CANTOR_TERMS).rev() {
        acc.add(cantor_term(t, j));
    }
    acc.value()
}

pub(crate) fn cantor_term(t: f64, j: usize) -> f64 {
    let x = 0.5 * t * 3f64.powi(-(j as i32 + 1));
    2f64.powi(j as i32) * -(-x).exp_m1()
}

/// `|3^n C|_α = 2^n |C|_α - Σ_{k<n} 2^{n-k-1} e^{-3^k/2}`.
pub fn oracle_cantor(t_power: u32) -> f64 {
    let n = t_power as i32;
    let mut value = 2f64.powi(n) * cantor_magnitude();
    for k in 0..n {
        value -= 2f64.powi(n - k - 1) * (-0.5 * 3f64.powi(k)).exp();
    }
    value
}

/// `|tS^1|_α = πt + e^{-t}`.
pub fn oracle_circle(t: f64) -> f64 {
    PI * t + (-t).exp()
}

/// Alpha magnitude of the lattice `A_n` at scale `t`, from its barcode:
/// `(n+1)^2 - 1` bars `[0, 1/(2n))` in degree 0, one essential bar, and
/// `n^2` bars `[1/(2n), 1/(√2 n))` in degree 1.
pub fn oracle_grid_square(n: u32, t: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::BadConfig("grid needs n >= 1".into()));
    }
    let nf = n as f64;
    let short = (-t / (2.0 * nf)).exp();
    let diag = (-t / (2f64.sqrt() * nf)).exp();
    let components = (nf + 1.0) * (nf + 1.0) - 1.0;
    Ok(1.0 + components * (1.0 - short) - nf * nf * (short - diag))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DimensionKind {
    Interval,
    Circle,
    Cantor,
    Finite,
}

impl std::str::FromStr for DimensionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "interval" => Ok(DimensionKind::Interval),
            "circle" => Ok(DimensionKind::Circle),
            "cantor" => Ok(DimensionKind::Cantor),
            "finite" => Ok(DimensionKind::Finite),
            other => Err(Error::UnknownKind(other.to_string())),
        }
    }
}

/// Known alpha magnitude dimensions.
pub fn oracle_dimension(kind: DimensionKind) -> f64 {
    match kind {
        DimensionKind::Interval | DimensionKind::Circle => 1.0,
        DimensionKind::Cantor => 2f64.ln() / 3f64.ln(),
        DimensionKind::Finite => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval() {
        assert_eq!(oracle_interval(0.0, 1.0, 1.0).unwrap(), 1.5);
        assert_eq!(oracle_interval(2.0, 5.0, 2.0).unwrap(), 4.0);
        assert!((oracle_interval(0.0, 1.0, 1e-9).unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(oracle_interval(1.0, 1.0, 1.0), Err(Error::BadInterval(1.0, 1.0)));
    }

    #[test]
    fn union_of_intervals() {
        assert_eq!(oracle_union_intervals(&[(0.0, 0.5)], 1.0).unwrap(), 1.25);
        let cfg = [(0.0, 0.1), (0.3, 0.4)];
        let e1 = 1.0 + 0.1 + (1.0 - (-0.1f64).exp());
        let e2 = 1.0 + 0.2 + (1.0 - (-0.2f64).exp());
        assert!((oracle_union_intervals(&cfg, 1.0).unwrap() - e1).abs() < 1e-15);
        assert!((oracle_union_intervals(&cfg, 2.0).unwrap() - e2).abs() < 1e-15);
        assert!(oracle_union_intervals(&[(0.0, 0.2), (0.1, 0.3)], 1.0).is_err());
        assert!(oracle_union_intervals(&[(0.3, 0.4), (0.0, 0.1)], 1.0).is_err());
        assert!(oracle_union_intervals(&[(0.0, 0.7)], 1.0).is_err());
    }

    #[test]
    fn single_union_equals_interval() {
        for (a, b, t) in [(0.0, 0.5, 1.0), (0.1, 0.2, 7.0), (0.25, 0.5, 0.3)] {
            assert_eq!(
                oracle_union_intervals(&[(a, b)], t).unwrap(),
                oracle_interval(a, b, t).unwrap()
            );
        }
    }

    #[test]
    fn cantor_recursion_matches_direct_series() {
        for n in 0..12u32 {
            let t = 3f64.powi(n as i32);
            let direct = cantor_series(t);
            assert!(
                (oracle_cantor(n) - direct).abs() < 1e-12 * direct,
                "n={n}: {} vs {direct}",
                oracle_cantor(n)
            );
        }
        let c = cantor_magnitude();
        assert!((oracle_cantor(1) - (2.0 * c - (-0.5f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn cantor_series_converges() {
        // ratio of consecutive terms tends to 2/3
        let r = cantor_term(1.0, 60) / cantor_term(1.0, 59);
        assert!((r - 2.0 / 3.0).abs() < 1e-12);
        // tail beyond the truncation point is bounded by (1/2)(2/3)^CANTOR_TERMS
        assert!(0.5 * (2.0f64 / 3.0).powi(CANTOR_TERMS as i32) < 1e-12);
        let c = cantor_magnitude();
        assert!(c > 1.0 && c < 1.5);
    }

    #[test]
    fn cantor_closed_form_checks_power_of_three() {
        assert!(ClosedForm::Cantor.evaluate(9.0).is_ok());
        assert!(ClosedForm::Cantor.evaluate(2.0).is_err());
    }

    #[test]
    fn circle() {
        assert_eq!(oracle_circle(1.0), PI + (-1f64).exp());
        assert_eq!(oracle_circle(10.0), 10.0 * PI + (-10f64).exp());
        assert!((oracle_circle(1e-9) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn grid_square() {
        let expect = 1.0 + 3.0 * (1.0 - (-0.5f64).exp())
            - ((-0.5f64).exp() - (-1.0 / 2f64.sqrt()).exp());
        assert!((oracle_grid_square(1, 1.0).unwrap() - expect).abs() < 1e-15);
        assert!(oracle_grid_square(0, 1.0).is_err());
    }

    #[test]
    fn grid_square_diverges() {
        // With e^{-x} <= 1 - x + x^2/2 and e^{-x} >= 1 - x one gets
        // |A_n|_α >= 3/4 + n(1 - 1/√2).
        for n in [10u32, 100, 1000] {
            let v = oracle_grid_square(n, 1.0).unwrap();
            assert!(v >= 0.75 + n as f64 * (1.0 - 0.5f64.sqrt()), "n={n}: {v}");
        }
        assert!(oracle_grid_square(1000, 1.0).unwrap() > oracle_grid_square(100, 1.0).unwrap());
    }

    #[test]
    fn dimensions() {
        assert_eq!(oracle_dimension(DimensionKind::Interval), 1.0);
        assert_eq!(oracle_dimension(DimensionKind::Finite), 0.0);
        assert!((oracle_dimension(DimensionKind::Cantor) - 0.630_929_75).abs() < 1e-8);
        assert!("koch".parse::<DimensionKind>().is_err());
    }
}
