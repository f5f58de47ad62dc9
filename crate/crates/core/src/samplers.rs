//! Seeded generators for the experimental point clouds.
//!
//! Every sampler draws point `i` from its own ChaCha8 stream: the generator is
//! seeded with `seed_from_u64(seed)` and switched to stream `i` before the
//! draw. Points are therefore independent of thread count and of `n`, so a
//! sample of size `m < n` is a prefix of the sample of size `n`.

use std::f64::consts::TAU;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::metric::PointCloud;
use crate::oracles::validate_intervals;

pub const DEFAULT_CANTOR_DEPTH: u32 = 100;
pub const DEFAULT_FEIGENBAUM_A: f64 = 3.56995;
pub const DEFAULT_BURN_IN: u64 = 100_000;

/// Stream reserved for draws that are not tied to a point index.
const AUX_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerKind {
    Circle,
    Cantor,
    Grid,
    Feigenbaum,
    UnionIntervals,
}

impl std::str::FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "circle" => Ok(SamplerKind::Circle),
            "cantor" => Ok(SamplerKind::Cantor),
            "grid" => Ok(SamplerKind::Grid),
            "feigenbaum" => Ok(SamplerKind::Feigenbaum),
            "union_intervals" | "union" => Ok(SamplerKind::UnionIntervals),
            other => Err(Error::UnknownKind(other.to_string())),
        }
    }
}

/// Full description of a sample. For `Grid`, `n` is the lattice parameter
/// and the cloud has `(n+1)^2` points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerSpec {
    pub kind: SamplerKind,
    pub n: usize,
    pub seed: u64,
    pub depth: u32,
    pub a: f64,
    pub burn_in: u64,
    /// Logistic map start; drawn from the seed when absent.
    pub x0: Option<f64>,
    pub intervals: Vec<(f64, f64)>,
}

impl SamplerSpec {
    pub fn new(kind: SamplerKind, n: usize, seed: u64) -> Self {
        SamplerSpec {
            kind,
            n,
            seed,
            depth: DEFAULT_CANTOR_DEPTH,
            a: DEFAULT_FEIGENBAUM_A,
            burn_in: DEFAULT_BURN_IN,
            x0: None,
            intervals: Vec::new(),
        }
    }

    pub fn with_n(&self, n: usize) -> Self {
        SamplerSpec { n, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::BadConfig("n must be at least 1".into()));
        }
        match self.kind {
            SamplerKind::Cantor if self.depth == 0 => {
                Err(Error::BadConfig("cantor depth must be at least 1".into()))
            }
            SamplerKind::Feigenbaum => {
                if !(self.a > 1.0 && self.a < 4.0) {
                    return Err(Error::BadConfig(format!("logistic parameter {} not in (1, 4)", self.a)));
                }
                match self.x0 {
                    Some(x) if !(x > 0.0 && x < 1.0) => {
                        Err(Error::BadConfig(format!("x0 = {x} not in (0, 1)")))
                    }
                    _ => Ok(()),
                }
            }
            SamplerKind::UnionIntervals => validate_intervals(&self.intervals),
            _ => Ok(()),
        }
    }
}

fn point_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::BadConfig("n must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// `n` uniform points on the unit circle.
pub fn sample_circle(n: usize, seed: u64) -> Result<PointCloud> {
    check_n(n)?;
    let coords = Execution::default().map_range(n, |i| {
        let theta = point_rng(seed, i as u64).random_range(0.0..TAU);
        [theta.cos(), theta.sin()]
    });
    PointCloud::from_flat(2, coords.into_iter().flatten().collect())
}

/// `x = Σ_{i≤D} b_i·2/3^i + u/3^D` with fair coin flips `b_i` and `u`
/// uniform on [0, 1].
pub fn cantor_point(bits: impl Fn(u32) -> bool, depth: u32, u: f64) -> f64 {
    let mut acc = u;
    for i in (1..=depth).rev() {
        acc = (if bits(i) { 2.0 } else { 0.0 } + acc) / 3.0;
    }
    acc
}

pub fn sample_cantor(n: usize, depth: u32, seed: u64) -> Result<PointCloud> {
    check_n(n)?;
    if depth == 0 {
        return Err(Error::BadConfig("cantor depth must be at least 1".into()));
    }
    let words = depth.div_ceil(64) as usize;
    let coords = Execution::default().map_range(n, |i| {
        let mut rng = point_rng(seed, i as u64);
        let flips: Vec<u64> = (0..words).map(|_| rng.next_u64()).collect();
        let u = rng.random_range(0.0..=1.0);
        let bit = |k: u32| {
            let k = k - 1;
            flips[(k / 64) as usize] >> (k % 64) & 1 == 1
        };
        cantor_point(bit, depth, u)
    });
    PointCloud::from_flat(1, coords)
}

/// Whether `x` lies in the `depth`-th stage of the middle-thirds
/// construction, reading ternary digits with tolerance `tol`.
pub fn in_cantor_level(x: f64, depth: u32, tol: f64) -> bool {
    let mut x = x;
    let mut tol = tol;
    for _ in 0..depth {
        if x < -tol || x > 1.0 + tol {
            return false;
        }
        if x <= 1.0 / 3.0 + tol {
            x *= 3.0;
        } else if x >= 2.0 / 3.0 - tol {
            x = 3.0 * x - 2.0;
        } else {
            return false;
        }
        tol *= 3.0;
        if tol > 0.1 {
            break;
        }
    }
    x >= -tol && x <= 1.0 + tol
}

/// The `(n+1)^2` points `(j/n, k/n)`.
pub fn sample_grid(n: usize) -> Result<PointCloud> {
    check_n(n)?;
    let nf = n as f64;
    let coords = (0..=n)
        .flat_map(|j| (0..=n).flat_map(move |k| [j as f64 / nf, k as f64 / nf]))
        .collect();
    PointCloud::from_flat(2, coords)
}

/// Iterates `x ↦ a x (1 - x)` from `x0`, drops `burn_in` iterates, keeps `n`.
/// Repeated iterates (periodic windows) are removed by the cloud constructor.
pub fn sample_feigenbaum(n: usize, a: f64, burn_in: u64, x0: Option<f64>, seed: u64) -> Result<PointCloud> {
    let mut spec = SamplerSpec::new(SamplerKind::Feigenbaum, n, seed);
    spec.a = a;
    spec.burn_in = burn_in;
    spec.x0 = x0;
    spec.validate()?;
    let mut x = match x0 {
        Some(x) => x,
        None => {
            let mut rng = point_rng(seed, AUX_STREAM);
            loop {
                let x = rng.random_range(0.0..1.0);
                if x > 0.0 {
                    break x;
                }
            }
        }
    };
    for _ in 0..burn_in {
        x = a * x * (1.0 - x);
    }
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        x = a * x * (1.0 - x);
        out.push(x);
    }
    PointCloud::from_flat(1, out)
}

/// Uniform points on a disjoint union of intervals: an interval is chosen
/// with probability proportional to its length, then a point within it.
pub fn sample_union_intervals(intervals: &[(f64, f64)], n: usize, seed: u64) -> Result<PointCloud> {
    check_n(n)?;
    validate_intervals(intervals)?;
    let mut cumulative = Vec::with_capacity(intervals.len());
    let mut total = 0.0;
    for &(a, b) in intervals {
        total += b - a;
        cumulative.push(total);
    }
    let coords = Execution::default().map_range(n, |i| {
        let mut rng = point_rng(seed, i as u64);
        let r = rng.random_range(0.0..total);
        let k = cumulative.partition_point(|&c| c <= r).min(intervals.len() - 1);
        let (a, b) = intervals[k];
        rng.random_range(a..=b)
    });
    PointCloud::from_flat(1, coords)
}

/// Draws the cloud a spec describes.
pub fn sample(spec: &SamplerSpec) -> Result<PointCloud> {
    spec.validate()?;
    match spec.kind {
        SamplerKind::Circle => sample_circle(spec.n, spec.seed),
        SamplerKind::Cantor => sample_cantor(spec.n, spec.depth, spec.seed),
        SamplerKind::Grid => sample_grid(spec.n),
        SamplerKind::Feigenbaum => sample_feigenbaum(spec.n, spec.a, spec.burn_in, spec.x0, spec.seed),
        SamplerKind::UnionIntervals => sample_union_intervals(&spec.intervals, spec.n, spec.seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_points_have_unit_norm() {
        let c = sample_circle(1000, 3).unwrap();
        for p in c.points() {
            assert!((p[0].hypot(p[1]) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn deterministic_and_nested() {
        let a = sample_circle(500, 11).unwrap();
        assert_eq!(a, sample_circle(500, 11).unwrap());
        assert_ne!(a, sample_circle(500, 12).unwrap());
        let b = sample_cantor(200, 30, 5).unwrap();
        let big = sample_cantor(400, 30, 5).unwrap();
        assert_eq!(b.coords(), &big.coords()[..200]);
    }

    #[test]
    fn cantor_extremes() {
        assert_eq!(cantor_point(|_| false, 20, 0.0), 0.0);
        assert!((cantor_point(|_| true, 20, 1.0) - 1.0).abs() < 1e-15);
        assert_eq!(cantor_point(|i| i == 1, 1, 0.0), 2.0 / 3.0);
    }

    #[test]
    fn cantor_samples_in_level_set() {
        for depth in [1, 3, 8] {
            let c = sample_cantor(2000, depth, 9).unwrap();
            for p in c.points() {
                assert!(in_cantor_level(p[0], depth, 1e-12), "{} at depth {depth}", p[0]);
            }
        }
        let c = sample_cantor(2000, 100, 9).unwrap();
        assert!(c.points().all(|p| in_cantor_level(p[0], 100, 1e-15)));
        assert!(!in_cantor_level(0.5, 1, 1e-12));
        assert!(in_cantor_level(0.15, 1, 1e-12));
        assert!(!in_cantor_level(0.15, 2, 1e-12));
    }

    #[test]
    fn grid_sizes() {
        let g = sample_grid(1).unwrap();
        assert_eq!(g.len(), 4);
        for n in 1..=20 {
            assert_eq!(sample_grid(n).unwrap().len(), (n + 1) * (n + 1));
        }
        let g = sample_grid(5).unwrap();
        assert_eq!(g.point(1), &[0.0, 0.2]);
        assert!(sample_grid(0).is_err());
    }

    #[test]
    fn feigenbaum() {
        let c = sample_feigenbaum(1000, DEFAULT_FEIGENBAUM_A, 1000, None, 1).unwrap();
        assert!(c.points().all(|p| p[0] > 0.0 && p[0] < 1.0));
        let c = sample_feigenbaum(1000, 2.0, 1000, Some(0.3), 1).unwrap();
        assert!(c.len() <= 2);
        assert!(c.points().all(|p| (p[0] - 0.5).abs() < 1e-12));
        assert!(sample_feigenbaum(10, 4.5, 0, None, 1).is_err());
        assert!(sample_feigenbaum(10, 3.0, 0, Some(1.0), 1).is_err());
    }

    #[test]
    fn union_samples_stay_inside() {
        let cfg = [(0.0, 0.1), (0.3, 0.4)];
        let c = sample_union_intervals(&cfg, 5000, 2).unwrap();
        assert!(c
            .points()
            .all(|p| cfg.iter().any(|&(a, b)| p[0] >= a && p[0] <= b)));
        let left = c.points().filter(|p| p[0] <= 0.1).count();
        assert!((2000..3000).contains(&left));
        assert!(sample_union_intervals(&[(0.0, 0.2), (0.1, 0.3)], 10, 1).is_err());
    }

    #[test]
    fn spec_dispatch_and_validation() {
        let s = SamplerSpec::new(SamplerKind::Grid, 5, 0);
        assert_eq!(sample(&s).unwrap().len(), 36);
        assert!(sample(&s.with_n(0)).is_err());
        let mut s = SamplerSpec::new(SamplerKind::Cantor, 10, 0);
        s.depth = 0;
        assert!(sample(&s).is_err());
        assert_eq!("circle".parse::<SamplerKind>().unwrap(), SamplerKind::Circle);
        assert!("koch".parse::<SamplerKind>().is_err());
    }
}
