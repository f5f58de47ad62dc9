//! Classical magnitude of finite metric spaces.
//!
//! The weighting equation `ζ w = 1` is solved densely: Cholesky first (the
//! similarity matrix of a Euclidean cloud is positive definite), LU with
//! partial pivoting when Cholesky breaks down. Cost is O(n^3) time and O(n^2)
//! memory, so callers facing user input should respect [`DENSE_SIZE_CAP`].

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::metric::{DistanceMatrix, PointCloud};

/// Default largest matrix the CLI will factor without `--force`.
pub const DENSE_SIZE_CAP: usize = 4096;

/// A weighting is rejected when `‖ζw − 1‖∞` exceeds this.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;

/// A pivot below this multiple of the largest entry marks the matrix singular.
pub const PIVOT_TOLERANCE: f64 = 1e-13;

/// The matrix `exp(-D)` of a finite metric space.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl SimilarityMatrix {
    pub fn from_distances(d: &DistanceMatrix) -> Self {
        SimilarityMatrix {
            n: d.len(),
            entries: d.entries().iter().map(|x| (-x).exp()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Sum of the first row; for homogeneous spaces every row has this sum.
    pub fn row_sum(&self, i: usize) -> f64 {
        self.entries[i * self.n..(i + 1) * self.n].iter().sum()
    }
}

pub fn similarity_matrix(d: &DistanceMatrix) -> SimilarityMatrix {
    SimilarityMatrix::from_distances(d)
}

/// A solution of `ζ w = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Weighting {
    pub weights: Vec<f64>,
    /// `‖ζw − 1‖∞` of the returned weights.
    pub residual: f64,
    /// Ratio of the largest to the smallest pivot; a cheap condition proxy.
    pub condition_estimate: f64,
}

impl Weighting {
    pub fn magnitude(&self) -> f64 {
        self.weights.iter().sum()
    }
}

pub fn weighting(z: &SimilarityMatrix) -> Result<Weighting> {
    let n = z.len();
    if n == 0 {
        return Err(Error::EmptyCloud);
    }
    let max_entry = z.entries().iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let floor = PIVOT_TOLERANCE * max_entry;
    let (weights, pivots) = match cholesky_solve(z, floor) {
        Some(r) => r,
        None => lu_solve(z, floor).ok_or(Error::Singular)?,
    };
    let residual = (0..n)
        .map(|i| {
            let row = &z.entries()[i * n..(i + 1) * n];
            let s: f64 = row.iter().zip(&weights).map(|(a, w)| a * w).sum();
            (s - 1.0).abs()
        })
        .fold(0.0, f64::max);
    if !residual.is_finite() || residual > RESIDUAL_TOLERANCE {
        return Err(Error::Singular);
    }
    let (lo, hi) = pivots
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), p| (lo.min(p.abs()), hi.max(p.abs())));
    Ok(Weighting {
        weights,
        residual,
        condition_estimate: hi / lo,
    })
}

/// Solves with `ζ = L Lᵀ`; `None` if a pivot falls below `floor`.
fn cholesky_solve(z: &SimilarityMatrix, floor: f64) -> Option<(Vec<f64>, Vec<f64>)> {
    let n = z.len();
    let mut l = vec![0.0; n * n];
    let mut pivots = Vec::with_capacity(n);
    for j in 0..n {
        let mut d = z.get(j, j);
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > floor) {
            return None;
        }
        pivots.push(d);
        let ljj = d.sqrt();
        l[j * n + j] = ljj;
        for i in (j + 1)..n {
            let mut s = z.get(i, j);
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / ljj;
        }
    }
    let mut y = vec![1.0; n];
    for i in 0..n {
        for k in 0..i {
            y[i] -= l[i * n + k] * y[k];
        }
        y[i] /= l[i * n + i];
    }
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            y[i] -= l[k * n + i] * y[k];
        }
        y[i] /= l[i * n + i];
    }
    Some((y, pivots))
}

/// Gaussian elimination with partial pivoting on `[ζ | 1]`.
fn lu_solve(z: &SimilarityMatrix, floor: f64) -> Option<(Vec<f64>, Vec<f64>)> {
    let n = z.len();
    let mut a = z.entries().to_vec();
    let mut b = vec![1.0; n];
    let mut pivots = Vec::with_capacity(n);
    for col in 0..n {
        let (p, pv) = (col..n)
            .map(|r| (r, a[r * n + col].abs()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if !(pv > floor) {
            return None;
        }
        if p != col {
            for k in 0..n {
                a.swap(p * n + k, col * n + k);
            }
            b.swap(p, col);
        }
        let piv = a[col * n + col];
        pivots.push(piv);
        for r in (col + 1)..n {
            let f = a[r * n + col] / piv;
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[r * n + k] -= f * a[col * n + k];
            }
            b[r] -= f * b[col];
        }
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in (i + 1)..n {
            s -= a[i * n + k] * b[k];
        }
        b[i] = s / a[i * n + i];
    }
    Some((b, pivots))
}

/// Magnitude `Σ w_i` of the space with this similarity matrix.
pub fn magnitude(z: &SimilarityMatrix) -> Result<f64> {
    weighting(z).map(|w| w.magnitude())
}

pub fn magnitude_of_matrix(d: &DistanceMatrix) -> Result<f64> {
    magnitude(&SimilarityMatrix::from_distances(d))
}

pub fn magnitude_of_cloud(cloud: &PointCloud) -> Result<f64> {
    magnitude_of_matrix(&DistanceMatrix::from_cloud(cloud))
}

/// One sample of the magnitude function; `magnitude` is `None` where no
/// weighting exists.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagnitudeSample {
    pub t: f64,
    pub magnitude: Option<f64>,
}

/// `t ↦ |tX|` over a grid. Singular points are flagged, not fatal.
pub fn magnitude_function(d: &DistanceMatrix, t_grid: &[f64]) -> Result<Vec<MagnitudeSample>> {
    magnitude_function_with(d, t_grid, Execution::default())
}

pub fn magnitude_function_with(
    d: &DistanceMatrix,
    t_grid: &[f64],
    exec: Execution,
) -> Result<Vec<MagnitudeSample>> {
    if let Some(&t) = t_grid.iter().find(|t| !(**t > 0.0) || !t.is_finite()) {
        return Err(Error::InvalidScale(t));
    }
    Ok(exec.map(t_grid, |&t| {
        let scaled = d.scaled(t).expect("t validated above");
        MagnitudeSample {
            t,
            magnitude: magnitude_of_matrix(&scaled).ok(),
        }
    }))
}

/// Sign of `det ζ` (`0.0` only for an exactly zero pivot).
pub fn determinant_sign(z: &SimilarityMatrix) -> f64 {
    let n = z.len();
    let mut a = z.entries().to_vec();
    let mut sign = 1.0;
    for col in 0..n {
        let p = (col..n)
            .max_by(|&r, &q| a[r * n + col].abs().total_cmp(&a[q * n + col].abs()))
            .unwrap_or(col);
        let piv = a[p * n + col];
        if piv == 0.0 {
            return 0.0;
        }
        if p != col {
            for k in 0..n {
                a.swap(p * n + k, col * n + k);
            }
            sign = -sign;
        }
        sign *= piv.signum();
        for r in (col + 1)..n {
            let f = a[r * n + col] / piv;
            for k in col..n {
                a[r * n + k] -= f * a[col * n + k];
            }
        }
    }
    sign
}

/// Scales strictly between consecutive grid points where `det ζ(tX)` changes
/// sign, located by bisection. A grid point that is itself singular is
/// reported by [`magnitude_function`] instead, so its brackets are skipped.
pub fn singular_scales(d: &DistanceMatrix, t_grid: &[f64]) -> Result<Vec<f64>> {
    let sign_at = |t: f64| -> Result<f64> { Ok(determinant_sign(&similarity_matrix(&d.scaled(t)?))) };
    let mut out = Vec::new();
    for w in t_grid.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let (s_lo, s_hi) = (sign_at(lo)?, sign_at(hi)?);
        if s_lo == 0.0 || s_hi == 0.0 || s_lo == s_hi {
            continue;
        }
        if magnitude_of_matrix(&d.scaled(lo)?).is_err() || magnitude_of_matrix(&d.scaled(hi)?).is_err() {
            continue;
        }
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let s = sign_at(mid)?;
            if s == 0.0 {
                (lo, hi) = (mid, mid);
                break;
            }
            if s == s_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out.push(if (hi - lo).abs() == 0.0 { lo } else { 0.5 * (lo + hi) });
    }
    Ok(out)
}

/// Refuses dense solves above [`DENSE_SIZE_CAP`] unless forced.
pub fn check_dense_size(n: usize, force: bool) -> Result<()> {
    if n > DENSE_SIZE_CAP && !force {
        return Err(Error::TooLarge {
            size: n,
            limit: DENSE_SIZE_CAP,
            what: "dense magnitude solve is O(n^3); pass --force to override",
        });
    }
    Ok(())
}

/// Built-in graph metrics.
pub mod fixtures {
    use crate::metric::DistanceMatrix;

    /// Shortest-path metric on the complete bipartite graph K_{3,2}.
    /// Vertices 0..3 form the part of size three, 3..5 the part of size two.
    pub fn k32() -> DistanceMatrix {
        let part = |i: usize| usize::from(i >= 3);
        let mut e = vec![0.0; 25];
        for i in 0..5 {
            for j in 0..5 {
                if i != j {
                    e[i * 5 + j] = if part(i) == part(j) { 2.0 } else { 1.0 };
                }
            }
        }
        DistanceMatrix::new(5, e).expect("valid fixture")
    }

    /// Shortest-path metric on the 4-cycle (a homogeneous space).
    pub fn cycle4() -> DistanceMatrix {
        let mut e = vec![0.0; 16];
        for i in 0..4 {
            for j in 0..4 {
                let k = (i as i32 - j as i32).rem_euclid(4);
                e[i * 4 + j] = k.min(4 - k) as f64;
            }
        }
        DistanceMatrix::new(4, e).expect("valid fixture")
    }

    pub fn by_name(name: &str) -> Option<DistanceMatrix> {
        match name {
            "k32" => Some(k32()),
            "c4" | "cycle4" => Some(cycle4()),
            _ => None,
        }
    }
}
