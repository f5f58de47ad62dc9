//! Point clouds in R^1 and R^2 and their Euclidean distance data.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;

/// A finite set of distinct points in R^d, d in {1, 2}.
///
/// Coordinates are stored flat, point-major. Exact duplicates are dropped at
/// construction, keeping the first occurrence, so indices are stable and
/// follow input order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
    duplicates_removed: usize,
}

impl PointCloud {
    /// Builds a cloud from a list of coordinate tuples.
    pub fn new<P: AsRef<[f64]>>(raw_points: &[P]) -> Result<Self> {
        let first = raw_points.first().ok_or(Error::EmptyCloud)?;
        let dim = first.as_ref().len();
        let mut coords = Vec::with_capacity(raw_points.len() * dim);
        for p in raw_points {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(dim, coords)
    }

    /// Builds a cloud from point-major flat coordinates.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::UnsupportedDimension(dim));
        }
        if coords.is_empty() {
            return Err(Error::EmptyCloud);
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: coords.len() % dim,
            });
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index: pos / dim });
        }
        let n = coords.len() / dim;
        let mut seen: HashSet<[u64; 2]> = HashSet::with_capacity(n);
        let mut kept = Vec::with_capacity(coords.len());
        for p in coords.chunks_exact(dim) {
            // -0.0 + 0.0 == +0.0, so signed zeros compare equal by bits.
            let mut key = [0u64; 2];
            for (k, &c) in key.iter_mut().zip(p) {
                *k = (c + 0.0).to_bits();
            }
            if seen.insert(key) {
                kept.extend(p.iter().map(|c| c + 0.0));
            }
        }
        let duplicates_removed = n - kept.len() / dim;
        Ok(PointCloud {
            dim,
            coords: kept,
            duplicates_removed,
        })
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of exact duplicates dropped when the cloud was built.
    pub fn duplicates_removed(&self) -> usize {
        self.duplicates_removed
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    /// The point embedded in the plane (1D points get y = 0).
    pub fn xy(&self, i: usize) -> [f64; 2] {
        match self.dim {
            1 => [self.coords[i], 0.0],
            _ => [self.coords[2 * i], self.coords[2 * i + 1]],
        }
    }

    /// Multiplies every coordinate by `t`, realizing the scaled space tX.
    pub fn scale(&self, t: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidScale(t));
        }
        Ok(PointCloud {
            dim: self.dim,
            coords: self.coords.iter().map(|c| c * t).collect(),
            duplicates_removed: self.duplicates_removed,
        })
    }

    /// The sub-cloud at the given indices, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            coords.extend_from_slice(self.point(i));
        }
        Self::from_flat(self.dim, coords)
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        euclidean(self.point(i), self.point(j))
    }
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    match a.len() {
        1 => (a[0] - b[0]).abs(),
        _ => {
            let dx = a[0] - b[0];
            let dy = a[1] - b[1];
            dx.hypot(dy)
        }
    }
}

/// Symmetric matrix of pairwise distances with zero diagonal, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl DistanceMatrix {
    /// Validates and wraps a row-major matrix.
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyCloud);
        }
        if entries.len() != n * n {
            return Err(Error::InvalidDistanceMatrix(format!(
                "expected {} entries, got {}",
                n * n,
                entries.len()
            )));
        }
        for i in 0..n {
            if entries[i * n + i] != 0.0 {
                return Err(Error::InvalidDistanceMatrix(format!(
                    "nonzero diagonal at {i}"
                )));
            }
            for j in 0..n {
                let v = entries[i * n + j];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidDistanceMatrix(format!(
                        "entry ({i},{j}) = {v}"
                    )));
                }
                if v != entries[j * n + i] {
                    return Err(Error::InvalidDistanceMatrix(format!(
                        "asymmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(DistanceMatrix { n, entries })
    }

    pub fn from_cloud(cloud: &PointCloud) -> Self {
        let n = cloud.len();
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = cloud.distance(i, j);
                entries[i * n + j] = d;
                entries[j * n + i] = d;
            }
        }
        DistanceMatrix { n, entries }
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

    /// The matrix of tX.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidScale(t));
        }
        Ok(DistanceMatrix {
            n: self.n,
            entries: self.entries.iter().map(|d| d * t).collect(),
        })
    }
}

/// Euclidean distance matrix of a cloud.
pub fn distance_matrix(cloud: &PointCloud) -> DistanceMatrix {
    DistanceMatrix::from_cloud(cloud)
}

/// Hausdorff distance: the larger of the two directed sup-inf distances.
pub fn hausdorff_distance(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(directed(a, b).max(directed(b, a)))
}

fn directed(from: &PointCloud, to: &PointCloud) -> f64 {
    Execution::default()
        .map_range(from.len(), |i| {
            let p = from.point(i);
            to.points()
                .map(|q| euclidean(p, q))
                .fold(f64::INFINITY, f64::min)
        })
        .into_iter()
        .fold(0.0, f64::max)
}
