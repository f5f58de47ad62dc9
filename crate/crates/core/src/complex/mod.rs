//! Filtered simplicial complexes: alpha (R^1 and R^2), Čech and Vietoris–Rips.
//!
//! Filtration values are ball *radii*: a simplex with value `r` is present in
//! the complex at parameter `ε` iff `r <= ε`. Libraries that report squared
//! radii (the usual convention for alpha complexes) differ by a square root.

mod alpha;
mod cech;
pub mod delaunay;
mod rips;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

pub use alpha::{alpha_complex, alpha_filtration_2d, build_alpha_1d};
pub use cech::{build_cech, min_enclosing_radius, CECH_MAX_POINTS};
pub use delaunay::{delaunay_2d, Triangulation};
pub use rips::{build_rips, RIPS_FULL_MAX_POINTS};

/// A simplex as a strictly increasing list of point indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex(SmallVec<[u32; 3]>);

impl Simplex {
    /// Sorts the vertices; panics on repeated vertices.
    pub fn new(vertices: &[u32]) -> Self {
        let mut v: SmallVec<[u32; 3]> = SmallVec::from_slice(vertices);
        v.sort_unstable();
        assert!(
            v.windows(2).all(|w| w[0] < w[1]),
            "simplex has repeated vertices: {vertices:?}"
        );
        Simplex(v)
    }

    pub(crate) fn from_sorted(v: SmallVec<[u32; 3]>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        Simplex(v)
    }

    pub fn vertex(v: u32) -> Self {
        Simplex(SmallVec::from_slice(&[v]))
    }

    pub fn edge(a: u32, b: u32) -> Self {
        Self::new(&[a, b])
    }

    pub fn triangle(a: u32, b: u32, c: u32) -> Self {
        Self::new(&[a, b, c])
    }

    pub fn vertices(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    /// The codimension-one faces, the i-th omitting vertex i.
    pub fn facets(&self) -> impl Iterator<Item = Simplex> + '_ {
        let n = if self.0.len() > 1 { self.0.len() } else { 0 };
        (0..n).map(move |skip| {
            Simplex(
                self.0
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &v)| v)
                    .collect(),
            )
        })
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComplexKind {
    Alpha,
    Cech,
    Rips,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilteredSimplex {
    pub simplex: Simplex,
    pub value: f64,
}

/// Simplices with their entry radii.
#[derive(Debug, Clone, PartialEq)]
pub struct FilteredComplex {
    pub kind: ComplexKind,
    pub ambient_dim: usize,
    pub simplices: Vec<FilteredSimplex>,
}

impl FilteredComplex {
    pub fn new(kind: ComplexKind, ambient_dim: usize) -> Self {
        FilteredComplex {
            kind,
            ambient_dim,
            simplices: Vec::new(),
        }
    }

    pub fn push(&mut self, simplex: Simplex, value: f64) {
        self.simplices.push(FilteredSimplex { simplex, value });
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn max_dim(&self) -> usize {
        self.simplices.iter().map(|s| s.simplex.dim()).max().unwrap_or(0)
    }

    pub fn count_by_dim(&self) -> Vec<usize> {
        let mut counts = vec![0; self.max_dim() + 1];
        for s in &self.simplices {
            counts[s.simplex.dim()] += 1;
        }
        counts
    }

    /// Multiplies every filtration value by `t` (the complex of tX).
    pub fn scaled(&self, t: f64) -> Self {
        FilteredComplex {
            kind: self.kind,
            ambient_dim: self.ambient_dim,
            simplices: self
                .simplices
                .iter()
                .map(|s| FilteredSimplex {
                    simplex: s.simplex.clone(),
                    value: s.value * t,
                })
                .collect(),
        }
    }

    /// Checks closure under faces and monotonicity of values.
    pub fn validate(&self) -> Result<()> {
        let index: HashMap<&Simplex, f64> =
            self.simplices.iter().map(|s| (&s.simplex, s.value)).collect();
        if index.len() != self.simplices.len() {
            return Err(Error::MalformedComplex("duplicate simplex".into()));
        }
        for s in &self.simplices {
            if !(s.value >= 0.0) {
                return Err(Error::MalformedComplex(format!(
                    "simplex {} has invalid value {}",
                    s.simplex, s.value
                )));
            }
            for face in s.simplex.facets() {
                match index.get(&face) {
                    None => {
                        return Err(Error::MalformedComplex(format!(
                            "face {face} of {} is missing",
                            s.simplex
                        )))
                    }
                    Some(&v) if v > s.value => {
                        return Err(Error::MalformedComplex(format!(
                            "face {face} enters at {v} after coface {} at {}",
                            s.simplex, s.value
                        )))
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }
}

/// Half the distance between two points; arguments in index order so the
/// same pair always yields the same float.
pub(crate) fn half_distance(p: [f64; 2], q: [f64; 2]) -> f64 {
    0.5 * (q[0] - p[0]).hypot(q[1] - p[1])
}

/// Circumcenter and circumradius of three points, computed relative to the
/// first point. Callers pass the points in increasing index order.
pub(crate) fn circumcircle(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> ([f64; 2], f64) {
    let (bx, by) = (b[0] - a[0], b[1] - a[1]);
    let (cx, cy) = (c[0] - a[0], c[1] - a[1]);
    let d = 2.0 * (bx * cy - by * cx);
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    let ux = (cy * b2 - by * c2) / d;
    let uy = (bx * c2 - cx * b2) / d;
    ([a[0] + ux, a[1] + uy], ux.hypot(uy))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn facets_of_triangle() {
        let t = Simplex::triangle(4, 1, 7);
        assert_eq!(t.vertices(), &[1, 4, 7]);
        let f: Vec<_> = t.facets().collect();
        assert_eq!(f, vec![Simplex::edge(4, 7), Simplex::edge(1, 7), Simplex::edge(1, 4)]);
        assert_eq!(Simplex::vertex(3).facets().count(), 0);
    }

    #[test]
    fn circumcircle_of_right_triangle() {
        let (c, r) = circumcircle([0.0, 0.0], [2.0, 0.0], [0.0, 2.0]);
        assert!((c[0] - 1.0).abs() < 1e-15 && (c[1] - 1.0).abs() < 1e-15);
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn validation_catches_missing_face_and_order() {
        let mut k = FilteredComplex::new(ComplexKind::Rips, 1);
        k.push(Simplex::vertex(0), 0.0);
        k.push(Simplex::edge(0, 1), 1.0);
        assert!(k.validate().is_err());
        k.push(Simplex::vertex(1), 2.0);
        assert!(k.validate().is_err());
        k.simplices[2].value = 0.0;
        assert!(k.validate().is_ok());
    }
}
