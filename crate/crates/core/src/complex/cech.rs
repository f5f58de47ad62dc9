use robust::{orient2d, Coord};

use super::rips::{for_each_subset, simplex_count, MAX_BRUTE_FORCE_SIMPLICES};
use super::{circumcircle, half_distance, ComplexKind, FilteredComplex, Simplex};
use crate::error::{Error, Result};
use crate::metric::PointCloud;

/// Largest cloud accepted by the brute-force Čech builder.
pub const CECH_MAX_POINTS: usize = 12;

const CONTAIN_TOL: f64 = 1e-12;

/// Radius of the smallest disk containing the given points.
///
/// Exhaustive over two- and three-point supports; `indices` must be sorted
/// so that shared supports produce identical floats across simplices.
pub fn min_enclosing_radius(points: &[[f64; 2]], indices: &[u32]) -> f64 {
    let p = |i: u32| points[i as usize];
    if indices.len() < 2 {
        return 0.0;
    }
    let contains = |c: [f64; 2], r: f64| {
        indices
            .iter()
            .all(|&k| (p(k)[0] - c[0]).hypot(p(k)[1] - c[1]) <= r + CONTAIN_TOL * r.max(1.0))
    };
    let mut best = f64::INFINITY;
    for (a, &i) in indices.iter().enumerate() {
        for (b, &j) in indices.iter().enumerate().skip(a + 1) {
            let (pi, pj) = (p(i), p(j));
            let r = half_distance(pi, pj);
            if r < best && contains([0.5 * (pi[0] + pj[0]), 0.5 * (pi[1] + pj[1])], r) {
                best = r;
            }
            for &k in &indices[b + 1..] {
                let pk = p(k);
                let o = orient2d(
                    Coord { x: pi[0], y: pi[1] },
                    Coord { x: pj[0], y: pj[1] },
                    Coord { x: pk[0], y: pk[1] },
                );
                if o == 0.0 {
                    continue;
                }
                let (c, r) = circumcircle(pi, pj, pk);
                if r < best && r.is_finite() && contains(c, r) {
                    best = r;
                }
            }
        }
    }
    best
}

/// Čech complex: a simplex enters at the radius of the smallest ball
/// enclosing its vertices.
pub fn build_cech(cloud: &PointCloud, max_dim: usize) -> Result<FilteredComplex> {
    let n = cloud.len();
    if n > CECH_MAX_POINTS {
        return Err(Error::TooLarge {
            size: n,
            limit: CECH_MAX_POINTS,
            what: "brute-force Cech complex",
        });
    }
    debug_assert!(simplex_count(n, max_dim) <= MAX_BRUTE_FORCE_SIMPLICES);
    let pts: Vec<[f64; 2]> = (0..n).map(|i| cloud.xy(i)).collect();
    let mut k = FilteredComplex::new(ComplexKind::Cech, cloud.dim());
    for_each_subset(n, max_dim + 1, |_, _, _| 0.0, |s, _| {
        k.push(Simplex::new(s), min_enclosing_radius(&pts, s));
    });
    Ok(k)
}
