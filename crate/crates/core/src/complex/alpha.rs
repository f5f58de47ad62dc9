use robust::{incircle, Coord};
use smallvec::smallvec;

use super::delaunay::{delaunay_2d, Triangulation};
use super::{circumcircle, half_distance, ComplexKind, FilteredComplex, Simplex};
use crate::error::{Error, Result};
use crate::metric::PointCloud;

/// Alpha complex of points on the line: consecutive points are joined by an
/// edge entering at half their gap.
pub fn build_alpha_1d(cloud: &PointCloud) -> Result<FilteredComplex> {
    if cloud.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: cloud.dim(),
        });
    }
    let xs = cloud.coords();
    let mut order: Vec<u32> = (0..xs.len() as u32).collect();
    order.sort_by(|&a, &b| xs[a as usize].total_cmp(&xs[b as usize]));
    let mut k = FilteredComplex::new(ComplexKind::Alpha, 1);
    k.simplices.reserve(2 * xs.len());
    for v in 0..xs.len() as u32 {
        k.push(Simplex::vertex(v), 0.0);
    }
    for w in order.windows(2) {
        let gap = xs[w[1] as usize] - xs[w[0] as usize];
        k.push(Simplex::edge(w[0], w[1]), 0.5 * gap);
    }
    Ok(k)
}

/// Relative gap below which a half edge length counts as a circumradius.
const DIAMETER_SLACK: f64 = 1e-12;

fn circumradii(tr: &Triangulation) -> Vec<f64> {
    let pts = &tr.points;
    tr.triangles
        .iter()
        .map(|t| {
            let mut s = *t;
            s.sort_unstable();
            circumcircle(pts[s[0] as usize], pts[s[1] as usize], pts[s[2] as usize]).1
        })
        .collect()
}

/// Triangles sharing an exactly cocircular edge (robust in-circle test is
/// zero) have equal circumradii in exact arithmetic. Giving each such group
/// the largest computed value keeps rounding from splitting one death into
/// several near-empty bars.
fn share_cocircular_radii(tr: &Triangulation, mut radii: Vec<f64>) -> Vec<f64> {
    let coord = |v: u32| {
        let p = tr.points[v as usize];
        Coord { x: p[0], y: p[1] }
    };
    let mut parent: Vec<u32> = (0..radii.len() as u32).collect();
    fn find(parent: &mut [u32], mut x: u32) -> u32 {
        while parent[x as usize] != x {
            parent[x as usize] = parent[parent[x as usize] as usize];
            x = parent[x as usize];
        }
        x
    }
    let mut any = false;
    for e in &tr.edges {
        let [t0, t1] = e.triangles;
        if t1 == u32::MAX || t0 == u32::MAX {
            continue;
        }
        let [a, b, c] = tr.triangles[t0 as usize];
        if incircle(coord(a), coord(b), coord(c), coord(e.opposite[1])) == 0.0 {
            let (r0, r1) = (find(&mut parent, t0), find(&mut parent, t1));
            parent[r0.max(r1) as usize] = r0.min(r1);
            any = true;
        }
    }
    if !any {
        return radii;
    }
    let mut group_max = vec![f64::NEG_INFINITY; radii.len()];
    for t in 0..radii.len() as u32 {
        let r = find(&mut parent, t) as usize;
        group_max[r] = group_max[r].max(radii[t as usize]);
    }
    for t in 0..radii.len() as u32 {
        radii[t as usize] = group_max[find(&mut parent, t) as usize];
    }
    radii
}

/// Assigns alpha filtration radii to a Delaunay triangulation.
///
/// Triangles enter at their circumradius. An edge enters at half its length
/// when its diametric disk is empty, and otherwise together with the first
/// incident triangle whose circumdisk is hit.
pub fn alpha_filtration_2d(tr: &Triangulation) -> FilteredComplex {
    let pts = &tr.points;
    let mut k = FilteredComplex::new(ComplexKind::Alpha, 2);
    k.simplices
        .reserve(pts.len() + tr.edges.len() + tr.triangles.len());
    for v in 0..pts.len() as u32 {
        k.push(Simplex::vertex(v), 0.0);
    }
    let tri_values = share_cocircular_radii(tr, circumradii(tr));
    for e in &tr.edges {
        let [a, b] = e.vertices;
        let (pa, pb) = (pts[a as usize], pts[b as usize]);
        let attached = e.opposite_vertices().any(|o| {
            let po = pts[o as usize];
            (pa[0] - po[0]) * (pb[0] - po[0]) + (pa[1] - po[1]) * (pb[1] - po[1]) < 0.0
        });
        let incident_min = e
            .incident_triangles()
            .map(|t| tri_values[t as usize])
            .fold(f64::INFINITY, f64::min);
        let half = half_distance(pa, pb);
        // A diameter of an incident circumcircle enters with that triangle; the
        // relative slack absorbs rounding so no zero-length loop is born.
        let value = if attached || half >= incident_min * (1.0 - DIAMETER_SLACK) {
            incident_min
        } else {
            half
        };
        k.push(Simplex::from_sorted(smallvec![a, b]), value);
    }
    for (t, &r) in tr.triangles.iter().zip(&tri_values) {
        k.push(Simplex::triangle(t[0], t[1], t[2]), r);
    }
    k
}

/// The alpha complex of a cloud in R^1 or R^2.
pub fn alpha_complex(cloud: &PointCloud) -> Result<FilteredComplex> {
    match cloud.dim() {
        1 => build_alpha_1d(cloud),
        2 => Ok(alpha_filtration_2d(&delaunay_2d(cloud))),
        d => Err(Error::UnsupportedDimension(d)),
    }
}
