//! Persistent homology with Z/2 coefficients.
//!
//! Simplices are totally ordered by (filtration value, dimension, vertex
//! tuple). Columns are reduced from the top dimension down with clearing:
//! once a column of dimension d has pivot `i`, simplex `i` is known positive
//! and its own column is skipped. Degree-0 pairs come from a union-find pass
//! over the edges (elder rule), which yields the same pairing as reducing the
//! edge columns.
//!
//! For planar alpha complexes whose final stage is a triangulated disk,
//! degree-1 pairs come from the dual graph instead: triangles plus the outer
//! face are merged across edges in reverse filtration order, and each merge
//! pairs the edge with the youngest triangle of the absorbed region. This is
//! the same pairing the matrix reduction produces, in near-linear time.

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::complex::{ComplexKind, FilteredComplex, Simplex};
use crate::error::{Error, Result};

const NONE: u32 = u32::MAX;

/// A bar `[birth, death)` in homological degree `degree`; `death` may be +∞.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub degree: usize,
    pub birth: f64,
    pub death: f64,
}

impl Interval {
    pub fn is_infinite(&self) -> bool {
        self.death == f64::INFINITY
    }

    pub fn contains(&self, eps: f64) -> bool {
        self.birth <= eps && eps < self.death
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.degree
            .cmp(&other.degree)
            .then(self.birth.total_cmp(&other.birth))
            .then(self.death.total_cmp(&other.death))
    }
}

/// Multiset of intervals, kept sorted by (degree, birth, death).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Barcode {
    intervals: Vec<Interval>,
}

impl Barcode {
    /// Sorts the intervals and drops empty ones (`birth >= death`).
    pub fn new(mut intervals: Vec<Interval>) -> Self {
        intervals.retain(|i| i.birth < i.death);
        intervals.sort_by(Interval::canonical_cmp);
        Barcode { intervals }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.intervals.last().map(|i| i.degree)
    }

    pub fn in_degree(&self, degree: usize) -> impl Iterator<Item = &Interval> + '_ {
        self.intervals.iter().filter(move |i| i.degree == degree)
    }

    /// Betti numbers at `eps`: bars with `birth <= eps < death`, per degree.
    pub fn betti_at(&self, eps: f64) -> Vec<usize> {
        let mut betti = vec![0; self.max_degree().map_or(1, |d| d + 1)];
        for i in &self.intervals {
            if i.contains(eps) {
                betti[i.degree] += 1;
            }
        }
        betti
    }

    /// The barcode of the filtration with every value multiplied by `t`.
    pub fn scaled(&self, t: f64) -> Self {
        Barcode::new(
            self.intervals
                .iter()
                .map(|i| Interval {
                    degree: i.degree,
                    birth: i.birth * t,
                    death: i.death * t,
                })
                .collect(),
        )
    }

    /// Multiset equality with endpoint tolerance `tol`. Bars no longer than
    /// `tol` are ignored on both sides, since rounding can create or remove
    /// them.
    pub fn approx_eq(&self, other: &Barcode, tol: f64) -> bool {
        let close = |a: f64, b: f64| a == b || (a - b).abs() <= tol;
        let keep = |b: &Barcode| -> Vec<Interval> {
            b.intervals
                .iter()
                .copied()
                .filter(|i| i.is_infinite() || i.death - i.birth > tol)
                .collect()
        };
        let (a, b) = (keep(self), keep(other));
        if a.len() != b.len() {
            return false;
        }
        let mut used = vec![false; b.len()];
        a.iter().all(|x| {
            let start = b.partition_point(|y| {
                y.degree < x.degree || (y.degree == x.degree && y.birth < x.birth - tol)
            });
            let found = b[start..]
                .iter()
                .enumerate()
                .take_while(|(_, y)| y.degree == x.degree && y.birth <= x.birth + tol)
                .find(|&(k, y)| !used[start + k] && close(x.death, y.death));
            match found {
                Some((k, _)) => {
                    used[start + k] = true;
                    true
                }
                None => false,
            }
        })
    }
}

pub fn betti_at(b: &Barcode, eps: f64) -> Vec<usize> {
    b.betti_at(eps)
}

/// Order among simplices with equal value and dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    #[default]
    Lexicographic,
    ReverseLexicographic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum H0Method {
    #[default]
    UnionFind,
    Matrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum H1Method {
    /// Dual union-find when the complex qualifies, matrix reduction otherwise.
    #[default]
    Auto,
    Matrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PersistenceOptions {
    pub tie_break: TieBreak,
    pub h0: H0Method,
    pub h1: H1Method,
}

pub fn compute_persistence(k: &FilteredComplex) -> Result<Barcode> {
    compute_persistence_with(k, PersistenceOptions::default())
}

struct Boundaries {
    start: Vec<usize>,
    entries: Vec<u32>,
}

impl Boundaries {
    fn of(&self, j: usize) -> &[u32] {
        &self.entries[self.start[j]..self.start[j + 1]]
    }
}

pub fn compute_persistence_with(k: &FilteredComplex, opts: PersistenceOptions) -> Result<Barcode> {
    let n = k.simplices.len();
    if n == 0 {
        return Ok(Barcode::default());
    }
    if n >= NONE as usize {
        return Err(Error::TooLarge {
            size: n,
            limit: NONE as usize - 1,
            what: "simplices in one complex",
        });
    }
    let simplices = &k.simplices;
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_unstable_by(|&a, &b| {
        let (sa, sb) = (&simplices[a as usize], &simplices[b as usize]);
        sa.value
            .total_cmp(&sb.value)
            .then(sa.simplex.dim().cmp(&sb.simplex.dim()))
            .then_with(|| match opts.tie_break {
                TieBreak::Lexicographic => sa.simplex.cmp(&sb.simplex),
                TieBreak::ReverseLexicographic => sb.simplex.cmp(&sa.simplex),
            })
    });
    let value: Vec<f64> = order.iter().map(|&i| simplices[i as usize].value).collect();
    let dim: Vec<u8> = order
        .iter()
        .map(|&i| simplices[i as usize].simplex.dim() as u8)
        .collect();
    if let Some(v) = value.iter().find(|v| !(**v >= 0.0)) {
        return Err(Error::MalformedComplex(format!("invalid filtration value {v}")));
    }
    let position: HashMap<&Simplex, u32> = order
        .iter()
        .enumerate()
        .map(|(pos, &i)| (&simplices[i as usize].simplex, pos as u32))
        .collect();
    if position.len() != n {
        return Err(Error::MalformedComplex("duplicate simplex".into()));
    }
    let mut bnd = Boundaries {
        start: Vec::with_capacity(n + 1),
        entries: Vec::with_capacity(3 * n),
    };
    bnd.start.push(0);
    for (j, &i) in order.iter().enumerate() {
        let s = &simplices[i as usize].simplex;
        let from = bnd.entries.len();
        for face in s.facets() {
            let Some(&p) = position.get(&face) else {
                return Err(Error::MalformedComplex(format!("face {face} of {s} is missing")));
            };
            if p as usize >= j {
                return Err(Error::MalformedComplex(format!(
                    "face {face} enters at {} after coface {s} at {}",
                    value[p as usize], value[j]
                )));
            }
            bnd.entries.push(p);
        }
        bnd.entries[from..].sort_unstable();
        bnd.start.push(bnd.entries.len());
    }
    drop(position);

    let max_dim = dim.iter().copied().max().unwrap_or(0);
    let mut low_of = vec![NONE; n];
    let mut killer_of = vec![NONE; n];
    let mut cleared = vec![false; n];
    let mut reduced: Vec<Vec<u32>> = vec![Vec::new(); n];
    let dual_done = max_dim == 2
        && opts.h1 == H1Method::Auto
        && k.kind == ComplexKind::Alpha
        && k.ambient_dim == 2
        && planar_dual_pairs(&dim, &bnd, &mut low_of, &mut killer_of, &mut cleared);
    for d in (1..=max_dim).rev() {
        if d == 2 && dual_done {
            continue;
        }
        if d == 1 && opts.h0 == H0Method::UnionFind {
            union_find_edges(&dim, &bnd, &cleared, &mut low_of, &mut killer_of);
            continue;
        }
        let mut scratch = Vec::new();
        for j in 0..n {
            if dim[j] != d || cleared[j] {
                continue;
            }
            let mut col = bnd.of(j).to_vec();
            while let Some(&low) = col.last() {
                let other = killer_of[low as usize];
                if other == NONE {
                    break;
                }
                symmetric_difference(&col, &reduced[other as usize], &mut scratch);
                std::mem::swap(&mut col, &mut scratch);
            }
            if let Some(&low) = col.last() {
                low_of[j] = low;
                killer_of[low as usize] = j as u32;
                cleared[low as usize] = true;
                col.shrink_to_fit();
                reduced[j] = col;
            }
        }
    }

    let mut intervals = Vec::new();
    for j in 0..n {
        let low = low_of[j];
        if low != NONE {
            let (birth, death) = (value[low as usize], value[j]);
            if birth < death {
                intervals.push(Interval {
                    degree: dim[low as usize] as usize,
                    birth,
                    death,
                });
            }
        } else if killer_of[j] == NONE {
            intervals.push(Interval {
                degree: dim[j] as usize,
                birth: value[j],
                death: f64::INFINITY,
            });
        }
    }
    Ok(Barcode::new(intervals))
}

fn union_find_edges(
    dim: &[u8],
    bnd: &Boundaries,
    cleared: &[bool],
    low_of: &mut [u32],
    killer_of: &mut [u32],
) {
    let n = dim.len();
    // parent over positions; only vertex positions are used
    let mut parent: Vec<u32> = (0..n as u32).collect();
    for j in 0..n {
        if dim[j] != 1 || cleared[j] {
            continue;
        }
        let b = bnd.of(j);
        let (ru, rv) = (find(&mut parent, b[0]), find(&mut parent, b[1]));
        if ru == rv {
            continue;
        }
        // roots are the oldest vertex of their component; the younger one dies
        let (old, young) = if ru < rv { (ru, rv) } else { (rv, ru) };
        parent[young as usize] = old;
        low_of[j] = young;
        killer_of[young as usize] = j as u32;
    }
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let gp = parent[parent[x as usize] as usize];
        parent[x as usize] = gp;
        x = gp;
    }
    x
}

/// Pairs edges with triangles through the dual graph. Returns false, leaving
/// the outputs untouched, unless the complex is a connected pure pseudo-disk:
/// every edge on at most two triangles and Euler characteristic one.
fn planar_dual_pairs(
    dim: &[u8],
    bnd: &Boundaries,
    low_of: &mut [u32],
    killer_of: &mut [u32],
    cleared: &mut [bool],
) -> bool {
    let n = dim.len();
    let outer = n as u32;
    let mut cofaces = vec![[NONE; 2]; n];
    let mut counts = [0i64; 3];
    let mut parent: Vec<u32> = (0..=outer).collect();
    for j in 0..n {
        counts[dim[j] as usize] += 1;
        match dim[j] {
            1 => {
                let b = bnd.of(j);
                let (ru, rv) = (find(&mut parent, b[0]), find(&mut parent, b[1]));
                parent[ru.max(rv) as usize] = ru.min(rv);
            }
            2 => {
                for &e in bnd.of(j) {
                    let slot = &mut cofaces[e as usize];
                    if slot[0] == NONE {
                        slot[0] = j as u32;
                    } else if slot[1] == NONE {
                        slot[1] = j as u32;
                    } else {
                        return false;
                    }
                }
            }
            _ => {}
        }
    }
    if counts[0] - counts[1] + counts[2] != 1 {
        return false;
    }
    let root = find(&mut parent, (0..n).find(|&j| dim[j] == 0).unwrap() as u32);
    if (0..n).any(|j| dim[j] == 0 && find(&mut parent, j as u32) != root) {
        return false;
    }

    // Dual union-find; a root records its component's eldest node, which in
    // reverse order is the one with the largest position (outer face first).
    for (i, p) in parent.iter_mut().enumerate() {
        *p = i as u32;
    }
    let eldest: Vec<u32> = (0..=outer).collect();
    for j in (0..n).rev() {
        if dim[j] != 1 {
            continue;
        }
        let [a, b] = cofaces[j].map(|t| if t == NONE { outer } else { t });
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            continue;
        }
        let (ea, eb) = (eldest[ra as usize], eldest[rb as usize]);
        let (keep, lose, young) = if ea > eb { (ra, rb, eb) } else { (rb, ra, ea) };
        parent[lose as usize] = keep;
        low_of[young as usize] = j as u32;
        killer_of[j] = young;
        cleared[j] = true;
    }
    true
}

/// Writes the symmetric difference of two sorted lists into `out`.
fn symmetric_difference(a: &[u32], b: &[u32], out: &mut Vec<u32>) {
    out.clear();
    out.reserve(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{alpha_complex, ComplexKind};
    use crate::metric::PointCloud;

    fn triangle_barcode() -> Barcode {
        let c = PointCloud::new(&[[0.0, 0.0], [1.0, 0.0], [0.5, 3f64.sqrt() / 2.0]]).unwrap();
        compute_persistence(&alpha_complex(&c).unwrap()).unwrap()
    }

    #[test]
    fn equilateral_triangle_barcode() {
        let b = triangle_barcode();
        let h0: Vec<_> = b.in_degree(0).collect();
        let h1: Vec<_> = b.in_degree(1).collect();
        assert_eq!(h0.len(), 3);
        assert_eq!(h1.len(), 1);
        assert!(h0.iter().all(|i| i.birth == 0.0));
        assert_eq!(h0.iter().filter(|i| i.is_infinite()).count(), 1);
        assert!(h0
            .iter()
            .filter(|i| !i.is_infinite())
            .all(|i| (i.death - 0.5).abs() < 1e-12));
        assert!((h1[0].birth - 0.5).abs() < 1e-12);
        assert!((h1[0].death - 1.0 / 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn betti_numbers_of_triangle() {
        let b = triangle_barcode();
        assert_eq!(b.betti_at(0.3), vec![3, 0]);
        assert_eq!(b.betti_at(0.55), vec![1, 1]);
        assert_eq!(b.betti_at(0.6), vec![1, 0]);
        assert_eq!(Barcode::default().betti_at(1.0), vec![0]);
    }

    #[test]
    fn single_vertex() {
        let mut k = FilteredComplex::new(ComplexKind::Alpha, 1);
        k.push(Simplex::vertex(0), 0.0);
        let b = compute_persistence(&k).unwrap();
        assert_eq!(
            b.intervals(),
            &[Interval {
                degree: 0,
                birth: 0.0,
                death: f64::INFINITY
            }]
        );
    }

    #[test]
    fn missing_face_is_malformed() {
        let mut k = FilteredComplex::new(ComplexKind::Rips, 1);
        k.push(Simplex::vertex(0), 0.0);
        k.push(Simplex::edge(0, 1), 1.0);
        assert!(matches!(compute_persistence(&k), Err(Error::MalformedComplex(_))));
        let mut k = FilteredComplex::new(ComplexKind::Rips, 1);
        k.push(Simplex::vertex(0), 0.0);
        k.push(Simplex::vertex(1), 2.0);
        k.push(Simplex::edge(0, 1), 1.0);
        assert!(matches!(compute_persistence(&k), Err(Error::MalformedComplex(_))));
    }

    #[test]
    fn hollow_triangle_has_essential_cycle() {
        let mut k = FilteredComplex::new(ComplexKind::Rips, 2);
        for v in 0..3 {
            k.push(Simplex::vertex(v), 0.0);
        }
        k.push(Simplex::edge(0, 1), 1.0);
        k.push(Simplex::edge(1, 2), 2.0);
        k.push(Simplex::edge(0, 2), 3.0);
        let b = compute_persistence(&k).unwrap();
        let h1: Vec<_> = b.in_degree(1).collect();
        assert_eq!(h1.len(), 1);
        assert_eq!(h1[0].birth, 3.0);
        assert!(h1[0].is_infinite());
    }

    fn pairs_match(cloud: &PointCloud) {
        let k = alpha_complex(cloud).unwrap();
        for tie_break in [TieBreak::Lexicographic, TieBreak::ReverseLexicographic] {
            let auto = PersistenceOptions { tie_break, ..Default::default() };
            let matrix = PersistenceOptions { h1: H1Method::Matrix, ..auto };
            assert_eq!(
                compute_persistence_with(&k, auto).unwrap(),
                compute_persistence_with(&k, matrix).unwrap()
            );
        }
    }

    #[test]
    fn dual_pairing_matches_reduction() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for round in 0..40 {
            let n = rng.random_range(3..150);
            let pts: Vec<[f64; 2]> = (0..n)
                .map(|_| {
                    if round % 2 == 0 {
                        [rng.random_range(0..6) as f64, rng.random_range(0..6) as f64]
                    } else {
                        [rng.random(), rng.random()]
                    }
                })
                .collect();
            pairs_match(&PointCloud::new(&pts).unwrap());
        }
        let grid: Vec<[f64; 2]> = (0..100).map(|i| [(i % 10) as f64 / 9.0, (i / 10) as f64 / 9.0]).collect();
        pairs_match(&PointCloud::new(&grid).unwrap());
    }

    #[test]
    fn dual_pairing_requires_a_disk() {
        // triangulated square annulus: outer ring 0..4, inner ring 4..8
        let mut k = FilteredComplex::new(ComplexKind::Alpha, 2);
        for v in 0..8 {
            k.push(Simplex::vertex(v), 0.0);
        }
        for i in 0..4u32 {
            let (o, o1, inner, inner1) = (i, (i + 1) % 4, i + 4, (i + 1) % 4 + 4);
            k.push(Simplex::edge(o, o1), 1.0);
            k.push(Simplex::edge(inner, inner1), 1.0);
            k.push(Simplex::edge(o, inner), 1.0);
            k.push(Simplex::edge(o, inner1), 1.0);
            k.push(Simplex::triangle(o, o1, inner1), 2.0);
            k.push(Simplex::triangle(o, inner, inner1), 2.0);
        }
        let b = compute_persistence(&k).unwrap();
        assert_eq!(b.in_degree(1).filter(|i| i.is_infinite()).count(), 1);
        let matrix = PersistenceOptions { h1: H1Method::Matrix, ..Default::default() };
        assert_eq!(b, compute_persistence_with(&k, matrix).unwrap());
    }

    #[test]
    fn symmetric_difference_merges() {
        let mut out = Vec::new();
        symmetric_difference(&[1, 3, 5, 7], &[3, 4, 7, 9], &mut out);
        assert_eq!(out, vec![1, 4, 5, 9]);
    }
}
