//! Incremental planar Delaunay triangulation.
//!
//! Bowyer–Watson insertion over a triangulation closed by ghost triangles
//! (one per hull edge, sharing a vertex at infinity). Orientation and
//! in-circle tests use adaptive-precision predicates, so every decision is
//! exact for the given doubles. A triangle conflicts with a new point only if
//! the point lies *strictly* inside its circumcircle; cocircular ties are
//! therefore resolved by insertion order, which is a fixed function of the
//! input (biased randomized rounds with a constant seed, Hilbert-sorted
//! within each round). The output is bit-identical across runs.
//!
//! Inputs whose points are all collinear have no triangles; the result is
//! the path through the points in order along the line.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use robust::{incircle, orient2d, Coord};

use crate::metric::PointCloud;

const NONE: u32 = u32::MAX;
const INF: u32 = u32::MAX;
const ORDER_SEED: u64 = 0x5eed_de1a_0a1f_a000;

/// An edge of a triangulation with up to two incident triangles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TriEdge {
    /// Endpoints, smaller index first.
    pub vertices: [u32; 2],
    /// Indices into [`Triangulation::triangles`]; `u32::MAX` marks a hull side.
    pub triangles: [u32; 2],
    /// Vertex of each incident triangle opposite this edge; `u32::MAX` when absent.
    pub opposite: [u32; 2],
}

impl TriEdge {
    pub fn incident_triangles(&self) -> impl Iterator<Item = u32> + '_ {
        self.triangles.iter().copied().filter(|&t| t != NONE)
    }

    pub fn opposite_vertices(&self) -> impl Iterator<Item = u32> + '_ {
        self.opposite.iter().copied().filter(|&v| v != NONE)
    }
}

/// A Delaunay triangulation without filtration values.
#[derive(Debug, Clone, PartialEq)]
pub struct Triangulation {
    pub points: Vec<[f64; 2]>,
    /// Counterclockwise vertex triples.
    pub triangles: Vec<[u32; 3]>,
    pub edges: Vec<TriEdge>,
}

impl Triangulation {
    pub fn num_points(&self) -> usize {
        self.points.len()
    }
}

#[derive(Debug, Clone, Copy)]
struct Tri {
    v: [u32; 3],
    /// `n[i]` is the triangle across the edge opposite `v[i]`.
    n: [u32; 3],
    alive: bool,
}

impl Tri {
    fn is_ghost(&self) -> bool {
        self.v[2] == INF
    }

    fn slot_of(&self, vertex: u32) -> usize {
        self.v.iter().position(|&x| x == vertex).expect("vertex in triangle")
    }
}

struct Builder<'a> {
    pts: &'a [[f64; 2]],
    tris: Vec<Tri>,
    free: Vec<u32>,
    last: u32,
    walk_state: u32,
    // scratch
    cavity: Vec<u32>,
    stack: Vec<u32>,
    boundary: Vec<(u32, u32, u32, usize)>,
    mark: Vec<u32>,
    epoch: u32,
    starts: Vec<(u32, u32)>,
}

fn coord(p: [f64; 2]) -> Coord<f64> {
    Coord { x: p[0], y: p[1] }
}

impl<'a> Builder<'a> {
    fn orient(&self, a: u32, b: u32, c: u32) -> f64 {
        orient2d(
            coord(self.pts[a as usize]),
            coord(self.pts[b as usize]),
            coord(self.pts[c as usize]),
        )
    }

    fn in_conflict(&self, t: u32, p: u32) -> bool {
        let tri = &self.tris[t as usize];
        let [a, b, c] = tri.v;
        if c == INF {
            let o = self.orient(a, b, p);
            if o > 0.0 {
                return true;
            }
            if o < 0.0 {
                return false;
            }
            // collinear with the hull edge: conflict iff strictly inside the segment
            let (pa, pb, pp) = (self.pts[a as usize], self.pts[b as usize], self.pts[p as usize]);
            let d1 = (pp[0] - pa[0]) * (pb[0] - pa[0]) + (pp[1] - pa[1]) * (pb[1] - pa[1]);
            let d2 = (pp[0] - pb[0]) * (pa[0] - pb[0]) + (pp[1] - pb[1]) * (pa[1] - pb[1]);
            return d1 > 0.0 && d2 > 0.0;
        }
        incircle(
            coord(self.pts[a as usize]),
            coord(self.pts[b as usize]),
            coord(self.pts[c as usize]),
            coord(self.pts[p as usize]),
        ) > 0.0
    }

    fn alloc(&mut self, tri: Tri) -> u32 {
        if let Some(i) = self.free.pop() {
            self.tris[i as usize] = tri;
            i
        } else {
            self.tris.push(tri);
            self.mark.push(0);
            (self.tris.len() - 1) as u32
        }
    }

    fn init(&mut self, a: u32, b: u32, c: u32) {
        let (b, c) = if self.orient(a, b, c) > 0.0 { (b, c) } else { (c, b) };
        let t = |v, n| Tri { v, n, alive: true };
        // 0: real, 1: ghost on b-c, 2: ghost on c-a, 3: ghost on a-b
        self.tris.clear();
        self.mark.clear();
        self.tris.push(t([a, b, c], [1, 2, 3]));
        self.tris.push(t([c, b, INF], [3, 2, 0]));
        self.tris.push(t([a, c, INF], [1, 3, 0]));
        self.tris.push(t([b, a, INF], [2, 1, 0]));
        self.mark.resize(4, 0);
        self.last = 0;
    }

    fn next_rand(&mut self) -> u32 {
        // xorshift32; only steers the walk, never the result
        let mut x = self.walk_state;
        x ^= x << 13;
        x ^= x >> 17;
        x ^= x << 5;
        self.walk_state = x;
        x
    }

    /// Finds a triangle whose circumdisk strictly contains `p`.
    fn locate(&mut self, p: u32) -> u32 {
        let mut t = self.last;
        if !self.tris[t as usize].alive {
            t = self.tris.iter().position(|x| x.alive).expect("live triangle") as u32;
        }
        if self.tris[t as usize].is_ghost() {
            t = self.tris[t as usize].n[2];
        }
        let cap = 4 * self.tris.len() + 64;
        for _ in 0..cap {
            let tri = self.tris[t as usize];
            if tri.is_ghost() {
                return t;
            }
            let start = (self.next_rand() % 3) as usize;
            let mut moved = false;
            for k in 0..3 {
                let i = (start + k) % 3;
                let a = tri.v[(i + 1) % 3];
                let b = tri.v[(i + 2) % 3];
                if self.orient(a, b, p) < 0.0 {
                    t = tri.n[i];
                    moved = true;
                    break;
                }
            }
            if !moved {
                return t;
            }
        }
        // walk did not settle; fall back to a scan
        (0..self.tris.len() as u32)
            .find(|&i| self.tris[i as usize].alive && self.in_conflict(i, p))
            .expect("some triangle conflicts with a new point")
    }

    fn insert(&mut self, p: u32) {
        let t0 = self.locate(p);
        debug_assert!(self.in_conflict(t0, p));
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.mark.iter_mut().for_each(|m| *m = 0);
            self.epoch = 1;
        }
        let epoch = self.epoch;
        self.cavity.clear();
        self.boundary.clear();
        self.stack.clear();
        self.stack.push(t0);
        self.mark[t0 as usize] = epoch;
        // mark values: epoch = in cavity, epoch ^ 0x8000_0000 = tested and outside
        let outside = epoch ^ 0x8000_0000;
        while let Some(t) = self.stack.pop() {
            self.cavity.push(t);
            let tri = self.tris[t as usize];
            for i in 0..3 {
                let nb = tri.n[i];
                let m = self.mark[nb as usize];
                if m == epoch {
                    continue;
                }
                if m != outside && self.in_conflict(nb, p) {
                    self.mark[nb as usize] = epoch;
                    self.stack.push(nb);
                } else {
                    self.mark[nb as usize] = outside;
                    let x = tri.v[(i + 1) % 3];
                    let y = tri.v[(i + 2) % 3];
                    let back = self.tris[nb as usize]
                        .n
                        .iter()
                        .position(|&q| q == t)
                        .expect("adjacency is symmetric");
                    self.boundary.push((x, y, nb, back));
                }
            }
        }
        for &t in &self.cavity {
            self.tris[t as usize].alive = false;
            self.free.push(t);
        }
        self.starts.clear();
        let mut created = Vec::with_capacity(self.boundary.len());
        for k in 0..self.boundary.len() {
            let (x, y, nb, back) = self.boundary[k];
            let v = if x == INF {
                [y, p, INF]
            } else if y == INF {
                [p, x, INF]
            } else {
                [x, y, p]
            };
            let idx = self.alloc(Tri {
                v,
                n: [NONE; 3],
                alive: true,
            });
            let slot_p = self.tris[idx as usize].slot_of(p);
            self.tris[idx as usize].n[slot_p] = nb;
            self.tris[nb as usize].n[back] = idx;
            self.starts.push((x, idx));
            created.push((idx, x, y));
        }
        for &(idx, x, y) in &created {
            let by_start = self.find_start(y);
            let by_end = self.find_end(x);
            let tri = &mut self.tris[idx as usize];
            let sx = tri.slot_of(x);
            let sy = tri.slot_of(y);
            tri.n[sx] = by_start;
            tri.n[sy] = by_end;
        }
        self.last = created
            .iter()
            .map(|c| c.0)
            .find(|&i| !self.tris[i as usize].is_ghost())
            .unwrap_or(created[0].0);
    }

    fn find_start(&self, v: u32) -> u32 {
        self.starts
            .iter()
            .find(|s| s.0 == v)
            .map(|s| s.1)
            .expect("cavity boundary is a closed cycle")
    }

    fn find_end(&self, v: u32) -> u32 {
        // the triangle whose boundary edge ends at v
        self.boundary
            .iter()
            .position(|b| b.1 == v)
            .map(|k| self.starts[k].1)
            .expect("cavity boundary is a closed cycle")
    }
}

/// Delaunay triangulation of a planar cloud (1D clouds are embedded on the x-axis).
pub fn delaunay_2d(cloud: &PointCloud) -> Triangulation {
    let points: Vec<[f64; 2]> = (0..cloud.len()).map(|i| cloud.xy(i)).collect();
    triangulate(points)
}

pub(crate) fn triangulate(points: Vec<[f64; 2]>) -> Triangulation {
    let n = points.len();
    let order = insertion_order(&points);
    let seed = find_seed_triangle(&points, &order);
    let Some((s0, s1, s2)) = seed else {
        return collinear_path(points);
    };
    let mut b = Builder {
        pts: &points,
        tris: Vec::with_capacity(2 * n + 8),
        free: Vec::new(),
        last: 0,
        walk_state: 0x9e37_79b9,
        cavity: Vec::new(),
        stack: Vec::new(),
        boundary: Vec::new(),
        mark: Vec::with_capacity(2 * n + 8),
        epoch: 0,
        starts: Vec::new(),
    };
    b.init(order[s0], order[s1], order[s2]);
    for (k, &p) in order.iter().enumerate() {
        if k != s0 && k != s1 && k != s2 {
            b.insert(p);
        }
    }
    let tris = b.tris;
    finish(points, &tris)
}

fn finish(points: Vec<[f64; 2]>, tris: &[Tri]) -> Triangulation {
    let mut id = vec![NONE; tris.len()];
    let mut triangles = Vec::new();
    for (i, t) in tris.iter().enumerate() {
        if t.alive && !t.is_ghost() {
            id[i] = triangles.len() as u32;
            triangles.push(t.v);
        }
    }
    let mut edges = Vec::with_capacity(triangles.len() * 3 / 2 + 4);
    for (i, t) in tris.iter().enumerate() {
        if !t.alive || t.is_ghost() {
            continue;
        }
        for s in 0..3 {
            let nb = t.n[s] as usize;
            let nb_ghost = tris[nb].is_ghost();
            if !nb_ghost && nb < i {
                continue;
            }
            let a = t.v[(s + 1) % 3];
            let c = t.v[(s + 2) % 3];
            let (other_tri, other_opp) = if nb_ghost {
                (NONE, NONE)
            } else {
                let back = tris[nb].n.iter().position(|&q| q as usize == i).unwrap();
                (id[nb], tris[nb].v[back])
            };
            edges.push(TriEdge {
                vertices: [a.min(c), a.max(c)],
                triangles: [id[i], other_tri],
                opposite: [t.v[s], other_opp],
            });
        }
    }
    Triangulation {
        points,
        triangles,
        edges,
    }
}

fn collinear_path(points: Vec<[f64; 2]>) -> Triangulation {
    let mut idx: Vec<u32> = (0..points.len() as u32).collect();
    // on a line, lexicographic order is the order along the line
    idx.sort_by(|&a, &b| {
        let (p, q) = (points[a as usize], points[b as usize]);
        p[0].total_cmp(&q[0]).then(p[1].total_cmp(&q[1]))
    });
    let edges = idx
        .windows(2)
        .map(|w| TriEdge {
            vertices: [w[0].min(w[1]), w[0].max(w[1])],
            triangles: [NONE; 2],
            opposite: [NONE; 2],
        })
        .collect();
    Triangulation {
        points,
        triangles: Vec::new(),
        edges,
    }
}

/// Positions in `order` of three non-collinear points, or `None` if all are collinear.
fn find_seed_triangle(points: &[[f64; 2]], order: &[u32]) -> Option<(usize, usize, usize)> {
    if order.len() < 3 {
        return None;
    }
    let p = |k: usize| coord(points[order[k] as usize]);
    let (a, b) = (0, 1);
    (2..order.len())
        .find(|&c| orient2d(p(a), p(b), p(c)) != 0.0)
        .map(|c| (a, b, c))
}

/// Biased randomized insertion order: shuffled, split into doubling rounds,
/// Hilbert-sorted within each round.
fn insertion_order(points: &[[f64; 2]]) -> Vec<u32> {
    let n = points.len();
    let mut idx: Vec<u32> = (0..n as u32).collect();
    if n < 3 {
        return idx;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(ORDER_SEED);
    idx.shuffle(&mut rng);
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in points {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(f64::MIN_POSITIVE);
    let key = |i: u32| {
        let p = points[i as usize];
        let side = (1u32 << 16) - 1;
        let gx = (((p[0] - lo[0]) / span) * side as f64) as u32;
        let gy = (((p[1] - lo[1]) / span) * side as f64) as u32;
        hilbert_index(gx.min(side), gy.min(side))
    };
    let mut end = n;
    let mut rounds = Vec::new();
    while end > 64 {
        let start = end / 2;
        rounds.push((start, end));
        end = start;
    }
    rounds.push((0, end));
    for (s, e) in rounds {
        idx[s..e].sort_by_key(|&i| (key(i), i));
    }
    idx
}

/// Position of (x, y) along a Hilbert curve over a 2^16 × 2^16 grid.
fn hilbert_index(mut x: u32, mut y: u32) -> u64 {
    let mut d: u64 = 0;
    let mut s: u32 = 1 << 15;
    while s > 0 {
        let rx = u32::from(x & s > 0);
        let ry = u32::from(y & s > 0);
        d += u64::from(s) * u64::from(s) * u64::from((3 * rx) ^ ry);
        if ry == 0 {
            if rx == 1 {
                x = (s << 1).wrapping_sub(1).wrapping_sub(x) & 0xffff;
                y = (s << 1).wrapping_sub(1).wrapping_sub(y) & 0xffff;
            }
            std::mem::swap(&mut x, &mut y);
        }
        s >>= 1;
    }
    d
}
