use smallvec::SmallVec;

use super::{ComplexKind, FilteredComplex, Simplex};
use crate::error::{Error, Result};
use crate::metric::DistanceMatrix;

/// Largest cloud for which the full Vietoris–Rips complex is built.
pub const RIPS_FULL_MAX_POINTS: usize = 20;

/// Upper bound on the number of simplices any brute-force builder emits.
pub(crate) const MAX_BRUTE_FORCE_SIMPLICES: u64 = 1 << 21;

/// Number of simplices of dimension at most `max_dim` on `n` vertices.
pub(crate) fn simplex_count(n: usize, max_dim: usize) -> u64 {
    let mut total: u64 = 0;
    let mut binom: u64 = 1;
    for k in 1..=(max_dim + 1).min(n) {
        binom = binom * (n - k + 1) as u64 / k as u64;
        total = total.saturating_add(binom);
    }
    total
}

/// Calls `f` on every vertex subset of size `1..=max_size`, in lexicographic
/// order within each size, together with the value `grow` assigns to it.
/// `grow(prefix_value, prefix, new_vertex)` extends a subset by one vertex.
pub(crate) fn for_each_subset<G, F>(n: usize, max_size: usize, grow: G, mut f: F)
where
    G: Fn(f64, &[u32], u32) -> f64,
    F: FnMut(&[u32], f64),
{
    fn rec<G, F>(
        n: usize,
        max_size: usize,
        start: u32,
        cur: &mut SmallVec<[u32; 8]>,
        value: f64,
        grow: &G,
        f: &mut F,
    ) where
        G: Fn(f64, &[u32], u32) -> f64,
        F: FnMut(&[u32], f64),
    {
        for v in start..n as u32 {
            let next = grow(value, cur, v);
            cur.push(v);
            f(cur, next);
            if cur.len() < max_size {
                rec(n, max_size, v + 1, cur, next, grow, f);
            }
            cur.pop();
        }
    }
    let mut cur = SmallVec::new();
    rec(n, max_size, 0, &mut cur, 0.0, &grow, &mut f);
}

/// Vietoris–Rips complex: a simplex enters at the largest distance between
/// two of its vertices (its diameter).
pub fn build_rips(d: &DistanceMatrix, max_dim: usize) -> Result<FilteredComplex> {
    let n = d.len();
    if max_dim + 1 >= n && n > RIPS_FULL_MAX_POINTS {
        return Err(Error::TooLarge {
            size: n,
            limit: RIPS_FULL_MAX_POINTS,
            what: "full Vietoris-Rips complex",
        });
    }
    let count = simplex_count(n, max_dim);
    if count > MAX_BRUTE_FORCE_SIMPLICES {
        return Err(Error::TooLarge {
            size: count as usize,
            limit: MAX_BRUTE_FORCE_SIMPLICES as usize,
            what: "Vietoris-Rips simplices",
        });
    }
    let mut k = FilteredComplex::new(ComplexKind::Rips, 0);
    k.simplices.reserve(count as usize);
    for_each_subset(
        n,
        max_dim + 1,
        |value, prefix, v| {
            prefix
                .iter()
                .map(|&u| d.get(u as usize, v as usize))
                .fold(value, f64::max)
        },
        |s, value| k.push(Simplex::new(s), value),
    );
    Ok(k)
}
