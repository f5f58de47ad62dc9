//! Property checks shared by the property suite and the acceptance run.
#![allow(dead_code)]

use alphamag::complex::{
    alpha_complex, build_alpha_1d, build_cech, build_rips, ComplexKind, FilteredComplex, Simplex,
};
use alphamag::estimator::{estimate_dimension, Window};
use alphamag::magnitude::{similarity_matrix, weighting};
use alphamag::metric::{distance_matrix, hausdorff_distance};
use alphamag::persistence::{compute_persistence_with, PersistenceOptions, TieBreak};
use alphamag::pmag::{alpha_barcode, alpha_magnitude, cech_magnitude, rips_magnitude};
use alphamag::samplers::{sample, SamplerKind, SamplerSpec};
use alphamag::{compute_persistence, PointCloud};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestError, TestRunner};

pub type Check = std::result::Result<(), TestCaseError>;

// ---- strategies ----

/// Points of the unit square on a 1/1000 lattice, so distinct points are at
/// least 1e-3 apart.
pub fn lattice_cloud(min: usize, max: usize) -> impl Strategy<Value = Vec<[f64; 2]>> {
    prop::collection::vec(
        (0..=1000u32, 0..=1000u32).prop_map(|(x, y)| [x as f64 / 1000.0, y as f64 / 1000.0]),
        min..=max,
    )
}

/// Small integer lattice: many collinear and cocircular configurations.
pub fn degenerate_cloud(max: usize) -> impl Strategy<Value = Vec<[f64; 2]>> {
    prop::collection::vec((0..5u32, 0..5u32).prop_map(|(x, y)| [x as f64, y as f64]), 1..=max)
}

pub fn real_cloud(min: usize, max: usize) -> impl Strategy<Value = Vec<[f64; 2]>> {
    prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64).prop_map(|(x, y)| [x, y]), min..=max)
}

pub fn line_points(min: usize, max: usize, len: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..=len, min..=max)
}

fn cloud(pts: &[[f64; 2]]) -> PointCloud {
    PointCloud::new(pts).unwrap()
}

fn line_cloud(xs: &[f64]) -> PointCloud {
    PointCloud::from_flat(1, xs.to_vec()).unwrap()
}

/// A random filtered complex on at most 8 vertices: the downward closure of
/// some generating simplices (up to dimension 3), with values drawn from a
/// small set so that ties are common, then made monotone.
#[derive(Debug, Clone)]
pub struct RandomComplex {
    pub complex: FilteredComplex,
}

pub fn random_complex() -> impl Strategy<Value = RandomComplex> {
    (
        1..=8u32,
        prop::collection::vec(any::<u8>(), 1..8),
        prop::collection::vec(0..4u8, 256),
    )
        .prop_map(|(n, gens, raw)| {
            let full = ((1u16 << n) - 1) as u8;
            let gens: Vec<u8> = gens
                .into_iter()
                .map(|g| g & full)
                .filter(|g| *g != 0 && g.count_ones() <= 4)
                .chain((0..n).map(|v| 1u8 << v))
                .collect();
            let mut masks: Vec<u8> = (1..=255u8)
                .filter(|m| gens.iter().any(|g| m & !g == 0))
                .collect();
            masks.sort_by_key(|m| (m.count_ones(), *m));
            let mut value = [0.0f64; 256];
            let mut k = FilteredComplex::new(ComplexKind::Rips, 0);
            for &m in &masks {
                let mut v = raw[m as usize] as f64;
                for b in 0..8 {
                    let f = m & !(1u8 << b);
                    if m & (1 << b) != 0 && f != 0 {
                        v = v.max(value[f as usize]);
                    }
                }
                value[m as usize] = v;
                let verts: Vec<u32> = (0..8).filter(|b| m & (1 << b) != 0).collect();
                k.push(Simplex::new(&verts), v);
            }
            RandomComplex { complex: k }
        })
}

// ---- brute force ----

fn gf2_rank(mut cols: Vec<u128>) -> usize {
    let mut rank = 0;
    let mut basis: Vec<u128> = Vec::new();
    for c in cols.iter_mut() {
        let mut x = *c;
        for b in &basis {
            x = x.min(x ^ b);
        }
        if x != 0 {
            basis.push(x);
            basis.sort_unstable_by(|a, b| b.cmp(a));
            rank += 1;
        }
    }
    rank
}

/// Betti numbers of the subcomplex `{σ : value(σ) <= eps}` by rank-nullity.
pub fn brute_force_betti(k: &FilteredComplex, eps: f64) -> Vec<usize> {
    let max_dim = k.max_dim();
    let by_dim: Vec<Vec<&Simplex>> = (0..=max_dim)
        .map(|d| {
            k.simplices
                .iter()
                .filter(|s| s.simplex.dim() == d && s.value <= eps)
                .map(|s| &s.simplex)
                .collect()
        })
        .collect();
    let rank = |d: usize| -> usize {
        if d == 0 || d > max_dim {
            return 0;
        }
        let cols = by_dim[d]
            .iter()
            .map(|s| {
                s.facets().fold(0u128, |acc, f| {
                    let row = by_dim[d - 1].iter().position(|x| **x == f).unwrap();
                    acc | 1u128 << row
                })
            })
            .collect();
        gf2_rank(cols)
    };
    (0..=max_dim)
        .map(|d| by_dim[d].len() - rank(d) - rank(d + 1))
        .collect()
}

fn trim(mut v: Vec<usize>) -> Vec<usize> {
    while v.len() > 1 && *v.last().unwrap() == 0 {
        v.pop();
    }
    v
}

fn sample_eps(k: &FilteredComplex) -> Vec<f64> {
    let mut vals: Vec<f64> = k.simplices.iter().map(|s| s.value).collect();
    vals.sort_by(f64::total_cmp);
    vals.dedup();
    let mut eps: Vec<f64> = vals.clone();
    eps.extend(vals.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    eps.push(vals.last().unwrap() + 1.0);
    eps
}

// ---- property bodies ----

pub fn distance_scaling(pts: Vec<[f64; 2]>, t: f64) -> Check {
    let c = cloud(&pts);
    let d = distance_matrix(&c);
    let ds = distance_matrix(&c.scale(t).unwrap());
    for (a, b) in d.entries().iter().zip(ds.entries()) {
        prop_assert!((t * a - b).abs() <= 1e-12 * (1.0 + b.abs()), "{} vs {}", t * a, b);
    }
    Ok(())
}

pub fn hausdorff_metric(a: Vec<[f64; 2]>, b: Vec<[f64; 2]>, c: Vec<[f64; 2]>) -> Check {
    let (a, b, c) = (cloud(&a), cloud(&b), cloud(&c));
    let ab = hausdorff_distance(&a, &b).unwrap();
    prop_assert_eq!(ab, hausdorff_distance(&b, &a).unwrap());
    let bc = hausdorff_distance(&b, &c).unwrap();
    let ac = hausdorff_distance(&a, &c).unwrap();
    prop_assert!(ac <= ab + bc + 1e-12);
    Ok(())
}

pub fn small_spaces_have_weightings(pts: Vec<[f64; 2]>) -> Check {
    let c = cloud(&pts);
    let w = weighting(&similarity_matrix(&distance_matrix(&c)));
    prop_assert!(w.is_ok(), "{:?} on {:?}", w, pts);
    prop_assert!(w.unwrap().residual < 1e-8);
    Ok(())
}

pub fn complexes_are_valid(pts: Vec<[f64; 2]>) -> Check {
    let c = cloud(&pts);
    let k = alpha_complex(&c).unwrap();
    k.validate().map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert!(k.max_dim() <= 2);
    if c.len() <= 7 {
        build_cech(&c, c.len() - 1)
            .unwrap()
            .validate()
            .map_err(|e| TestCaseError::fail(e.to_string()))?;
        build_rips(&distance_matrix(&c), c.len() - 1)
            .unwrap()
            .validate()
            .map_err(|e| TestCaseError::fail(e.to_string()))?;
    }
    Ok(())
}

pub fn cech_equals_alpha(pts: Vec<[f64; 2]>) -> Check {
    let c = cloud(&pts);
    let alpha = alpha_barcode(&c).unwrap();
    let cech = compute_persistence(&build_cech(&c, c.len() - 1).unwrap()).unwrap();
    prop_assert!(alpha.approx_eq(&cech, 1e-9), "alpha {:?}\ncech {:?}", alpha, cech);
    for t in [0.5, 1.0, 2.0] {
        let (a, b) = (alpha_magnitude(&c, t).unwrap(), cech_magnitude(&c, t).unwrap());
        prop_assert!((a - b).abs() <= 1e-9, "t={}: {} vs {}", t, a, b);
    }
    Ok(())
}

pub fn alpha_1d_edges_are_half_gaps(xs: Vec<f64>) -> Check {
    let c = line_cloud(&xs);
    let mut sorted: Vec<f64> = c.coords().to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut expect: Vec<f64> = sorted.windows(2).map(|w| (w[1] - w[0]) / 2.0).collect();
    let k = build_alpha_1d(&c).unwrap();
    let mut got: Vec<f64> = k
        .simplices
        .iter()
        .filter(|s| s.simplex.dim() == 1)
        .map(|s| s.value)
        .collect();
    expect.sort_by(f64::total_cmp);
    got.sort_by(f64::total_cmp);
    prop_assert_eq!(got, expect);
    Ok(())
}

pub fn h0_counts(pts: Vec<[f64; 2]>) -> Check {
    let c = cloud(&pts);
    let b = alpha_barcode(&c).unwrap();
    prop_assert_eq!(b.in_degree(0).filter(|i| i.is_infinite()).count(), 1);
    prop_assert_eq!(b.in_degree(0).count(), c.len());
    Ok(())
}

pub fn euler_characteristic(k: &FilteredComplex) -> Check {
    let b = compute_persistence(k).unwrap();
    for eps in sample_eps(k) {
        let betti = b.betti_at(eps);
        let lhs: i64 = betti
            .iter()
            .enumerate()
            .map(|(d, &x)| if d % 2 == 0 { x as i64 } else { -(x as i64) })
            .sum();
        let rhs: i64 = k
            .simplices
            .iter()
            .filter(|s| s.value <= eps)
            .map(|s| if s.simplex.dim() % 2 == 0 { 1 } else { -1 })
            .sum();
        prop_assert_eq!(lhs, rhs, "eps = {}", eps);
    }
    Ok(())
}

pub fn betti_matches_brute_force(k: &FilteredComplex) -> Check {
    let b = compute_persistence(k).unwrap();
    for eps in sample_eps(k) {
        prop_assert_eq!(trim(b.betti_at(eps)), trim(brute_force_betti(k, eps)), "eps = {}", eps);
    }
    Ok(())
}

pub fn tie_order_invariance(k: &FilteredComplex) -> Check {
    let lex = compute_persistence_with(k, PersistenceOptions::default()).unwrap();
    let rev = compute_persistence_with(
        k,
        PersistenceOptions {
            tie_break: TieBreak::ReverseLexicographic,
            ..Default::default()
        },
    )
    .unwrap();
    prop_assert_eq!(lex, rev);
    Ok(())
}

pub fn effective_points(pts: Vec<[f64; 2]>) -> Check {
    let c = cloud(&pts);
    let small = alpha_magnitude(&c, 1e-6).unwrap();
    let large = alpha_magnitude(&c, 1e6).unwrap();
    prop_assert!((small - 1.0).abs() <= 1e-3, "{}", small);
    prop_assert!((large - c.len() as f64).abs() <= 1e-3, "{} vs {}", large, c.len());
    Ok(())
}

pub fn scaling_consistency(pts: Vec<[f64; 2]>, t: f64) -> Check {
    let c = cloud(&pts);
    let a = alpha_magnitude(&c.scale(t).unwrap(), 1.0).unwrap();
    let b = alpha_magnitude(&c, t).unwrap();
    prop_assert!((a - b).abs() <= 1e-10, "{} vs {}", a, b);
    Ok(())
}

pub fn monotone_1d(xs: Vec<f64>, keep: Vec<bool>) -> Check {
    let a: Vec<f64> = xs
        .iter()
        .zip(keep.iter().cycle())
        .filter(|(_, k)| **k)
        .map(|(x, _)| *x)
        .collect();
    prop_assume!(!a.is_empty());
    let ma = alpha_magnitude(&line_cloud(&a), 1.0).unwrap();
    let mb = alpha_magnitude(&line_cloud(&xs), 1.0).unwrap();
    prop_assert!(ma <= mb + 1e-12, "{} > {}", ma, mb);
    Ok(())
}

pub fn interval_bound_1d(xs: Vec<f64>, len: f64) -> Check {
    let xs: Vec<f64> = xs.iter().map(|x| x * len).collect();
    let m = alpha_magnitude(&line_cloud(&xs), 1.0).unwrap();
    prop_assert!(m <= 1.0 + len / 2.0 + 1e-12, "{} > {}", m, 1.0 + len / 2.0);
    Ok(())
}

pub fn rips_alpha_1d(xs: Vec<f64>, t: f64) -> Check {
    let c = line_cloud(&xs);
    let alpha = alpha_magnitude(&c, t).unwrap();
    let rips = rips_magnitude(&distance_matrix(&c.scale(0.5).unwrap()), t).unwrap();
    prop_assert!((alpha - rips).abs() <= 1e-10, "{} vs {}", alpha, rips);
    Ok(())
}

pub fn sampler_determinism(kind: u8, n: usize, seed: u64) -> Check {
    let kind = [
        SamplerKind::Circle,
        SamplerKind::Cantor,
        SamplerKind::Grid,
        SamplerKind::Feigenbaum,
        SamplerKind::UnionIntervals,
    ][kind as usize % 5];
    let mut spec = SamplerSpec::new(kind, n, seed);
    spec.burn_in = 100;
    spec.intervals = vec![(0.0, 0.1), (0.3, 0.4)];
    let a = sample(&spec).unwrap();
    let b = sample(&spec).unwrap();
    let bits = |c: &PointCloud| c.coords().iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    prop_assert_eq!(bits(&a), bits(&b));
    Ok(())
}

pub fn regression_exact(slope: f64, intercept: f64, shuffle: u64) -> Check {
    let mut curve: Vec<(f64, f64)> = (0..40)
        .map(|k| {
            let x = k as f64 / 8.0;
            (x, intercept + slope * x)
        })
        .collect();
    let window = Window::new(0.0, 5.0).unwrap();
    let est = estimate_dimension(&curve, window).unwrap();
    prop_assert!((est.slope - slope).abs() <= 1e-12);
    prop_assert!((est.intercept - intercept).abs() <= 1e-12);
    let len = curve.len();
    for i in 0..len {
        let j = (shuffle.wrapping_mul(i as u64 + 1) % len as u64) as usize;
        curve.swap(i, j);
    }
    prop_assert_eq!(estimate_dimension(&curve, window).unwrap(), est);
    Ok(())
}

// ---- runner ----

pub const PROPERTIES: &[&str] = &[
    "distance_scaling",
    "hausdorff_metric",
    "small_spaces_have_weightings",
    "complexes_are_valid",
    "degenerate_complexes_are_valid",
    "cech_equals_alpha",
    "alpha_1d_edges_are_half_gaps",
    "h0_counts",
    "euler_characteristic",
    "euler_characteristic_alpha",
    "betti_matches_brute_force",
    "tie_order_invariance",
    "tie_order_invariance_alpha",
    "effective_points",
    "scaling_consistency",
    "monotone_1d",
    "interval_bound_1d",
    "rips_alpha_1d",
    "sampler_determinism",
    "regression_exact",
];

fn run<S, F>(cases: u32, strategy: S, test: F) -> Result<(), String>
where
    S: Strategy,
    S::Value: std::fmt::Debug,
    F: Fn(S::Value) -> Check,
{
    let mut config = Config::with_cases(cases);
    config.failure_persistence = None;
    let mut runner = TestRunner::new_with_rng(
        config,
        proptest::test_runner::TestRng::deterministic_rng(proptest::test_runner::RngAlgorithm::ChaCha),
    );
    runner.run(&strategy, test).map_err(|e| match e {
        TestError::Abort(why) => format!("aborted: {why}"),
        TestError::Fail(why, input) => format!("{why}; minimal input: {input:?}"),
    })
}

/// Runs one named property for `cases` random inputs with a fixed seed.
pub fn run_property(name: &str, cases: u32) -> Result<(), String> {
    match name {
        "distance_scaling" => run(cases, (real_cloud(1, 30), 1e-3..=10.0f64), |(p, t)| distance_scaling(p, t)),
        "hausdorff_metric" => run(cases, (real_cloud(1, 12), real_cloud(1, 12), real_cloud(1, 12)), |(a, b, c)| {
            hausdorff_metric(a, b, c)
        }),
        "small_spaces_have_weightings" => {
            run(cases.max(1000), real_cloud(4, 4), small_spaces_have_weightings)
        }
        "complexes_are_valid" => run(cases, lattice_cloud(1, 60), complexes_are_valid),
        "degenerate_complexes_are_valid" => run(cases, degenerate_cloud(25), complexes_are_valid),
        "cech_equals_alpha" => run(cases, lattice_cloud(1, 7), cech_equals_alpha),
        "alpha_1d_edges_are_half_gaps" => run(cases, line_points(1, 40, 10.0), alpha_1d_edges_are_half_gaps),
        "h0_counts" => run(cases, lattice_cloud(1, 60), h0_counts),
        "euler_characteristic" => run(cases, random_complex(), |r| euler_characteristic(&r.complex)),
        "euler_characteristic_alpha" => run(cases, degenerate_cloud(25), |p| {
            euler_characteristic(&alpha_complex(&cloud(&p)).unwrap())
        }),
        "betti_matches_brute_force" => run(cases, random_complex(), |r| betti_matches_brute_force(&r.complex)),
        "tie_order_invariance" => run(cases, random_complex(), |r| tie_order_invariance(&r.complex)),
        "tie_order_invariance_alpha" => run(cases, degenerate_cloud(25), |p| {
            tie_order_invariance(&alpha_complex(&cloud(&p)).unwrap())
        }),
        "effective_points" => run(cases, lattice_cloud(1, 50), effective_points),
        "scaling_consistency" => run(cases, (lattice_cloud(1, 50), 1e-2..=10.0f64), |(p, t)| scaling_consistency(p, t)),
        "monotone_1d" => run(
            cases,
            (line_points(1, 40, 5.0), prop::collection::vec(any::<bool>(), 1..8)),
            |(x, k)| monotone_1d(x, k),
        ),
        "interval_bound_1d" => run(cases, (line_points(1, 40, 1.0), 1e-3..=20.0f64), |(x, l)| interval_bound_1d(x, l)),
        "rips_alpha_1d" => run(cases.max(200), (line_points(1, 8, 3.0), 0.1..=5.0f64), |(x, t)| rips_alpha_1d(x, t)),
        "sampler_determinism" => run(cases.min(30), (0..5u8, 1..200usize, any::<u64>()), |(k, n, s)| {
            sampler_determinism(k, n, s)
        }),
        "regression_exact" => run(cases, (-3.0..3.0f64, -3.0..3.0f64, any::<u64>()), |(s, i, r)| {
            regression_exact(s, i, r)
        }),
        other => Err(format!("unknown property {other}")),
    }
}
