use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use alphamag::complex::alpha_complex;
use alphamag::estimator::{
    check_convergence, doubling_schedule, estimate_dimension, log_spaced_sizes, loglog_curve, subsample,
    Window, WindowRule, CONVERGENCE_THRESHOLD,
};
use alphamag::io::{read_points_file, write_barcode, write_comments, write_curve, write_points};
use alphamag::magnitude::{check_dense_size, fixtures, magnitude_function, singular_scales};
use alphamag::metric::{distance_matrix, DistanceMatrix};
use alphamag::oracles::{oracle_circle, oracle_grid_square, oracle_interval, oracle_union_intervals};
use alphamag::pmag::{alpha_magnitude, log_grid, CurvePoint, MagnitudeFunction};
use alphamag::samplers::{sample, sample_circle, sample_grid, sample_union_intervals, SamplerKind, SamplerSpec};
use alphamag::{compute_persistence, persistent_magnitude, Execution, PointCloud};
use serde_json::{json, Value};

use crate::{Cli, Command, Failure, Format, GridArgs, OptionalSamplerArgs, RunConfig, SamplerArgs};

pub fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Sample { sampler } => cmd_sample(cli, sampler),
        Command::AlphaMag { input, grid } => cmd_alpha_mag(cli, input, grid),
        Command::Magnitude { input, fixture, grid } => cmd_magnitude(cli, input.as_ref(), fixture.as_deref(), grid),
        Command::Dimension { input, sampler, per_decade, window_low, window_high, sweep, converge } => {
            let opts = DimensionOpts {
                per_decade: *per_decade,
                window_low: *window_low,
                window_high: *window_high,
                sweep: *sweep,
                converge: *converge,
            };
            cmd_dimension(cli, input.as_ref(), sampler, opts)
        }
        Command::OracleCheck { kind, n, seed } => cmd_oracle_check(cli, kind.as_deref(), *n, *seed),
    }
}

fn config(cli: &Cli, subcommand: &'static str, input: Option<&PathBuf>, format: Format, params: Value) -> Value {
    let rc = RunConfig {
        subcommand,
        input,
        out: cli.out.as_ref(),
        format,
        force: cli.force,
        params,
    };
    serde_json::to_value(rc).expect("config is plain data")
}

fn comment(config: &Value) -> Vec<String> {
    vec![format!("config {config}")]
}

fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json(path: Option<&PathBuf>, v: &Value) -> Result<(), Failure> {
    let mut w = output(path)?;
    serde_json::to_writer_pretty(&mut w, v)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// `a,b;c,d` into interval pairs.
fn parse_intervals(s: &str) -> Result<Vec<(f64, f64)>, Failure> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|pair| {
            let mut it = pair.split(',').map(|x| x.trim().parse::<f64>());
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(a)), Some(Ok(b)), None) => Ok((a, b)),
                _ => Err(Failure::usage(format!("bad interval `{pair}`; expected `a,b`"))),
            }
        })
        .collect()
}

fn spec_of(kind: SamplerKind, n: usize, seed: u64, depth: u32, a: f64, burn_in: u64, intervals: &str) -> Result<SamplerSpec, Failure> {
    let mut spec = SamplerSpec::new(kind, n, seed);
    spec.depth = depth;
    spec.a = a;
    spec.burn_in = burn_in;
    if kind == SamplerKind::UnionIntervals {
        spec.intervals = parse_intervals(intervals)?;
    }
    spec.validate()?;
    Ok(spec)
}

fn draw(spec: &SamplerSpec) -> Result<PointCloud, Failure> {
    eprintln!("sampling {:?} n={} seed={}", spec.kind, spec.n, spec.seed);
    let cloud = sample(spec)?;
    eprintln!("sampled {} points ({} duplicates merged)", cloud.len(), cloud.duplicates_removed());
    Ok(cloud)
}

fn load(path: &Path) -> Result<PointCloud, Failure> {
    let cloud = read_points_file(path)?;
    eprintln!("read {} points from {}", cloud.len(), path.display());
    Ok(cloud)
}

fn cmd_sample(cli: &Cli, s: &SamplerArgs) -> Result<(), Failure> {
    let spec = spec_of(s.kind, s.n, s.seed, s.depth, s.a, s.burn_in, &s.intervals)?;
    let format = cli.format.unwrap_or(Format::Csv);
    let cfg = config(cli, "sample", None, format, json!({ "spec": spec }));
    let cloud = draw(&spec)?;
    let sidecar = json!({
        "config": cfg,
        "spec": spec,
        "points": cloud.len(),
        "duplicates_removed": cloud.duplicates_removed(),
    });
    match format {
        Format::Csv => {
            write_points(output(cli.out.as_ref())?, &cloud, &comment(&cfg))?;
            if let Some(out) = &cli.out {
                let path = out.with_extension("spec.json");
                write_json(Some(&path), &sidecar)?;
                eprintln!("wrote {} and {}", out.display(), path.display());
            }
        }
        Format::Json => {
            let mut v = sidecar;
            v["coordinates"] = json!(cloud.points().map(|p| p.to_vec()).collect::<Vec<_>>());
            write_json(cli.out.as_ref(), &v)?;
        }
    }
    Ok(())
}

fn cmd_alpha_mag(cli: &Cli, input: &PathBuf, g: &GridArgs) -> Result<(), Failure> {
    let format = cli.format.unwrap_or(Format::Csv);
    let cfg = config(cli, "alpha-mag", Some(input), format, json!(g));
    let grid = log_grid(g.t_min, g.t_max, g.per_decade)?;
    let cloud = load(input)?;
    let k = alpha_complex(&cloud)?;
    eprintln!("alpha complex: {} simplices by dimension {:?}", k.len(), k.count_by_dim());
    let barcode = compute_persistence(&k)?;
    eprintln!("barcode: {} intervals", barcode.len());
    let f = MagnitudeFunction::Barcode(barcode);
    let values = f.evaluate_grid(&grid, Execution::default())?;
    let MagnitudeFunction::Barcode(barcode) = f else { unreachable!() };
    match format {
        Format::Csv => {
            let points: Vec<CurvePoint> = grid
                .iter()
                .zip(&values)
                .map(|(&t, &magnitude)| CurvePoint { t, magnitude })
                .collect();
            write_curve(output(cli.out.as_ref())?, &points, &comment(&cfg))?;
            if let Some(out) = &cli.out {
                let path = out.with_extension("barcode.csv");
                write_barcode(BufWriter::new(File::create(&path)?), &barcode, &comment(&cfg))?;
                eprintln!("wrote {} and {}", out.display(), path.display());
            }
        }
        Format::Json => {
            let curve: Vec<Value> = grid
                .iter()
                .zip(&values)
                .map(|(t, m)| json!({ "t": t, "magnitude": m }))
                .collect();
            let bars: Vec<Value> = barcode
                .intervals()
                .iter()
                .map(|i| json!({ "degree": i.degree, "birth": i.birth, "death": if i.is_infinite() { json!("inf") } else { json!(i.death) } }))
                .collect();
            write_json(cli.out.as_ref(), &json!({ "config": cfg, "curve": curve, "barcode": bars }))?;
        }
    }
    Ok(())
}

fn cmd_magnitude(cli: &Cli, input: Option<&PathBuf>, fixture: Option<&str>, g: &GridArgs) -> Result<(), Failure> {
    let format = cli.format.unwrap_or(Format::Csv);
    let cfg = config(cli, "magnitude", input, format, json!({ "fixture": fixture, "grid": g }));
    let grid = log_grid(g.t_min, g.t_max, g.per_decade)?;
    let d: DistanceMatrix = match (fixture, input) {
        (Some(name), _) => fixtures::by_name(name).ok_or_else(|| Failure::usage(format!("unknown fixture `{name}`; try k32 or c4")))?,
        (None, Some(path)) => distance_matrix(&load(path)?),
        (None, None) => return Err(Failure::usage("give an input file or --fixture")),
    };
    check_dense_size(d.len(), cli.force)?;
    eprintln!("solving {} grid points on a {}-point space", grid.len(), d.len());
    let mut rows: Vec<(f64, Option<f64>)> = magnitude_function(&d, &grid)?
        .into_iter()
        .map(|s| (s.t, s.magnitude))
        .collect();
    rows.extend(singular_scales(&d, &grid)?.into_iter().map(|t| (t, None)));
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    match format {
        Format::Csv => {
            let mut w = output(cli.out.as_ref())?;
            write_comments(&mut w, &comment(&cfg))?;
            writeln!(w, "t,magnitude")?;
            for (t, m) in &rows {
                match m {
                    Some(m) => writeln!(w, "{t},{m}")?,
                    None => writeln!(w, "{t},singular")?,
                }
            }
            w.flush()?;
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|(t, m)| json!({ "t": t, "magnitude": m, "singular": m.is_none() }))
                .collect();
            write_json(cli.out.as_ref(), &json!({ "config": cfg, "rows": rows }))?;
        }
    }
    Ok(())
}

pub struct DimensionOpts {
    per_decade: usize,
    window_low: Option<f64>,
    window_high: Option<f64>,
    sweep: Option<usize>,
    converge: bool,
}

fn window_for(rule: WindowRule, opts: &DimensionOpts, n: usize) -> Result<Window, Failure> {
    let low = opts.window_low.unwrap_or(rule.low);
    let high = opts.window_high.unwrap_or((n as f64).ln() - rule.high_offset);
    Ok(Window::new(low, high)?)
}

fn estimate(cloud: &PointCloud, rule: WindowRule, opts: &DimensionOpts) -> Result<(Vec<(f64, f64)>, alphamag::estimator::DimensionEstimate), Failure> {
    let window = window_for(rule, opts, cloud.len())?;
    let (t_min, t_max) = window.t_range();
    let curve = loglog_curve(cloud, t_min, t_max, opts.per_decade)?;
    let mut est = estimate_dimension(&curve, window)?;
    est.sample_size = Some(cloud.len());
    Ok((curve, est))
}

fn cmd_dimension(cli: &Cli, input: Option<&PathBuf>, s: &OptionalSamplerArgs, opts: DimensionOpts) -> Result<(), Failure> {
    let format = cli.format.unwrap_or(Format::Json);
    let spec = match (s.kind, input) {
        (Some(kind), None) => {
            let n = s.n.ok_or_else(|| Failure::usage("--kind needs --n"))?;
            Some(spec_of(kind, n, s.seed, s.depth, s.a, s.burn_in, &s.intervals)?)
        }
        (None, Some(_)) => None,
        _ => return Err(Failure::usage("give either an input file or --kind and --n")),
    };
    let rule = spec.as_ref().map_or(WindowRule::STANDARD, |sp| WindowRule::for_kind(sp.kind));
    let cfg = config(
        cli,
        "dimension",
        input,
        format,
        json!({
            "spec": spec,
            "per_decade": opts.per_decade,
            "window_low": opts.window_low,
            "window_high": opts.window_high,
            "window_rule": rule,
            "sweep": opts.sweep,
            "converge": opts.converge,
            "seed": s.seed,
        }),
    );
    let convergence = match (&spec, opts.converge) {
        (Some(sp), true) => {
            let schedule = doubling_schedule(1000.min(sp.n), sp.n);
            if schedule.len() < 2 {
                return Err(Failure::usage("--converge needs --n of at least 2000"));
            }
            eprintln!("convergence check over {schedule:?}");
            let r = check_convergence(sp, &schedule, CONVERGENCE_THRESHOLD)?;
            eprintln!("converged: {} at n={}", r.converged, r.final_n);
            Some(r)
        }
        (None, true) => return Err(Failure::usage("--converge needs a sampler, not an input file")),
        _ => None,
    };
    let cloud = match (&spec, input) {
        (Some(sp), _) => draw(sp)?,
        (None, Some(path)) => load(path)?,
        (None, None) => unreachable!(),
    };
    let (curve, est) = estimate(&cloud, rule, &opts)?;
    eprintln!(
        "slope {:.5} over ln t in [{:.3}, {:.3}] from {} points, r2 {:.5}",
        est.slope, est.window.low, est.window.high, est.points_used, est.r_squared
    );
    let mut sweep = Vec::new();
    if let Some(count) = opts.sweep {
        for size in log_spaced_sizes(10_000.min(cloud.len()), cloud.len(), count) {
            let sub = subsample(&cloud, size, s.seed)?;
            let (_, e) = estimate(&sub, rule, &opts)?;
            eprintln!("  size {size}: slope {:.5}", e.slope);
            sweep.push(json!({ "size": size, "estimate": e }));
        }
    }
    match format {
        Format::Json => {
            let v = json!({ "config": cfg, "estimate": est, "convergence": convergence, "sweep": sweep });
            write_json(cli.out.as_ref(), &v)?;
        }
        Format::Csv => {
            let mut w = output(cli.out.as_ref())?;
            let mut notes = comment(&cfg);
            notes.push(format!("estimate {}", serde_json::to_string(&est)?));
            if let Some(r) = &convergence {
                notes.push(format!("convergence {}", serde_json::to_string(r)?));
            }
            for e in &sweep {
                notes.push(format!("sweep {e}"));
            }
            write_comments(&mut w, &notes)?;
            writeln!(w, "log_t,log_magnitude")?;
            for (x, y) in &curve {
                writeln!(w, "{x},{y}")?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

struct Check {
    kind: &'static str,
    n: usize,
    t: f64,
    pipeline: f64,
    oracle: f64,
    tolerance: f64,
}

fn cmd_oracle_check(cli: &Cli, kind: Option<&str>, n: Option<usize>, seed: u64) -> Result<(), Failure> {
    let format = cli.format.unwrap_or(Format::Csv);
    let kinds: Vec<&str> = match kind {
        None => vec!["interval", "union", "circle", "grid"],
        Some(k @ ("interval" | "union" | "circle" | "grid")) => vec![k],
        Some(other) => return Err(Failure::usage(format!("unknown oracle kind `{other}`"))),
    };
    let cfg = config(cli, "oracle-check", None, format, json!({ "kind": kind, "n": n, "seed": seed }));
    let mut checks = Vec::new();
    for k in kinds {
        eprintln!("checking {k}");
        match k {
            "interval" => {
                let n = n.unwrap_or(100_000);
                let c = sample_union_intervals(&[(0.0, 1.0)], n, seed)?;
                for t in [0.5, 1.0, 2.0] {
                    let (pipeline, oracle) = (alpha_magnitude(&c, t)?, oracle_interval(0.0, 1.0, t)?);
                    checks.push(Check { kind: "interval", n, t, pipeline, oracle, tolerance: 5e-3 });
                }
            }
            "union" => {
                let n = n.unwrap_or(100_000);
                let iv = [(0.0, 0.1), (0.3, 0.4)];
                let c = sample_union_intervals(&iv, n, seed)?;
                for t in [0.5, 1.0, 2.0] {
                    let (pipeline, oracle) = (alpha_magnitude(&c, t)?, oracle_union_intervals(&iv, t)?);
                    checks.push(Check { kind: "union", n, t, pipeline, oracle, tolerance: 5e-3 });
                }
            }
            "circle" => {
                let n = n.unwrap_or(10_000);
                let c = sample_circle(n, seed)?;
                let pipeline = alpha_magnitude(&c, 1.0)?;
                checks.push(Check { kind: "circle", n, t: 1.0, pipeline, oracle: oracle_circle(1.0), tolerance: 0.05 });
            }
            _ => {
                let n = n.unwrap_or(10);
                let lattice = u32::try_from(n).map_err(|_| Failure::usage("grid parameter too large"))?;
                let b = compute_persistence(&alpha_complex(&sample_grid(n)?)?)?;
                for t in [0.5, 1.0, 2.0] {
                    let (pipeline, oracle) = (persistent_magnitude(&b, t)?, oracle_grid_square(lattice, t)?);
                    checks.push(Check { kind: "grid", n, t, pipeline, oracle, tolerance: 1e-9 });
                }
            }
        }
    }
    let ok = |c: &Check| (c.pipeline - c.oracle).abs() < c.tolerance;
    match format {
        Format::Csv => {
            let mut w = output(cli.out.as_ref())?;
            write_comments(&mut w, &comment(&cfg))?;
            writeln!(w, "kind,n,t,pipeline,oracle,residual,tolerance,status")?;
            for c in &checks {
                let status = if ok(c) { "ok" } else { "fail" };
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{status}",
                    c.kind,
                    c.n,
                    c.t,
                    c.pipeline,
                    c.oracle,
                    (c.pipeline - c.oracle).abs(),
                    c.tolerance
                )?;
            }
            w.flush()?;
        }
        Format::Json => {
            let rows: Vec<Value> = checks
                .iter()
                .map(|c| {
                    json!({
                        "kind": c.kind, "n": c.n, "t": c.t, "pipeline": c.pipeline, "oracle": c.oracle,
                        "residual": (c.pipeline - c.oracle).abs(), "tolerance": c.tolerance, "ok": ok(c),
                    })
                })
                .collect();
            write_json(cli.out.as_ref(), &json!({ "config": cfg, "checks": rows }))?;
        }
    }
    let failed = checks.iter().filter(|c| !ok(c)).count();
    if failed > 0 {
        return Err(Failure { code: 1, message: format!("{failed} residuals exceed tolerance") });
    }
    Ok(())
}
