//! CSV formats for point clouds, barcodes, magnitude curves and complexes.
//!
//! Writers may prepend `#` comment lines (run metadata); readers skip them.
//! Floats are written in shortest round-trip form, so a read after a write
//! reproduces the values bit for bit.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::complex::FilteredComplex;
use crate::error::{Error, Result};
use crate::metric::PointCloud;
use crate::persistence::{Barcode, Interval};
use crate::pmag::CurvePoint;

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.kind() {
        csv::ErrorKind::Io(io) => Error::Io(io.to_string()),
        _ => Error::Parse {
            line,
            message: e.to_string(),
        },
    }
}

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .has_headers(true)
        .flexible(true)
        .from_reader(r)
}

fn parse_real(field: &str, line: usize) -> Result<f64> {
    let v: f64 = field.parse().map_err(|_| Error::Parse {
        line,
        message: format!("`{field}` is not a real number"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            line,
            message: format!("non-finite value `{field}`"),
        });
    }
    Ok(v)
}

/// Writes each line as a `# ` comment.
pub fn write_comments<W: Write>(w: &mut W, lines: &[String]) -> Result<()> {
    for l in lines {
        for part in l.lines() {
            writeln!(w, "# {part}")?;
        }
    }
    Ok(())
}

/// Reads a point cloud with header `x` or `x,y`.
pub fn read_points<R: Read>(r: R) -> Result<PointCloud> {
    let mut rdr = reader(r);
    let header = rdr.headers().map_err(csv_error)?.clone();
    let dim = match header.iter().collect::<Vec<_>>().as_slice() {
        ["x"] => 1,
        ["x", "y"] => 2,
        other => {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header `x` or `x,y`, found `{}`", other.join(",")),
            })
        }
    };
    let mut coords = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_error)?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() != dim {
            return Err(Error::Parse {
                line,
                message: format!("expected {dim} fields, found {}", rec.len()),
            });
        }
        for f in rec.iter() {
            coords.push(parse_real(f, line)?);
        }
    }
    PointCloud::from_flat(dim, coords)
}

pub fn read_points_file(path: &Path) -> Result<PointCloud> {
    read_points(BufReader::new(File::open(path)?))
}

pub fn write_points<W: Write>(mut w: W, cloud: &PointCloud, comments: &[String]) -> Result<()> {
    write_comments(&mut w, comments)?;
    writeln!(w, "{}", if cloud.dim() == 1 { "x" } else { "x,y" })?;
    for p in cloud.points() {
        match p {
            [x] => writeln!(w, "{x}")?,
            [x, y] => writeln!(w, "{x},{y}")?,
            _ => unreachable!("clouds are one- or two-dimensional"),
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_points_file(path: &Path, cloud: &PointCloud, comments: &[String]) -> Result<()> {
    write_points(BufWriter::new(File::create(path)?), cloud, comments)
}

fn fmt_death(d: f64) -> String {
    if d.is_infinite() {
        "inf".to_string()
    } else {
        d.to_string()
    }
}

/// Barcode rows `degree,birth,death` with `inf` for essential classes.
pub fn write_barcode<W: Write>(mut w: W, b: &Barcode, comments: &[String]) -> Result<()> {
    write_comments(&mut w, comments)?;
    writeln!(w, "degree,birth,death")?;
    for i in b.intervals() {
        writeln!(w, "{},{},{}", i.degree, i.birth, fmt_death(i.death))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_barcode<R: Read>(r: R) -> Result<Barcode> {
    let mut rdr = reader(r);
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_error)?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() != 3 {
            return Err(Error::Parse {
                line,
                message: format!("expected 3 fields, found {}", rec.len()),
            });
        }
        let degree = rec[0].parse().map_err(|_| Error::Parse {
            line,
            message: format!("bad degree `{}`", &rec[0]),
        })?;
        let birth = parse_real(&rec[1], line)?;
        let death = if rec[2].eq_ignore_ascii_case("inf") {
            f64::INFINITY
        } else {
            parse_real(&rec[2], line)?
        };
        out.push(Interval { degree, birth, death });
    }
    Ok(Barcode::new(out))
}

/// Curve rows `t,magnitude,log_t,log_magnitude`.
pub fn write_curve<W: Write>(mut w: W, points: &[CurvePoint], comments: &[String]) -> Result<()> {
    write_comments(&mut w, comments)?;
    writeln!(w, "t,magnitude,log_t,log_magnitude")?;
    for p in points {
        writeln!(w, "{},{},{},{}", p.t, p.magnitude, p.t.ln(), p.magnitude.ln())?;
    }
    w.flush()?;
    Ok(())
}

/// Complex rows `dim,v0,v1,v2,filtration`; unused vertex slots are empty.
pub fn write_complex<W: Write>(mut w: W, k: &FilteredComplex, comments: &[String]) -> Result<()> {
    write_comments(&mut w, comments)?;
    writeln!(w, "dim,v0,v1,v2,filtration")?;
    for s in &k.simplices {
        let v = s.simplex.vertices();
        let slot = |i: usize| v.get(i).map_or(String::new(), |x| x.to_string());
        writeln!(w, "{},{},{},{},{}", s.simplex.dim(), slot(0), slot(1), slot(2), s.value)?;
    }
    w.flush()?;
    Ok(())
}
