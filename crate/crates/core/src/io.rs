//! Flat-file formats: curve CSV, polyline OBJ and JSON reports.
//!
//! Curve CSV has the header `param,x,y,z` optionally followed by
//! `kappa,tau,kappa_g`, one row per sample, every number written with 17
//! significant digits so that a write/read round trip is bit-exact. Files are
//! written to a temporary sibling and renamed into place.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::darboux::{Polyline, SampleInvariants};
use crate::error::{Error, Result};
use crate::frames::Vec3;

const BASE_HEADER: [&str; 4] = ["param", "x", "y", "z"];
const INVARIANT_HEADER: [&str; 3] = ["kappa", "tau", "kappa_g"];

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io { path: path.to_path_buf(), source }
}

fn parse_error(path: &Path, message: impl Into<String>) -> Error {
    Error::Parse { path: path.to_path_buf(), message: message.into() }
}

/// Writes `bytes` to `path` atomically: a temporary file in the same
/// directory is filled, flushed and renamed over the target.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_error(path, e))?;
    tmp.write_all(bytes).map_err(|e| io_error(path, e))?;
    tmp.as_file().sync_all().map_err(|e| io_error(path, e))?;
    tmp.persist(path).map_err(|e| io_error(path, e.error))?;
    Ok(())
}

/// 17 significant digits: enough to reproduce any `f64` exactly.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Renders a curve as CSV, with invariant columns when the curve carries them.
pub fn curve_to_csv(line: &Polyline) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let with_inv = line.invariants.is_some();
    let mut header: Vec<&str> = BASE_HEADER.to_vec();
    if with_inv {
        header.extend(INVARIANT_HEADER);
    }
    let csv_err = |e: csv::Error| Error::validation(format!("csv encoding failed: {e}"));
    w.write_record(&header).map_err(csv_err)?;
    for i in 0..line.len() {
        let p = &line.points[i];
        let mut row = vec![format_f64(line.params[i]), format_f64(p.x), format_f64(p.y), format_f64(p.z)];
        if let Some(inv) = &line.invariants {
            row.extend([inv[i].kappa, inv[i].tau, inv[i].kappa_g].map(format_f64));
        }
        w.write_record(&row).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::validation(format!("csv encoding failed: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::validation(e.to_string()))
}

pub fn write_curve_csv(path: &Path, line: &Polyline) -> Result<()> {
    write_atomic(path, curve_to_csv(line)?.as_bytes())
}

/// Parses curve CSV text; `path` is used for error messages only.
pub fn curve_from_csv(text: &str, path: &Path) -> Result<Polyline> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header: Vec<String> =
        r.headers().map_err(|e| parse_error(path, e.to_string()))?.iter().map(|h| h.trim().to_string()).collect();
    let with_inv = if header == BASE_HEADER {
        false
    } else if header.len() == 7 && header[..4] == BASE_HEADER && header[4..] == INVARIANT_HEADER {
        true
    } else {
        return Err(parse_error(
            path,
            format!("expected header param,x,y,z[,kappa,tau,kappa_g], found {}", header.join(",")),
        ));
    };
    let (mut params, mut points, mut inv) = (Vec::new(), Vec::new(), Vec::new());
    for (row, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| parse_error(path, e.to_string()))?;
        let vals: Vec<f64> = rec
            .iter()
            .map(|f| {
                f.trim().parse::<f64>().map_err(|_| parse_error(path, format!("row {}: bad number {f:?}", row + 1)))
            })
            .collect::<Result<_>>()?;
        params.push(vals[0]);
        points.push(Vec3::new(vals[1], vals[2], vals[3]));
        if with_inv {
            inv.push(SampleInvariants { kappa: vals[4], tau: vals[5], kappa_g: vals[6] });
        }
    }
    if points.is_empty() {
        return Err(Error::validation(format!("{} contains no samples", path.display())));
    }
    let mut line = Polyline::new(params, points, format!("csv:{}", path.display()))?;
    if with_inv {
        line.invariants = Some(inv);
    }
    Ok(line)
}

pub fn read_curve_csv(path: &Path) -> Result<Polyline> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    curve_from_csv(&text, path)
}

/// Renders a polyline OBJ: one `v` line per vertex and a single `l` record.
/// A closed curve drops its duplicated last vertex and returns to index 1.
pub fn polyline_to_obj(points: &[Vec3], closed: bool) -> Result<String> {
    if points.is_empty() {
        return Err(Error::validation("cannot export an empty curve"));
    }
    let verts = if closed && points.len() > 1 { &points[..points.len() - 1] } else { points };
    let mut out = String::new();
    for p in verts {
        let _ = writeln!(out, "v {} {} {}", format_f64(p.x), format_f64(p.y), format_f64(p.z));
    }
    out.push('l');
    for i in 1..=verts.len() {
        let _ = write!(out, " {i}");
    }
    if closed {
        out.push_str(" 1");
    }
    out.push('\n');
    Ok(out)
}

pub fn write_obj(path: &Path, points: &[Vec3], closed: bool) -> Result<()> {
    write_atomic(path, polyline_to_obj(points, closed)?.as_bytes())
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s =
        serde_json::to_string_pretty(value).map_err(|e| Error::validation(format!("json encoding failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    write_atomic(path, to_json(value)?.as_bytes())
}

/// Merges several serializable records into one flat JSON object; later
/// records win on key collisions.
pub fn flat_record(parts: &[serde_json::Value]) -> Result<serde_json::Value> {
    let mut out = serde_json::Map::new();
    for part in parts {
        match part {
            serde_json::Value::Object(m) => out.extend(m.clone()),
            other => return Err(Error::validation(format!("expected a JSON object, got {other}"))),
        }
    }
    Ok(serde_json::Value::Object(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn line(n: usize) -> Polyline {
        let params: Vec<f64> = (0..n).map(|i| i as f64 * 0.1).collect();
        let points = params.iter().map(|t| Vec3::new(t.cos(), t.sin(), 1.0 / 3.0 * t)).collect();
        Polyline::new(params, points, "test").unwrap()
    }

    #[test]
    fn csv_layout() {
        let text = curve_to_csv(&line(3)).unwrap();
        let lines: Vec<&str> = text.split('\n').collect();
        assert_eq!(lines[0], "param,x,y,z");
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[4], "");
        assert!(!text.contains('\r'));
        assert_eq!(lines[1], "0.0000000000000000e0,1.0000000000000000e0,0.0000000000000000e0,0.0000000000000000e0");
    }

    #[test]
    fn csv_round_trip_with_invariants_and_nan() {
        let mut l = line(10);
        l.invariants =
            Some((0..10).map(|i| SampleInvariants { kappa: i as f64, tau: f64::NAN, kappa_g: -0.1 }).collect());
        let text = curve_to_csv(&l).unwrap();
        assert!(text.starts_with("param,x,y,z,kappa,tau,kappa_g\n"));
        let back = curve_from_csv(&text, Path::new("mem")).unwrap();
        assert_eq!(back.points, l.points);
        let inv = back.invariants.unwrap();
        assert!(inv[3].tau.is_nan());
        assert_eq!(inv[3].kappa, 3.0);
    }

    #[test]
    fn csv_rejects_bad_input() {
        let p = Path::new("mem");
        assert!(curve_from_csv("a,b,c\n1,2,3\n", p).is_err());
        assert!(curve_from_csv("param,x,y,z\n0,1,2,oops\n1,1,1,1\n", p).is_err());
        assert_eq!(curve_from_csv("param,x,y,z\n", p).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn obj_open_and_closed() {
        let pts = vec![Vec3::x(), Vec3::y(), -Vec3::x(), Vec3::x()];
        let closed = polyline_to_obj(&pts, true).unwrap();
        assert_eq!(closed.lines().filter(|l| l.starts_with("v ")).count(), 3);
        assert_eq!(closed.lines().last().unwrap(), "l 1 2 3 1");
        let open = polyline_to_obj(&pts, false).unwrap();
        assert_eq!(open.lines().last().unwrap(), "l 1 2 3 4");
        assert!(polyline_to_obj(&[], false).is_err());
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.csv");
        write_curve_csv(&path, &line(4)).unwrap();
        write_curve_csv(&path, &line(5)).unwrap();
        assert_eq!(read_curve_csv(&path).unwrap().len(), 5);
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn flat_record_merges_objects() {
        let v = flat_record(&[serde_json::json!({"a": 1, "b": 2}), serde_json::json!({"b": 3})]).unwrap();
        assert_eq!(v, serde_json::json!({"a": 1, "b": 3}));
        assert!(flat_record(&[serde_json::json!(1)]).is_err());
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_bit_exact(coords in prop::collection::vec((-1e300f64..1e300, -1e-300f64..1e-300, any::<f64>()), 2..20)) {
            let coords: Vec<(f64, f64, f64)> = coords.into_iter().filter(|c| c.2.is_finite()).collect();
            prop_assume!(coords.len() >= 2);
            let params: Vec<f64> = (0..coords.len()).map(|i| i as f64 / 7.0).collect();
            let points = coords.iter().map(|c| Vec3::new(c.0, c.1, c.2)).collect();
            let l = Polyline::new(params, points, "p").unwrap();
            let back = curve_from_csv(&curve_to_csv(&l).unwrap(), Path::new("mem")).unwrap();
            for (a, b) in l.points.iter().zip(&back.points) {
                for k in 0..3 {
                    prop_assert_eq!(a[k].to_bits(), b[k].to_bits());
                }
            }
            prop_assert_eq!(l.params.iter().map(|x| x.to_bits()).collect::<Vec<_>>(), back.params.iter().map(|x| x.to_bits()).collect::<Vec<_>>());
        }
    }
}
