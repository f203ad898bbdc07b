//! File formats: a self-describing text format for fields and masks, legacy
//! ASCII structured-points export for external viewers, and point-cloud
//! input.
//!
//! The text field format is bit-reproducible: values are written with 17
//! significant digits, which round-trips every finite `f64` exactly, so
//! export -> import -> export yields byte-identical files.
//!
//! ```text
//! dim 2
//! n 2 2
//! lo -1.0000000000000000e0 -1.0000000000000000e0
//! hi 1.0000000000000000e0 1.0000000000000000e0
//! <one value per line, row-major (last axis fastest)>
//! ```

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::FieldIoError;
use crate::grid::{Grid, Point, ScalarField};
use crate::mask::Mask;

/// 17 significant digits: enough to reproduce any `f64` exactly on re-parse.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn io_err(path: &Path, source: std::io::Error) -> FieldIoError {
    FieldIoError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> FieldIoError {
    FieldIoError::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

/// Serialize a field in the text format.
pub fn field_to_string<const D: usize>(field: &ScalarField<D>) -> String {
    let grid = field.grid();
    let mut out = String::new();
    header_to_string(grid, &mut out);
    for v in field.values() {
        out.push_str(&fmt_f64(*v));
        out.push('\n');
    }
    out
}

/// Serialize a mask in the same layout, one `0` or `1` per line.
pub fn mask_to_string<const D: usize>(mask: &Mask<D>) -> String {
    let mut out = String::new();
    header_to_string(mask.grid(), &mut out);
    for v in mask.values() {
        out.push_str(if *v { "1\n" } else { "0\n" });
    }
    out
}

fn header_to_string<const D: usize>(grid: &Grid<D>, out: &mut String) {
    out.push_str(&format!("dim {D}\n"));
    out.push('n');
    for n in grid.node_counts() {
        out.push_str(&format!(" {n}"));
    }
    out.push('\n');
    for (label, coords) in [("lo", grid.lo()), ("hi", grid.hi())] {
        out.push_str(label);
        for c in coords {
            out.push(' ');
            out.push_str(&fmt_f64(c));
        }
        out.push('\n');
    }
}

/// Write a field to `path` in the text format.
pub fn export_field<const D: usize>(
    field: &ScalarField<D>,
    path: &Path,
) -> Result<(), FieldIoError> {
    std::fs::write(path, field_to_string(field)).map_err(|e| io_err(path, e))
}

/// Write a mask to `path` in the text format.
pub fn export_mask<const D: usize>(mask: &Mask<D>, path: &Path) -> Result<(), FieldIoError> {
    std::fs::write(path, mask_to_string(mask)).map_err(|e| io_err(path, e))
}

/// Read a field written by [`export_field`]. The file's dimension must match.
pub fn import_field<const D: usize>(path: &Path) -> Result<ScalarField<D>, FieldIoError> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let mut lines = BufReader::new(file).lines().enumerate();
    let mut next_line = |what: &str| -> Result<(usize, String), FieldIoError> {
        match lines.next() {
            Some((i, Ok(line))) => Ok((i + 1, line)),
            Some((i, Err(_))) => Err(parse_err(
                path,
                i + 1,
                format!("unreadable line while expecting {what}"),
            )),
            None => Err(parse_err(path, 0, format!("missing {what}"))),
        }
    };

    let (lno, dim_line) = next_line("dim header")?;
    let dim: usize = dim_line
        .strip_prefix("dim ")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| parse_err(path, lno, "expected `dim <D>`"))?;
    if dim != D {
        return Err(parse_err(
            path,
            lno,
            format!("file has dimension {dim}, expected {D}"),
        ));
    }

    let (lno, n_line) = next_line("n header")?;
    let n = parse_vector::<usize>(&n_line, "n", D).map_err(|m| parse_err(path, lno, m))?;
    let (lno, lo_line) = next_line("lo header")?;
    let lo = parse_vector::<f64>(&lo_line, "lo", D).map_err(|m| parse_err(path, lno, m))?;
    let (lno, hi_line) = next_line("hi header")?;
    let hi = parse_vector::<f64>(&hi_line, "hi", D).map_err(|m| parse_err(path, lno, m))?;

    let grid = Grid::new(
        std::array::from_fn(|k| lo[k]),
        std::array::from_fn(|k| hi[k]),
        std::array::from_fn(|k| n[k]),
    )
    .map_err(|e| parse_err(path, lno, e.to_string()))?;

    let mut values = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        let (lno, line) = next_line("field value")?;
        let v: f64 = line
            .trim()
            .parse()
            .map_err(|_| parse_err(path, lno, format!("bad value `{}`", line.trim())))?;
        values.push(v);
    }
    ScalarField::from_values(grid, values).map_err(|e| parse_err(path, 0, e.to_string()))
}

fn parse_vector<T: std::str::FromStr>(
    line: &str,
    label: &str,
    expected: usize,
) -> Result<Vec<T>, String> {
    let rest = line
        .strip_prefix(label)
        .ok_or_else(|| format!("expected `{label} ...`"))?;
    let items: Result<Vec<T>, _> = rest.split_whitespace().map(str::parse).collect();
    let items = items.map_err(|_| format!("bad `{label}` entries"))?;
    if items.len() != expected {
        return Err(format!(
            "`{label}` has {} entries, expected {expected}",
            items.len()
        ));
    }
    Ok(items)
}

/// Write a field as a legacy ASCII structured-points dataset, loadable by
/// standard structured-grid viewers. Grids below three dimensions are padded
/// with singleton axes. Values follow the format's ordering (first axis
/// fastest).
pub fn export_vtk<const D: usize>(
    field: &ScalarField<D>,
    path: &Path,
    name: &str,
) -> Result<(), FieldIoError> {
    assert!(D <= 3, "structured-points export supports up to 3 axes");
    let grid = field.grid();
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    let pad = |a: [f64; D], fill: f64| -> [f64; 3] {
        std::array::from_fn(|k| if k < D { a[k] } else { fill })
    };
    let dims: [usize; 3] = {
        let n = grid.node_counts();
        std::array::from_fn(|k| if k < D { n[k] } else { 1 })
    };
    let origin = pad(grid.lo(), 0.0);
    let spacing = pad(grid.spacing(), 1.0);
    let mut write = |s: String| w.write_all(s.as_bytes()).map_err(|e| io_err(path, e));
    write("# vtk DataFile Version 3.0\n".into())?;
    write(format!("viewshed field {name}\n"))?;
    write("ASCII\n".into())?;
    write("DATASET STRUCTURED_POINTS\n".into())?;
    write(format!("DIMENSIONS {} {} {}\n", dims[0], dims[1], dims[2]))?;
    write(format!(
        "ORIGIN {} {} {}\n",
        fmt_f64(origin[0]),
        fmt_f64(origin[1]),
        fmt_f64(origin[2])
    ))?;
    write(format!(
        "SPACING {} {} {}\n",
        fmt_f64(spacing[0]),
        fmt_f64(spacing[1]),
        fmt_f64(spacing[2])
    ))?;
    write(format!("POINT_DATA {}\n", grid.len()))?;
    write(format!("SCALARS {name} double 1\n"))?;
    write("LOOKUP_TABLE default\n".into())?;
    // The format wants the first axis fastest; storage has the last fastest.
    for kz in 0..dims[2] {
        for ky in 0..dims[1] {
            for kx in 0..dims[0] {
                let mut idx = [0usize; D];
                for (k, v) in [kx, ky, kz].iter().take(D).enumerate() {
                    idx[k] = *v;
                }
                write(format!("{}\n", fmt_f64(field.at(idx))))?;
            }
        }
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// Read a point cloud: one point per line, `D` whitespace-separated reals,
/// `#` starting a comment line.
pub fn read_point_cloud<const D: usize>(path: &Path) -> Result<Vec<Point<D>>, FieldIoError> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let mut points = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| io_err(path, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let coords: Result<Vec<f64>, _> = trimmed.split_whitespace().map(str::parse).collect();
        let coords =
            coords.map_err(|_| parse_err(path, i + 1, format!("bad point `{trimmed}`")))?;
        if coords.len() != D {
            return Err(parse_err(
                path,
                i + 1,
                format!("point has {} coordinates, expected {D}", coords.len()),
            ));
        }
        points.push(std::array::from_fn(|k| coords[k]));
    }
    Ok(points)
}

/// Write a point cloud in the same format.
pub fn write_point_cloud<const D: usize>(
    points: &[Point<D>],
    path: &Path,
) -> Result<(), FieldIoError> {
    let mut out = String::new();
    for p in points {
        let coords: Vec<String> = p.iter().map(|c| fmt_f64(*c)).collect();
        out.push_str(&coords.join(" "));
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| io_err(path, e))
}

/// Join an output directory, stem, and extension.
pub fn output_path(dir: &Path, stem: &str, ext: &str) -> PathBuf {
    dir.join(format!("{stem}.{ext}"))
}
