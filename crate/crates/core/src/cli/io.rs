//! CSV and text persistence.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{GridFunction, Lattice};

/// 17 significant digits, `.` as decimal point.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |source| Error::Csv { path: path.to_path_buf(), source }
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.to_path_buf(), source }
}

/// Writes a header row and string rows.
pub fn write_rows(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    if let Some(bad) = rows.iter().find(|r| r.len() != header.len()) {
        return Err(Error::Invalid(format!("row has {} columns, header has {}", bad.len(), header.len())));
    }
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(header).map_err(csv_err(path))?;
    for row in rows {
        w.write_record(row).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Numeric series for external plotting: one header row, then one row per abscissa.
pub fn emit_curves(path: &Path, header: &[&str], series: &[Vec<f64>]) -> Result<()> {
    if series.is_empty() {
        return Err(Error::Invalid("curve series is empty".into()));
    }
    let rows: Vec<Vec<String>> = series.iter().map(|r| r.iter().map(|&x| fmt_num(x)).collect()).collect();
    write_rows(path, header, &rows)
}

/// Reads a headered numeric CSV back into rows.
pub fn read_curves(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let header = r.headers().map_err(csv_err(path))?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err(path))?;
        rows.push(parse_record(path, &rec)?);
    }
    Ok((header, rows))
}

fn parse_record(path: &Path, rec: &csv::StringRecord) -> Result<Vec<f64>> {
    rec.iter()
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Invalid(format!("{}: cannot parse number '{t}'", path.display())))
        })
        .collect()
}

/// Two-column `(t, G(t))` table; a non-numeric first row is taken as a header.
pub fn read_table(path: &Path) -> Result<Vec<(f64, f64)>> {
    let mut r =
        csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_path(path).map_err(csv_err(path))?;
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err(path))?;
        if rec.len() != 2 {
            return Err(Error::Invalid(format!("{}: expected two columns, got {}", path.display(), rec.len())));
        }
        match parse_record(path, &rec) {
            Ok(v) => out.push((v[0], v[1])),
            Err(_) if i == 0 => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Grid function as `cell_index, x1..xN, value` over its whole box, cell index row-major.
pub fn write_grid(path: &Path, u: &GridFunction) -> Result<()> {
    let dim = u.lattice().dim();
    let mut header = vec!["cell_index".to_string()];
    header.extend((1..=dim).map(|i| format!("x{i}")));
    header.push("value".into());
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<String>> = (0..u.len())
        .map(|i| {
            let mut row = vec![i.to_string()];
            row.extend(u.center(i).into_iter().map(fmt_num));
            row.push(fmt_num(u.values()[i]));
            row
        })
        .collect();
    write_rows(path, &header, &rows)
}

/// Reads a grid function CSV; the lattice is recovered from the cell centers.
pub fn read_grid(path: &Path) -> Result<GridFunction> {
    let (header, rows) = read_curves(path)?;
    if header.len() < 3 || header[0] != "cell_index" || header.last().map(String::as_str) != Some("value") {
        return Err(Error::Invalid(format!("{}: expected header cell_index, x1..xN, value", path.display())));
    }
    if rows.is_empty() {
        return Err(Error::Invalid(format!("{}: no cells", path.display())));
    }
    let dim = header.len() - 2;
    let mut h = f64::INFINITY;
    let mut lo = vec![f64::INFINITY; dim];
    for a in 0..dim {
        let mut xs: Vec<f64> = rows.iter().map(|r| r[1 + a]).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        lo[a] = xs[0];
        for w in xs.windows(2) {
            h = h.min(w[1] - w[0]);
        }
    }
    if !h.is_finite() {
        // a single cell per axis carries no spacing; treat it as unit width
        h = 1.0;
    }
    let lattice = Lattice::new(lo.clone(), h)?;
    let mut idx = Vec::with_capacity(rows.len());
    let mut extent = vec![0i64; dim];
    for r in &rows {
        let k: Vec<i64> = (0..dim)
            .map(|a| {
                let f = (r[1 + a] - lo[a]) / h;
                let k = f.round();
                if (f - k).abs() > 1e-6 {
                    Err(Error::Invalid(format!("{}: cell centers are not on a uniform lattice", path.display())))
                } else {
                    Ok(k as i64)
                }
            })
            .collect::<Result<_>>()?;
        for a in 0..dim {
            extent[a] = extent[a].max(k[a]);
        }
        let v = r[dim + 1];
        if !(v >= 0.0) || !v.is_finite() {
            return Err(Error::Invalid(format!("{}: values must be finite and nonnegative, got {v}", path.display())));
        }
        idx.push((k, v));
    }
    let shape: Vec<usize> = extent.iter().map(|&e| e as usize + 1).collect();
    let mut values = vec![0.0; shape.iter().product()];
    for (k, v) in idx {
        let lin = k.iter().zip(&shape).fold(0usize, |acc, (&ki, &n)| acc * n + ki as usize);
        values[lin] = v;
    }
    GridFunction::new(lattice, vec![0; dim], shape, values)
}

/// Plain-text report: a header with a timestamp and the configuration echo, then the summary.
pub fn write_summary(path: &Path, echo: &[(String, String)], summary: &str) -> Result<()> {
    let stamp = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let mut f = fs::File::create(path).map_err(io_err(path))?;
    let mut text = format!("# fracsym {} (unix time {stamp})\n", env!("CARGO_PKG_VERSION"));
    for (k, v) in echo {
        text.push_str(&format!("# {k} = {v}\n"));
    }
    text.push('\n');
    text.push_str(summary);
    if !summary.ends_with('\n') {
        text.push('\n');
    }
    f.write_all(text.as_bytes()).map_err(io_err(path))
}
