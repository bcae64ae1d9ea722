//! CSV import and export for points, graphs, filters, signals,
//! preconditioners, solver traces and round logs.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a write
//! followed by a read reproduces every value bit for bit.

use std::fs;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::filter::{GraphFilter, Signal};
use crate::graph::{Graph, Point};
use crate::precond::{DiagonalPreconditioner, PreconditionerKind};
use crate::sdn::RoundLog;
use crate::solver::SolveTrace;

fn parse_err(line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Splits off a `# key=value ...` header line and returns the pairs with the
/// remaining text.
fn split_meta(text: &str) -> Result<(Vec<(String, String)>, &str)> {
    let (first, rest) = text.split_once('\n').unwrap_or((text, ""));
    let first = first.trim_end_matches('\r');
    let body = first
        .strip_prefix('#')
        .ok_or_else(|| parse_err(1, "expected a '# key=value' header line"))?;
    let mut pairs = Vec::new();
    for token in body.split_whitespace() {
        let (k, v) = token
            .split_once('=')
            .ok_or_else(|| parse_err(1, format!("malformed header token '{token}'")))?;
        pairs.push((k.to_string(), v.to_string()));
    }
    Ok((pairs, rest))
}

fn meta<'a>(pairs: &'a [(String, String)], key: &str) -> Result<&'a str> {
    pairs
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .ok_or_else(|| parse_err(1, format!("header is missing '{key}'")))
}

fn meta_usize(pairs: &[(String, String)], key: &str) -> Result<usize> {
    meta(pairs, key)?
        .parse()
        .map_err(|_| parse_err(1, format!("header value for '{key}' is not an integer")))
}

/// Reads CSV records below an expected header. `line_offset` accounts for
/// lines consumed before the CSV body.
fn records(
    text: &str,
    header: &[&str],
    optional_tail: usize,
    line_offset: u64,
) -> Result<Vec<(u64, csv::StringRecord)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let found = rdr.headers().map_err(|e| shift(e.into(), line_offset))?.clone();
    let found: Vec<&str> = found.iter().collect();
    let required = &header[..header.len() - optional_tail];
    if found.len() < required.len() || found.len() > header.len() || found[..] != header[..found.len()] {
        return Err(parse_err(
            line_offset + 1,
            format!("expected header '{}', found '{}'", header.join(","), found.join(",")),
        ));
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| shift(e.into(), line_offset))?;
        let line = rec.position().map_or(0, |p| p.line()) + line_offset;
        out.push((line, rec));
    }
    Ok(out)
}

fn shift(e: Error, offset: u64) -> Error {
    match e {
        Error::Parse { line, message } => Error::Parse {
            line: line + offset,
            message,
        },
        other => other,
    }
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, idx: usize, name: &str, line: u64) -> Result<T> {
    let raw = rec.get(idx).unwrap_or("");
    raw.parse()
        .map_err(|_| parse_err(line, format!("invalid {name} '{raw}'")))
}

fn read_all(mut r: impl Read) -> Result<String> {
    let mut s = String::new();
    r.read_to_string(&mut s)?;
    Ok(s)
}

/// Assigns each row to its id, requiring ids to cover `0..n` exactly once.
fn place<T: Clone>(rows: Vec<(u64, usize, T)>) -> Result<Vec<T>> {
    let n = rows.len();
    let mut slots: Vec<Option<T>> = vec![None; n];
    for (line, id, v) in rows {
        if id >= n {
            return Err(parse_err(line, format!("id {id} outside 0..{n}")));
        }
        if slots[id].is_some() {
            return Err(parse_err(line, format!("duplicate id {id}")));
        }
        slots[id] = Some(v);
    }
    Ok(slots.into_iter().map(|v| v.expect("all ids placed")).collect())
}

/// Vertex positions with optional per-vertex values.
#[derive(Debug, Clone, PartialEq)]
pub struct PointTable {
    pub points: Vec<Point>,
    pub values: Option<Vec<f64>>,
}

/// Reads `id,x,y[,value]`.
pub fn read_points(r: impl Read) -> Result<PointTable> {
    let text = read_all(r)?;
    let rows = records(&text, &["id", "x", "y", "value"], 1, 0)?;
    if rows.is_empty() {
        return Err(parse_err(1, "no points"));
    }
    let has_values = rows[0].1.len() == 4;
    let mut parsed = Vec::with_capacity(rows.len());
    for (line, rec) in &rows {
        let id: usize = field(rec, 0, "id", *line)?;
        let x: f64 = field(rec, 1, "x", *line)?;
        let y: f64 = field(rec, 2, "y", *line)?;
        let v: f64 = if has_values {
            field(rec, 3, "value", *line)?
        } else {
            0.0
        };
        if !(x.is_finite() && y.is_finite() && v.is_finite()) {
            return Err(parse_err(*line, "non-finite value"));
        }
        parsed.push((*line, id, (Point::new(x, y), v)));
    }
    let placed = place(parsed)?;
    let points = placed.iter().map(|p| p.0).collect();
    let values = has_values.then(|| placed.iter().map(|p| p.1).collect());
    Ok(PointTable { points, values })
}

pub fn write_points(points: &[Point], values: Option<&[f64]>, mut w: impl Write) -> Result<()> {
    match values {
        Some(v) => {
            if v.len() != points.len() {
                return Err(Error::arg("values and points differ in length"));
            }
            writeln!(w, "id,x,y,value")?;
            for (i, (p, v)) in points.iter().zip(v).enumerate() {
                writeln!(w, "{i},{},{},{v}", p.x, p.y)?;
            }
        }
        None => {
            writeln!(w, "id,x,y")?;
            for (i, p) in points.iter().enumerate() {
                writeln!(w, "{i},{},{}", p.x, p.y)?;
            }
        }
    }
    Ok(())
}

/// Writes the edge list `i,j` with `i < j`.
pub fn write_edges(g: &Graph, mut w: impl Write) -> Result<()> {
    writeln!(w, "i,j")?;
    for (i, j) in g.edges() {
        writeln!(w, "{i},{j}")?;
    }
    Ok(())
}

pub fn read_edges(r: impl Read) -> Result<Vec<(usize, usize)>> {
    let text = read_all(r)?;
    let mut out = Vec::new();
    for (line, rec) in records(&text, &["i", "j"], 0, 0)? {
        let i: usize = field(&rec, 0, "vertex", line)?;
        let j: usize = field(&rec, 1, "vertex", line)?;
        out.push((i, j));
    }
    Ok(out)
}

/// Writes `# n=<n> width=<ω>` followed by `i,j,value` triplets.
pub fn write_filter(h: &GraphFilter, mut w: impl Write) -> Result<()> {
    writeln!(w, "# n={} width={}", h.n(), h.width())?;
    writeln!(w, "i,j,value")?;
    for (i, j, v) in h.triplets() {
        writeln!(w, "{i},{j},{v}")?;
    }
    Ok(())
}

/// Reads a filter on `graph`, checking the recorded size and width.
pub fn read_filter(graph: &Arc<Graph>, r: impl Read) -> Result<GraphFilter> {
    let text = read_all(r)?;
    let (pairs, body) = split_meta(&text)?;
    let n = meta_usize(&pairs, "n")?;
    let width = meta_usize(&pairs, "width")?;
    if n != graph.n() {
        return Err(parse_err(1, format!("filter has n={n}, graph has {}", graph.n())));
    }
    let mut triplets = Vec::new();
    for (line, rec) in records(body, &["i", "j", "value"], 0, 1)? {
        let i: usize = field(&rec, 0, "row", line)?;
        let j: usize = field(&rec, 1, "column", line)?;
        let v: f64 = field(&rec, 2, "value", line)?;
        if i >= n || j >= n {
            return Err(parse_err(line, format!("entry ({i},{j}) outside {n}x{n}")));
        }
        triplets.push((i, j, v));
    }
    let h = GraphFilter::from_triplets(Arc::clone(graph), triplets)?;
    if h.width() != width {
        return Err(parse_err(
            1,
            format!("header width {width} but entries have width {}", h.width()),
        ));
    }
    Ok(h)
}

pub fn write_signal(values: &[f64], mut w: impl Write) -> Result<()> {
    writeln!(w, "id,value")?;
    for (i, v) in values.iter().enumerate() {
        writeln!(w, "{i},{v}")?;
    }
    Ok(())
}

pub fn read_signal_values(r: impl Read) -> Result<Vec<f64>> {
    let text = read_all(r)?;
    let mut rows = Vec::new();
    for (line, rec) in records(&text, &["id", "value"], 0, 0)? {
        let id: usize = field(&rec, 0, "id", line)?;
        let v: f64 = field(&rec, 1, "value", line)?;
        rows.push((line, id, v));
    }
    place(rows)
}

pub fn read_signal(graph: &Arc<Graph>, r: impl Read) -> Result<Signal> {
    Signal::new(Arc::clone(graph), read_signal_values(r)?)
}

/// Writes `# kind=<kind> width=<ω>` followed by `id,value`.
pub fn write_preconditioner(p: &DiagonalPreconditioner, mut w: impl Write) -> Result<()> {
    writeln!(w, "# kind={} width={}", p.kind(), p.source_width())?;
    writeln!(w, "id,value")?;
    for (i, v) in p.values().iter().enumerate() {
        writeln!(w, "{i},{v}")?;
    }
    Ok(())
}

pub fn read_preconditioner(graph: &Arc<Graph>, r: impl Read) -> Result<DiagonalPreconditioner> {
    let text = read_all(r)?;
    let (pairs, body) = split_meta(&text)?;
    let kind: PreconditionerKind = meta(&pairs, "kind")?.parse()?;
    let width = meta_usize(&pairs, "width")?;
    let mut rows = Vec::new();
    for (line, rec) in records(body, &["id", "value"], 0, 1)? {
        let id: usize = field(&rec, 0, "id", line)?;
        let v: f64 = field(&rec, 1, "value", line)?;
        rows.push((line, id, v));
    }
    DiagonalPreconditioner::from_parts(Arc::clone(graph), place(rows)?, kind, width)
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

/// Writes `method,m,residual,rel_error,weighted_error,snr`; unknown metrics
/// are left empty.
pub fn write_traces<'a>(traces: impl IntoIterator<Item = &'a SolveTrace>, mut w: impl Write) -> Result<()> {
    writeln!(w, "method,m,residual,rel_error,weighted_error,snr")?;
    for t in traces {
        for r in &t.records {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                t.method,
                r.m,
                r.residual,
                opt(r.relative_error),
                opt(r.weighted_error),
                opt(r.snr)
            )?;
        }
    }
    Ok(())
}

/// Writes `epoch,round,from,to,kind,value` for every recorded message.
/// With `include_values` off the value column is left empty.
pub fn write_round_log(log: &RoundLog, include_values: bool, mut w: impl Write) -> Result<()> {
    writeln!(w, "epoch,round,from,to,kind,value")?;
    for (round, m) in log.messages() {
        if include_values {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                round.epoch, round.index, m.from, m.to, m.kind, m.value
            )?;
        } else {
            writeln!(w, "{},{},{},{},{},", round.epoch, round.index, m.from, m.to, m.kind)?;
        }
    }
    Ok(())
}

/// Writes `bytes` to `path` through a temporary file in the same directory
/// followed by a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::arg(format!("'{}' has no file name", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| -> io::Result<()> {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

/// Opens a file for buffered reading.
pub fn open(path: &Path) -> Result<impl BufRead> {
    Ok(BufReader::new(fs::File::open(path)?))
}
