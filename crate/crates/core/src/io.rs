//! Text formats for instances, balls and solutions.
//!
//! Instance CSV: a header line `n=<n>,m=<m>` followed by one point per line,
//! `p0,pbar_1,...,pbar_{n-1}`. Instance JSON: `{"n": n, "points": [[p0, ...], ...]}`.
//! Ball CSV: one ball per line, `r,c_1,...,c_d`. Numbers are written with 17
//! significant digits so that reading back is exact.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DualCertificate, DualEntry, Instance, Point, SolveResult};
use crate::reductions::{Ball, BallMode, BallResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// `.json` means JSON, anything else CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Non-blank lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty())
}

/// Comma-separated floats; columns in errors are 1-based character offsets.
fn parse_row(line_no: usize, line: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    let mut col = 1;
    for field in line.split(',') {
        let lead = field.len() - field.trim_start().len();
        let tok = field.trim();
        let v: f64 = tok
            .parse()
            .map_err(|_| parse_err(line_no, col + lead, format!("invalid number {tok:?}")))?;
        if !v.is_finite() {
            return Err(parse_err(line_no, col + lead, format!("non-finite number {tok:?}")));
        }
        out.push(v);
        col += field.chars().count() + 1;
    }
    Ok(out)
}

fn parse_header(line_no: usize, line: &str) -> Result<(usize, usize)> {
    let mut n = None;
    let mut m = None;
    let mut col = 1;
    for field in line.split(',') {
        let (key, val) = field
            .trim()
            .split_once('=')
            .ok_or_else(|| parse_err(line_no, col, "expected header `n=<int>,m=<int>`"))?;
        let val: usize = val
            .trim()
            .parse()
            .map_err(|_| parse_err(line_no, col, format!("invalid integer {:?}", val.trim())))?;
        match key.trim() {
            "n" => n = Some(val),
            "m" => m = Some(val),
            other => return Err(parse_err(line_no, col, format!("unknown header key {other:?}"))),
        }
        col += field.chars().count() + 1;
    }
    match (n, m) {
        (Some(n), Some(m)) => Ok((n, m)),
        _ => Err(parse_err(line_no, 1, "header must give both n and m")),
    }
}

pub fn parse_instance_csv(text: &str) -> Result<Instance> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, 1, "missing header"))?;
    let (n, m) = parse_header(hl, header)?;
    let mut points = Vec::with_capacity(m);
    let mut last_line = hl;
    for (no, line) in lines {
        let row = parse_row(no, line)?;
        if row.len() != n {
            return Err(parse_err(
                no,
                1,
                format!("expected {n} values, found {}", row.len()),
            ));
        }
        points.push(Point::from_slice(&row));
        last_line = no;
    }
    if points.len() != m {
        return Err(parse_err(
            last_line + 1,
            1,
            format!("header announces {m} points, found {}", points.len()),
        ));
    }
    Instance::new(n, points)
}

fn fmt_f64(out: &mut String, v: f64) {
    let _ = write!(out, "{v:.16e}");
}

fn write_row(out: &mut String, vals: impl IntoIterator<Item = f64>) {
    for (i, v) in vals.into_iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        fmt_f64(out, v);
    }
    out.push('\n');
}

pub fn instance_to_csv(inst: &Instance) -> String {
    let mut out = format!("n={},m={}\n", inst.n(), inst.m());
    for p in inst.points() {
        write_row(&mut out, p.coords());
    }
    out
}

#[derive(Serialize, Deserialize)]
struct InstanceJson {
    n: usize,
    points: Vec<Vec<f64>>,
}

fn json_err(e: serde_json::Error) -> Error {
    parse_err(e.line(), e.column(), e.to_string())
}

pub fn parse_instance_json(text: &str) -> Result<Instance> {
    let raw: InstanceJson = serde_json::from_str(text).map_err(json_err)?;
    let points = raw
        .points
        .iter()
        .enumerate()
        .map(|(i, row)| {
            if row.is_empty() {
                Err(Error::DimensionMismatch {
                    expected: raw.n.saturating_sub(1),
                    found: 0,
                    index: Some(i),
                })
            } else {
                Ok(Point::from_slice(row))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Instance::new(raw.n, points)
}

pub fn instance_to_json(inst: &Instance) -> String {
    let raw = InstanceJson {
        n: inst.n(),
        points: inst.points().iter().map(Point::coords).collect(),
    };
    serde_json::to_string_pretty(&raw).expect("plain data serializes")
}

pub fn parse_instance(text: &str, format: Format) -> Result<Instance> {
    match format {
        Format::Csv => parse_instance_csv(text),
        Format::Json => parse_instance_json(text),
    }
}

pub fn format_instance(inst: &Instance, format: Format) -> String {
    match format {
        Format::Csv => instance_to_csv(inst),
        Format::Json => instance_to_json(inst),
    }
}

/// Reads an instance, choosing the format from the file extension.
pub fn read_instance(path: &Path) -> Result<Instance> {
    parse_instance(&fs::read_to_string(path)?, Format::from_path(path))
}

pub fn write_instance(inst: &Instance, path: &Path, format: Format) -> Result<()> {
    fs::write(path, format_instance(inst, format))?;
    Ok(())
}

/// Ball rows `r,c_1,...,c_d`.
pub fn parse_balls_csv(text: &str) -> Result<Vec<Ball>> {
    let mut balls = Vec::new();
    let mut dim = None;
    for (no, line) in content_lines(text) {
        let row = parse_row(no, line)?;
        if row.len() < 2 {
            return Err(parse_err(no, 1, "a ball needs a radius and at least one coordinate"));
        }
        if *dim.get_or_insert(row.len()) != row.len() {
            return Err(parse_err(
                no,
                1,
                format!("expected {} values, found {}", dim.unwrap(), row.len()),
            ));
        }
        if row[0] < 0.0 {
            return Err(parse_err(no, 1, "negative radius"));
        }
        balls.push(Ball::from_slice(&row[1..], row[0]));
    }
    Ok(balls)
}

pub fn balls_to_csv(balls: &[Ball]) -> String {
    let mut out = String::new();
    for b in balls {
        write_row(&mut out, std::iter::once(b.radius).chain(b.center.iter().copied()));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsRecord {
    pub iterations: usize,
    pub spair_updates: usize,
    pub partial_steps: usize,
    pub affdep_drops: usize,
    pub time_s: f64,
}

/// Serialized solution: `dual[k]` is `y_i0` for `i = support[k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub x0: f64,
    pub xbar: Vec<f64>,
    pub support: Vec<usize>,
    pub dual: Vec<f64>,
    pub stats: StatsRecord,
}

impl SolutionRecord {
    pub fn from_result(res: &SolveResult) -> Self {
        Self {
            x0: res.x0(),
            xbar: res.x_star.spatial.iter().copied().collect(),
            support: res.support.clone(),
            dual: res.support.iter().map(|&i| res.dual.y(i).0).collect(),
            stats: StatsRecord {
                iterations: res.stats.major_iterations,
                spair_updates: res.stats.spair_updates,
                partial_steps: res.stats.partial_steps,
                affdep_drops: res.stats.affdep_drops,
                time_s: res.stats.wall_time.as_secs_f64(),
            },
        }
    }

    pub fn point(&self) -> Point {
        Point::new(self.x0, nalgebra::DVector::from_column_slice(&self.xbar))
    }

    /// Rebuilds the full dual blocks from the stored heights, using
    /// `ybar_i = y_i0 (xbar - pbar_i) / (p_i0 - x0)` (zero when the gap is).
    pub fn certificate(&self, inst: &Instance) -> Result<DualCertificate> {
        let x = self.point();
        if x.dim() != inst.n() {
            return Err(Error::dims(inst.n(), x.dim()));
        }
        let mut entries = Vec::with_capacity(self.support.len());
        for (&i, &y0) in self.support.iter().zip(&self.dual) {
            if i >= inst.m() {
                return Err(Error::IndexOutOfRange { index: i, len: inst.m() });
            }
            let p = inst.point(i);
            let gap = p.height - x.height;
            let ybar = if gap > 0.0 {
                (&x.spatial - &p.spatial) * (y0 / gap)
            } else {
                nalgebra::DVector::zeros(inst.n() - 1)
            };
            entries.push(DualEntry { index: i, y0, ybar });
        }
        Ok(DualCertificate::new(inst.m(), inst.n(), entries))
    }
}

pub fn solution_to_json(res: &SolveResult) -> String {
    serde_json::to_string_pretty(&SolutionRecord::from_result(res)).expect("plain data serializes")
}

pub fn parse_solution_json(text: &str) -> Result<SolutionRecord> {
    let rec: SolutionRecord = serde_json::from_str(text).map_err(json_err)?;
    if rec.dual.len() != rec.support.len() {
        return Err(parse_err(
            1,
            1,
            format!(
                "dual has {} weights for {} support indices",
                rec.dual.len(),
                rec.support.len()
            ),
        ));
    }
    Ok(rec)
}

#[derive(Serialize)]
struct BallRecord<'a> {
    radius: f64,
    center: Vec<f64>,
    support: &'a [usize],
    mode: &'static str,
    x0: f64,
}

pub fn mode_name(mode: BallMode) -> &'static str {
    match mode {
        BallMode::Enclosing => "enclosing",
        BallMode::Intersecting => "intersecting",
        BallMode::Enclosed => "enclosed",
        BallMode::Mixed => "mixed",
    }
}

pub fn ball_result_to_json(res: &BallResult) -> String {
    let rec = BallRecord {
        radius: res.ball.radius,
        center: res.ball.center.iter().copied().collect(),
        support: &res.support_indices,
        mode: mode_name(res.mode),
        x0: res.solution.x0(),
    };
    serde_json::to_string_pretty(&rec).expect("plain data serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::generate_normal;
    use crate::solver::{solve, SolverConfig};

    #[test]
    fn csv_round_trip_is_exact() {
        let inst = generate_normal(4, 30, 3).unwrap();
        let back = parse_instance_csv(&instance_to_csv(&inst)).unwrap();
        assert_eq!(inst, back);
    }

    #[test]
    fn json_round_trip_and_cross_format() {
        let inst = generate_normal(3, 12, 5).unwrap();
        let j = parse_instance_json(&instance_to_json(&inst)).unwrap();
        assert_eq!(inst, j);
        let c = parse_instance_csv(&instance_to_csv(&j)).unwrap();
        assert_eq!(c, j);
    }

    #[test]
    fn json_field_order() {
        let inst = Instance::from_rows(&[vec![1.0, 2.0]]).unwrap();
        let s = instance_to_json(&inst);
        assert!(s.find("\"n\"").unwrap() < s.find("\"points\"").unwrap());
    }

    #[test]
    fn malformed_row_names_line_and_column() {
        let text = "n=3,m=2\n0,1,2\n0, x,2\n";
        match parse_instance_csv(text) {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (3, 4)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn short_row_and_count_mismatch() {
        assert!(matches!(
            parse_instance_csv("n=3,m=1\n0,1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_instance_csv("n=3,m=2\n0,1,2\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(parse_instance_csv("3,2\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_instance_csv(""), Err(Error::Parse { .. })));
    }

    #[test]
    fn json_errors() {
        assert!(matches!(
            parse_instance_json("{\"n\": 3, \"points\": [[0, 1]]}"),
            Err(Error::DimensionMismatch { index: Some(0), .. })
        ));
        assert!(matches!(
            parse_instance_json("{\"n\": 3,\n \"points\": [[0, 1, }"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn balls_round_trip() {
        let balls = vec![Ball::from_slice(&[0.1, -2.0], 0.5), Ball::from_slice(&[1.0 / 3.0, 4.0], 0.0)];
        assert_eq!(parse_balls_csv(&balls_to_csv(&balls)).unwrap(), balls);
        assert!(matches!(parse_balls_csv("1,0,0\n1,0\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_balls_csv("-1,0\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn solution_json_layout() {
        let inst = Instance::from_rows(&[vec![0.0, -1.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        let res = solve(&inst, &SolverConfig::default()).unwrap();
        let text = solution_to_json(&res);
        let keys = ["\"x0\"", "\"xbar\"", "\"support\"", "\"dual\"", "\"stats\""];
        let pos: Vec<_> = keys.iter().map(|k| text.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
        let rec = parse_solution_json(&text).unwrap();
        assert_eq!(rec.x0, -1.0);
        assert_eq!(rec.dual, vec![0.5, 0.5]);
    }
}
