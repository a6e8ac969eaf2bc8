//! Deterministic serialization: strict JSON parsers for input laws and
//! channels, and CSV/JSON emitters for regions, curves, enumeration points,
//! and simulation reports.
//!
//! Emission is byte-deterministic (floats use Rust's shortest round-trip
//! formatting), headers are part of the public contract, and every CSV this
//! module writes can be read back by its own parser.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::info::{AuxChannel, JointPmf, Pmf};
use crate::region::am::TradeoffCurve;
use crate::region::star::RegionBundle;
use crate::region::Orientation;
use crate::sim::SimReport;
use serde::{Deserialize, Serialize};

/// Output encodings for region bundles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("csv") {
            Ok(ExportFormat::Csv)
        } else if s.eq_ignore_ascii_case("json") {
            Ok(ExportFormat::Json)
        } else {
            Err(Error::UnsupportedFormat(s.to_string()))
        }
    }
}

/// On-disk schema for a two-source law: `pmf[i][j] = P(X=i, Y=j)`, so rows
/// index X. Tables written Y-major must be transposed into this layout
/// before ingestion.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistributionFile {
    pub x_size: usize,
    pub y_size: usize,
    pub pmf: Vec<Vec<f64>>,
}

/// On-disk schema for a quantization channel: `rows[y][u] = p(u|y)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelFile {
    pub input_size: usize,
    pub output_size: usize,
    pub rows: Vec<Vec<f64>>,
}

fn check_matrix(
    what: &str,
    matrix: &[Vec<f64>],
    rows: usize,
    cols: usize,
) -> Result<()> {
    if matrix.len() != rows {
        return Err(Error::ShapeMismatch(format!(
            "{what} declares {rows} rows but provides {}",
            matrix.len()
        )));
    }
    for (i, row) in matrix.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::ShapeMismatch(format!(
                "{what} row {i} has {} entries, expected {cols}",
                row.len()
            )));
        }
        for (jx, &v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::Parse(format!(
                    "{what} entry [{i}][{jx}] is not a finite number"
                )));
            }
            if v < 0.0 {
                return Err(Error::NegativeEntry(format!(
                    "{what} entry [{i}][{jx}] = {v}"
                )));
            }
        }
    }
    Ok(())
}

/// Parse a JSON law with keys `x_size`, `y_size`, `pmf` into a two-axis
/// joint over axes `X` (first) and `Y` (second). The file convention is
/// X-major: `pmf[i][j] = P(X=i, Y=j)`.
pub fn parse_distribution(text: &str) -> Result<JointPmf> {
    let file: DistributionFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    check_matrix("pmf", &file.pmf, file.x_size, file.y_size)?;
    let sum: f64 = file.pmf.iter().flatten().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::Normalization(format!(
            "pmf entries sum to {sum}, expected 1"
        )));
    }
    let probs: Vec<f64> = file.pmf.into_iter().flatten().collect();
    JointPmf::new(vec!["X", "Y"], vec![file.x_size, file.y_size], probs)
}

/// Parse a JSON channel with keys `input_size`, `output_size`, `rows`,
/// where `rows[y][u] = p(u|y)` and every row is a probability vector.
pub fn parse_channel(text: &str) -> Result<AuxChannel> {
    let file: ChannelFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    check_matrix("rows", &file.rows, file.input_size, file.output_size)?;
    for (y, row) in file.rows.iter().enumerate() {
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Normalization(format!(
                "channel row {y} sums to {sum}, expected 1"
            )));
        }
    }
    let rows = file
        .rows
        .into_iter()
        .map(Pmf::new)
        .collect::<Result<Vec<_>>>()?;
    AuxChannel::new(rows)
}

const REGION_HEADER: &str = "region,delta_x,delta_y";
const REGION_NAMES: [&str; 4] = ["am", "ma", "aa", "star"];

/// Serialize a region bundle. CSV writes one row per vertex per region
/// under the header `region,delta_x,delta_y`, regions ordered
/// `am, ma, aa, star` (an empty region simply contributes no rows); JSON is
/// the full bundle including rates and digests.
pub fn export_region(bundle: &RegionBundle, format: ExportFormat) -> Result<String> {
    match format {
        ExportFormat::Csv => {
            let mut out = String::new();
            out.push_str(REGION_HEADER);
            out.push('\n');
            let regions = [&bundle.am, &bundle.ma, &bundle.aa, &bundle.star];
            for (name, region) in REGION_NAMES.iter().zip(regions) {
                for &(x, y) in region.vertices() {
                    writeln!(out, "{name},{x},{y}").expect("string writes are infallible");
                }
            }
            Ok(out)
        }
        ExportFormat::Json => {
            serde_json::to_string_pretty(bundle).map_err(|e| Error::Parse(e.to_string()))
        }
    }
}

/// Read back a region CSV: consecutive rows sharing a region name are
/// grouped, preserving file order.
pub fn parse_region_csv(text: &str) -> Result<Vec<(String, Vec<Point>)>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim_end() == REGION_HEADER => {}
        other => {
            return Err(Error::Parse(format!(
                "expected header `{REGION_HEADER}`, got {other:?}"
            )))
        }
    }
    let mut groups: Vec<(String, Vec<Point>)> = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let mut cols = line.splitn(3, ',');
        let (name, xs, ys) = match (cols.next(), cols.next(), cols.next()) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => {
                return Err(Error::Parse(format!(
                    "row {} has fewer than 3 columns: `{line}`",
                    idx + 2
                )))
            }
        };
        let x = parse_float(xs, idx + 2)?;
        let y = parse_float(ys, idx + 2)?;
        match groups.last_mut() {
            Some((last, pts)) if last == name => pts.push((x, y)),
            _ => groups.push((name.to_string(), vec![(x, y)])),
        }
    }
    Ok(groups)
}

/// Read back a JSON region bundle produced by [`export_region`].
pub fn parse_region_json(text: &str) -> Result<RegionBundle> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn parse_float(s: &str, row: usize) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|e| Error::Parse(format!("row {row}: bad number `{s}`: {e}")))
}

fn curve_header(orientation: Orientation) -> &'static str {
    match orientation {
        Orientation::Am => "delta_a,delta_m_min",
        Orientation::Ma => "delta_y,delta_x_min",
    }
}

/// Serialize a tradeoff curve as CSV. The header names follow the
/// orientation: `delta_a,delta_m_min` for an X-amplifying curve and
/// `delta_y,delta_x_min` for the mirrored one.
pub fn curve_to_csv(curve: &TradeoffCurve, orientation: Orientation) -> String {
    let mut out = String::new();
    out.push_str(curve_header(orientation));
    out.push('\n');
    for &(x, y) in &curve.points {
        writeln!(out, "{x},{y}").expect("string writes are infallible");
    }
    out
}

/// Read back a curve CSV written by [`curve_to_csv`]. The largest
/// first-column value doubles as the feasibility limit, matching how curves
/// are constructed (their last sample sits exactly at the limit).
pub fn parse_curve_csv(text: &str, orientation: Orientation) -> Result<TradeoffCurve> {
    let header = curve_header(orientation);
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim_end() == header => {}
        other => {
            return Err(Error::Parse(format!(
                "expected header `{header}`, got {other:?}"
            )))
        }
    }
    let mut points = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let mut cols = line.splitn(2, ',');
        let (xs, ys) = match (cols.next(), cols.next()) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(Error::Parse(format!(
                    "row {} has fewer than 2 columns: `{line}`",
                    idx + 2
                )))
            }
        };
        points.push((parse_float(xs, idx + 2)?, parse_float(ys, idx + 2)?));
    }
    let domain_max = points.last().map_or(0.0, |&(x, _)| x);
    Ok(TradeoffCurve { points, domain_max })
}

const ORACLE_HEADER: &str = "ix,iy";

/// Serialize enumerated encoder points as CSV under the header `ix,iy`,
/// optionally followed by a trailing `# verdict: …` comment line.
pub fn oracle_points_to_csv(points: &[(f64, f64)], verdict: Option<&str>) -> String {
    let mut out = String::new();
    out.push_str(ORACLE_HEADER);
    out.push('\n');
    for &(ix, iy) in points {
        writeln!(out, "{ix},{iy}").expect("string writes are infallible");
    }
    if let Some(v) = verdict {
        writeln!(out, "# verdict: {v}").expect("string writes are infallible");
    }
    out
}

/// Read back an enumeration CSV written by [`oracle_points_to_csv`],
/// returning the points and the verdict comment when present.
#[allow(clippy::type_complexity)]
pub fn parse_oracle_csv(text: &str) -> Result<(Vec<(f64, f64)>, Option<String>)> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim_end() == ORACLE_HEADER => {}
        other => {
            return Err(Error::Parse(format!(
                "expected header `{ORACLE_HEADER}`, got {other:?}"
            )))
        }
    }
    let mut points = Vec::new();
    let mut verdict = None;
    for (idx, line) in lines.enumerate() {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(v) = rest.trim_start().strip_prefix("verdict:") {
                verdict = Some(v.trim().to_string());
            }
            continue;
        }
        let mut cols = line.splitn(2, ',');
        let (xs, ys) = match (cols.next(), cols.next()) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(Error::Parse(format!(
                    "row {} has fewer than 2 columns: `{line}`",
                    idx + 2
                )))
            }
        };
        points.push((parse_float(xs, idx + 2)?, parse_float(ys, idx + 2)?));
    }
    Ok((points, verdict))
}

/// Serialize a simulation report as pretty-printed JSON.
pub fn report_to_json(report: &SimReport) -> Result<String> {
    serde_json::to_string_pretty(report).map_err(|e| Error::Parse(e.to_string()))
}

/// Read back a JSON simulation report.
pub fn parse_report_json(text: &str) -> Result<SimReport> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}
