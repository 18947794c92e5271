//! CSV, text-report and SVG rendering.
//!
//! Every CSV starts with one `# pmu <kind> v<N> ...` comment line followed by
//! the column header. Floats use Rust's shortest round-trip formatting, so
//! the files are locale-independent and re-ingest exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use pmu_core::{
    Decision, FrontierPoint, MissionOutput, ModeSummary, OperatingPoint, SweepCell, SweepGrid, TraceSample,
};

use crate::error::CliError;

pub const CSV_VERSION: u32 = 1;

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(preamble: String, w: csv::Writer<Vec<u8>>) -> Result<String, CliError> {
    let body = w.into_inner().map_err(|e| CliError::Runtime(e.to_string()))?;
    let body = String::from_utf8(body).map_err(|e| CliError::Runtime(e.to_string()))?;
    Ok(preamble + &body)
}

fn preamble(kind: &str, extra: &[(&str, String)]) -> String {
    let mut s = format!("# pmu {kind} v{CSV_VERSION}");
    for (k, v) in extra {
        let _ = write!(s, " {k}={v}");
    }
    s.push('\n');
    s
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn finite(v: f64) -> String {
    if v.is_finite() {
        v.to_string()
    } else {
        String::new()
    }
}

pub fn grid_csv(grid: &SweepGrid) -> Result<String, CliError> {
    let mut w = writer();
    w.write_record([
        "dvfs_index",
        "frequency_hz",
        "speed_index",
        "speed_mps",
        "throughput",
        "energy_j",
    ])?;
    for c in &grid.cells {
        w.write_record([
            c.point.dvfs_index.to_string(),
            c.frequency_hz.to_string(),
            c.point.speed_index.to_string(),
            c.speed_mps.to_string(),
            c.throughput.to_string(),
            opt(c.energy_j),
        ])?;
    }
    let pre = preamble(
        "grid",
        &[
            ("entropy", grid.entropy.to_string()),
            ("distance_m", grid.distance_m.to_string()),
        ],
    );
    finish(pre, w)
}

fn bad_grid(msg: impl Into<String>) -> CliError {
    CliError::Config(format!("grid CSV: {}", msg.into()))
}

/// Reads a file written by [`grid_csv`].
pub fn parse_grid_csv(text: &str) -> Result<SweepGrid, CliError> {
    let first = text.lines().next().unwrap_or_default();
    let expected = format!("# pmu grid v{CSV_VERSION}");
    let meta = first
        .strip_prefix(&expected)
        .ok_or_else(|| bad_grid(format!("first line must start with {expected:?}")))?;
    let mut fields = BTreeMap::new();
    for kv in meta.split_whitespace() {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| bad_grid(format!("bad header field {kv:?}")))?;
        let v: f64 = v
            .parse()
            .map_err(|_| bad_grid(format!("bad number in header field {kv:?}")))?;
        fields.insert(k, v);
    }
    let entropy = *fields
        .get("entropy")
        .ok_or_else(|| bad_grid("header lacks entropy"))?;
    let distance_m = *fields
        .get("distance_m")
        .ok_or_else(|| bad_grid("header lacks distance_m"))?;
    if !(distance_m > 0.0) {
        return Err(bad_grid("distance_m must be > 0"));
    }

    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| bad_grid(e.to_string()))?.clone();
    let columns = [
        "dvfs_index",
        "frequency_hz",
        "speed_index",
        "speed_mps",
        "throughput",
        "energy_j",
    ];
    if header.iter().ne(columns) {
        return Err(bad_grid(format!("expected columns {}", columns.join(","))));
    }
    let mut cells = BTreeMap::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| bad_grid(e.to_string()))?;
        let line = i + 3;
        let num = |k: usize| -> Result<f64, CliError> {
            rec[k].parse().map_err(|_| {
                bad_grid(format!(
                    "line {line}: {} = {:?} is not a number",
                    columns[k], &rec[k]
                ))
            })
        };
        let idx = |k: usize| -> Result<usize, CliError> {
            rec[k].parse().map_err(|_| {
                bad_grid(format!(
                    "line {line}: {} = {:?} is not an index",
                    columns[k], &rec[k]
                ))
            })
        };
        let point = OperatingPoint::new(idx(0)?, idx(2)?);
        let energy_j = if rec[5].is_empty() { None } else { Some(num(5)?) };
        let cell = SweepCell {
            point,
            frequency_hz: num(1)?,
            speed_mps: num(3)?,
            throughput: num(4)?,
            energy_j,
        };
        if cells.insert(point, cell).is_some() {
            return Err(bad_grid(format!("line {line}: duplicate cell {point}")));
        }
    }
    let dvfs_levels = cells.keys().map(|p| p.dvfs_index + 1).max().unwrap_or(0);
    let speed_levels = cells.keys().map(|p| p.speed_index + 1).max().unwrap_or(0);
    if cells.is_empty() || cells.len() != dvfs_levels * speed_levels {
        return Err(bad_grid("grid is incomplete"));
    }
    Ok(SweepGrid {
        dvfs_levels,
        speed_levels,
        entropy,
        distance_m,
        cells: cells.into_values().collect(),
    })
}

pub fn frontier_csv(points: &[FrontierPoint], argmin: Option<usize>) -> Result<String, CliError> {
    let mut w = writer();
    w.write_record([
        "speed_index",
        "dvfs_index",
        "speed_mps",
        "min_frequency_hz",
        "j_per_m",
        "argmin",
    ])?;
    for (i, p) in points.iter().enumerate() {
        w.write_record([
            p.speed_index.to_string(),
            p.dvfs_index.to_string(),
            p.speed_mps.to_string(),
            p.frequency_hz.to_string(),
            p.j_per_m.to_string(),
            u8::from(argmin == Some(i)).to_string(),
        ])?;
    }
    finish(preamble("frontier", &[]), w)
}

pub fn trace_csv(trace: &[TraceSample]) -> Result<String, CliError> {
    let mut w = writer();
    w.write_record([
        "time_s",
        "position_m",
        "speed_mps",
        "dvfs_index",
        "speed_index",
        "p_motor_w",
        "p_cpu_w",
        "throughput",
        "entropy",
        "event_rate_eps",
    ])?;
    for s in trace {
        w.write_record([
            s.time_s.to_string(),
            s.position_m.to_string(),
            s.speed_mps.to_string(),
            s.dvfs_index.to_string(),
            s.speed_index.to_string(),
            s.p_motor_w.to_string(),
            s.p_cpu_w.to_string(),
            s.throughput.to_string(),
            s.entropy.to_string(),
            s.event_rate_eps.to_string(),
        ])?;
    }
    finish(preamble("trace", &[]), w)
}

pub fn decisions_csv(decisions: &[Decision]) -> Result<String, CliError> {
    let mut w = writer();
    w.write_record([
        "time_s",
        "event",
        "from_dvfs_index",
        "from_speed_index",
        "to_dvfs_index",
        "to_speed_index",
        "j_per_m",
        "feasible",
    ])?;
    for d in decisions {
        w.write_record([
            d.time_s.to_string(),
            d.event.as_str().to_string(),
            d.from.dvfs_index.to_string(),
            d.from.speed_index.to_string(),
            d.to.dvfs_index.to_string(),
            d.to.speed_index.to_string(),
            finite(d.cost),
            u8::from(d.feasible).to_string(),
        ])?;
    }
    finish(preamble("decisions", &[]), w)
}

pub fn report_text(out: &MissionOutput) -> String {
    let r = &out.report;
    let p = out.final_point();
    let mut s = String::new();
    let _ = writeln!(s, "e_total_j = {}", r.e_total_j);
    let _ = writeln!(s, "e_motor_j = {}", r.e_motor_j);
    let _ = writeln!(s, "e_cpu_j = {}", r.e_cpu_j);
    let _ = writeln!(s, "j_per_m = {}", r.j_per_m);
    let _ = writeln!(s, "duration_s = {}", r.duration_s);
    let _ = writeln!(s, "distance_m = {}", r.distance_m);
    let _ = writeln!(s, "min_throughput = {}", r.min_throughput);
    let _ = writeln!(s, "mean_throughput = {}", out.mean_throughput());
    let _ = writeln!(s, "final_dvfs_index = {}", p.dvfs_index);
    let _ = writeln!(s, "final_speed_index = {}", p.speed_index);
    let _ = writeln!(s, "degraded = {}", out.degraded);
    s
}

/// One line of the comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub environment: String,
    pub app: String,
    pub summary: ModeSummary,
}

pub fn comparison_csv(rows: &[CompareRow]) -> Result<String, CliError> {
    let mut w = writer();
    w.write_record([
        "environment",
        "app",
        "mode",
        "final_dvfs_index",
        "final_speed_index",
        "j_per_m",
        "e_total_j",
        "e_cpu_j",
        "e_motor_j",
        "mean_throughput",
        "min_throughput",
        "duration_s",
        "savings",
    ])?;
    for row in rows {
        let s = &row.summary;
        w.write_record([
            row.environment.clone(),
            row.app.clone(),
            s.mode.label().to_string(),
            s.final_point.dvfs_index.to_string(),
            s.final_point.speed_index.to_string(),
            s.report.j_per_m.to_string(),
            s.report.e_total_j.to_string(),
            s.report.e_cpu_j.to_string(),
            s.report.e_motor_j.to_string(),
            s.mean_throughput.to_string(),
            s.report.min_throughput.to_string(),
            s.report.duration_s.to_string(),
            s.savings.to_string(),
        ])?;
    }
    finish(preamble("comparison", &[]), w)
}

/// Eight steps of the viridis ramp, dark to light.
const RAMP: [&str; 8] = [
    "#440154", "#46327e", "#365c8d", "#277f8e", "#1fa187", "#4ac16d", "#a0da39", "#fde725",
];

/// Full throughput maps to the darkest step, as in the usual plateau plots.
fn ramp_step(throughput: f64) -> usize {
    (((1.0 - throughput) * RAMP.len() as f64).ceil() as usize).min(RAMP.len() - 1)
}

const CELL_W: usize = 64;
const CELL_H: usize = 36;
const LEFT: usize = 70;
const TOP: usize = 40;
const BOTTOM: usize = 50;

/// Heatmap of throughput with trip energy printed on feasible cells.
/// Frequency runs left to right, speed bottom to top.
pub fn heatmap_svg(grid: &SweepGrid, title: &str) -> String {
    let w = LEFT + CELL_W * grid.dvfs_levels + 10;
    let h = TOP + CELL_H * grid.speed_levels + BOTTOM;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif">"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" font-size="14" text-anchor="middle">{}</text>"#,
        w / 2,
        xml_escape(title)
    );
    for c in &grid.cells {
        let x = LEFT + c.point.dvfs_index * CELL_W;
        let y = TOP + (grid.speed_levels - 1 - c.point.speed_index) * CELL_H;
        let step = ramp_step(c.throughput);
        let _ = writeln!(
            s,
            r##"<rect x="{x}" y="{y}" width="{CELL_W}" height="{CELL_H}" fill="{}" stroke="#ffffff"><title>throughput {:.3}</title></rect>"##,
            RAMP[step], c.throughput
        );
        if let Some(e) = c.energy_j {
            let ink = if step < 4 { "#ffffff" } else { "#000000" };
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" font-size="11" text-anchor="middle" fill="{ink}">{e:.0}</text>"#,
                x + CELL_W / 2,
                y + CELL_H / 2 + 4
            );
        }
    }
    let base = TOP + CELL_H * grid.speed_levels;
    for d in 0..grid.dvfs_levels {
        if let Some(c) = grid.cell(OperatingPoint::new(d, 0)) {
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" font-size="10" text-anchor="middle">{:.2}</text>"#,
                LEFT + d * CELL_W + CELL_W / 2,
                base + 14,
                c.frequency_hz / 1e9
            );
        }
    }
    for sp in 0..grid.speed_levels {
        if let Some(c) = grid.cell(OperatingPoint::new(0, sp)) {
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" font-size="10" text-anchor="end">{:.2}</text>"#,
                LEFT - 6,
                TOP + (grid.speed_levels - 1 - sp) * CELL_H + CELL_H / 2 + 4,
                c.speed_mps
            );
        }
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">CPU frequency (GHz)</text>"#,
        LEFT + CELL_W * grid.dvfs_levels / 2,
        base + 34
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" font-size="12" text-anchor="middle" transform="rotate(-90 14 {})">speed (m/s)</text>"#,
        TOP + CELL_H * grid.speed_levels / 2,
        TOP + CELL_H * grid.speed_levels / 2
    );
    s.push_str("</svg>\n");
    s
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}
