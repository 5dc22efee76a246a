//! Minimal static SVG plotting: a two-panel line chart pairing the thermal
//! order parameter M(T) with the computational order parameter I(t),
//! annotated with the susceptibility-peak temperature and the first time
//! step with retrieved information.  Pure text output, no raster or
//! plotting dependencies.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::manifest::write_atomic;
use crate::runner::{SWEEP_HEADER, TRACE_HEADER};

#[derive(Debug, Error)]
pub enum SvgError {
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("{file}: expected header {expected:?}, found {found:?}")]
    BadHeader {
        file: String,
        expected: &'static str,
        found: String,
    },
    #[error("{file} line {line}: expected {expected} columns, got {got}")]
    BadShape {
        file: String,
        line: usize,
        expected: usize,
        got: usize,
    },
    #[error("{file} line {line}: cannot parse {field} from {value:?}")]
    BadNumber {
        file: String,
        line: usize,
        field: &'static str,
        value: String,
    },
    #[error("{file}: no data rows")]
    Empty { file: String },
}

struct Csv {
    file: String,
    rows: Vec<Vec<String>>,
}

fn read_csv(path: &Path, expected_header: &'static str) -> Result<Csv, SvgError> {
    let file = path.display().to_string();
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header != expected_header {
        return Err(SvgError::BadHeader {
            file,
            expected: expected_header,
            found: header.to_string(),
        });
    }
    let width = expected_header.split(',').count();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let cols: Vec<String> = line.split(',').map(str::to_string).collect();
        if cols.len() != width {
            return Err(SvgError::BadShape {
                file,
                line: i + 2,
                expected: width,
                got: cols.len(),
            });
        }
        rows.push(cols);
    }
    if rows.is_empty() {
        return Err(SvgError::Empty { file });
    }
    Ok(Csv { file, rows })
}

fn field(csv: &Csv, row: usize, col: usize, name: &'static str) -> Result<f64, SvgError> {
    let value = &csv.rows[row][col];
    value.parse::<f64>().map_err(|_| SvgError::BadNumber {
        file: csv.file.clone(),
        line: row + 2,
        field: name,
        value: value.clone(),
    })
}

/// One panel's drawing area and data-to-screen transform.
struct Panel {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
    x_range: (f64, f64),
    y_range: (f64, f64),
}

impl Panel {
    fn sx(&self, x: f64) -> f64 {
        let (lo, hi) = self.x_range;
        let frac = if hi > lo { (x - lo) / (hi - lo) } else { 0.5 };
        self.x0 + frac * self.w
    }

    fn sy(&self, y: f64) -> f64 {
        let (lo, hi) = self.y_range;
        let frac = if hi > lo { (y - lo) / (hi - lo) } else { 0.5 };
        self.y0 + self.h - frac * self.h
    }
}

fn draw_panel(
    out: &mut String,
    panel: &Panel,
    points: &[(f64, f64)],
    x_label: &str,
    y_label: &str,
    crit: Option<(f64, String)>,
) {
    let (x0, y0, w, h) = (panel.x0, panel.y0, panel.w, panel.h);
    // Axes.
    let _ = writeln!(
        out,
        r#"<line x1="{x0:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="black"/>"#,
        y0 + h,
        x0 + w,
        y0 + h
    );
    let _ = writeln!(
        out,
        r#"<line x1="{x0:.1}" y1="{y0:.1}" x2="{x0:.1}" y2="{:.1}" stroke="black"/>"#,
        y0 + h
    );
    // Range labels and axis titles.
    let _ = writeln!(
        out,
        r#"<text x="{x0:.1}" y="{:.1}" font-size="11">{:.3}</text>"#,
        y0 + h + 14.0,
        panel.x_range.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">{:.3}</text>"#,
        x0 + w,
        y0 + h + 14.0,
        panel.x_range.1
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">{:.3}</text>"#,
        x0 - 4.0,
        y0 + h,
        panel.y_range.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">{:.3}</text>"#,
        x0 - 4.0,
        y0 + 10.0,
        panel.y_range.1
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-size="13" text-anchor="middle">{x_label}</text>"#,
        x0 + w / 2.0,
        y0 + h + 30.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-size="13" text-anchor="middle" transform="rotate(-90 {:.1} {:.1})">{y_label}</text>"#,
        x0 - 34.0,
        y0 + h / 2.0,
        x0 - 34.0,
        y0 + h / 2.0
    );
    // The series itself: a polyline, or a lone marker for a single point.
    if points.len() == 1 {
        let _ = writeln!(
            out,
            r#"<circle class="series-point" cx="{:.1}" cy="{:.1}" r="4" fill="steelblue"/>"#,
            panel.sx(points[0].0),
            panel.sy(points[0].1)
        );
    } else {
        let coords: Vec<String> = points
            .iter()
            .map(|&(x, y)| format!("{:.1},{:.1}", panel.sx(x), panel.sy(y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline class="series" fill="none" stroke="steelblue" stroke-width="1.5" points="{}"/>"#,
            coords.join(" ")
        );
    }
    // Critical-point annotation: dashed vertical marker plus label.
    if let Some((cx, label)) = crit {
        let sx = panel.sx(cx);
        let _ = writeln!(
            out,
            r#"<line class="crit-marker" x1="{sx:.1}" y1="{y0:.1}" x2="{sx:.1}" y2="{:.1}" stroke="crimson" stroke-dasharray="4 3"/>"#,
            y0 + h
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" fill="crimson">{label}</text>"#,
            sx + 4.0,
            y0 + 12.0
        );
    }
}

/// Renders the paired order-parameter chart from a temperature-sweep CSV and
/// a trace CSV into `out_path`.
pub fn render_curves(sweep_csv: &Path, trace_csv: &Path, out_path: &Path) -> Result<(), SvgError> {
    let sweep = read_csv(sweep_csv, SWEEP_HEADER)?;
    let trace = read_csv(trace_csv, TRACE_HEADER)?;

    let mut m_points = Vec::new();
    let mut chi = Vec::new();
    for row in 0..sweep.rows.len() {
        let t = field(&sweep, row, 0, "T")?;
        let m = field(&sweep, row, 1, "mean_abs_m")?;
        chi.push(field(&sweep, row, 2, "susceptibility")?);
        m_points.push((t, m));
    }
    let mut i_points = Vec::new();
    for row in 0..trace.rows.len() {
        let t = field(&trace, row, 0, "t")?;
        let i = field(&trace, row, 3, "I")?;
        i_points.push((t, i));
    }

    // Susceptibility peak marks the thermal transition estimate.
    let t_crit = chi
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(idx, _)| m_points[idx].0);
    // First step with any retrieved information marks the computational one.
    let i_crit = i_points.iter().find(|&&(_, i)| i > 0.0).map(|&(t, _)| t);

    let xr = |pts: &[(f64, f64)]| {
        let lo = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        let hi = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    };
    let i_max = i_points.iter().map(|p| p.1).fold(1.0, f64::max);

    let left = Panel {
        x0: 60.0,
        y0: 30.0,
        w: 360.0,
        h: 300.0,
        x_range: xr(&m_points),
        y_range: (0.0, 1.0),
    };
    let right = Panel {
        x0: 540.0,
        y0: 30.0,
        w: 360.0,
        h: 300.0,
        x_range: xr(&i_points),
        y_range: (0.0, i_max),
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="960" height="400" viewBox="0 0 960 400">"#
    );
    let _ = writeln!(
        out,
        r#"<rect width="960" height="400" fill="white"/>"#
    );
    draw_panel(
        &mut out,
        &left,
        &m_points,
        "T",
        "mean |M|",
        t_crit.map(|t| (t, format!("T_crit = {t:.3}"))),
    );
    draw_panel(
        &mut out,
        &right,
        &i_points,
        "t",
        "I (bits)",
        i_crit.map(|t| (t, format!("t_crit = {t:.0}"))),
    );
    let _ = writeln!(out, "</svg>");
    write_atomic(out_path, out.as_bytes())?;
    Ok(())
}
