//! CSV, JSON and SVG renderings of rate tables and diagnostics.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};

use super::{LpMoment, Metric, MetricSummary, OutputFormat, RateDiagnostics, RateRow, RateTable};
use crate::{Error, Result};

/// Decimal rendering with 12 significant digits, `%.12g` style.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "NaN".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn p_label(p: f64) -> String {
    format!("{p}")
}

enum Cell {
    Int(usize),
    Num(Option<f64>),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(Some(v)) => format_sig12(*v),
            Cell::Num(None) => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Num(Some(v)) if v.is_finite() => Value::from(*v),
            Cell::Num(_) => Value::Null,
        }
    }
}

/// Column names of a rate table in output order.
pub fn table_columns(table: &RateTable) -> Vec<String> {
    let mut cols = vec!["n".to_string(), "replicates".to_string()];
    for m in &table.metrics {
        cols.push(format!("{m}_mean"));
        cols.push(format!("{m}_se"));
    }
    if table.metrics.contains(&Metric::DK) {
        for p in &table.moment_orders {
            cols.push(format!("dk_lp_p{}", p_label(*p)));
            cols.push(format!("dk_dev_lp_p{}", p_label(*p)));
        }
    }
    if table.metrics.contains(&Metric::MaxGap) {
        cols.push("gap_stat".to_string());
    }
    cols
}

fn table_cells(table: &RateTable, row: &RateRow) -> Vec<Cell> {
    let mut cells = vec![Cell::Int(row.n), Cell::Int(row.replicates)];
    for m in &table.metrics {
        let s = row.summary(*m);
        cells.push(Cell::Num(s.map(|s| s.mean)));
        cells.push(Cell::Num(s.and_then(|s| s.se)));
    }
    if table.metrics.contains(&Metric::DK) {
        for p in &table.moment_orders {
            let lp = row.lp.iter().find(|l| l.p == *p);
            cells.push(Cell::Num(lp.map(|l| l.moment)));
            cells.push(Cell::Num(lp.map(|l| l.deviation)));
        }
    }
    if table.metrics.contains(&Metric::MaxGap) {
        cells.push(Cell::Num(row.gap_stat));
    }
    cells
}

fn diagnostic_columns(diag: &RateDiagnostics) -> Vec<String> {
    let mut cols: Vec<String> = ["n", "ratio_dk", "ratio_w1", "gap_stat"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for p in diag_orders(diag) {
        cols.push(format!("dk_lp_p{}", p_label(p)));
        cols.push(format!("dk_dev_lp_p{}", p_label(p)));
    }
    cols
}

fn diag_orders(diag: &RateDiagnostics) -> Vec<f64> {
    diag.rows
        .first()
        .map(|r| r.lp.iter().map(|l| l.p).collect())
        .unwrap_or_default()
}

fn render(columns: &[String], rows: &[Vec<Cell>], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => {
            let mut out = columns.join(",");
            out.push('\n');
            for row in rows {
                let line: Vec<String> = row.iter().map(Cell::csv).collect();
                out.push_str(&line.join(","));
                out.push('\n');
            }
            Ok(out)
        }
        OutputFormat::Json => {
            let records: Vec<Value> = rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = columns
                        .iter()
                        .cloned()
                        .zip(row.iter().map(Cell::json))
                        .collect();
                    Value::Object(obj)
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&Value::Array(records))?;
            s.push('\n');
            Ok(s)
        }
    }
}

/// Renders a rate table. With no metric selected only the header is written.
pub fn emit_table(table: &RateTable, format: OutputFormat) -> Result<String> {
    let columns = table_columns(table);
    let rows: Vec<Vec<Cell>> = if table.metrics.is_empty() {
        Vec::new()
    } else {
        table.rows.iter().map(|r| table_cells(table, r)).collect()
    };
    render(&columns, &rows, format)
}

pub fn emit_diagnostics(diag: &RateDiagnostics, format: OutputFormat) -> Result<String> {
    let orders = diag_orders(diag);
    let rows: Vec<Vec<Cell>> = diag
        .rows
        .iter()
        .map(|r| {
            let mut cells = vec![
                Cell::Int(r.n),
                Cell::Num(r.ratio_dk),
                Cell::Num(r.ratio_w1),
                Cell::Num(r.gap_stat),
            ];
            for p in &orders {
                let lp = r.lp.iter().find(|l| l.p == *p);
                cells.push(Cell::Num(lp.map(|l| l.moment)));
                cells.push(Cell::Num(lp.map(|l| l.deviation)));
            }
            cells
        })
        .collect();
    render(&diagnostic_columns(diag), &rows, format)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(contents.as_bytes())
        .map_err(|e| Error::io(path, e))
}

pub fn write_table(table: &RateTable, format: OutputFormat, path: &Path) -> Result<()> {
    write_file(path, &emit_table(table, format)?)
}

pub fn write_diagnostics(diag: &RateDiagnostics, format: OutputFormat, path: &Path) -> Result<()> {
    write_file(path, &emit_diagnostics(diag, format)?)
}

pub fn write_svg(diag: &RateDiagnostics, path: &Path) -> Result<()> {
    write_file(path, &render_svg(diag))
}

/// Line chart of `N·mean(d_K)/log N` against `log₂ N` with a reference
/// line at `1/π`.
pub fn render_svg(diag: &RateDiagnostics) -> String {
    let (w, h) = (640.0, 400.0);
    let (left, right, top, bottom) = (70.0, 20.0, 30.0, 50.0);
    let points: Vec<(f64, f64)> = diag
        .rows
        .iter()
        .filter_map(|r| r.ratio_dk.map(|y| ((r.n as f64).log2(), y)))
        .collect();
    let x_min = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let x_max = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let (x_min, x_max) = if points.is_empty() {
        (0.0, 1.0)
    } else if x_max > x_min {
        (x_min, x_max)
    } else {
        (x_min - 0.5, x_max + 0.5)
    };
    let y_max = points.iter().map(|p| p.1).fold(1.0 / PI, f64::max) * 1.2;
    let sx = |x: f64| left + (x - x_min) / (x_max - x_min) * (w - left - right);
    let sy = |y: f64| h - bottom - y / y_max * (h - top - bottom);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<line x1="{left}" y1="{y0:.2}" x2="{x1:.2}" y2="{y0:.2}" stroke="black"/>"#,
        y0 = h - bottom,
        x1 = w - right
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{left}" y1="{top}" x2="{left}" y2="{y0:.2}" stroke="black"/>"#,
        y0 = h - bottom
    );
    let yr = sy(1.0 / PI);
    let _ = writeln!(
        svg,
        r#"<line x1="{left}" y1="{yr:.2}" x2="{x1:.2}" y2="{yr:.2}" stroke="gray" stroke-dasharray="6,4"/>"#,
        x1 = w - right
    );
    let _ = writeln!(
        svg,
        r#"<text x="{x:.2}" y="{y:.2}" font-size="12" fill="gray">1/π</text>"#,
        x = w - right - 30.0,
        y = yr - 6.0
    );
    if !points.is_empty() {
        let path: Vec<String> = points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="2"/>"#,
            path.join(" ")
        );
        for &(x, y) in &points {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="steelblue"/>"#,
                sx(x),
                sy(y)
            );
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"#,
                sx(x),
                h - bottom + 16.0,
                format_sig12(x)
            );
        }
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-size="13" text-anchor="middle">log2 N</text>"#,
        (left + w - right) / 2.0,
        h - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.2}" font-size="13" transform="rotate(-90 16 {:.2})" text-anchor="middle">N mean(d_K) / log N</text>"#,
        h / 2.0,
        h / 2.0
    );
    svg.push_str("</svg>\n");
    svg
}

/// Parses a CSV produced by [`emit_table`] back into a table.
pub fn table_from_csv(text: &str) -> Result<RateTable> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| Error::invalid("empty csv"))?
        .split(',')
        .collect();
    if header.len() < 2 || header[0] != "n" || header[1] != "replicates" {
        return Err(Error::invalid("csv header must start with n,replicates"));
    }
    let metrics: Vec<Metric> = header
        .iter()
        .filter_map(|c| c.strip_suffix("_mean"))
        .map(str::parse)
        .collect::<Result<_>>()?;
    let moment_orders: Vec<f64> = header
        .iter()
        .filter_map(|c| c.strip_prefix("dk_lp_p"))
        .map(|p| p.parse::<f64>().map_err(|e| Error::invalid(e.to_string())))
        .collect::<Result<_>>()?;
    let col = |name: &str| header.iter().position(|c| *c == name);

    let mut rows = Vec::new();
    for line in lines.filter(|l| !l.is_empty()) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != header.len() {
            return Err(Error::invalid(format!(
                "row has {} fields, header has {}",
                fields.len(),
                header.len()
            )));
        }
        let num = |idx: Option<usize>| -> Result<Option<f64>> {
            match idx.map(|i| fields[i]) {
                None | Some("") => Ok(None),
                Some(s) => s
                    .parse::<f64>()
                    .map(Some)
                    .map_err(|e| Error::invalid(format!("{s:?}: {e}"))),
            }
        };
        let int = |i: usize| -> Result<usize> {
            fields[i]
                .parse()
                .map_err(|e| Error::invalid(format!("{:?}: {e}", fields[i])))
        };
        let summaries = metrics
            .iter()
            .map(|&metric| {
                Ok(MetricSummary {
                    metric,
                    mean: num(col(&format!("{metric}_mean")))?.unwrap_or(f64::NAN),
                    se: num(col(&format!("{metric}_se")))?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut lp = Vec::new();
        for &p in &moment_orders {
            let moment = num(col(&format!("dk_lp_p{}", p_label(p))))?;
            let deviation = num(col(&format!("dk_dev_lp_p{}", p_label(p))))?;
            if let (Some(moment), Some(deviation)) = (moment, deviation) {
                lp.push(LpMoment {
                    p,
                    moment,
                    deviation,
                });
            }
        }
        rows.push(RateRow {
            n: int(0)?,
            replicates: int(1)?,
            summaries,
            lp,
            gap_stat: num(col("gap_stat"))?,
        });
    }
    Ok(RateTable {
        metrics,
        moment_orders,
        rows,
    })
}
