//! Minimal deterministic SVG line charts over diagnostics tables.
//!
//! One polyline per requested column against the time axis, linear scales,
//! labeled ticks. The output is a pure function of the table bytes, so
//! charts from identical runs compare equal.

use crate::error::{DdError, Result};
use crate::runner::DiagTable;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 170.0;
const MARGIN_TOP: f64 = 24.0;
const MARGIN_BOTTOM: f64 = 48.0;
const TICKS: usize = 5;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

fn cfg(msg: String) -> DdError {
    DdError::Config { line: 0, msg }
}

struct Scale {
    lo: f64,
    hi: f64,
    out_lo: f64,
    out_hi: f64,
}

impl Scale {
    fn map(&self, v: f64) -> f64 {
        let span = self.hi - self.lo;
        let frac = if span > 0.0 {
            (v - self.lo) / span
        } else {
            0.5
        };
        self.out_lo + frac * (self.out_hi - self.out_lo)
    }

    fn ticks(&self) -> Vec<f64> {
        (0..TICKS)
            .map(|i| self.lo + (self.hi - self.lo) * i as f64 / (TICKS - 1) as f64)
            .collect()
    }
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        (lo, hi)
    } else {
        // degenerate (constant) range: center it with a visible band
        let pad = lo.abs().max(1.0);
        (lo - pad, lo + pad)
    }
}

/// Renders the requested columns of a diagnostics table as one SVG chart.
pub fn emit_svg(table: &DiagTable, columns: &[String]) -> Result<String> {
    if table.rows.len() < 2 {
        return Err(cfg(format!(
            "chart needs at least 2 diagnostics rows, got {}",
            table.rows.len()
        )));
    }
    let mut series: Vec<(usize, &str)> = Vec::new();
    for name in columns {
        let idx = DiagTable::column_index(name)
            .ok_or_else(|| cfg(format!("unknown chart column `{name}`")))?;
        series.push((idx, name));
    }
    if series.is_empty() {
        return Err(cfg("chart needs at least one column".into()));
    }

    let times: Vec<f64> = table
        .rows
        .iter()
        .map(|r| r[0].expect("t column is dense"))
        .collect();
    let (t_lo, t_hi) = padded(
        times.iter().cloned().fold(f64::INFINITY, f64::min),
        times.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    );
    let mut y_lo = f64::INFINITY;
    let mut y_hi = f64::NEG_INFINITY;
    let mut any = false;
    for &(idx, _) in &series {
        for row in &table.rows {
            if let Some(v) = row[idx] {
                y_lo = y_lo.min(v);
                y_hi = y_hi.max(v);
                any = true;
            }
        }
    }
    if !any {
        return Err(cfg(format!(
            "chart columns [{}] have no values on this run",
            columns.join(", ")
        )));
    }
    let (y_lo, y_hi) = padded(y_lo, y_hi);

    let x_scale = Scale {
        lo: t_lo,
        hi: t_hi,
        out_lo: MARGIN_LEFT,
        out_hi: WIDTH - MARGIN_RIGHT,
    };
    // SVG y grows downward; flip the output range
    let y_scale = Scale {
        lo: y_lo,
        hi: y_hi,
        out_lo: HEIGHT - MARGIN_BOTTOM,
        out_hi: MARGIN_TOP,
    };

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    // axes
    let (x0, x1) = (MARGIN_LEFT, WIDTH - MARGIN_RIGHT);
    let (y0, y1) = (HEIGHT - MARGIN_BOTTOM, MARGIN_TOP);
    out.push_str(&format!(
        "<line x1=\"{x0:.2}\" y1=\"{y0:.2}\" x2=\"{x1:.2}\" y2=\"{y0:.2}\" stroke=\"black\"/>\n"
    ));
    out.push_str(&format!(
        "<line x1=\"{x0:.2}\" y1=\"{y0:.2}\" x2=\"{x0:.2}\" y2=\"{y1:.2}\" stroke=\"black\"/>\n"
    ));

    for tv in x_scale.ticks() {
        let px = x_scale.map(tv);
        out.push_str(&format!(
            "<line x1=\"{px:.2}\" y1=\"{y0:.2}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
            y0 + 5.0
        ));
        out.push_str(&format!(
            "<text x=\"{px:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"middle\">{tv:.3e}</text>\n",
            y0 + 20.0
        ));
    }
    for tv in y_scale.ticks() {
        let py = y_scale.map(tv);
        out.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{py:.2}\" x2=\"{x0:.2}\" y2=\"{py:.2}\" stroke=\"black\"/>\n",
            x0 - 5.0
        ));
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"end\">{tv:.3e}</text>\n",
            x0 - 8.0,
            py + 4.0
        ));
    }
    out.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\">t</text>\n",
        (x0 + x1) / 2.0,
        HEIGHT - 8.0
    ));

    for (slot, &(idx, name)) in series.iter().enumerate() {
        let color = PALETTE[slot % PALETTE.len()];
        let mut points = String::new();
        for (row, &t) in table.rows.iter().zip(&times) {
            if let Some(v) = row[idx] {
                points.push_str(&format!("{:.2},{:.2} ", x_scale.map(t), y_scale.map(v)));
            }
        }
        out.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            points.trim_end()
        ));
        let ly = MARGIN_TOP + 16.0 * slot as f64 + 12.0;
        let lx = WIDTH - MARGIN_RIGHT + 12.0;
        out.push_str(&format!(
            "<line x1=\"{lx:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
            ly - 4.0,
            lx + 18.0,
            ly - 4.0
        ));
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{ly:.2}\" font-size=\"12\">{name}</text>\n",
            lx + 24.0
        ));
    }
    out.push_str("</svg>\n");
    Ok(out)
}
