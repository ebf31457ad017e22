//! Initial state construction: analytic presets and CSV ingestion.

use std::path::Path;
use std::sync::Arc;

use crate::config::{InitialKind, InitialSpec};
use crate::error::{DdError, Result};
use crate::spectral::{project_mean_zero, FieldState, Grid, PhysicalField, Transform};

/// One row of a `custom-csv` data file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsvRow {
    pub x: f64,
    pub phi: f64,
    pub psi: f64,
}

/// Parses `x,phi,psi` rows. The header line is required, x must be strictly
/// increasing, and every entry must be finite.
pub fn parse_initial_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut lines = text.lines().enumerate();
    let Some((_, header)) = lines.next() else {
        return Err(DdError::Ingestion("initial data file is empty".into()));
    };
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols != ["x", "phi", "psi"] {
        return Err(DdError::Ingestion(format!(
            "expected header `x,phi,psi`, got `{}`",
            header.trim()
        )));
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(DdError::Ingestion(format!(
                "row {}: expected 3 fields, got {}",
                i + 1,
                fields.len()
            )));
        }
        let mut vals = [0.0f64; 3];
        for (slot, field) in vals.iter_mut().zip(&fields) {
            *slot = field.parse::<f64>().map_err(|_| {
                DdError::Ingestion(format!("row {}: `{field}` is not a number", i + 1))
            })?;
            if !slot.is_finite() {
                return Err(DdError::Ingestion(format!(
                    "row {}: non-finite entry",
                    i + 1
                )));
            }
        }
        if let Some(prev) = rows.last() {
            let prev: &CsvRow = prev;
            if vals[0] <= prev.x {
                return Err(DdError::Ingestion(format!(
                    "row {}: x must be strictly increasing ({} after {})",
                    i + 1,
                    vals[0],
                    prev.x
                )));
            }
        }
        rows.push(CsvRow {
            x: vals[0],
            phi: vals[1],
            psi: vals[2],
        });
    }
    if rows.len() < 2 {
        return Err(DdError::Ingestion(
            "initial data needs at least 2 rows".into(),
        ));
    }
    Ok(rows)
}

fn interpolate(rows: &[CsvRow], x: f64) -> (f64, f64) {
    // binary search for the bracketing pair; callers guarantee coverage
    let j = rows.partition_point(|r| r.x <= x);
    if j == 0 {
        return (rows[0].phi, rows[0].psi);
    }
    if j == rows.len() {
        let last = rows[rows.len() - 1];
        return (last.phi, last.psi);
    }
    let (a, b) = (rows[j - 1], rows[j]);
    let w = (x - a.x) / (b.x - a.x);
    (a.phi + w * (b.phi - a.phi), a.psi + w * (b.psi - a.psi))
}

/// Maps file rows onto the grid. Rows whose x column equals the grid points
/// bitwise pass through untouched; otherwise the rows must cover the grid
/// interval and are interpolated linearly.
pub fn resample_rows(rows: &[CsvRow], grid: &Arc<Grid>) -> Result<(PhysicalField, PhysicalField)> {
    let points = grid.points();
    let exact = rows.len() == points.len()
        && rows
            .iter()
            .zip(&points)
            .all(|(r, &x)| r.x.to_bits() == x.to_bits());
    if exact {
        let phi = PhysicalField {
            grid: grid.clone(),
            values: rows.iter().map(|r| r.phi).collect(),
        };
        let psi = PhysicalField {
            grid: grid.clone(),
            values: rows.iter().map(|r| r.psi).collect(),
        };
        return Ok((phi, psi));
    }
    let (lo, hi) = (points[0], points[points.len() - 1]);
    let (dlo, dhi) = (rows[0].x, rows[rows.len() - 1].x);
    if dlo > lo || dhi < hi {
        return Err(DdError::Ingestion(format!(
            "data covers [{dlo}, {dhi}] but the grid needs [{lo}, {hi}]"
        )));
    }
    let mut phi = PhysicalField::zeros(grid.clone());
    let mut psi = PhysicalField::zeros(grid.clone());
    for (k, &x) in points.iter().enumerate() {
        let (p, q) = interpolate(rows, x);
        phi.values[k] = p;
        psi.values[k] = q;
    }
    Ok((phi, psi))
}

fn analytic_fields(spec: &InitialSpec, grid: &Arc<Grid>) -> (PhysicalField, PhysicalField) {
    let a = spec.amplitude;
    let w2 = spec.width * spec.width;
    let phi = match spec.kind {
        // d/dx exp(-x^2/w^2); odd, so the periodic sum leaves only the
        // boundary value, which vanishes once the bump fits the box
        InitialKind::GaussianDerivative => {
            PhysicalField::from_fn(grid.clone(), |x| a * (-2.0 * x / w2) * (-x * x / w2).exp())
        }
        InitialKind::ModulatedSine => {
            let x_half = grid.half_length();
            PhysicalField::from_fn(grid.clone(), |x| {
                a * (2.0 * std::f64::consts::PI * x / x_half).sin() * (-x * x / w2).exp()
            })
        }
        InitialKind::CustomCsv => unreachable!("custom data handled by the caller"),
    };
    (phi, PhysicalField::zeros(grid.clone()))
}

/// Builds the t = 0 state for a plan's initial section. Zero amplitude gives
/// the exact zero state; `mean_zero_project` clears the mean mode of both
/// fields after analysis.
pub fn build_initial_state(spec: &InitialSpec, tr: &Transform) -> Result<FieldState> {
    let grid = tr.grid();
    let (phi, psi) = match spec.kind {
        InitialKind::CustomCsv => {
            let path = spec.path.as_deref().unwrap_or(Path::new(""));
            let text = std::fs::read_to_string(path)?;
            let rows = parse_initial_csv(&text)?;
            let (mut phi, mut psi) = resample_rows(&rows, grid)?;
            if spec.amplitude != 1.0 {
                for v in phi.values.iter_mut().chain(psi.values.iter_mut()) {
                    *v *= spec.amplitude;
                }
            }
            (phi, psi)
        }
        _ => analytic_fields(spec, grid),
    };
    let mut u_hat = tr.analyze(&phi);
    let mut v_hat = tr.analyze(&psi);
    if spec.amplitude == 0.0 {
        u_hat = crate::spectral::SpectrumField::zeros(grid.clone());
        v_hat = crate::spectral::SpectrumField::zeros(grid.clone());
    }
    if spec.mean_zero_project {
        project_mean_zero(&mut u_hat);
        project_mean_zero(&mut v_hat);
    }
    Ok(FieldState {
        t: 0.0,
        u_hat,
        v_hat,
    })
}
