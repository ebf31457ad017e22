//! Run orchestration: gate checks, certificate attempt, the time loop with
//! diagnostics sampling, output emission, and the sweep driver.
//!
//! Everything here is deterministic: identical plans produce byte-identical
//! diagnostics.csv and summary.json apart from the wall-time field, which is
//! the last line of the summary so consumers can strip it.

use std::fs;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use crate::blowup::{
    convexity_residuals, event_from_signal, h_trace, make_certificate, BlowupCertificate,
    BlowupEvent, BlowupTrigger, HTracePoint,
};
use crate::config::RunPlan;
use crate::energy::{self, EnergyLedger, NormSample};
use crate::error::{DdError, Result};
use crate::exec;
use crate::initial::build_initial_state;
use crate::propagator::{build_tables, step_exp_midpoint, step_picard, Scheme};
use crate::spectral::{FieldState, Grid, Transform};
use crate::symbols::{theorem_gate, EquationSpec, GateId, GateReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_BLOWUP: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_GATE: i32 = 4;

/// Column order of diagnostics.csv. The concavity columns are empty unless
/// the run carries a valid certificate.
pub const DIAG_COLUMNS: [&str; 13] = [
    "t",
    "E",
    "E_kin",
    "E_ela",
    "E_pot",
    "norm_u_s",
    "norm_ut_s1",
    "norm_u_gq",
    "norm_ut_gq",
    "linf",
    "H",
    "Hp",
    "convexity_residual",
];

/// Sampled diagnostics, flattened to the CSV column layout.
#[derive(Debug, Clone, Default)]
pub struct DiagTable {
    pub rows: Vec<[Option<f64>; 13]>,
}

impl DiagTable {
    pub fn column_index(name: &str) -> Option<usize> {
        DIAG_COLUMNS.iter().position(|c| *c == name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = DIAG_COLUMNS.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| c.map(|v| format!("{v:.16e}")).unwrap_or_default())
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

fn flatten(
    ledger: &EnergyLedger,
    norms: &NormSample,
    pt: Option<&HTracePoint>,
) -> [Option<f64>; 13] {
    [
        Some(ledger.t),
        Some(ledger.e_total),
        Some(ledger.e_kin),
        Some(ledger.e_ela),
        Some(ledger.e_pot),
        Some(norms.u_s),
        Some(norms.ut_s1),
        Some(norms.u_gq),
        Some(norms.ut_gq),
        Some(norms.linf),
        pt.map(|p| p.h),
        pt.map(|p| p.hp),
        pt.and_then(|p| p.convexity_residual),
    ]
}

/// Everything summary.json records about one run.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub exit: i32,
    pub final_t: f64,
    /// Largest sampled `|E(t) - E(0)| / max(|E(0)|, tiny)`.
    pub energy_drift: f64,
    /// Worst `||u||_{rho/2+r/2}` ratio against the proved bound; absent when
    /// the bound does not apply (negative energy or sign-indefinite G).
    pub bound_worst_u_ratio: Option<f64>,
    pub bound_worst_ut_ratio: Option<f64>,
    pub bound_violations: Option<usize>,
    pub blowup: Option<BlowupEvent>,
    pub certificate: Option<BlowupCertificate>,
    pub note: Option<String>,
    pub wall_time_s: f64,
}

/// The hypothesis set a strict-mode run must satisfy: the general local
/// existence gate, which covers every preset family through the combined
/// order condition and coercivity.
pub fn strict_gate(eq: &EquationSpec, s: f64) -> GateReport {
    theorem_gate(eq, s, GateId::Local61)
}

/// All gates, for reporting.
pub fn all_gates(eq: &EquationSpec, s: f64) -> Vec<GateReport> {
    GateId::ALL
        .iter()
        .map(|&g| theorem_gate(eq, s, g))
        .collect()
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text)?;
    Ok(())
}

fn to_pretty_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("summary types serialize");
    s.push('\n');
    s
}

/// Attempts the concavity certificate for a state. `None` when no exponent
/// `nu` is available (polynomial nonlinearity without an override).
pub fn certificate_attempt(
    tr: &Transform,
    state0: &FieldState,
    eq: &EquationSpec,
    nu_override: Option<f64>,
) -> Result<Option<BlowupCertificate>> {
    let Some(nu) = nu_override.or_else(|| eq.g.default_nu()) else {
        return Ok(None);
    };
    Ok(Some(make_certificate(tr, state0, eq, nu)?))
}

struct Snapshots {
    times: Vec<f64>,
    emitted: Vec<bool>,
}

impl Snapshots {
    fn new(times: &[f64]) -> Snapshots {
        Snapshots {
            times: times.to_vec(),
            emitted: vec![false; times.len()],
        }
    }

    fn due(&mut self, t: f64, dt: f64) -> Vec<f64> {
        let mut hits = Vec::new();
        for (i, &ts) in self.times.iter().enumerate() {
            if !self.emitted[i] && (t - ts).abs() <= dt / 2.0 {
                self.emitted[i] = true;
                hits.push(ts);
            }
        }
        hits
    }
}

fn write_snapshot(dir: &Path, label: f64, tr: &Transform, state: &FieldState) -> Result<()> {
    let u = tr.synthesize(&state.u_hat);
    let v = tr.synthesize(&state.v_hat);
    let mut out = String::from("x,u,ut\n");
    for (i, x) in state.grid().points().into_iter().enumerate() {
        out.push_str(&format!(
            "{x:.16e},{:.16e},{:.16e}\n",
            u.values[i], v.values[i]
        ));
    }
    write_text(&dir.join(format!("snapshot_{label}.csv")), &out)
}

/// Executes a plan end to end and writes diagnostics.csv, any snapshots,
/// certificate.json (when an exponent is available), summary.json, and the
/// optional chart.svg into the plan's output directory.
pub fn run_plan(plan: &RunPlan) -> Result<RunSummary> {
    let start = Instant::now();
    let grid = Grid::shared(plan.grid_n, plan.grid_x)?;
    let tr = Transform::new(grid.clone());
    let eq = plan.equation_spec(grid.xi())?;
    fs::create_dir_all(&plan.out_dir)?;

    let gate = strict_gate(&eq, plan.sobolev_index);
    if plan.strict_gates && !gate.pass {
        let summary = RunSummary {
            exit: EXIT_GATE,
            final_t: 0.0,
            energy_drift: 0.0,
            bound_worst_u_ratio: None,
            bound_worst_ut_ratio: None,
            bound_violations: None,
            blowup: None,
            certificate: None,
            note: Some(format!("strict gates: {} failed", gate.gate.as_str())),
            wall_time_s: start.elapsed().as_secs_f64(),
        };
        write_text(
            &plan.out_dir.join("summary.json"),
            &to_pretty_json(&summary),
        )?;
        return Ok(summary);
    }

    let state0 = build_initial_state(&plan.initial, &tr)?;
    let e0 = energy::energy(&tr, &state0, &eq)?.e_total;

    let cert = certificate_attempt(&tr, &state0, &eq, plan.nu)?;
    if let Some(c) = &cert {
        write_text(&plan.out_dir.join("certificate.json"), &to_pretty_json(c))?;
    }
    let valid_cert = cert.as_ref().filter(|c| c.valid);

    let n_steps = (plan.t_end / plan.dt).round().max(1.0) as usize;
    let tab = build_tables(&eq, &grid, plan.dt)?;

    let s0 = energy::norm_series_sample(&tr, &state0, &eq, plan.sobolev_index)?;
    let initial_tracked = s0.u_s + s0.ut_s1;
    // threshold is relative to the initial data; zero data falls back to an
    // absolute scale so the detector precondition still holds
    let threshold = if initial_tracked > 0.0 {
        plan.blowup_threshold * initial_tracked
    } else {
        plan.blowup_threshold
    };

    let mut ledgers: Vec<EnergyLedger> = Vec::new();
    let mut norms: Vec<NormSample> = Vec::new();
    let mut hpts: Vec<HTracePoint> = Vec::new();
    let mut record = |state: &FieldState, tracked: NormSample| -> Result<()> {
        ledgers.push(energy::energy(&tr, state, &eq)?);
        if let Some(c) = valid_cert {
            hpts.push(h_trace(state, &eq, c)?);
        }
        norms.push(tracked);
        Ok(())
    };

    let mut snapshots = Snapshots::new(&plan.snapshots);
    let mut state = state0;
    record(&state, s0)?;
    for ts in snapshots.due(state.t, plan.dt) {
        write_snapshot(&plan.out_dir, ts, &tr, &state)?;
    }

    let mut event: Option<BlowupEvent> = None;
    let mut last_good = s0;
    for step in 1..=n_steps {
        let stepped = match plan.scheme {
            Scheme::ExpMidpoint => step_exp_midpoint(&tr, &state, &eq, &tab, true),
            Scheme::Picard => step_picard(
                &tr,
                &state,
                &eq,
                &tab,
                plan.picard_tol,
                plan.picard_kmax,
                plan.sobolev_index,
                true,
            ),
        };
        match stepped {
            Ok((next, _)) => state = next,
            Err(DdError::Overflow { t }) => {
                event = Some(event_from_signal(BlowupTrigger::Overflow, t, last_good));
                break;
            }
            Err(DdError::ContractionFailure { t, .. }) => {
                event = Some(event_from_signal(
                    BlowupTrigger::PicardFailure,
                    t,
                    last_good,
                ));
                break;
            }
            Err(other) => return Err(other),
        }
        let tracked = match energy::norm_series_sample(&tr, &state, &eq, plan.sobolev_index) {
            Ok(sample) => sample,
            Err(DdError::Overflow { t }) => {
                event = Some(event_from_signal(BlowupTrigger::Overflow, t, last_good));
                break;
            }
            Err(other) => return Err(other),
        };
        if tracked.u_s + tracked.ut_s1 > threshold {
            event = Some(event_from_signal(
                BlowupTrigger::NormThreshold,
                state.t,
                tracked,
            ));
            // best-effort row at the crossing; the state is still finite
            let _ = record(&state, tracked);
            break;
        }
        last_good = tracked;
        if step % plan.sample_stride == 0 || step == n_steps {
            record(&state, tracked)?;
        }
        for ts in snapshots.due(state.t, plan.dt) {
            write_snapshot(&plan.out_dir, ts, &tr, &state)?;
        }
    }

    if let Some(c) = valid_cert {
        convexity_residuals(&mut hpts, c.nu);
    }
    let mut table = DiagTable::default();
    for (i, (ledger, sample)) in ledgers.iter().zip(&norms).enumerate() {
        table.rows.push(flatten(ledger, sample, hpts.get(i)));
    }
    write_text(&plan.out_dir.join("diagnostics.csv"), &table.to_csv())?;

    let tiny = f64::MIN_POSITIVE;
    let energy_drift = ledgers
        .iter()
        .map(|l| (l.e_total - e0).abs())
        .fold(0.0f64, f64::max)
        / e0.abs().max(tiny);

    let bounds_apply = eq.g.g_int_nonnegative() && e0 >= 0.0 && event.is_none();
    let bound_report = if bounds_apply {
        Some(energy::global_bound_check(&norms, &eq, &grid, e0, 1e-6)?)
    } else {
        None
    };

    let mut note = None;
    if plan.svg {
        if table.rows.len() >= 2 {
            let svg = crate::svg::emit_svg(&table, &plan.svg_columns)?;
            write_text(&plan.out_dir.join("chart.svg"), &svg)?;
        } else {
            note = Some("chart skipped: fewer than 2 diagnostics rows".into());
        }
    }

    let summary = RunSummary {
        exit: if event.is_some() {
            EXIT_BLOWUP
        } else {
            EXIT_OK
        },
        final_t: state.t,
        energy_drift,
        bound_worst_u_ratio: bound_report.as_ref().map(|r| r.worst_u_ratio),
        bound_worst_ut_ratio: bound_report.as_ref().map(|r| r.worst_ut_ratio),
        bound_violations: bound_report.as_ref().map(|r| r.violations),
        blowup: event,
        certificate: cert,
        note,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    write_text(
        &plan.out_dir.join("summary.json"),
        &to_pretty_json(&summary),
    )?;
    Ok(summary)
}

/// Gate reports plus the certificate attempt, without running the time
/// loop. Used by the `check` subcommand; writes certificate.json.
pub fn check_plan(plan: &RunPlan) -> Result<(Vec<GateReport>, Option<BlowupCertificate>, i32)> {
    let grid = Grid::shared(plan.grid_n, plan.grid_x)?;
    let tr = Transform::new(grid.clone());
    let eq = plan.equation_spec(grid.xi())?;
    let gates = all_gates(&eq, plan.sobolev_index);
    let state0 = build_initial_state(&plan.initial, &tr)?;
    let cert = certificate_attempt(&tr, &state0, &eq, plan.nu)?;
    if let Some(c) = &cert {
        fs::create_dir_all(&plan.out_dir)?;
        write_text(&plan.out_dir.join("certificate.json"), &to_pretty_json(c))?;
    }
    let strict = strict_gate(&eq, plan.sobolev_index);
    let exit = if plan.strict_gates && !strict.pass {
        EXIT_GATE
    } else {
        EXIT_OK
    };
    Ok((gates, cert, exit))
}

pub const SWEEP_PARAMS: [&str; 3] = ["initial.amplitude", "time.dt", "grid.N"];

/// One line of the sweep aggregate CSV.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub exit: i32,
    pub drift: f64,
    pub t_escape: Option<f64>,
    pub t1_bound: Option<f64>,
}

/// Derives a child plan with `param` set to `value` and its own output
/// subdirectory. Rejects values that would break the plan invariants, so a
/// bad sweep aborts before any run starts.
pub fn child_plan(base: &RunPlan, param: &str, value: f64) -> Result<RunPlan> {
    let cfg = |msg: String| DdError::Config { line: 0, msg };
    let mut plan = base.clone();
    match param {
        "initial.amplitude" => {
            if !value.is_finite() {
                return Err(cfg(format!("amplitude must be finite, got {value}")));
            }
            plan.initial.amplitude = value;
        }
        "time.dt" => {
            if !(value > 0.0) || !value.is_finite() {
                return Err(cfg(format!("dt must be positive, got {value}")));
            }
            if plan.t_end < value {
                return Err(cfg(format!("dt = {value} exceeds T_end = {}", plan.t_end)));
            }
            plan.dt = value;
        }
        "grid.N" => {
            let n = value as usize;
            if value != n as f64 || !n.is_power_of_two() || n < 16 {
                return Err(cfg(format!("N must be a power of two >= 16, got {value}")));
            }
            plan.grid_n = n;
        }
        other => {
            return Err(cfg(format!(
                "unknown sweep parameter `{other}`; expected one of {}",
                SWEEP_PARAMS.join(", ")
            )));
        }
    }
    plan.out_dir = base
        .out_dir
        .join(format!("{}-{value:?}", param.replace('.', "-")));
    Ok(plan)
}

/// Runs one plan per value concurrently, each in its own subdirectory, and
/// writes the aggregate sweep.csv next to them.
pub fn sweep(base: &RunPlan, param: &str, values: &[f64]) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(DdError::Config {
            line: 0,
            msg: "sweep needs at least one value".into(),
        });
    }
    // validate every child before launching anything
    let plans: Vec<RunPlan> = values
        .iter()
        .map(|&v| child_plan(base, param, v))
        .collect::<Result<_>>()?;
    fs::create_dir_all(&base.out_dir)?;
    let outcomes = exec::run_jobs(plans, |plan| run_plan(&plan));
    let mut rows = Vec::new();
    for (&value, outcome) in values.iter().zip(outcomes) {
        let summary = outcome?;
        rows.push(SweepRow {
            value,
            exit: summary.exit,
            drift: summary.energy_drift,
            t_escape: summary.blowup.map(|e| e.t_escape),
            t1_bound: summary.certificate.and_then(|c| c.t1_bound),
        });
    }
    let mut csv = String::from("value,exit,drift,t_escape,t1_bound\n");
    for row in &rows {
        let t_escape = row
            .t_escape
            .map(|v| format!("{v:.16e}"))
            .unwrap_or_default();
        let t1 = row
            .t1_bound
            .map(|v| format!("{v:.16e}"))
            .unwrap_or_default();
        csv.push_str(&format!(
            "{:?},{},{:.16e},{},{}\n",
            row.value, row.exit, row.drift, t_escape, t1
        ));
    }
    write_text(&base.out_dir.join("sweep.csv"), &csv)?;
    Ok(rows)
}

/// Finds an amplitude near the sign change of E(0) by bisection, returning
/// `(below, above)` with `E(below) > 0 > E(above)`. Used to stage blow-up
/// studies: data below the threshold cannot be certified.
pub fn energy_sign_threshold(plan: &RunPlan, lo: f64, hi: f64, iters: usize) -> Result<(f64, f64)> {
    let grid = Grid::shared(plan.grid_n, plan.grid_x)?;
    let tr = Transform::new(grid.clone());
    let eq = plan.equation_spec(grid.xi())?;
    let e_at = |amp: f64| -> Result<f64> {
        let mut spec = plan.initial.clone();
        spec.amplitude = amp;
        let st = build_initial_state(&spec, &tr)?;
        Ok(energy::energy(&tr, &st, &eq)?.e_total)
    };
    let (mut lo, mut hi) = (lo, hi);
    if !(e_at(lo)? > 0.0) {
        return Err(DdError::Config {
            line: 0,
            msg: format!("E(0) at amplitude {lo} is not positive"),
        });
    }
    if !(e_at(hi)? < 0.0) {
        return Err(DdError::Config {
            line: 0,
            msg: format!("E(0) at amplitude {hi} is not negative"),
        });
    }
    for _ in 0..iters {
        let mid = 0.5 * (lo + hi);
        if e_at(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}
