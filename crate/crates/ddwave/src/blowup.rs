//! Blow-up certification by the concavity method, the H-trace, and
//! numerical escape detection.
//!
//! A run with negative initial energy and a sign-compatible nonlinearity
//! admits a functional `H(t) = ||B^{-1/2} Lambda^{-1} u||^2 + b0 (t+t0)^2`
//! whose concavity forces finite-time escape no later than
//! `t1 = H(0) / (nu H'(0))`. The certificate fixes `(b0, t0)` by a
//! deterministic grid search so the reported bound is reproducible.

use serde::Serialize;

use crate::energy::{self, NormSample};
use crate::error::Result;
use crate::spectral::{FieldState, SpectrumField, Transform};
use crate::symbols::{default_growth_samples, growth_condition_margin, EquationSpec};

/// Outcome of checking the concavity hypotheses on an initial state.
/// Invalid certificates keep the fields that were computable and carry a
/// reason instead of failing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlowupCertificate {
    pub nu: f64,
    pub b0: Option<f64>,
    pub t0: Option<f64>,
    #[serde(rename = "E0")]
    pub e0: f64,
    #[serde(rename = "H0")]
    pub h0: Option<f64>,
    #[serde(rename = "Hp0")]
    pub hp0: Option<f64>,
    pub t1_bound: Option<f64>,
    #[serde(rename = "margin")]
    pub growth_condition_margin: f64,
    pub valid: bool,
    pub reason: Option<String>,
}

/// One sample of the concavity functional along a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HTracePoint {
    pub t: f64,
    pub h: f64,
    /// Analytic first derivative `2<w u, w u_t> + 2 b0 (t+t0)` with
    /// `w = B^{-1/2} Lambda^{-1}`.
    pub hp: f64,
    /// `H H'' - (1+nu) (H')^2` with `H''` from centered differences of
    /// `hp`; present only once both neighbors exist.
    pub convexity_residual: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlowupTrigger {
    NormThreshold,
    Overflow,
    PicardFailure,
}

impl BlowupTrigger {
    pub fn as_str(&self) -> &'static str {
        match self {
            BlowupTrigger::NormThreshold => "norm-threshold",
            BlowupTrigger::Overflow => "overflow",
            BlowupTrigger::PicardFailure => "picard-failure",
        }
    }
}

/// A detected numerical escape: the solution can no longer be continued.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlowupEvent {
    pub t_escape: f64,
    pub trigger: BlowupTrigger,
    /// Norms at the last sample that was still finite.
    pub last: NormSample,
}

/// Initial energy of a state, the sign of which decides certifiability.
pub fn initial_energy(tr: &Transform, state0: &FieldState, eq: &EquationSpec) -> Result<f64> {
    Ok(energy::energy(tr, state0, eq)?.e_total)
}

fn h_value(p: f64, b0: f64, t0: f64, t: f64) -> f64 {
    let shifted = t + t0;
    p + b0 * (shifted * shifted)
}

fn hp_value(q: f64, b0: f64, t0: f64, t: f64) -> f64 {
    q + 2.0 * b0 * (t + t0)
}

fn invalid(nu: f64, e0: f64, margin: f64, reason: &str) -> BlowupCertificate {
    BlowupCertificate {
        nu,
        b0: None,
        t0: None,
        e0,
        h0: None,
        hp0: None,
        t1_bound: None,
        growth_condition_margin: margin,
        valid: false,
        reason: Some(reason.into()),
    }
}

const T0_CEILING: f64 = 1e4;
const T0_FLOOR: f64 = 1e-6;
const T0_GRID: usize = 64;

fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Builds the concavity certificate for an initial state, selecting
/// `(b0, t0)` to minimize the escape bound `t1` over `b0 = -E0 k/32`
/// (k = 1..32) and a log-spaced `t0` grid with one refinement pass around
/// the coarse optimum.
pub fn make_certificate(
    tr: &Transform,
    state0: &FieldState,
    eq: &EquationSpec,
    nu: f64,
) -> Result<BlowupCertificate> {
    assert!(nu > 0.0, "certificate needs nu > 0");
    let growth = growth_condition_margin(&eq.g, nu, &default_growth_samples());
    let e0 = initial_energy(tr, state0, eq)?;
    if !growth.holds {
        return Ok(invalid(nu, e0, growth.worst_margin, "growth-condition"));
    }
    if e0 >= 0.0 {
        return Ok(invalid(
            nu,
            e0,
            growth.worst_margin,
            "negative-energy-required",
        ));
    }
    // H(0) = p + b0 t0^2 and H'(0) = q + 2 b0 t0 in the weighted pairing
    let p = energy::weighted_gradient_inner(&state0.u_hat, &state0.u_hat, eq)?;
    let q = 2.0 * energy::weighted_gradient_inner(&state0.u_hat, &state0.v_hat, eq)?;

    let t1_at = |b0: f64, t0: f64| -> Option<f64> {
        let h0 = h_value(p, b0, t0, 0.0);
        let hp0 = hp_value(q, b0, t0, 0.0);
        if h0 > 0.0 && hp0 > 0.0 {
            Some(h0 / (nu * hp0))
        } else {
            None
        }
    };
    let mut best: Option<(f64, f64, f64)> = None; // (t1, b0, t0)
    fn keep_min(best: &mut Option<(f64, f64, f64)>, cand: Option<f64>, b0: f64, t0: f64) {
        if let Some(t1) = cand {
            if best.is_none_or(|(bt, _, _)| t1 < bt) {
                *best = Some((t1, b0, t0));
            }
        }
    }
    let b0_grid: Vec<f64> = (1..=32).map(|k| -e0 * k as f64 / 32.0).collect();
    for &b0 in &b0_grid {
        // positivity of H'(0) pins the smallest admissible t0
        let t0_min = if q < 0.0 {
            (-q / (2.0 * b0)).max(T0_FLOOR)
        } else {
            T0_FLOOR
        };
        let lo = t0_min * (1.0 + 1e-6);
        if lo >= T0_CEILING {
            continue;
        }
        for t0 in log_spaced(lo, T0_CEILING, T0_GRID) {
            keep_min(&mut best, t1_at(b0, t0), b0, t0);
        }
    }
    if let Some((_, b0, t0)) = best {
        // one refinement pass: same density inside one coarse cell
        let ratio = (T0_CEILING / (T0_FLOOR * (1.0 + 1e-6))).powf(1.0 / (T0_GRID as f64 - 1.0));
        let lo = (t0 / ratio).max(T0_FLOOR * (1.0 + 1e-6));
        let hi = (t0 * ratio).min(T0_CEILING);
        for t0r in log_spaced(lo, hi, T0_GRID) {
            keep_min(&mut best, t1_at(b0, t0r), b0, t0r);
        }
    }
    let Some((_, b0, t0)) = best else {
        return Ok(invalid(
            nu,
            e0,
            growth.worst_margin,
            "h-derivative-positivity",
        ));
    };
    let h0 = h_value(p, b0, t0, 0.0);
    let hp0 = hp_value(q, b0, t0, 0.0);
    Ok(BlowupCertificate {
        nu,
        b0: Some(b0),
        t0: Some(t0),
        e0,
        h0: Some(h0),
        hp0: Some(hp0),
        t1_bound: Some(h0 / (nu * hp0)),
        growth_condition_margin: growth.worst_margin,
        valid: true,
        reason: None,
    })
}

/// Evaluates the concavity functional and its analytic derivative at one
/// state, under the certificate's `(b0, t0)`.
pub fn h_trace(
    state: &FieldState,
    eq: &EquationSpec,
    cert: &BlowupCertificate,
) -> Result<HTracePoint> {
    assert!(cert.valid, "H-trace needs a valid certificate");
    let (b0, t0) = (cert.b0.unwrap(), cert.t0.unwrap());
    let p = energy::weighted_gradient_inner(&state.u_hat, &state.u_hat, eq)?;
    let q = 2.0 * energy::weighted_gradient_inner(&state.u_hat, &state.v_hat, eq)?;
    Ok(HTracePoint {
        t: state.t,
        h: h_value(p, b0, t0, state.t),
        hp: hp_value(q, b0, t0, state.t),
        convexity_residual: None,
    })
}

/// Fills `convexity_residual` on interior points of a trace, using
/// centered differences of the analytic `hp` for the second derivative.
pub fn convexity_residuals(trace: &mut [HTracePoint], nu: f64) {
    if trace.len() < 3 {
        return;
    }
    for i in 1..trace.len() - 1 {
        let span = trace[i + 1].t - trace[i - 1].t;
        if span <= 0.0 {
            continue;
        }
        let hpp = (trace[i + 1].hp - trace[i - 1].hp) / span;
        let r = trace[i].h * hpp - (1.0 + nu) * trace[i].hp * trace[i].hp;
        trace[i].convexity_residual = Some(r);
    }
}

/// Scans a norm series for the first sample beyond the escape threshold.
/// Overflow and contraction failures are converted to events by the
/// caller, which holds the error and the last finite sample.
pub fn detect_blowup(series: &[NormSample], threshold: f64) -> Option<BlowupEvent> {
    let first = series.first()?;
    assert!(
        threshold > first.u_s + first.ut_s1,
        "escape threshold {threshold} must exceed the initial norm"
    );
    series
        .iter()
        .find(|row| row.u_s + row.ut_s1 > threshold)
        .map(|row| BlowupEvent {
            t_escape: row.t,
            trigger: BlowupTrigger::NormThreshold,
            last: *row,
        })
}

/// Event for an escape signalled by a stepper error rather than the norm
/// scan.
pub fn event_from_signal(trigger: BlowupTrigger, t_escape: f64, last: NormSample) -> BlowupEvent {
    BlowupEvent {
        t_escape,
        trigger,
        last,
    }
}

/// Mean-zero parts of a state, for preconditioning the weighted pairings.
pub fn mean_free(c: &SpectrumField) -> bool {
    crate::spectral::mean_mode_ratio(c) <= energy::MEAN_TOLERANCE
}
