//! Exact homogeneous mode propagator and second-order exponential steppers.
//!
//! Without the nonlinearity every mode rotates independently:
//!
//! ```text
//! d/dt [u_j, v_j] = [[0, 1], [-omega_j^2, 0]] [u_j, v_j]
//! ```
//!
//! with `omega = xi sqrt(l(xi))`. The matrix exponential over a step `dt`
//! is `[[C, S], [D, C]]` where `C = cos(omega dt)`, `S = sin(omega dt) /
//! omega` (continued as `dt` through `omega = 0`) and `D = -omega
//! sin(omega dt)`. The steppers treat that rotation exactly and quadrature
//! only the nonlinear forcing, so the linear dynamics carry no phase error
//! at any dt.

use std::sync::Arc;

use crate::error::{DdError, Result};
use crate::exec;
use crate::spectral::{nonlinear_rhs, sobolev_norm, FieldState, Grid, SpectrumField, Transform};
use crate::symbols::{eval_symbols, EquationSpec};

/// `sin(omega dt) / omega`, switching to the Taylor series of `sinc` for
/// small phase so the `omega -> 0` limit is smooth and exactly `dt` at 0.
fn stable_sinc(omega: f64, dt: f64) -> f64 {
    let z = omega * dt;
    if z.abs() < 1e-4 {
        let z2 = z * z;
        dt * (1.0 - z2 / 6.0 * (1.0 - z2 / 20.0 * (1.0 - z2 / 42.0)))
    } else {
        (omega * dt).sin() / omega
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RotationView<'a> {
    pub dt: f64,
    pub cos: &'a [f64],
    pub sinc: &'a [f64],
    pub dsin: &'a [f64],
}

/// Precomputed rotation entries at `dt` and `dt/2` for every mode.
#[derive(Debug, Clone)]
pub struct PropagatorTable {
    grid: Arc<Grid>,
    dt: f64,
    omega: Vec<f64>,
    cos_full: Vec<f64>,
    sinc_full: Vec<f64>,
    dsin_full: Vec<f64>,
    cos_half: Vec<f64>,
    sinc_half: Vec<f64>,
    dsin_half: Vec<f64>,
}

pub fn build_tables(eq: &EquationSpec, grid: &Arc<Grid>, dt: f64) -> Result<PropagatorTable> {
    if dt == 0.0 || !dt.is_finite() {
        return Err(DdError::InvalidSymbol(format!(
            "step size must be finite and nonzero, got {dt}"
        )));
    }
    let n = grid.n();
    let mut omega = Vec::with_capacity(n);
    for &xi in grid.xi() {
        omega.push(eval_symbols(eq, xi)?.omega);
    }
    let mut tab = PropagatorTable {
        grid: grid.clone(),
        dt,
        omega,
        cos_full: vec![0.0; n],
        sinc_full: vec![0.0; n],
        dsin_full: vec![0.0; n],
        cos_half: vec![0.0; n],
        sinc_half: vec![0.0; n],
        dsin_half: vec![0.0; n],
    };
    for k in 0..n {
        let w = tab.omega[k];
        tab.cos_full[k] = (w * dt).cos();
        tab.sinc_full[k] = stable_sinc(w, dt);
        tab.dsin_full[k] = -w * (w * dt).sin();
        let h = dt / 2.0;
        tab.cos_half[k] = (w * h).cos();
        tab.sinc_half[k] = stable_sinc(w, h);
        tab.dsin_half[k] = -w * (w * h).sin();
    }
    Ok(tab)
}

impl PropagatorTable {
    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn full_step(&self) -> RotationView<'_> {
        RotationView {
            dt: self.dt,
            cos: &self.cos_full,
            sinc: &self.sinc_full,
            dsin: &self.dsin_full,
        }
    }

    pub fn half_step(&self) -> RotationView<'_> {
        RotationView {
            dt: self.dt / 2.0,
            cos: &self.cos_half,
            sinc: &self.sinc_half,
            dsin: &self.dsin_half,
        }
    }

    /// Worst deviation of `C^2 - S D` from 1 over all modes. The rotation
    /// identity `cos^2 + sin^2 = 1` in table form.
    pub fn rotation_identity_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..self.grid.n() {
            for (c, s, d) in [
                (self.cos_full[k], self.sinc_full[k], self.dsin_full[k]),
                (self.cos_half[k], self.sinc_half[k], self.dsin_half[k]),
            ] {
                worst = worst.max((c * c - s * d - 1.0).abs());
            }
        }
        worst
    }
}

/// One exact rotation of every mode by the view's step.
pub fn apply_homogeneous(state: &FieldState, rot: &RotationView<'_>) -> FieldState {
    let mut u = state.u_hat.clone();
    let mut v = state.v_hat.clone();
    let (cos, sinc, dsin) = (rot.cos, rot.sinc, rot.dsin);
    exec::for_each_slot_pair(&mut u.coeffs, &mut v.coeffs, |k, uu, vv| {
        let (a, b) = (*uu, *vv);
        *uu = a * cos[k] + b * sinc[k];
        *vv = a * dsin[k] + b * cos[k];
    });
    FieldState {
        t: state.t + rot.dt,
        u_hat: u,
        v_hat: v,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    ExpMidpoint,
    Picard,
}

impl Scheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::ExpMidpoint => "exp-midpoint",
            Scheme::Picard => "picard",
        }
    }

    pub fn parse(s: &str) -> Option<Scheme> {
        match s {
            "exp-midpoint" => Some(Scheme::ExpMidpoint),
            "picard" => Some(Scheme::Picard),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub dt: f64,
    pub scheme: Scheme,
    /// Fixed-point iteration count; `None` for the midpoint scheme.
    pub iterations: Option<usize>,
    pub max_mode_amplitude: f64,
}

fn finite_or_overflow(state: &FieldState) -> Result<()> {
    if state.is_finite() {
        Ok(())
    } else {
        Err(DdError::Overflow { t: state.t })
    }
}

/// Exponential midpoint step with a caller-supplied forcing closure. The
/// closure receives the half-step homogeneous state and must return the
/// forcing spectrum there.
pub fn step_exp_midpoint_forced<F>(
    state: &FieldState,
    tab: &PropagatorTable,
    forcing: F,
) -> Result<(FieldState, StepReport)>
where
    F: FnOnce(&FieldState) -> Result<SpectrumField>,
{
    let dt = tab.dt();
    let mid = apply_homogeneous(state, &tab.half_step());
    let f_mid = forcing(&mid)?;
    let mut next = apply_homogeneous(state, &tab.full_step());
    let half = tab.half_step();
    exec::for_each_slot_pair(
        &mut next.u_hat.coeffs,
        &mut next.v_hat.coeffs,
        |k, uu, vv| {
            let f = f_mid.coeffs[k] * dt;
            *uu += f * half.sinc[k];
            *vv += f * half.cos[k];
        },
    );
    finite_or_overflow(&next)?;
    let amp = next
        .u_hat
        .max_mode_amplitude()
        .max(next.v_hat.max_mode_amplitude());
    Ok((
        next,
        StepReport {
            dt,
            scheme: Scheme::ExpMidpoint,
            iterations: None,
            max_mode_amplitude: amp,
        },
    ))
}

/// Exponential midpoint step driven by the equation's own nonlinearity.
pub fn step_exp_midpoint(
    tr: &Transform,
    state: &FieldState,
    eq: &EquationSpec,
    tab: &PropagatorTable,
    dealias: bool,
) -> Result<(FieldState, StepReport)> {
    step_exp_midpoint_forced(state, tab, |mid| nonlinear_rhs(tr, mid, eq, dealias))
}

/// Fixed-point (Picard) step with a caller-supplied forcing closure.
///
/// The window iteration starts from the homogeneous solution and updates
/// through the trapezoid form of the variation-of-constants integral on
/// the endpoints. Successive corrections are measured in
/// `||.||_s + ||.||_{s_v}`; a correction that grows from one iteration to
/// the next breaks the contraction hypothesis and aborts the step, as does
/// running out of iterations.
pub fn step_picard_forced<F>(
    state: &FieldState,
    tab: &PropagatorTable,
    tol: f64,
    kmax: usize,
    s: f64,
    s_v: f64,
    mut forcing: F,
) -> Result<(FieldState, StepReport)>
where
    F: FnMut(&FieldState) -> Result<SpectrumField>,
{
    assert!(kmax >= 1, "picard needs at least one iteration");
    let dt = tab.dt();
    let full = tab.full_step();
    let f0 = forcing(state)?;

    // w^0: homogeneous propagation.
    let base = apply_homogeneous(state, &full);

    // Fixed part of the trapezoid update: the f0 contribution.
    let mut fixed = base.clone();
    exec::for_each_slot_pair(
        &mut fixed.u_hat.coeffs,
        &mut fixed.v_hat.coeffs,
        |k, uu, vv| {
            let f = f0.coeffs[k] * (dt / 2.0);
            *uu += f * full.sinc[k];
            *vv += f * full.cos[k];
        },
    );

    let mut prev = base;
    let mut prev_diff = f64::INFINITY;
    for k in 1..=kmax {
        let f1 = forcing(&prev)?;
        let mut next = fixed.clone();
        exec::for_each_slot(&mut next.v_hat.coeffs, |j, vv| {
            *vv += f1.coeffs[j] * (dt / 2.0);
        });

        let mut du = next.u_hat.clone();
        let mut dv = next.v_hat.clone();
        for (a, b) in du.coeffs.iter_mut().zip(&prev.u_hat.coeffs) {
            *a -= b;
        }
        for (a, b) in dv.coeffs.iter_mut().zip(&prev.v_hat.coeffs) {
            *a -= b;
        }
        let diff = sobolev_norm(&du, s) + sobolev_norm(&dv, s_v);
        if !diff.is_finite() {
            return Err(DdError::Overflow { t: next.t });
        }
        if diff <= tol {
            finite_or_overflow(&next)?;
            let amp = next
                .u_hat
                .max_mode_amplitude()
                .max(next.v_hat.max_mode_amplitude());
            return Ok((
                next,
                StepReport {
                    dt,
                    scheme: Scheme::Picard,
                    iterations: Some(k),
                    max_mode_amplitude: amp,
                },
            ));
        }
        if diff > prev_diff {
            return Err(DdError::ContractionFailure {
                t: state.t,
                iterations: k,
            });
        }
        prev_diff = diff;
        prev = next;
    }
    Err(DdError::ContractionFailure {
        t: state.t,
        iterations: kmax,
    })
}

/// Picard step driven by the equation's own nonlinearity. The velocity
/// correction is measured at index `s - 1 - rho/2`, matching the space the
/// local theory pairs with `u` at index `s`.
#[allow(clippy::too_many_arguments)]
pub fn step_picard(
    tr: &Transform,
    state: &FieldState,
    eq: &EquationSpec,
    tab: &PropagatorTable,
    tol: f64,
    kmax: usize,
    s: f64,
    dealias: bool,
) -> Result<(FieldState, StepReport)> {
    let s_v = s - 1.0 - eq.rho / 2.0;
    step_picard_forced(state, tab, tol, kmax, s, s_v, |w| {
        nonlinear_rhs(tr, w, eq, dealias)
    })
}
