//! Conserved energy, tracked norm series, and the global bound monitor.
//!
//! The energy splits into a kinetic part weighted by `B^{-1/2} Lambda^{-1}`,
//! an elastic part weighted by `B^{-1/2} K` with `K = sqrt(l)`, and twice
//! the integrated potential `G(u)`. The semi-discrete flow conserves the
//! total exactly; the time stepper drifts at its own order, which is what
//! the diagnostics record.

use crate::error::{DdError, Result};
use crate::spectral::{
    apply_multiplier, inner_l2, mean_mode_ratio, sobolev_norm, FieldState, Grid, PhysicalField,
    SpectrumField, Transform,
};
use crate::symbols::{verify_bounds, EquationSpec};

/// Largest tolerated mean-mode fraction before the gradient weight is
/// declared non-invertible on a spectrum.
pub const MEAN_TOLERANCE: f64 = 1e-10;

/// Energy of one state, split into its three parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyLedger {
    pub t: f64,
    pub e_total: f64,
    pub e_kin: f64,
    pub e_ela: f64,
    pub e_pot: f64,
}

/// `c_j / |xi_j|` on nonzero modes, zero on the mean mode. Requires the
/// mean mode to be negligible, since `1/|xi|` has no value at zero.
pub fn lambda_inv(c: &SpectrumField) -> Result<SpectrumField> {
    if mean_mode_ratio(c) > MEAN_TOLERANCE {
        let norm = sobolev_norm(c, 0.0) / (2.0 * c.grid.half_length()).sqrt();
        return Err(DdError::MeanMode {
            c0_abs: c.coeffs[0].norm(),
            allowed: MEAN_TOLERANCE * norm,
        });
    }
    let mut out = apply_multiplier(
        c,
        |xi| if xi == 0.0 { 0.0 } else { xi.abs().recip() },
        "1/|xi|",
    )?;
    out.coeffs[0] = num_complex::Complex64::ZERO;
    Ok(out)
}

/// `c_j * b(xi_j)^{-1/2}`. Every mode must see a strictly positive `b`.
pub fn b_inv_sqrt(c: &SpectrumField, eq: &EquationSpec) -> Result<SpectrumField> {
    for &xi in c.grid.xi() {
        let b = eq.b.eval(xi);
        if !(b > 0.0) {
            return Err(DdError::PositivityViolation(format!(
                "b({xi}) = {b}; the inverse square-root weight needs b > 0"
            )));
        }
    }
    apply_multiplier(c, |xi| eq.b.eval(xi).sqrt().recip(), "b^(-1/2)")
}

fn norm_sq(c: &SpectrumField) -> f64 {
    let n = sobolev_norm(c, 0.0);
    n * n
}

/// Twice the integrated potential, by grid trapezoid of `G(u)`.
fn potential_term(tr: &Transform, u_hat: &SpectrumField, eq: &EquationSpec) -> f64 {
    let u = tr.synthesize(u_hat);
    let mut g_of_u = PhysicalField::zeros(u_hat.grid.clone());
    for (gv, &uv) in g_of_u.values.iter_mut().zip(&u.values) {
        *gv = eq.g.g_and_g_int(uv).1;
    }
    2.0 * g_of_u.integral()
}

/// Energy with the full `B^{-1/2}` weighting.
pub fn energy(tr: &Transform, state: &FieldState, eq: &EquationSpec) -> Result<EnergyLedger> {
    let e_kin = norm_sq(&b_inv_sqrt(&lambda_inv(&state.v_hat)?, eq)?);
    let ku = apply_multiplier(&state.u_hat, |xi| eq.l.eval(xi).sqrt(), "sqrt(l)")?;
    let e_ela = norm_sq(&b_inv_sqrt(&ku, eq)?);
    let e_pot = potential_term(tr, &state.u_hat, eq);
    Ok(EnergyLedger {
        t: state.t,
        e_total: e_kin + e_ela + e_pot,
        e_kin,
        e_ela,
        e_pot,
    })
}

/// Energy in the `b == 1` specialization, skipping the `B^{-1/2}` weight
/// entirely. Kept as an independent route for cross-checking `energy` on
/// equations with constant unit `b`.
pub fn energy_unit_b(
    tr: &Transform,
    state: &FieldState,
    eq: &EquationSpec,
) -> Result<EnergyLedger> {
    let e_kin = norm_sq(&lambda_inv(&state.v_hat)?);
    let ku = apply_multiplier(&state.u_hat, |xi| eq.l.eval(xi).sqrt(), "sqrt(l)")?;
    let e_ela = norm_sq(&ku);
    let e_pot = potential_term(tr, &state.u_hat, eq);
    Ok(EnergyLedger {
        t: state.t,
        e_total: e_kin + e_ela + e_pot,
        e_kin,
        e_ela,
        e_pot,
    })
}

/// The norms tracked at every sample time.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct NormSample {
    pub t: f64,
    /// `||u||_s` at the configured index.
    pub u_s: f64,
    /// `||u_t||_{s - 1 - rho/2}`, the continuation partner of `u_s`.
    pub ut_s1: f64,
    /// `||u||_{rho/2 + r/2}`, the globally bounded index.
    pub u_gq: f64,
    /// `||u_t||_{r/2 - 1}`, the other globally bounded index.
    pub ut_gq: f64,
    /// Grid maximum of `|u|`.
    pub linf: f64,
}

/// Computes every tracked norm at `state.t`. A non-finite value anywhere
/// becomes an overflow error carrying the time, which feeds the blow-up
/// detector.
pub fn norm_series_sample(
    tr: &Transform,
    state: &FieldState,
    eq: &EquationSpec,
    s: f64,
) -> Result<NormSample> {
    let sample = NormSample {
        t: state.t,
        u_s: sobolev_norm(&state.u_hat, s),
        ut_s1: sobolev_norm(&state.v_hat, s - 1.0 - eq.rho / 2.0),
        u_gq: sobolev_norm(&state.u_hat, eq.rho / 2.0 + eq.r / 2.0),
        ut_gq: sobolev_norm(&state.v_hat, eq.r / 2.0 - 1.0),
        linf: tr.synthesize(&state.u_hat).norm_inf(),
    };
    let finite = [
        sample.u_s,
        sample.ut_s1,
        sample.u_gq,
        sample.ut_gq,
        sample.linf,
    ]
    .iter()
    .all(|v| v.is_finite());
    if finite {
        Ok(sample)
    } else {
        Err(DdError::Overflow { t: state.t })
    }
}

/// Result of holding a norm series against the proved global bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalBoundReport {
    pub pass: bool,
    pub violations: usize,
    /// Largest observed `||u||_{rho/2+r/2} / ((c3/c1) sqrt(E0))`.
    pub worst_u_ratio: f64,
    /// Largest observed `||u_t||_{r/2-1} / (c3 sqrt(E0))`.
    pub worst_ut_ratio: f64,
    pub u_bound: f64,
    pub ut_bound: f64,
    pub tol: f64,
}

fn bound_ratio(observed: f64, bound: f64) -> f64 {
    if bound > 0.0 {
        observed / bound
    } else if observed == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Checks `||u||_{rho/2+r/2} <= (c3/c1) sqrt(E0) (1+tol)` and
/// `||u_t||_{r/2-1} <= c3 sqrt(E0) (1+tol)` at every sample, with the
/// constants measured on the grid. Violations are reported, not thrown.
pub fn global_bound_check(
    series: &[NormSample],
    eq: &EquationSpec,
    grid: &Grid,
    e0: f64,
    tol: f64,
) -> Result<GlobalBoundReport> {
    assert!(e0 >= 0.0, "global bounds need nonnegative initial energy");
    let bounds = verify_bounds(eq, grid.xi())?;
    let sqrt_e0 = e0.sqrt();
    let u_bound = bounds.c3_hat / bounds.c1_hat * sqrt_e0;
    let ut_bound = bounds.c3_hat * sqrt_e0;
    let mut worst_u: f64 = 0.0;
    let mut worst_ut: f64 = 0.0;
    let mut violations = 0;
    for row in series {
        let ru = bound_ratio(row.u_gq, u_bound);
        let rut = bound_ratio(row.ut_gq, ut_bound);
        worst_u = worst_u.max(ru);
        worst_ut = worst_ut.max(rut);
        if ru > 1.0 + tol || rut > 1.0 + tol {
            violations += 1;
        }
    }
    Ok(GlobalBoundReport {
        pass: violations == 0,
        violations,
        worst_u_ratio: worst_u,
        worst_ut_ratio: worst_ut,
        u_bound,
        ut_bound,
        tol,
    })
}

/// `<B^{-1/2} Lambda^{-1} a, B^{-1/2} Lambda^{-1} b>`, the pairing used by
/// the concavity functional.
pub fn weighted_gradient_inner(
    a: &SpectrumField,
    b: &SpectrumField,
    eq: &EquationSpec,
) -> Result<f64> {
    let wa = b_inv_sqrt(&lambda_inv(a)?, eq)?;
    let wb = b_inv_sqrt(&lambda_inv(b)?, eq)?;
    Ok(inner_l2(&wa, &wb))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Grid, PhysicalField};
    use crate::symbols::{make_preset, Nonlinearity};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn state_from(
        grid: &std::sync::Arc<Grid>,
        tr: &Transform,
        u: impl Fn(f64) -> f64,
        v: impl Fn(f64) -> f64,
    ) -> FieldState {
        FieldState {
            t: 0.0,
            u_hat: tr.analyze(&PhysicalField::from_fn(grid.clone(), u)),
            v_hat: tr.analyze(&PhysicalField::from_fn(grid.clone(), v)),
        }
    }

    #[test]
    fn elastic_energy_of_cosine_mode() {
        // u = eps cos x on X = pi: E_ela = 2X * l(1) * (eps^2/4 + eps^2/4)
        // = 2 pi eps^2 for l(1) = 2; the cubic potential integrates to 0.
        let grid = Grid::shared(64, PI).unwrap();
        let tr = Transform::new(grid.clone());
        let mut eq = make_preset("boussinesq").unwrap();
        eq.g = Nonlinearity::IntegerPower { a: 1.0, q: 2 };
        let eps = 0.3;
        let st = state_from(&grid, &tr, |x| eps * x.cos(), |_| 0.0);
        let led = energy(&tr, &st, &eq).unwrap();
        assert!(led.e_kin.abs() < 1e-18);
        assert!((led.e_ela - 2.0 * PI * eps * eps).abs() < 1e-13);
        assert!(led.e_pot.abs() < 1e-13);
        assert_eq!(led.e_total, led.e_kin + led.e_ela + led.e_pot);
    }

    #[test]
    fn zero_state_has_zero_energy() {
        let grid = Grid::shared(32, 5.0).unwrap();
        let tr = Transform::new(grid.clone());
        let eq = make_preset("double-dispersion").unwrap();
        let st = FieldState {
            t: 0.0,
            u_hat: SpectrumField::zeros(grid.clone()),
            v_hat: SpectrumField::zeros(grid.clone()),
        };
        let led = energy(&tr, &st, &eq).unwrap();
        assert_eq!(led.e_total, 0.0);
    }

    #[test]
    fn quartic_potential_matches_quadrature_oracle() {
        // g = -u^3, u = cos x on X = pi: E_pot = 2 * (-1/4) * int cos^4
        // = -(1/2)(3 pi / 4).
        let grid = Grid::shared(64, PI).unwrap();
        let tr = Transform::new(grid.clone());
        let mut eq = make_preset("boussinesq").unwrap();
        eq.g = Nonlinearity::IntegerPower { a: -1.0, q: 3 };
        let st = state_from(&grid, &tr, |x| x.cos(), |_| 0.0);
        let led = energy(&tr, &st, &eq).unwrap();
        let expect = -0.5 * 3.0 * PI / 4.0;
        assert!(
            (led.e_pot - expect).abs() < 1e-13,
            "{} vs {expect}",
            led.e_pot
        );
    }

    #[test]
    fn unit_b_weight_is_a_no_op() {
        let grid = Grid::shared(64, 8.0).unwrap();
        let tr = Transform::new(grid.clone());
        let eq = make_preset("boussinesq").unwrap();
        let st = state_from(
            &grid,
            &tr,
            |x| 0.4 * (PI * x / 8.0).sin() + 0.2 * (PI * x / 4.0).cos(),
            |x| 0.1 * (PI * x / 8.0).sin(),
        );
        let with = energy(&tr, &st, &eq).unwrap();
        let without = energy_unit_b(&tr, &st, &eq).unwrap();
        for (a, b) in [
            (with.e_kin, without.e_kin),
            (with.e_ela, without.e_ela),
            (with.e_total, without.e_total),
        ] {
            assert!((a - b).abs() <= 1e-14 * (1.0 + b.abs()), "{a} vs {b}");
        }
    }

    #[test]
    fn combined_and_sequential_weights_agree() {
        // ||B^{-1/2} K u|| via one multiplier sqrt(l/b) vs two passes.
        let grid = Grid::shared(128, 10.0).unwrap();
        let tr = Transform::new(grid.clone());
        let eq = make_preset("double-dispersion").unwrap();
        let u = PhysicalField::from_fn(grid.clone(), |x| {
            let mut acc = 0.0;
            for m in 1..6 {
                acc += (0.1 * m as f64) * (m as f64 * PI * x / 10.0).cos();
            }
            acc
        });
        let c = tr.analyze(&u);
        let combined =
            apply_multiplier(&c, |xi| (eq.l.eval(xi) / eq.b.eval(xi)).sqrt(), "sqrt(l/b)").unwrap();
        let sequential = b_inv_sqrt(
            &apply_multiplier(&c, |xi| eq.l.eval(xi).sqrt(), "sqrt(l)").unwrap(),
            &eq,
        )
        .unwrap();
        let a = norm_sq(&combined);
        let b = norm_sq(&sequential);
        assert!((a - b).abs() <= 1e-13 * (1.0 + b.abs()), "{a} vs {b}");
    }

    #[test]
    fn gradient_weight_on_single_cosines() {
        let grid = Grid::shared(32, PI).unwrap();
        let tr = Transform::new(grid.clone());
        // |xi| = 1 on modes +-1: cos x is unchanged
        let c1 = tr.analyze(&PhysicalField::from_fn(grid.clone(), |x| x.cos()));
        let w1 = lambda_inv(&c1).unwrap();
        for k in 0..32 {
            assert!((w1.coeffs[k] - c1.coeffs[k]).norm() <= 1e-15);
        }
        // |xi| = 2 on modes +-2: cos 2x is halved
        let c2 = tr.analyze(&PhysicalField::from_fn(grid.clone(), |x| (2.0 * x).cos()));
        let w2 = lambda_inv(&c2).unwrap();
        assert!((w2.coeffs[2] - c2.coeffs[2] / 2.0).norm() <= 1e-15);
        // constant field is all mean mode
        let cc = tr.analyze(&PhysicalField::from_fn(grid.clone(), |_| 1.0));
        assert_eq!(lambda_inv(&cc).unwrap_err().kind(), "mean-mode-error");
    }

    #[test]
    fn inverse_sqrt_weight_examples() {
        let grid = Grid::shared(32, PI).unwrap();
        let tr = Transform::new(grid.clone());
        let c = tr.analyze(&PhysicalField::from_fn(grid.clone(), |x| 1.0 + x.cos()));
        // b == 1: bitwise identity
        let b1 = make_preset("boussinesq").unwrap();
        assert_eq!(b_inv_sqrt(&c, &b1).unwrap().coeffs, c.coeffs);
        // double-dispersion: b(1) = 1/2, so modes +-1 scale by sqrt(2);
        // b(0) = 1 leaves the mean mode alone
        let dd = make_preset("double-dispersion").unwrap();
        let w = b_inv_sqrt(&c, &dd).unwrap();
        assert!((w.coeffs[1] - c.coeffs[1] * 2.0_f64.sqrt()).norm() <= 1e-15);
        assert_eq!(w.coeffs[0], c.coeffs[0]);
        // nonpositive b anywhere is an error
        let mut bad = make_preset("boussinesq").unwrap();
        bad.b = crate::symbols::Symbol::constant(0.0);
        assert_eq!(
            b_inv_sqrt(&c, &bad).unwrap_err().kind(),
            "positivity-violation"
        );
    }

    #[test]
    fn kinetic_term_requires_mean_zero_velocity() {
        let grid = Grid::shared(32, PI).unwrap();
        let tr = Transform::new(grid.clone());
        let eq = make_preset("boussinesq").unwrap();
        let st = state_from(&grid, &tr, |x| x.cos(), |_| 0.5);
        assert_eq!(energy(&tr, &st, &eq).unwrap_err().kind(), "mean-mode-error");
    }

    #[test]
    fn norm_sample_values_and_overflow() {
        let grid = Grid::shared(64, PI).unwrap();
        let tr = Transform::new(grid.clone());
        let eq = make_preset("boussinesq").unwrap();
        let zero = FieldState {
            t: 1.5,
            u_hat: SpectrumField::zeros(grid.clone()),
            v_hat: SpectrumField::zeros(grid.clone()),
        };
        let row = norm_series_sample(&tr, &zero, &eq, 1.0).unwrap();
        assert_eq!(
            (row.u_s, row.ut_s1, row.u_gq, row.ut_gq, row.linf),
            (0.0, 0.0, 0.0, 0.0, 0.0)
        );
        let st = state_from(&grid, &tr, |x| x.cos(), |_| 0.0);
        let row = norm_series_sample(&tr, &st, &eq, 1.0).unwrap();
        assert!((row.u_s - (2.0 * PI).sqrt()).abs() < 1e-12);
        assert!((row.linf - 1.0).abs() < 1e-12);
        let mut broken = st.clone();
        broken.t = 2.25;
        broken.u_hat.coeffs[3] = Complex64::new(f64::INFINITY, 0.0);
        let err = norm_series_sample(&tr, &broken, &eq, 1.0).unwrap_err();
        assert_eq!(err.kind(), "overflow");
        assert!(format!("{err}").contains("2.25"));
    }

    #[test]
    fn global_bound_report_flags_violations() {
        let grid = Grid::shared(64, PI).unwrap();
        let eq = make_preset("boussinesq").unwrap();
        let quiet = NormSample {
            t: 0.0,
            u_s: 0.5,
            ut_s1: 0.1,
            u_gq: 0.5,
            ut_gq: 0.1,
            linf: 0.4,
        };
        let loud = NormSample {
            t: 1.0,
            u_s: 9.0,
            ut_s1: 9.0,
            u_gq: 9.0,
            ut_gq: 9.0,
            linf: 9.0,
        };
        let rep = global_bound_check(&[quiet], &eq, &grid, 1.0, 1e-6).unwrap();
        assert!(rep.pass);
        assert!((rep.worst_u_ratio - 0.5).abs() < 1e-12);
        let rep = global_bound_check(&[quiet, loud], &eq, &grid, 1.0, 1e-6).unwrap();
        assert!(!rep.pass);
        assert_eq!(rep.violations, 1);
        assert!((rep.worst_u_ratio - 9.0).abs() < 1e-12);
    }

    #[test]
    fn zero_series_has_zero_ratios_even_at_zero_energy() {
        let grid = Grid::shared(32, PI).unwrap();
        let eq = make_preset("boussinesq").unwrap();
        let zero = NormSample {
            t: 0.0,
            u_s: 0.0,
            ut_s1: 0.0,
            u_gq: 0.0,
            ut_gq: 0.0,
            linf: 0.0,
        };
        let rep = global_bound_check(&[zero], &eq, &grid, 0.0, 1e-6).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.worst_u_ratio, 0.0);
        assert_eq!(rep.worst_ut_ratio, 0.0);
    }

    #[test]
    fn energy_parts_are_nonnegative_for_nonnegative_potentials() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let grid = Grid::shared(64, 6.0).unwrap();
        let tr = Transform::new(grid.clone());
        let mut eq = make_preset("double-dispersion").unwrap();
        eq.g = Nonlinearity::IntegerPower { a: 1.0, q: 3 };
        for _ in 0..20 {
            let a1 = rng.gen_range(-1.0..1.0);
            let a2 = rng.gen_range(-1.0..1.0);
            let b1 = rng.gen_range(-1.0..1.0);
            let st = state_from(
                &grid,
                &tr,
                move |x| a1 * (PI * x / 6.0).cos() + a2 * (PI * x / 3.0).sin(),
                move |x| b1 * (PI * x / 6.0).sin(),
            );
            let led = energy(&tr, &st, &eq).unwrap();
            assert!(led.e_kin >= 0.0);
            assert!(led.e_ela >= 0.0);
            assert!(led.e_pot >= 0.0);
        }
    }
}
