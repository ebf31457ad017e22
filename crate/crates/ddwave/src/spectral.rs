//! Periodic grid, discrete transforms, multiplier algebra and norms.
//!
//! The line is truncated to `[-X, X)` with `N` equispaced points
//! `x_n = -X + 2Xn/N`. Spectra live on the frequencies `xi_j = pi j / X`,
//! `j = -N/2 .. N/2 - 1`, stored in wraparound slot order (slot `k` holds
//! mode `j = k` for `k < N/2` and `j = k - N` otherwise). Coefficients use
//! the convention
//!
//! ```text
//! c_j = (1/N) sum_n f(x_n) exp(-i xi_j x_n)
//! ```
//!
//! which differs from the plain DFT by the per-slot phase `(-1)^k`
//! (because the leftmost grid point is `-X`, not `0`) and the `1/N`
//! normalization. Norms are spectral sums:
//! `||u||_s^2 = 2X sum_j (1 + xi_j^2)^s |c_j|^2`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{DdError, Result};
use crate::exec;
use crate::symbols::EquationSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    n: usize,
    half_length: f64,
    dx: f64,
    xi: Vec<f64>,
}

impl Grid {
    /// `n` must be a power of two, at least 16; `half_length` is `X > 0`.
    pub fn new(n: usize, half_length: f64) -> Result<Grid> {
        if n < 16 || !n.is_power_of_two() {
            return Err(DdError::InvalidSymbol(format!(
                "grid size must be a power of two >= 16, got {n}"
            )));
        }
        if !(half_length > 0.0) || !half_length.is_finite() {
            return Err(DdError::InvalidSymbol(format!(
                "grid half-length must be positive and finite, got {half_length}"
            )));
        }
        let dx = 2.0 * half_length / n as f64;
        let xi = (0..n)
            .map(|k| {
                let j = if k < n / 2 {
                    k as i64
                } else {
                    k as i64 - n as i64
                };
                std::f64::consts::PI * j as f64 / half_length
            })
            .collect();
        Ok(Grid {
            n,
            half_length,
            dx,
            xi,
        })
    }

    pub fn shared(n: usize, half_length: f64) -> Result<Arc<Grid>> {
        Ok(Arc::new(Grid::new(n, half_length)?))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Frequencies in slot order, aligned with spectrum storage.
    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    /// Signed mode number held by slot `k`.
    pub fn mode_number(&self, k: usize) -> i64 {
        if k < self.n / 2 {
            k as i64
        } else {
            k as i64 - self.n as i64
        }
    }

    /// Largest frequency magnitude present on the grid: `pi (N/2) / X`.
    pub fn max_abs_xi(&self) -> f64 {
        std::f64::consts::PI * (self.n as f64 / 2.0) / self.half_length
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| -self.half_length + i as f64 * self.dx)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    pub grid: Arc<Grid>,
    pub values: Vec<f64>,
}

impl PhysicalField {
    pub fn from_fn<F: Fn(f64) -> f64>(grid: Arc<Grid>, f: F) -> PhysicalField {
        let values = grid.points().iter().map(|&x| f(x)).collect();
        PhysicalField { grid, values }
    }

    pub fn zeros(grid: Arc<Grid>) -> PhysicalField {
        let values = vec![0.0; grid.n()];
        PhysicalField { grid, values }
    }

    pub fn norm_inf(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Periodic trapezoid rule, which on a uniform periodic grid is the
    /// plain Riemann sum `dx * sum f(x_n)`.
    pub fn integral(&self) -> f64 {
        self.grid.dx() * self.values.iter().sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumField {
    pub grid: Arc<Grid>,
    pub coeffs: Vec<Complex64>,
}

impl SpectrumField {
    pub fn zeros(grid: Arc<Grid>) -> SpectrumField {
        let coeffs = vec![Complex64::ZERO; grid.n()];
        SpectrumField { grid, coeffs }
    }

    /// Worst deviation from conjugate symmetry `c_{-j} = conj(c_j)`.
    pub fn hermitian_error(&self) -> f64 {
        let n = self.grid.n();
        let mut worst: f64 = 0.0;
        for k in 0..n {
            let partner = (n - k) % n;
            let d = self.coeffs[partner] - self.coeffs[k].conj();
            worst = worst.max(d.norm());
        }
        worst
    }

    pub fn max_mode_amplitude(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// State of the evolution at one time: `u_hat` and `v_hat = d/dt u_hat`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub t: f64,
    pub u_hat: SpectrumField,
    pub v_hat: SpectrumField,
}

impl FieldState {
    pub fn grid(&self) -> &Arc<Grid> {
        &self.u_hat.grid
    }

    pub fn is_finite(&self) -> bool {
        self.u_hat.is_finite() && self.v_hat.is_finite()
    }
}

/// FFT plans for one grid. Cheap to clone; instantiable per thread.
#[derive(Clone)]
pub struct Transform {
    grid: Arc<Grid>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Transform {
    pub fn new(grid: Arc<Grid>) -> Transform {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(grid.n());
        let inv = planner.plan_fft_inverse(grid.n());
        Transform { grid, fwd, inv }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// Physical samples to spectral coefficients.
    pub fn analyze(&self, f: &PhysicalField) -> SpectrumField {
        assert_eq!(*f.grid, *self.grid, "field grid must match transform grid");
        let n = self.grid.n();
        let mut buf: Vec<Complex64> = f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fwd.process(&mut buf);
        let scale = 1.0 / n as f64;
        exec::for_each_slot(&mut buf, |k, c| {
            let s = if k % 2 == 0 { scale } else { -scale };
            *c *= s;
        });
        SpectrumField {
            grid: f.grid.clone(),
            coeffs: buf,
        }
    }

    /// Spectral coefficients back to complex samples on the grid. The
    /// imaginary parts measure how far the spectrum is from conjugate
    /// symmetry.
    pub fn synthesize_complex(&self, c: &SpectrumField) -> Vec<Complex64> {
        assert_eq!(*c.grid, *self.grid, "field grid must match transform grid");
        let mut buf = c.coeffs.clone();
        exec::for_each_slot(&mut buf, |k, v| {
            if k % 2 == 1 {
                *v = -*v;
            }
        });
        self.inv.process(&mut buf);
        buf
    }

    /// Spectral coefficients to real physical samples.
    pub fn synthesize(&self, c: &SpectrumField) -> PhysicalField {
        let buf = self.synthesize_complex(c);
        PhysicalField {
            grid: c.grid.clone(),
            values: buf.into_iter().map(|z| z.re).collect(),
        }
    }
}

/// `||u||_s = sqrt(2X sum_j (1 + xi_j^2)^s |c_j|^2)`. Sequential sum so the
/// result does not depend on the execution lane.
pub fn sobolev_norm(c: &SpectrumField, s: f64) -> f64 {
    let two_x = 2.0 * c.grid.half_length();
    let mut acc = 0.0;
    for (k, v) in c.coeffs.iter().enumerate() {
        let xi = c.grid.xi()[k];
        let w = (1.0 + xi * xi).powf(s);
        acc += w * v.norm_sqr();
    }
    (two_x * acc).sqrt()
}

/// L2 pairing `<a, b> = 2X sum_j a_j conj(b_j)` (real part).
pub fn inner_l2(a: &SpectrumField, b: &SpectrumField) -> f64 {
    assert_eq!(*a.grid, *b.grid, "inner product needs matching grids");
    let two_x = 2.0 * a.grid.half_length();
    let mut acc = 0.0;
    for (x, y) in a.coeffs.iter().zip(&b.coeffs) {
        acc += (x * y.conj()).re;
    }
    two_x * acc
}

/// Multiplies mode `j` by `m(xi_j)`. Any non-finite factor aborts with the
/// offending frequency.
pub fn apply_multiplier<F>(c: &SpectrumField, m: F, context: &str) -> Result<SpectrumField>
where
    F: Fn(f64) -> f64 + Sync,
{
    let xi = c.grid.xi();
    // validate sequentially first so the reported frequency is the lowest slot
    for &x in xi {
        if !m(x).is_finite() {
            return Err(DdError::MultiplierSingularity {
                context: context.into(),
                xi: x,
            });
        }
    }
    let mut out = c.clone();
    let xi_owned: Vec<f64> = xi.to_vec();
    exec::for_each_slot(&mut out.coeffs, |k, v| {
        *v *= m(xi_owned[k]);
    });
    Ok(out)
}

/// Highest mode kept by the 2/3 rule.
pub fn dealias_cutoff(n: usize) -> i64 {
    (n / 3) as i64
}

/// Zeroes every mode with `|j| > N/3`. Quadratic products of surviving
/// modes then alias only onto the zeroed band.
pub fn dealias(c: &mut SpectrumField) {
    let cut = dealias_cutoff(c.grid.n());
    let n = c.grid.n();
    exec::for_each_slot(&mut c.coeffs, |k, v| {
        let j = if k < n / 2 {
            k as i64
        } else {
            k as i64 - n as i64
        };
        if j.abs() > cut {
            *v = Complex64::ZERO;
        }
    });
}

/// Removes the mean mode. Returns the removed mean value (the real part of
/// slot 0; the imaginary part of a realness-respecting spectrum is noise).
pub fn project_mean_zero(c: &mut SpectrumField) -> f64 {
    let mean = c.coeffs[0].re;
    c.coeffs[0] = Complex64::ZERO;
    mean
}

/// Relative size of the mean mode, used to decide whether the gradient
/// weight is invertible on this spectrum.
pub fn mean_mode_ratio(c: &SpectrumField) -> f64 {
    let total = sobolev_norm(c, 0.0);
    if total == 0.0 {
        return 0.0;
    }
    let mean = (2.0 * c.grid.half_length()).sqrt() * c.coeffs[0].norm();
    mean / total
}

/// Spectrum of the forcing `-xi^2 b(xi) F[g(u)]`: the right-hand side each
/// mode feels from the nonlinearity. With `dealias` on, `u` is truncated
/// before leaving spectral space and `F[g(u)]` is truncated after coming
/// back, which removes quadratic aliasing for polynomial `g`.
pub fn nonlinear_rhs(
    tr: &Transform,
    state: &FieldState,
    eq: &EquationSpec,
    dealias_on: bool,
) -> Result<SpectrumField> {
    let mut u_hat = state.u_hat.clone();
    if dealias_on {
        dealias(&mut u_hat);
    }
    let u = tr.synthesize(&u_hat);
    let mut g = Vec::with_capacity(u.values.len());
    for &v in &u.values {
        let gv = eq.g.eval_g(v);
        if !gv.is_finite() {
            return Err(DdError::Overflow { t: state.t });
        }
        g.push(gv);
    }
    let mut g_hat = tr.analyze(&PhysicalField {
        grid: u.grid.clone(),
        values: g,
    });
    if dealias_on {
        dealias(&mut g_hat);
    }
    let b = &eq.b;
    apply_multiplier(&g_hat, |xi| -xi * xi * b.eval(xi), "forcing weight xi^2 b")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn seeded_field(grid: &Arc<Grid>, seed: u64) -> PhysicalField {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let values = (0..grid.n()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        PhysicalField {
            grid: grid.clone(),
            values,
        }
    }

    #[test]
    fn grid_rejects_bad_sizes() {
        assert!(Grid::new(8, 1.0).is_err());
        assert!(Grid::new(48, 1.0).is_err());
        assert!(Grid::new(16, 0.0).is_err());
        assert!(Grid::new(16, -2.0).is_err());
        assert!(Grid::new(16, 1.0).is_ok());
    }

    #[test]
    fn frequencies_ascend_with_mode_number_and_contain_zero() {
        let grid = Grid::new(64, 3.5).unwrap();
        assert_eq!(grid.xi()[0], 0.0);
        let mut by_mode: Vec<(i64, f64)> = (0..64)
            .map(|k| (grid.mode_number(k), grid.xi()[k]))
            .collect();
        by_mode.sort_by_key(|&(j, _)| j);
        for w in by_mode.windows(2) {
            assert!(w[0].1 < w[1].1);
        }
        assert_eq!(by_mode[0].0, -32);
        assert_eq!(by_mode[63].0, 31);
        assert!((grid.max_abs_xi() - PI * 32.0 / 3.5).abs() < 1e-12);
    }

    #[test]
    fn grid_points_span_half_open_interval() {
        let grid = Grid::new(32, 2.0).unwrap();
        let pts = grid.points();
        assert_eq!(pts[0], -2.0);
        assert_eq!(pts[16], 0.0);
        let last = pts[31];
        assert!(last < 2.0 && (2.0 - last - grid.dx()).abs() < 1e-15);
    }

    #[test]
    fn analyze_cosine_lands_on_unit_modes() {
        // u = cos x on [-pi, pi): c_{+1} = c_{-1} = 1/2, everything else 0.
        let grid = Grid::shared(32, PI).unwrap();
        let tr = Transform::new(grid.clone());
        let f = PhysicalField::from_fn(grid.clone(), f64::cos);
        let c = tr.analyze(&f);
        for k in 0..32 {
            let j = grid.mode_number(k);
            let expect = if j.abs() == 1 { 0.5 } else { 0.0 };
            assert!(
                (c.coeffs[k].re - expect).abs() < 1e-14 && c.coeffs[k].im.abs() < 1e-14,
                "slot {k} (mode {j}): {:?}",
                c.coeffs[k]
            );
        }
    }

    #[test]
    fn analyze_sine_is_odd_imaginary() {
        // u = sin x: c_{+1} = -i/2, c_{-1} = +i/2.
        let grid = Grid::shared(32, PI).unwrap();
        let tr = Transform::new(grid.clone());
        let c = tr.analyze(&PhysicalField::from_fn(grid.clone(), f64::sin));
        assert!((c.coeffs[1] - Complex64::new(0.0, -0.5)).norm() < 1e-14);
        assert!((c.coeffs[31] - Complex64::new(0.0, 0.5)).norm() < 1e-14);
    }

    #[test]
    fn round_trip_is_exact_to_tolerance() {
        let grid = Grid::shared(128, 7.0).unwrap();
        let tr = Transform::new(grid.clone());
        let f = seeded_field(&grid, 1);
        let back = tr.synthesize(&tr.analyze(&f));
        let scale = f.norm_inf();
        for (a, b) in f.values.iter().zip(&back.values) {
            assert!((a - b).abs() <= 1e-12 * (1.0 + scale));
        }
    }

    #[test]
    fn realness_is_preserved() {
        let grid = Grid::shared(256, 10.0).unwrap();
        let tr = Transform::new(grid.clone());
        let f = seeded_field(&grid, 2);
        let z = tr.synthesize_complex(&tr.analyze(&f));
        let worst = z.iter().fold(0.0f64, |m, v| m.max(v.im.abs()));
        assert!(
            worst <= 1e-12 * (1.0 + f.norm_inf()),
            "imag residue {worst}"
        );
    }

    #[test]
    fn analyze_of_real_field_is_hermitian() {
        let grid = Grid::shared(64, 5.0).unwrap();
        let tr = Transform::new(grid.clone());
        let c = tr.analyze(&seeded_field(&grid, 3));
        assert!(c.hermitian_error() <= 1e-13);
    }

    #[test]
    fn parseval_identity() {
        let grid = Grid::shared(128, 4.0).unwrap();
        let tr = Transform::new(grid.clone());
        let f = seeded_field(&grid, 4);
        let c = tr.analyze(&f);
        let spectral = sobolev_norm(&c, 0.0).powi(2);
        let physical = grid.dx() * f.values.iter().map(|v| v * v).sum::<f64>();
        assert!((spectral - physical).abs() <= 1e-12 * physical.abs().max(1.0));
    }

    #[test]
    fn cosine_norms_match_closed_form() {
        // ||cos||_0 = sqrt(pi), ||cos||_1 = sqrt(2 pi) on [-pi, pi).
        let grid = Grid::shared(64, PI).unwrap();
        let tr = Transform::new(grid.clone());
        let c = tr.analyze(&PhysicalField::from_fn(grid, f64::cos));
        assert!((sobolev_norm(&c, 0.0) - PI.sqrt()).abs() < 1e-12);
        assert!((sobolev_norm(&c, 1.0) - (2.0 * PI).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn inner_product_matches_physical_quadrature() {
        let grid = Grid::shared(64, 3.0).unwrap();
        let tr = Transform::new(grid.clone());
        let f = seeded_field(&grid, 5);
        let g = seeded_field(&grid, 6);
        let ip = inner_l2(&tr.analyze(&f), &tr.analyze(&g));
        let quad = grid.dx()
            * f.values
                .iter()
                .zip(&g.values)
                .map(|(a, b)| a * b)
                .sum::<f64>();
        assert!((ip - quad).abs() <= 1e-12 * (1.0 + quad.abs()));
    }

    #[test]
    fn multiplier_composition_matches_product() {
        let grid = Grid::shared(64, 2.0).unwrap();
        let tr = Transform::new(grid.clone());
        let c = tr.analyze(&seeded_field(&grid, 7));
        let m1 = |xi: f64| 1.0 / (1.0 + xi * xi);
        let m2 = |xi: f64| xi * xi;
        let seq = apply_multiplier(&apply_multiplier(&c, m1, "m1").unwrap(), m2, "m2").unwrap();
        let combined = apply_multiplier(&c, |xi| m1(xi) * m2(xi), "m1*m2").unwrap();
        for (a, b) in seq.coeffs.iter().zip(&combined.coeffs) {
            assert!((a - b).norm() <= 1e-14 * (1.0 + b.norm()));
        }
    }

    #[test]
    fn singular_multiplier_reports_frequency() {
        let grid = Grid::shared(16, PI).unwrap();
        let tr = Transform::new(grid.clone());
        let c = tr.analyze(&seeded_field(&grid, 8));
        let err = apply_multiplier(&c, |xi| 1.0 / xi, "1/xi").unwrap_err();
        match err {
            DdError::MultiplierSingularity { xi, .. } => assert_eq!(xi, 0.0),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn dealias_zeroes_high_band_only() {
        let grid = Grid::shared(32, 1.0).unwrap();
        let mut c = SpectrumField::zeros(grid.clone());
        for k in 0..32 {
            c.coeffs[k] = Complex64::new(1.0, 0.0);
        }
        dealias(&mut c);
        let cut = dealias_cutoff(32); // 10
        assert_eq!(cut, 10);
        for k in 0..32 {
            let j = grid.mode_number(k);
            let expect = if j.abs() <= cut { 1.0 } else { 0.0 };
            assert_eq!(c.coeffs[k].re, expect, "mode {j}");
        }
    }

    #[test]
    fn dealiased_square_matches_padded_grid() {
        // Oracle: compute u^2 exactly on a 4x refined grid and compare the
        // kept modes.
        let n = 64;
        let x = 5.0;
        let grid = Grid::shared(n, x).unwrap();
        let tr = Transform::new(grid.clone());
        let mut c = tr.analyze(&seeded_field(&grid, 9));
        dealias(&mut c);

        // coarse route: synthesize, square, analyze, dealias
        let u = tr.synthesize(&c);
        let sq = PhysicalField {
            grid: grid.clone(),
            values: u.values.iter().map(|v| v * v).collect(),
        };
        let mut coarse = tr.analyze(&sq);
        dealias(&mut coarse);

        // padded route: embed modes in a 4N grid, square there, read back
        let big_grid = Grid::shared(4 * n, x).unwrap();
        let big_tr = Transform::new(big_grid.clone());
        let mut big = SpectrumField::zeros(big_grid.clone());
        for k in 0..n {
            let j = grid.mode_number(k);
            let slot = ((j + 4 * n as i64) % (4 * n as i64)) as usize;
            big.coeffs[slot] = c.coeffs[k];
        }
        let ub = big_tr.synthesize(&big);
        let sqb = PhysicalField {
            grid: big_grid.clone(),
            values: ub.values.iter().map(|v| v * v).collect(),
        };
        let exact = big_tr.analyze(&sqb);

        let cut = dealias_cutoff(n);
        for k in 0..n {
            let j = grid.mode_number(k);
            if j.abs() > cut {
                continue;
            }
            let slot = ((j + 4 * n as i64) % (4 * n as i64)) as usize;
            let d = (coarse.coeffs[k] - exact.coeffs[slot]).norm();
            assert!(d <= 1e-12, "mode {j}: coarse vs padded differ by {d}");
        }
    }

    #[test]
    fn mean_projection_removes_slot_zero() {
        let grid = Grid::shared(32, PI).unwrap();
        let tr = Transform::new(grid.clone());
        let f = PhysicalField::from_fn(grid.clone(), |x| 3.0 + x.sin());
        let mut c = tr.analyze(&f);
        let before = mean_mode_ratio(&c);
        assert!(before > 0.5);
        let removed = project_mean_zero(&mut c);
        assert!((removed - 3.0).abs() < 1e-13);
        assert_eq!(c.coeffs[0], Complex64::ZERO);
        assert_eq!(mean_mode_ratio(&c), 0.0);
    }

    #[test]
    fn forcing_spectrum_for_quadratic_cosine() {
        // u = A cos x, g = u^2 = A^2/2 (1 + cos 2x); the forcing multiplier
        // kills the mean and maps mode +-2 to -xi^2 b A^2 / 4.
        let grid = Grid::shared(64, PI).unwrap();
        let tr = Transform::new(grid.clone());
        let a = 0.7;
        let eq = crate::symbols::make_preset("boussinesq").unwrap();
        let u_hat = tr.analyze(&PhysicalField::from_fn(grid.clone(), |x| a * x.cos()));
        let state = FieldState {
            t: 0.0,
            u_hat,
            v_hat: SpectrumField::zeros(grid.clone()),
        };
        let f = nonlinear_rhs(&tr, &state, &eq, true).unwrap();
        assert!(f.coeffs[0].norm() < 1e-14, "mean mode must be annihilated");
        let expect = -4.0 * a * a / 4.0; // -xi^2 b(2) * A^2/4 with b = 1
        assert!((f.coeffs[2].re - expect).abs() < 1e-13);
        assert!((f.coeffs[62].re - expect).abs() < 1e-13);
        assert!(f.coeffs[1].norm() < 1e-13);
    }

    #[test]
    fn overflowing_nonlinearity_reports_time() {
        let grid = Grid::shared(16, 1.0).unwrap();
        let tr = Transform::new(grid.clone());
        let mut u_hat = SpectrumField::zeros(grid.clone());
        u_hat.coeffs[1] = Complex64::new(1e160, 0.0);
        u_hat.coeffs[15] = Complex64::new(1e160, 0.0);
        let state = FieldState {
            t: 4.25,
            u_hat,
            v_hat: SpectrumField::zeros(grid),
        };
        let eq = crate::symbols::make_preset("boussinesq").unwrap();
        let err = nonlinear_rhs(&tr, &state, &eq, false).unwrap_err();
        match err {
            DdError::Overflow { t } => assert_eq!(t, 4.25),
            other => panic!("unexpected error {other:?}"),
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn round_trip_random_fields(seed in 0u64..1000) {
            let grid = Grid::shared(64, 3.0).unwrap();
            let tr = Transform::new(grid.clone());
            let f = seeded_field(&grid, seed);
            let back = tr.synthesize(&tr.analyze(&f));
            for (a, b) in f.values.iter().zip(&back.values) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }

        #[test]
        fn parseval_random_fields(seed in 0u64..1000) {
            let grid = Grid::shared(32, 1.5).unwrap();
            let tr = Transform::new(grid.clone());
            let f = seeded_field(&grid, seed);
            let c = tr.analyze(&f);
            let spectral = sobolev_norm(&c, 0.0).powi(2);
            let physical = grid.dx() * f.values.iter().map(|v| v * v).sum::<f64>();
            prop_assert!((spectral - physical).abs() <= 1e-12 * physical.max(1.0));
        }

        #[test]
        fn sobolev_norm_monotone_in_s(seed in 0u64..500, s1 in -2.0f64..2.0, ds in 0.0f64..2.0) {
            // (1 + xi^2) >= 1, so the norm cannot decrease as s grows.
            let grid = Grid::shared(32, 2.0).unwrap();
            let tr = Transform::new(grid.clone());
            let c = tr.analyze(&seeded_field(&grid, seed));
            let lo = sobolev_norm(&c, s1);
            let hi = sobolev_norm(&c, s1 + ds);
            prop_assert!(hi >= lo * (1.0 - 1e-12));
        }
    }
}
