//! Independent reference integrator for a single spectral mode.
//!
//! Each mode of the system obeys `u'' + omega^2 u = -xi^2 b ghat(t)`, with
//! `ghat` the mode amplitude of the transformed nonlinearity. The routines
//! here integrate that ODE with classical RK4, deliberately sharing no code
//! with the propagator tables, so stepper errors can be measured against a
//! scheme of much higher order.

use num_complex::Complex64;

/// Cubic Lagrange interpolation on 4 equispaced samples around `t`.
/// Stencils are clamped at the ends of the table.
fn interp_cubic(samples: &[(f64, Complex64)], t: f64) -> Complex64 {
    let n = samples.len();
    assert!(n >= 4, "cubic interpolation needs at least 4 samples");
    let t0 = samples[0].0;
    let dt = samples[1].0 - t0;
    let i = ((t - t0) / dt).floor() as isize;
    let m = (i - 1).clamp(0, n as isize - 4) as usize;
    let mut acc = Complex64::ZERO;
    for a in 0..4 {
        let (ta, ya) = samples[m + a];
        let mut w = 1.0;
        for b in 0..4 {
            if a != b {
                let tb = samples[m + b].0;
                w *= (t - tb) / (ta - tb);
            }
        }
        acc += ya * w;
    }
    acc
}

fn rk4<F: Fn(f64) -> Complex64>(
    omega: f64,
    mut u: Complex64,
    mut v: Complex64,
    force: F,
    t_end: f64,
    steps: usize,
) -> (Complex64, Complex64) {
    assert!(steps > 0);
    let dt = t_end / steps as f64;
    let w2 = omega * omega;
    let f = |t: f64, u: Complex64, v: Complex64| (v, force(t) - w2 * u);
    let mut t = 0.0;
    for _ in 0..steps {
        let (k1u, k1v) = f(t, u, v);
        let (k2u, k2v) = f(t + dt / 2.0, u + k1u * (dt / 2.0), v + k1v * (dt / 2.0));
        let (k3u, k3v) = f(t + dt / 2.0, u + k2u * (dt / 2.0), v + k2v * (dt / 2.0));
        let (k4u, k4v) = f(t + dt, u + k3u * dt, v + k3v * dt);
        u += (k1u + (k2u + k3u) * 2.0 + k4u) * (dt / 6.0);
        v += (k1v + (k2v + k3v) * 2.0 + k4v) * (dt / 6.0);
        t += dt;
    }
    (u, v)
}

/// Reference solution of `u'' + omega^2 u = -xi^2 b ghat(t)` from sampled
/// forcing. `g_hat_samples` must be equispaced, ascending, cover `[0, t]`,
/// and be spaced at most `t/1000` apart. RK4 runs at a tenth of the sample
/// spacing; values between samples come from cubic interpolation.
pub fn reference_mode_solution(
    omega: f64,
    xi: f64,
    b_val: f64,
    u0: Complex64,
    v0: Complex64,
    g_hat_samples: &[(f64, Complex64)],
    t: f64,
) -> (Complex64, Complex64) {
    assert!(g_hat_samples.len() >= 4, "need at least 4 forcing samples");
    let spacing = g_hat_samples[1].0 - g_hat_samples[0].0;
    assert!(spacing > 0.0);
    assert!(
        spacing <= t / 1000.0 * (1.0 + 1e-12),
        "sample spacing {spacing} too coarse for horizon {t}"
    );
    assert!(
        g_hat_samples[0].0 <= 0.0 && g_hat_samples.last().unwrap().0 >= t - 1e-12 * t.abs(),
        "forcing samples must cover [0, t]"
    );
    let steps = ((t / (spacing / 10.0)).ceil() as usize).max(1);
    let scale = -xi * xi * b_val;
    rk4(
        omega,
        u0,
        v0,
        |s| interp_cubic(g_hat_samples, s) * scale,
        t,
        steps,
    )
}

/// Same integrator with the forcing mode `ghat` given as a closure; `steps`
/// RK4 steps over `[0, t]`.
#[allow(clippy::too_many_arguments)]
pub fn reference_mode_solution_fn<F: Fn(f64) -> Complex64>(
    omega: f64,
    xi: f64,
    b_val: f64,
    u0: Complex64,
    v0: Complex64,
    g_hat: F,
    t: f64,
    steps: usize,
) -> (Complex64, Complex64) {
    let scale = -xi * xi * b_val;
    rk4(omega, u0, v0, |s| g_hat(s) * scale, t, steps)
}
