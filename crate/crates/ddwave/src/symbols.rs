//! Equation families: Fourier multiplier symbols, nonlinearity catalog,
//! ellipticity bounds, and hypothesis gates.
//!
//! The wave family solved by this crate is
//!
//! ```text
//! u_tt - L u_xx = B(g(u))_xx
//! ```
//!
//! where `L` and `B` act diagonally in frequency through even, real-valued
//! symbols `l(xi)` and `b(xi)`. The pair of growth orders `(rho, r)` pins
//! the symbols between powers of `(1 + xi^2)`:
//!
//! ```text
//! c1^2 (1+xi^2)^(rho/2) <= l(xi) <= c2^2 (1+xi^2)^(rho/2)
//! 0 <  b(xi)            <= c3^2 (1+xi^2)^(-r/2)
//! ```
//!
//! `verify_bounds` measures the tightest constants that actually hold on a
//! given frequency sample and `theorem_gate` checks the hypothesis sets of
//! the well-posedness and blow-up statements the diagnostics rely on.

use crate::error::{DdError, Result};

/// Even real-valued function of frequency, evaluated through `xi^2` so that
/// evenness holds bitwise.
#[derive(Debug, Clone, PartialEq)]
pub enum Symbol {
    Constant(f64),
    /// `p(xi^2) / q(xi^2)` with coefficients ascending in `xi^2`:
    /// `num = [1, 1]` means `1 + xi^2`.
    Rational {
        num: Vec<f64>,
        den: Vec<f64>,
    },
    /// Samples `(xi_i, value_i)` on `xi_i >= 0`, ascending. Evaluation uses
    /// `|xi|`, linear interpolation between samples, and holds the end
    /// values outside the sampled range.
    Tabulated {
        xi: Vec<f64>,
        val: Vec<f64>,
    },
}

fn polyval(coeffs: &[f64], y: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc.mul_add(y, c))
}

impl Symbol {
    pub fn constant(c: f64) -> Self {
        Symbol::Constant(c)
    }

    pub fn rational(num: Vec<f64>, den: Vec<f64>) -> Self {
        Symbol::Rational { num, den }
    }

    pub fn eval(&self, xi: f64) -> f64 {
        match self {
            Symbol::Constant(c) => *c,
            Symbol::Rational { num, den } => {
                let y = xi * xi;
                polyval(num, y) / polyval(den, y)
            }
            Symbol::Tabulated { xi: xs, val } => {
                let a = xi.abs();
                if a <= xs[0] {
                    return val[0];
                }
                if a >= *xs.last().unwrap() {
                    return *val.last().unwrap();
                }
                // xs ascending; find the bracketing pair.
                let hi = xs.partition_point(|&x| x < a);
                let (x0, x1) = (xs[hi - 1], xs[hi]);
                let w = (a - x0) / (x1 - x0);
                val[hi - 1] * (1.0 - w) + val[hi] * w
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Symbol::Constant(c) => {
                if !c.is_finite() {
                    return Err(DdError::InvalidSymbol(
                        "constant symbol is not finite".into(),
                    ));
                }
            }
            Symbol::Rational { num, den } => {
                if num.is_empty() || den.is_empty() {
                    return Err(DdError::InvalidSymbol(
                        "rational symbol needs nonempty coefficient lists".into(),
                    ));
                }
                if num.iter().chain(den).any(|c| !c.is_finite()) {
                    return Err(DdError::InvalidSymbol("non-finite coefficient".into()));
                }
                if den.iter().all(|&c| c == 0.0) {
                    return Err(DdError::InvalidSymbol(
                        "denominator is identically zero".into(),
                    ));
                }
            }
            Symbol::Tabulated { xi, val } => {
                if xi.len() != val.len() || xi.is_empty() {
                    return Err(DdError::InvalidSymbol(
                        "tabulated symbol needs matching nonempty sample lists".into(),
                    ));
                }
                if xi[0] < 0.0 {
                    return Err(DdError::InvalidSymbol(
                        "tabulated samples must have xi >= 0".into(),
                    ));
                }
                if xi.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(DdError::InvalidSymbol(
                        "tabulated xi must be strictly ascending".into(),
                    ));
                }
                if val.iter().any(|v| !v.is_finite()) {
                    return Err(DdError::InvalidSymbol(
                        "tabulated value is not finite".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Checks finiteness on a frequency sample, typically the grid
    /// frequencies; catches denominator roots that sit on the grid.
    pub fn validate_on(&self, samples: &[f64], context: &str) -> Result<()> {
        self.validate()?;
        for &xi in samples {
            if !self.eval(xi).is_finite() {
                return Err(DdError::MultiplierSingularity {
                    context: context.into(),
                    xi,
                });
            }
        }
        Ok(())
    }
}

/// Nonlinearity `g` with antiderivative `G`, `G(0) = 0`, `g(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum Nonlinearity {
    /// `a |u|^(q-1) u` with real `q > 1`; odd in `u`.
    OddPower { a: f64, q: f64 },
    /// `a u^q` with integer `q >= 2`.
    IntegerPower { a: f64, q: u32 },
    /// `sum_i coeffs[i] u^(i+1)`, coefficients ascending from degree 1.
    Polynomial { coeffs: Vec<f64> },
}

impl Nonlinearity {
    pub fn validate(&self) -> Result<()> {
        match self {
            Nonlinearity::OddPower { a, q } => {
                if !a.is_finite() || !q.is_finite() || *q <= 1.0 {
                    return Err(DdError::InvalidSymbol(
                        "odd-power needs finite a and q > 1".into(),
                    ));
                }
            }
            Nonlinearity::IntegerPower { a, q } => {
                if !a.is_finite() || *q < 2 {
                    return Err(DdError::InvalidSymbol(
                        "integer-power needs finite a and q >= 2".into(),
                    ));
                }
            }
            Nonlinearity::Polynomial { coeffs } => {
                if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(DdError::InvalidSymbol(
                        "polynomial needs a nonempty finite coefficient list".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// `(g(u), G(u))` evaluated together; `G' = g` and both vanish at 0.
    pub fn g_and_g_int(&self, u: f64) -> (f64, f64) {
        match self {
            Nonlinearity::OddPower { a, q } => {
                let p = u.abs().powf(*q);
                (a * p.copysign(u), a * u.abs() * p / (q + 1.0))
            }
            Nonlinearity::IntegerPower { a, q } => {
                let g = a * u.powi(*q as i32);
                (g, g * u / (*q as f64 + 1.0))
            }
            Nonlinearity::Polynomial { coeffs } => {
                let mut g = 0.0;
                let mut big_g = 0.0;
                let mut p = u; // u^(i+1)
                for (i, &c) in coeffs.iter().enumerate() {
                    g += c * p;
                    big_g += c * p * u / (i as f64 + 2.0);
                    p *= u;
                }
                (g, big_g)
            }
        }
    }

    pub fn eval_g(&self, u: f64) -> f64 {
        self.g_and_g_int(u).0
    }

    /// True when `g` is a polynomial in `u`; drives the dealiasing default.
    pub fn is_polynomial(&self) -> bool {
        match self {
            Nonlinearity::IntegerPower { .. } | Nonlinearity::Polynomial { .. } => true,
            Nonlinearity::OddPower { q, .. } => *q == q.round() && (*q as i64) % 2 == 1,
        }
    }

    /// Whether `g` is differentiable enough for a hypothesis requiring
    /// `C^order`. Polynomial kinds always qualify; `|u|^(q-1) u` qualifies
    /// when `q` is an odd integer (then it IS a polynomial) or when
    /// `q >= order`.
    pub fn smoothness_passes(&self, order: u32) -> bool {
        match self {
            Nonlinearity::IntegerPower { .. } | Nonlinearity::Polynomial { .. } => true,
            Nonlinearity::OddPower { q, .. } => {
                (*q == q.round() && (*q as i64) % 2 == 1) || *q >= order as f64
            }
        }
    }

    /// Exponent descriptor used in gate reports: the power `q`, or infinity
    /// for true polynomials.
    pub fn smoothness_value(&self) -> f64 {
        match self {
            Nonlinearity::IntegerPower { .. } | Nonlinearity::Polynomial { .. } => f64::INFINITY,
            Nonlinearity::OddPower { q, .. } => {
                if *q == q.round() && (*q as i64) % 2 == 1 {
                    f64::INFINITY
                } else {
                    *q
                }
            }
        }
    }

    /// Default concavity exponent for the blow-up certificate: the value
    /// that makes the growth inequality an identity for pure powers.
    pub fn default_nu(&self) -> Option<f64> {
        match self {
            Nonlinearity::OddPower { q, .. } => Some((q - 1.0) / 4.0),
            Nonlinearity::IntegerPower { q, .. } => Some((*q as f64 - 1.0) / 4.0),
            Nonlinearity::Polynomial { .. } => None,
        }
    }

    /// Whether `G >= 0` everywhere. Closed form for the power kinds; the
    /// polynomial kind is sampled and the answer is empirical.
    pub fn g_int_nonnegative(&self) -> bool {
        match self {
            Nonlinearity::OddPower { a, .. } => *a >= 0.0,
            Nonlinearity::IntegerPower { a, q } => *a == 0.0 || (*a > 0.0 && q % 2 == 1),
            Nonlinearity::Polynomial { .. } => default_growth_samples()
                .iter()
                .all(|&p| self.g_and_g_int(p).1 >= 0.0),
        }
    }
}

/// 161 points on [-4, 4] with exact 0 in the middle; shared sample set for
/// growth and sign checks so reports are reproducible.
pub fn default_growth_samples() -> Vec<f64> {
    (0..161).map(|i| (i as f64 - 80.0) * 0.05).collect()
}

/// Outcome of checking `p g(p) <= 2 (1 + 2 nu) G(p)` on a sample set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthReport {
    pub holds: bool,
    /// `min over samples of 2 (1 + 2 nu) G(p) - p g(p)`.
    pub worst_margin: f64,
    /// Closed-form criterion `q >= 1 + 4 nu` for the pure power kinds
    /// (`None` otherwise). Exact for the focusing sign `a < 0`; for other
    /// signs the sampled verdict is authoritative.
    pub closed_form_holds: Option<bool>,
    /// Whether the sampled verdict matches the closed form.
    pub agrees: Option<bool>,
}

/// Checks the growth inequality needed by the concavity argument.
/// `samples` must include 0 and span both signs.
///
/// For the power kinds the margin factors as
/// `a p^(q+1) (2(1+2nu)/(q+1) - 1)` (with `|p|` for the odd kind), which
/// this routine uses so that the borderline case is an exact zero rather
/// than a rounding residue.
pub fn growth_condition_margin(g: &Nonlinearity, nu: f64, samples: &[f64]) -> GrowthReport {
    assert!(nu > 0.0, "growth condition needs nu > 0");
    assert!(samples.contains(&0.0), "samples must include 0");
    assert!(
        samples.iter().any(|&p| p > 0.0) && samples.iter().any(|&p| p < 0.0),
        "samples must span both signs"
    );
    let mut min = f64::INFINITY;
    let mut closed_form = None;
    match g {
        Nonlinearity::OddPower { a, q } => {
            let factor = 2.0 * (1.0 + 2.0 * nu) / (q + 1.0) - 1.0;
            for &p in samples {
                min = min.min(a * p.abs().powf(q + 1.0) * factor);
            }
            closed_form = Some(*q >= 1.0 + 4.0 * nu);
        }
        Nonlinearity::IntegerPower { a, q } => {
            let factor = 2.0 * (1.0 + 2.0 * nu) / (*q as f64 + 1.0) - 1.0;
            for &p in samples {
                min = min.min(a * p.powi(*q as i32 + 1) * factor);
            }
            closed_form = Some(*q as f64 >= 1.0 + 4.0 * nu);
        }
        Nonlinearity::Polynomial { .. } => {
            for &p in samples {
                let (gv, big_g) = g.g_and_g_int(p);
                min = min.min(2.0 * (1.0 + 2.0 * nu) * big_g - p * gv);
            }
        }
    }
    let holds = min >= 0.0;
    GrowthReport {
        holds,
        worst_margin: min,
        closed_form_holds: closed_form,
        agrees: closed_form.map(|c| c == holds),
    }
}

/// Full description of one member of the wave family.
#[derive(Debug, Clone, PartialEq)]
pub struct EquationSpec {
    pub name: String,
    pub l: Symbol,
    pub b: Symbol,
    /// Growth order of `l`: `l ~ (1+xi^2)^(rho/2)`.
    pub rho: f64,
    /// Decay order of `b`: `b <~ (1+xi^2)^(-r/2)`.
    pub r: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub g: Nonlinearity,
    /// Set when the family is known to sit outside the coercive theory.
    pub warning: Option<String>,
}

/// Pointwise symbol data at a single frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolValues {
    pub l: f64,
    pub b: f64,
    /// `k = sqrt(l)`, the wave-speed factor.
    pub k: f64,
    /// `omega = xi k(xi)`, the dispersion relation; odd in `xi`.
    pub omega: f64,
}

pub const PRESET_NAMES: [&str; 4] = [
    "boussinesq",
    "improved-boussinesq",
    "double-dispersion",
    "nonlocal-kernel",
];

pub fn make_preset(name: &str) -> Result<EquationSpec> {
    let default_g = Nonlinearity::IntegerPower { a: 1.0, q: 2 };
    let one_over = Symbol::rational(vec![1.0], vec![1.0, 1.0]); // 1/(1+xi^2)
    let spec = match name {
        "boussinesq" => EquationSpec {
            name: name.into(),
            l: Symbol::rational(vec![1.0, 1.0], vec![1.0]), // 1 + xi^2
            b: Symbol::constant(1.0),
            rho: 2.0,
            r: 0.0,
            c1: 1.0,
            c2: 1.0,
            c3: 1.0,
            g: default_g,
            warning: None,
        },
        "improved-boussinesq" => EquationSpec {
            name: name.into(),
            l: one_over.clone(),
            b: one_over,
            rho: -2.0,
            r: 2.0,
            c1: 1.0,
            c2: 1.0,
            c3: 1.0,
            g: default_g,
            warning: None,
        },
        "double-dispersion" => EquationSpec {
            name: name.into(),
            l: Symbol::constant(1.0),
            b: one_over,
            rho: 0.0,
            r: 2.0,
            c1: 1.0,
            c2: 1.0,
            c3: 1.0,
            g: default_g,
            warning: None,
        },
        "nonlocal-kernel" => EquationSpec {
            name: name.into(),
            l: Symbol::constant(0.0),
            b: one_over,
            rho: 0.0,
            r: 2.0,
            c1: 0.0,
            c2: 1.0,
            c3: 1.0,
            g: default_g,
            warning: Some("l vanishes identically: the coercivity bound fails and the local theory does not apply".into()),
        },
        other => return Err(DdError::PresetNotFound(other.into())),
    };
    Ok(spec)
}

impl EquationSpec {
    pub fn validate(&self) -> Result<()> {
        self.l.validate()?;
        self.b.validate()?;
        self.g.validate()?;
        if !self.rho.is_finite() || !self.r.is_finite() {
            return Err(DdError::InvalidSymbol("rho and r must be finite".into()));
        }
        for (name, c) in [("c1", self.c1), ("c2", self.c2), ("c3", self.c3)] {
            if !c.is_finite() || c < 0.0 {
                return Err(DdError::InvalidSymbol(format!(
                    "{name} must be finite and >= 0"
                )));
            }
        }
        Ok(())
    }
}

/// Evaluates `l`, `b`, `k = sqrt(l)` and `omega = xi k` at one frequency.
pub fn eval_symbols(eq: &EquationSpec, xi: f64) -> Result<SymbolValues> {
    let l = eq.l.eval(xi);
    let b = eq.b.eval(xi);
    if !l.is_finite() {
        return Err(DdError::MultiplierSingularity {
            context: "l".into(),
            xi,
        });
    }
    if !b.is_finite() {
        return Err(DdError::MultiplierSingularity {
            context: "b".into(),
            xi,
        });
    }
    if l < 0.0 {
        return Err(DdError::InvalidSymbol(format!(
            "l({xi}) = {l} < 0; wave speeds would be imaginary"
        )));
    }
    let k = l.sqrt();
    Ok(SymbolValues {
        l,
        b,
        k,
        omega: xi * k,
    })
}

/// Empirical ellipticity constants measured on a frequency sample.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    /// `min sqrt(l / (1+xi^2)^(rho/2))`.
    pub c1_hat: f64,
    /// `max sqrt(l / (1+xi^2)^(rho/2))`.
    pub c2_hat: f64,
    /// `max sqrt(b (1+xi^2)^(r/2))`.
    pub c3_hat: f64,
    pub pass: bool,
    pub failures: Vec<String>,
}

/// Measures the tightest constants in the two-sided bound on `l` and the
/// one-sided bound on `b` over `samples`. The sample set must contain 0;
/// callers normally pass the grid frequencies so the report covers exactly
/// the modes the solver will touch.
pub fn verify_bounds(eq: &EquationSpec, samples: &[f64]) -> Result<BoundsReport> {
    assert!(
        !samples.is_empty(),
        "verify_bounds needs a nonempty sample set"
    );
    assert!(samples.contains(&0.0), "sample set must contain xi = 0");
    eq.l.validate_on(samples, "l")?;
    eq.b.validate_on(samples, "b")?;

    let mut failures = Vec::new();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut bmax = f64::NEG_INFINITY;
    for &xi in samples {
        let w = (1.0 + xi * xi).powf(eq.rho / 2.0);
        let l = eq.l.eval(xi);
        let b = eq.b.eval(xi);
        if l < 0.0 {
            failures.push(format!("l({xi}) = {l} < 0"));
            continue;
        }
        if b <= 0.0 {
            return Err(DdError::PositivityViolation(format!(
                "b({xi}) = {b} <= 0; the kinetic weight is singular"
            )));
        }
        let ratio = l / w;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
        bmax = bmax.max(b * (1.0 + xi * xi).powf(eq.r / 2.0));
    }
    let c1_hat = lo.max(0.0).sqrt();
    let c2_hat = hi.max(0.0).sqrt();
    let c3_hat = bmax.max(0.0).sqrt();
    if c1_hat <= 0.0 {
        failures.push("coercivity fails: min l / (1+xi^2)^(rho/2) is not positive".into());
    }
    let pass = failures.is_empty();
    Ok(BoundsReport {
        c1_hat,
        c2_hat,
        c3_hat,
        pass,
        failures,
    })
}

/// Identifier of one hypothesis set checked by `theorem_gate`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateId {
    Local34,
    Local61,
    Global43,
    Global63,
    Global64,
    Blowup65,
}

impl GateId {
    pub const ALL: [GateId; 6] = [
        GateId::Local34,
        GateId::Local61,
        GateId::Global43,
        GateId::Global63,
        GateId::Global64,
        GateId::Blowup65,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            GateId::Local34 => "local-3.4",
            GateId::Local61 => "local-6.1",
            GateId::Global43 => "global-4.3",
            GateId::Global63 => "global-6.3",
            GateId::Global64 => "global-6.4",
            GateId::Blowup65 => "blowup-6.5",
        }
    }

    pub fn parse(s: &str) -> Option<GateId> {
        GateId::ALL.iter().copied().find(|g| g.as_str() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateCondition {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl GateCondition {
    fn new(name: &str, value: f64, threshold: f64, pass: bool) -> GateCondition {
        GateCondition {
            name: name.into(),
            value,
            threshold,
            pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateReport {
    pub gate: GateId,
    pub pass: bool,
    pub conditions: Vec<GateCondition>,
    pub notes: Vec<String>,
}

fn smoothness_condition(g: &Nonlinearity, order: u32) -> GateCondition {
    GateCondition::new(
        &format!("g in C^{order}"),
        g.smoothness_value(),
        order as f64,
        g.smoothness_passes(order),
    )
}

fn sign_condition(g: &Nonlinearity) -> GateCondition {
    let ok = g.g_int_nonnegative();
    GateCondition::new("G >= 0", if ok { 1.0 } else { 0.0 }, 1.0, ok)
}

fn coercive_condition(eq: &EquationSpec) -> GateCondition {
    GateCondition::new("c1 > 0 (coercive l)", eq.c1, 0.0, eq.c1 > 0.0)
}

/// Checks the hypothesis set named by `gate` for the pair `(eq, s)`, where
/// `s` is the Sobolev index the run tracks. Pure bookkeeping: every
/// condition is reported with its value and threshold, pass = all
/// conditions hold. Every set includes the coercivity constant, which all
/// of the underlying statements assume.
pub fn theorem_gate(eq: &EquationSpec, s: f64, gate: GateId) -> GateReport {
    let mut conditions = vec![coercive_condition(eq)];
    let mut notes = Vec::new();
    let order_for = |x: f64| x.floor().max(0.0) as u32 + 1;

    match gate {
        GateId::Local34 => {
            conditions.push(GateCondition::new("rho >= 2", eq.rho, 2.0, eq.rho >= 2.0));
            conditions.push(GateCondition::new("s > 1/2", s, 0.5, s > 0.5));
            conditions.push(smoothness_condition(&eq.g, order_for(s)));
        }
        GateId::Local61 => {
            let q = eq.rho / 2.0 + eq.r;
            conditions.push(GateCondition::new("rho/2 + r >= 1", q, 1.0, q >= 1.0));
            conditions.push(GateCondition::new("s > 1/2", s, 0.5, s > 0.5));
            conditions.push(smoothness_condition(&eq.g, order_for(s)));
        }
        GateId::Global43 => {
            conditions.push(GateCondition::new("rho >= 2", eq.rho, 2.0, eq.rho >= 2.0));
            conditions.push(smoothness_condition(&eq.g, order_for(eq.rho / 2.0)));
            conditions.push(sign_condition(&eq.g));
        }
        GateId::Global63 => {
            let q = eq.r + eq.rho / 2.0;
            let idx = eq.r / 2.0 + eq.rho / 2.0;
            conditions.push(GateCondition::new("r + rho/2 >= 1", q, 1.0, q >= 1.0));
            conditions.push(smoothness_condition(&eq.g, order_for(idx)));
            conditions.push(sign_condition(&eq.g));
        }
        GateId::Global64 => {
            let q = eq.r + eq.rho / 2.0;
            let idx = eq.r / 2.0 + eq.rho / 2.0;
            conditions.push(GateCondition::new("r + rho/2 >= 1", q, 1.0, q >= 1.0));
            conditions.push(GateCondition::new("r/2 + rho/2 > 1/2", idx, 0.5, idx > 0.5));
            conditions.push(GateCondition::new("s > 1/2", s, 0.5, s > 0.5));
            conditions.push(smoothness_condition(&eq.g, order_for(s)));
            conditions.push(sign_condition(&eq.g));
        }
        GateId::Blowup65 => {
            match eq.g.default_nu() {
                Some(nu) => {
                    let rep = growth_condition_margin(&eq.g, nu, &default_growth_samples());
                    conditions.push(GateCondition::new(
                        &format!("growth margin at nu = {nu} >= 0"),
                        rep.worst_margin,
                        0.0,
                        rep.holds,
                    ));
                }
                None => {
                    conditions.push(GateCondition::new(
                        "growth margin: no default nu for this nonlinearity",
                        f64::NAN,
                        0.0,
                        false,
                    ));
                    notes.push("supply nu explicitly to evaluate the growth condition".into());
                }
            }
            notes.push("E(0) < 0 is a runtime condition, checked on the initial data".into());
        }
    }

    if eq.rho < 0.0 {
        notes.push(format!(
            "rho = {} < 0: l decays at high frequency; only the combined-order conditions apply",
            eq.rho
        ));
    }
    if eq.r < 0.0 {
        notes.push(format!("r = {} < 0: b grows at high frequency", eq.r));
    }
    if let Some(w) = &eq.warning {
        notes.push(w.clone());
    }

    let pass = conditions.iter().all(|c| c.pass);
    GateReport {
        gate,
        pass,
        conditions,
        notes,
    }
}
