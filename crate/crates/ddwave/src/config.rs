//! Sectioned key=value run configuration: parsing, validation, rendering.
//!
//! A plan file has sections `[equation] [grid] [time] [initial]
//! [diagnostics] [output]`, `#` comments, and one optional top-level key
//! `strict_gates`. Unknown sections or keys are rejected with their line
//! number, as are invariant violations, so a plan that parses is ready to
//! run.

use std::collections::HashMap;
use std::path::PathBuf;

use crate::error::{DdError, Result};
use crate::propagator::Scheme;
use crate::symbols::{
    make_preset, verify_bounds, EquationSpec, Nonlinearity, Symbol, PRESET_NAMES,
};

/// Equation selection: a named preset or inline rational symbols.
#[derive(Debug, Clone, PartialEq)]
pub enum EquationChoice {
    Preset(String),
    Inline {
        l_num: Vec<f64>,
        l_den: Vec<f64>,
        b_num: Vec<f64>,
        b_den: Vec<f64>,
        rho: f64,
        r: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialKind {
    GaussianDerivative,
    ModulatedSine,
    CustomCsv,
}

impl InitialKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            InitialKind::GaussianDerivative => "gaussian-derivative",
            InitialKind::ModulatedSine => "modulated-sine",
            InitialKind::CustomCsv => "custom-csv",
        }
    }

    pub fn parse(s: &str) -> Option<InitialKind> {
        match s {
            "gaussian-derivative" => Some(InitialKind::GaussianDerivative),
            "modulated-sine" => Some(InitialKind::ModulatedSine),
            "custom-csv" => Some(InitialKind::CustomCsv),
            _ => None,
        }
    }
}

/// Initial data selection.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialSpec {
    pub kind: InitialKind,
    pub amplitude: f64,
    pub width: f64,
    pub mean_zero_project: bool,
    /// Data file for `custom-csv`.
    pub path: Option<PathBuf>,
}

/// A fully validated run description.
#[derive(Debug, Clone, PartialEq)]
pub struct RunPlan {
    pub equation: EquationChoice,
    pub g: Nonlinearity,
    pub grid_n: usize,
    pub grid_x: f64,
    pub dt: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    pub picard_tol: f64,
    pub picard_kmax: usize,
    pub initial: InitialSpec,
    pub sample_stride: usize,
    pub sobolev_index: f64,
    /// Escape threshold as a multiple of the initial tracked norm.
    pub blowup_threshold: f64,
    pub nu: Option<f64>,
    pub out_dir: PathBuf,
    pub snapshots: Vec<f64>,
    pub svg: bool,
    pub svg_columns: Vec<String>,
    pub strict_gates: bool,
}

impl Default for RunPlan {
    fn default() -> RunPlan {
        RunPlan {
            equation: EquationChoice::Preset("boussinesq".into()),
            g: Nonlinearity::IntegerPower { a: 1.0, q: 2 },
            grid_n: 256,
            grid_x: 50.0,
            dt: 1e-3,
            t_end: 1.0,
            scheme: Scheme::ExpMidpoint,
            picard_tol: 1e-12,
            picard_kmax: 25,
            initial: InitialSpec {
                kind: InitialKind::GaussianDerivative,
                amplitude: 1.0,
                width: 1.0,
                mean_zero_project: false,
                path: None,
            },
            sample_stride: 10,
            sobolev_index: 1.0,
            blowup_threshold: 1e8,
            nu: None,
            out_dir: PathBuf::from("out"),
            snapshots: Vec::new(),
            svg: false,
            svg_columns: vec!["E".into()],
            strict_gates: true,
        }
    }
}

impl RunPlan {
    /// Resolves the plan's equation into a full spec, measuring the
    /// coercivity constants on the given frequencies for inline symbols.
    pub fn equation_spec(&self, xi: &[f64]) -> Result<EquationSpec> {
        let mut eq = match &self.equation {
            EquationChoice::Preset(name) => make_preset(name)?,
            EquationChoice::Inline {
                l_num,
                l_den,
                b_num,
                b_den,
                rho,
                r,
            } => {
                let mut eq = EquationSpec {
                    name: "inline".into(),
                    l: Symbol::rational(l_num.clone(), l_den.clone()),
                    b: Symbol::rational(b_num.clone(), b_den.clone()),
                    rho: *rho,
                    r: *r,
                    c1: 0.0,
                    c2: 0.0,
                    c3: 0.0,
                    g: self.g.clone(),
                    warning: None,
                };
                eq.validate()?;
                let bounds = verify_bounds(&eq, xi)?;
                eq.c1 = bounds.c1_hat;
                eq.c2 = bounds.c2_hat;
                eq.c3 = bounds.c3_hat;
                eq
            }
        };
        eq.g = self.g.clone();
        Ok(eq)
    }

    /// Canonical text form; `parse_config` inverts it exactly.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let mut push = |line: String| {
            s.push_str(&line);
            s.push('\n');
        };
        push(format!("strict_gates = {}", self.strict_gates));
        push("".into());
        push("[equation]".into());
        match &self.equation {
            EquationChoice::Preset(name) => push(format!("preset = {name}")),
            EquationChoice::Inline {
                l_num,
                l_den,
                b_num,
                b_den,
                rho,
                r,
            } => {
                push(format!("l.num = {}", render_list(l_num)));
                push(format!("l.den = {}", render_list(l_den)));
                push(format!("b.num = {}", render_list(b_num)));
                push(format!("b.den = {}", render_list(b_den)));
                push(format!("rho = {rho:?}"));
                push(format!("r = {r:?}"));
            }
        }
        match &self.g {
            Nonlinearity::IntegerPower { a, q } => {
                push("g.kind = integer-power".into());
                push(format!("g.a = {a:?}"));
                push(format!("g.q = {q}"));
            }
            Nonlinearity::OddPower { a, q } => {
                push("g.kind = odd-power".into());
                push(format!("g.a = {a:?}"));
                push(format!("g.q = {q:?}"));
            }
            Nonlinearity::Polynomial { coeffs } => {
                push("g.kind = polynomial".into());
                push(format!("g.coeffs = {}", render_list(coeffs)));
            }
        }
        push("".into());
        push("[grid]".into());
        push(format!("N = {}", self.grid_n));
        push(format!("X = {:?}", self.grid_x));
        push("".into());
        push("[time]".into());
        push(format!("dt = {:?}", self.dt));
        push(format!("T_end = {:?}", self.t_end));
        push(format!("scheme = {}", self.scheme.as_str()));
        push(format!("picard_tol = {:?}", self.picard_tol));
        push(format!("picard_kmax = {}", self.picard_kmax));
        push("".into());
        push("[initial]".into());
        push(format!("preset = {}", self.initial.kind.as_str()));
        push(format!("amplitude = {:?}", self.initial.amplitude));
        push(format!("width = {:?}", self.initial.width));
        push(format!(
            "mean_zero_project = {}",
            self.initial.mean_zero_project
        ));
        if let Some(p) = &self.initial.path {
            push(format!("path = {}", p.display()));
        }
        push("".into());
        push("[diagnostics]".into());
        push(format!("sample_stride = {}", self.sample_stride));
        push(format!("s = {:?}", self.sobolev_index));
        push(format!("blowup_threshold = {:?}", self.blowup_threshold));
        if let Some(nu) = self.nu {
            push(format!("nu = {nu:?}"));
        }
        push("".into());
        push("[output]".into());
        push(format!("directory = {}", self.out_dir.display()));
        push(format!("snapshots = {}", render_list(&self.snapshots)));
        push(format!("svg = {}", self.svg));
        push(format!("svg_columns = [{}]", self.svg_columns.join(", ")));
        s
    }
}

fn render_list(v: &[f64]) -> String {
    let inner: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
    format!("[{}]", inner.join(", "))
}

fn cfg_err(line: usize, msg: impl Into<String>) -> DdError {
    DdError::Config {
        line,
        msg: msg.into(),
    }
}

const SECTIONS: [&str; 6] = [
    "equation",
    "grid",
    "time",
    "initial",
    "diagnostics",
    "output",
];

fn known_keys(section: &str) -> &'static [&'static str] {
    match section {
        "" => &["strict_gates"],
        "equation" => &[
            "preset", "l.num", "l.den", "b.num", "b.den", "rho", "r", "g.kind", "g.a", "g.q",
            "g.coeffs",
        ],
        "grid" => &["N", "X"],
        "time" => &["dt", "T_end", "scheme", "picard_tol", "picard_kmax"],
        "initial" => &["preset", "amplitude", "width", "mean_zero_project", "path"],
        "diagnostics" => &["sample_stride", "s", "blowup_threshold", "nu"],
        "output" => &["directory", "snapshots", "svg", "svg_columns"],
        _ => &[],
    }
}

struct Raw {
    value: String,
    line: usize,
}

struct Table {
    entries: HashMap<(String, String), Raw>,
}

impl Table {
    fn get(&self, section: &str, key: &str) -> Option<&Raw> {
        self.entries.get(&(section.to_string(), key.to_string()))
    }

    fn f64(&self, section: &str, key: &str, default: f64) -> Result<(f64, usize)> {
        match self.get(section, key) {
            None => Ok((default, 0)),
            Some(raw) => raw
                .value
                .parse::<f64>()
                .map(|v| (v, raw.line))
                .map_err(|_| {
                    cfg_err(
                        raw.line,
                        format!("{key} expects a number, got `{}`", raw.value),
                    )
                }),
        }
    }

    fn usize(&self, section: &str, key: &str, default: usize) -> Result<(usize, usize)> {
        match self.get(section, key) {
            None => Ok((default, 0)),
            Some(raw) => raw
                .value
                .parse::<usize>()
                .map(|v| (v, raw.line))
                .map_err(|_| {
                    cfg_err(
                        raw.line,
                        format!("{key} expects a nonnegative integer, got `{}`", raw.value),
                    )
                }),
        }
    }

    fn bool(&self, section: &str, key: &str, default: bool) -> Result<bool> {
        match self.get(section, key) {
            None => Ok(default),
            Some(raw) => match raw.value.as_str() {
                "true" => Ok(true),
                "false" => Ok(false),
                other => Err(cfg_err(
                    raw.line,
                    format!("{key} expects true or false, got `{other}`"),
                )),
            },
        }
    }

    fn list(&self, section: &str, key: &str) -> Result<Option<(Vec<f64>, usize)>> {
        let Some(raw) = self.get(section, key) else {
            return Ok(None);
        };
        Ok(Some((parse_list(&raw.value, raw.line, key)?, raw.line)))
    }
}

fn parse_list(text: &str, line: usize, key: &str) -> Result<Vec<f64>> {
    let t = text.trim();
    if !t.starts_with('[') || !t.ends_with(']') {
        return Err(cfg_err(
            line,
            format!("{key} expects a bracketed list like [1, 2.5]"),
        ));
    }
    let inner = &t[1..t.len() - 1];
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|piece| {
            piece
                .trim()
                .parse::<f64>()
                .map_err(|_| cfg_err(line, format!("{key}: `{}` is not a number", piece.trim())))
        })
        .collect()
}

fn parse_string_list(text: &str, line: usize, key: &str) -> Result<Vec<String>> {
    let t = text.trim();
    if !t.starts_with('[') || !t.ends_with(']') {
        return Err(cfg_err(
            line,
            format!("{key} expects a bracketed list like [E, H]"),
        ));
    }
    let inner = &t[1..t.len() - 1];
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    Ok(inner.split(',').map(|p| p.trim().to_string()).collect())
}

fn tokenize(text: &str) -> Result<Table> {
    let mut entries = HashMap::new();
    let mut section = String::new();
    for (i, raw_line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let Some(name) = name.strip_suffix(']') else {
                return Err(cfg_err(
                    line_no,
                    format!("malformed section header `{line}`"),
                ));
            };
            if !SECTIONS.contains(&name) {
                return Err(cfg_err(line_no, format!("unknown section `[{name}]`")));
            }
            section = name.to_string();
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(cfg_err(
                line_no,
                format!("expected key = value, got `{line}`"),
            ));
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if !known_keys(&section).contains(&key.as_str()) {
            let place = if section.is_empty() {
                "before any section".to_string()
            } else {
                format!("in [{section}]")
            };
            return Err(cfg_err(line_no, format!("unknown key `{key}` {place}")));
        }
        if entries
            .insert(
                (section.clone(), key.clone()),
                Raw {
                    value,
                    line: line_no,
                },
            )
            .is_some()
        {
            return Err(cfg_err(line_no, format!("duplicate key `{key}`")));
        }
    }
    Ok(Table { entries })
}

fn parse_equation(tab: &Table, plan: &mut RunPlan) -> Result<()> {
    let preset = tab.get("equation", "preset");
    let inline_keys = ["l.num", "l.den", "b.num", "b.den", "rho", "r"];
    let inline_present: Vec<&str> = inline_keys
        .iter()
        .copied()
        .filter(|k| tab.get("equation", k).is_some())
        .collect();
    match (preset, inline_present.is_empty()) {
        (Some(raw), true) => {
            if !PRESET_NAMES.contains(&raw.value.as_str()) {
                return Err(cfg_err(
                    raw.line,
                    format!("unknown preset `{}`; see `preset list`", raw.value),
                ));
            }
            plan.equation = EquationChoice::Preset(raw.value.clone());
        }
        (Some(raw), false) => {
            return Err(cfg_err(
                raw.line,
                format!(
                    "preset cannot be combined with inline symbol keys ({})",
                    inline_present.join(", ")
                ),
            ));
        }
        (None, false) => {
            for k in inline_keys {
                if tab.get("equation", k).is_none() {
                    let line = tab
                        .get("equation", inline_present[0])
                        .map(|r| r.line)
                        .unwrap_or(0);
                    return Err(cfg_err(line, format!("inline equation needs `{k}`")));
                }
            }
            let (l_num, _) = tab.list("equation", "l.num")?.unwrap();
            let (l_den, _) = tab.list("equation", "l.den")?.unwrap();
            let (b_num, _) = tab.list("equation", "b.num")?.unwrap();
            let (b_den, _) = tab.list("equation", "b.den")?.unwrap();
            let (rho, _) = tab.f64("equation", "rho", 0.0)?;
            let (r, _) = tab.f64("equation", "r", 0.0)?;
            plan.equation = EquationChoice::Inline {
                l_num,
                l_den,
                b_num,
                b_den,
                rho,
                r,
            };
        }
        (None, true) => {} // keep the default preset
    }
    // nonlinearity override applies to presets and inline alike
    if let Some(kind) = tab.get("equation", "g.kind") {
        let (a, _) = tab.f64("equation", "g.a", 1.0)?;
        plan.g = match kind.value.as_str() {
            "integer-power" => {
                let (q, qline) = tab.usize("equation", "g.q", 2)?;
                if q < 2 {
                    return Err(cfg_err(qline, "integer-power needs q >= 2"));
                }
                Nonlinearity::IntegerPower { a, q: q as u32 }
            }
            "odd-power" => {
                let (q, qline) = tab.f64("equation", "g.q", 2.0)?;
                if !(q > 1.0) {
                    return Err(cfg_err(qline, "odd-power needs q > 1"));
                }
                Nonlinearity::OddPower { a, q }
            }
            "polynomial" => {
                let Some((coeffs, cline)) = tab.list("equation", "g.coeffs")? else {
                    return Err(cfg_err(kind.line, "polynomial needs g.coeffs"));
                };
                if coeffs.is_empty() {
                    return Err(cfg_err(cline, "g.coeffs must not be empty"));
                }
                Nonlinearity::Polynomial { coeffs }
            }
            other => {
                return Err(cfg_err(
                    kind.line,
                    format!("unknown nonlinearity kind `{other}`"),
                ));
            }
        };
    } else {
        for k in ["g.a", "g.q", "g.coeffs"] {
            if let Some(raw) = tab.get("equation", k) {
                return Err(cfg_err(raw.line, format!("{k} requires g.kind")));
            }
        }
    }
    Ok(())
}

/// Parses and validates a plan. Every rejection carries the line number of
/// the offending key.
pub fn parse_config(text: &str) -> Result<RunPlan> {
    let tab = tokenize(text)?;
    let mut plan = RunPlan::default();
    plan.strict_gates = tab.bool("", "strict_gates", plan.strict_gates)?;
    parse_equation(&tab, &mut plan)?;

    let (n, n_line) = tab.usize("grid", "N", plan.grid_n)?;
    if !n.is_power_of_two() || n < 16 {
        return Err(cfg_err(
            n_line,
            format!("N must be a power of two >= 16, got {n}"),
        ));
    }
    plan.grid_n = n;
    let (x, x_line) = tab.f64("grid", "X", plan.grid_x)?;
    if !(x > 0.0) || !x.is_finite() {
        return Err(cfg_err(
            x_line,
            format!("X must be a positive length, got {x}"),
        ));
    }
    plan.grid_x = x;

    let (dt, dt_line) = tab.f64("time", "dt", plan.dt)?;
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(cfg_err(dt_line, format!("dt must be positive, got {dt}")));
    }
    plan.dt = dt;
    let (t_end, te_line) = tab.f64("time", "T_end", plan.t_end)?;
    if t_end < dt {
        return Err(cfg_err(
            te_line.max(dt_line),
            format!("T_end ({t_end}) must be at least dt ({dt})"),
        ));
    }
    plan.t_end = t_end;
    if let Some(raw) = tab.get("time", "scheme") {
        plan.scheme = Scheme::parse(&raw.value)
            .ok_or_else(|| cfg_err(raw.line, format!("unknown scheme `{}`", raw.value)))?;
    }
    let (tol, tol_line) = tab.f64("time", "picard_tol", plan.picard_tol)?;
    if !(tol > 0.0) {
        return Err(cfg_err(
            tol_line,
            format!("picard_tol must be positive, got {tol}"),
        ));
    }
    plan.picard_tol = tol;
    let (kmax, kmax_line) = tab.usize("time", "picard_kmax", plan.picard_kmax)?;
    if kmax < 1 {
        return Err(cfg_err(kmax_line, "picard_kmax must be at least 1"));
    }
    plan.picard_kmax = kmax;

    if let Some(raw) = tab.get("initial", "preset") {
        plan.initial.kind = InitialKind::parse(&raw.value)
            .ok_or_else(|| cfg_err(raw.line, format!("unknown initial preset `{}`", raw.value)))?;
    }
    let (amp, amp_line) = tab.f64("initial", "amplitude", plan.initial.amplitude)?;
    if !amp.is_finite() {
        return Err(cfg_err(amp_line, "amplitude must be finite"));
    }
    plan.initial.amplitude = amp;
    let (width, w_line) = tab.f64("initial", "width", plan.initial.width)?;
    if !(width > 0.0) {
        return Err(cfg_err(
            w_line,
            format!("width must be positive, got {width}"),
        ));
    }
    plan.initial.width = width;
    plan.initial.mean_zero_project = tab.bool(
        "initial",
        "mean_zero_project",
        plan.initial.mean_zero_project,
    )?;
    if let Some(raw) = tab.get("initial", "path") {
        plan.initial.path = Some(PathBuf::from(&raw.value));
    }
    if plan.initial.kind == InitialKind::CustomCsv && plan.initial.path.is_none() {
        let line = tab.get("initial", "preset").map(|r| r.line).unwrap_or(0);
        return Err(cfg_err(line, "custom-csv needs a path"));
    }

    let (stride, stride_line) = tab.usize("diagnostics", "sample_stride", plan.sample_stride)?;
    if stride < 1 {
        return Err(cfg_err(stride_line, "sample_stride must be at least 1"));
    }
    plan.sample_stride = stride;
    let (s, _) = tab.f64("diagnostics", "s", plan.sobolev_index)?;
    plan.sobolev_index = s;
    let (th, th_line) = tab.f64("diagnostics", "blowup_threshold", plan.blowup_threshold)?;
    if !(th > 1.0) {
        return Err(cfg_err(
            th_line,
            format!("blowup_threshold must exceed 1, got {th}"),
        ));
    }
    plan.blowup_threshold = th;
    if let Some(raw) = tab.get("diagnostics", "nu") {
        let (nu, nu_line) = tab.f64("diagnostics", "nu", 0.0)?;
        if !(nu > 0.0) {
            return Err(cfg_err(
                nu_line,
                format!("nu must be positive, got `{}`", raw.value),
            ));
        }
        plan.nu = Some(nu);
    }

    if let Some(raw) = tab.get("output", "directory") {
        plan.out_dir = PathBuf::from(&raw.value);
    }
    if let Some((snaps, sn_line)) = tab.list("output", "snapshots")? {
        for &t in &snaps {
            if !(t >= 0.0) {
                return Err(cfg_err(
                    sn_line,
                    format!("snapshot time {t} must be nonnegative"),
                ));
            }
        }
        plan.snapshots = snaps;
    }
    plan.svg = tab.bool("output", "svg", plan.svg)?;
    if let Some(raw) = tab.get("output", "svg_columns") {
        let cols = parse_string_list(&raw.value, raw.line, "svg_columns")?;
        if cols.is_empty() {
            return Err(cfg_err(raw.line, "svg_columns must not be empty"));
        }
        plan.svg_columns = cols;
    }
    Ok(plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn minimal_preset_config_fills_defaults() {
        let text = "[equation]\npreset = boussinesq\n[grid]\nN = 256\nX = 50\n[time]\ndt = 1e-3\nT_end = 1\n";
        let plan = parse_config(text).unwrap();
        assert_eq!(plan.equation, EquationChoice::Preset("boussinesq".into()));
        assert_eq!(plan.grid_n, 256);
        assert_eq!(plan.grid_x, 50.0);
        assert_eq!(plan.dt, 1e-3);
        assert_eq!(plan.t_end, 1.0);
        assert_eq!(plan.scheme, Scheme::ExpMidpoint);
        assert_eq!(plan.sample_stride, 10);
        assert!(plan.strict_gates);
        assert_eq!(plan.g, Nonlinearity::IntegerPower { a: 1.0, q: 2 });
    }

    #[test]
    fn non_power_of_two_grid_is_rejected_with_line() {
        let text = "[grid]\nN = 100\n";
        let err = parse_config(text).unwrap_err();
        match err {
            DdError::Config { line, ref msg } => {
                assert_eq!(line, 2);
                assert!(msg.contains("power of two"), "{msg}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_key_and_section_are_rejected() {
        let err = parse_config("[grid]\nM = 32\n").unwrap_err();
        assert!(format!("{err}").contains("unknown key `M`"));
        let err = parse_config("[gird]\n").unwrap_err();
        assert!(format!("{err}").contains("unknown section"));
        let err = parse_config("N = 32\n").unwrap_err();
        assert!(format!("{err}").contains("before any section"));
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# plan\n[grid]\n\nN = 64  # resolution\nX = 10\n";
        let plan = parse_config(text).unwrap();
        assert_eq!(plan.grid_n, 64);
        assert_eq!(plan.grid_x, 10.0);
    }

    #[test]
    fn inline_symbols_match_the_equivalent_preset() {
        let text = "\
[equation]
l.num = [1, 1]
l.den = [1]
b.num = [1]
b.den = [1]
rho = 2
r = 0
";
        let plan = parse_config(text).unwrap();
        let xi: Vec<f64> = (0..)
            .map(|j| j as f64 * 0.25)
            .take_while(|x| *x <= 20.0)
            .collect();
        let inline = plan.equation_spec(&xi).unwrap();
        let preset = make_preset("boussinesq").unwrap();
        for &x in &xi {
            assert!(
                (inline.l.eval(x) - preset.l.eval(x)).abs() <= 1e-14 * (1.0 + preset.l.eval(x))
            );
            assert_eq!(inline.b.eval(x), preset.b.eval(x));
        }
        assert!((inline.c1 - 1.0).abs() <= 1e-12);
        assert!((inline.c3 - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn preset_and_inline_keys_are_mutually_exclusive() {
        let text = "[equation]\npreset = boussinesq\nrho = 2\n";
        let err = parse_config(text).unwrap_err();
        assert!(format!("{err}").contains("cannot be combined"));
    }

    #[test]
    fn nonlinearity_override_rides_along_with_preset() {
        let text = "[equation]\npreset = boussinesq\ng.kind = integer-power\ng.a = -1\ng.q = 3\n";
        let plan = parse_config(text).unwrap();
        assert_eq!(plan.g, Nonlinearity::IntegerPower { a: -1.0, q: 3 });
        let eq = plan.equation_spec(&[0.0, 1.0]).unwrap();
        assert_eq!(eq.g, plan.g);
        // stray g.* without g.kind is rejected
        let err = parse_config("[equation]\ng.a = 2\n").unwrap_err();
        assert!(format!("{err}").contains("requires g.kind"));
    }

    #[test]
    fn invariant_violations_carry_lines() {
        let err = parse_config("[time]\ndt = 0.5\nT_end = 0.1\n").unwrap_err();
        match err {
            DdError::Config { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let err = parse_config("[diagnostics]\nblowup_threshold = 0.5\n").unwrap_err();
        assert!(format!("{err}").contains("blowup_threshold"));
        let err = parse_config("[initial]\npreset = custom-csv\n").unwrap_err();
        assert!(format!("{err}").contains("needs a path"));
    }

    #[test]
    fn duplicate_keys_are_rejected() {
        let err = parse_config("[grid]\nN = 32\nN = 64\n").unwrap_err();
        assert!(format!("{err}").contains("duplicate"));
    }

    fn nonlinearity_strategy() -> impl Strategy<Value = Nonlinearity> {
        prop_oneof![
            (-3.0f64..3.0, 2u32..6).prop_map(|(a, q)| Nonlinearity::IntegerPower { a, q }),
            (-3.0f64..3.0, 1.1f64..5.0).prop_map(|(a, q)| Nonlinearity::OddPower { a, q }),
            proptest::collection::vec(-2.0f64..2.0, 1..4)
                .prop_map(|coeffs| Nonlinearity::Polynomial { coeffs }),
        ]
    }

    fn plan_strategy() -> impl Strategy<Value = RunPlan> {
        (
            prop_oneof![
                Just(EquationChoice::Preset("boussinesq".into())),
                Just(EquationChoice::Preset("double-dispersion".into())),
                (1..4usize, 1..3usize).prop_map(|(ln, bd)| EquationChoice::Inline {
                    l_num: (0..ln).map(|i| 1.0 + i as f64).collect(),
                    l_den: vec![1.0],
                    b_num: vec![1.0],
                    b_den: (0..bd).map(|i| 1.0 + i as f64).collect(),
                    rho: 2.0,
                    r: 0.0,
                }),
            ],
            nonlinearity_strategy(),
            (4u32..10).prop_map(|p| 1usize << p),
            1.0f64..100.0,
            (1e-4f64..1e-2, 1.0f64..5.0),
            prop_oneof![Just(Scheme::ExpMidpoint), Just(Scheme::Picard)],
            1usize..50,
            0.5f64..3.0,
            prop::option::of(0.1f64..2.0),
            proptest::collection::vec(0.0f64..5.0, 0..3),
            any::<bool>(),
        )
            .prop_map(
                |(
                    equation,
                    g,
                    grid_n,
                    grid_x,
                    (dt, t_mult),
                    scheme,
                    stride,
                    s,
                    nu,
                    snapshots,
                    svg,
                )| {
                    RunPlan {
                        equation,
                        g,
                        grid_n,
                        grid_x,
                        dt,
                        t_end: dt * t_mult.ceil(),
                        scheme,
                        picard_tol: 1e-12,
                        picard_kmax: 25,
                        initial: InitialSpec {
                            kind: InitialKind::GaussianDerivative,
                            amplitude: 0.5,
                            width: 2.0,
                            mean_zero_project: false,
                            path: None,
                        },
                        sample_stride: stride,
                        sobolev_index: s,
                        blowup_threshold: 1e8,
                        nu,
                        out_dir: PathBuf::from("out"),
                        snapshots,
                        svg,
                        svg_columns: vec!["E".into()],
                        strict_gates: true,
                    }
                },
            )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn render_parse_round_trip(plan in plan_strategy()) {
            let text = plan.render();
            let back = parse_config(&text).unwrap();
            prop_assert_eq!(back, plan);
        }
    }
}
