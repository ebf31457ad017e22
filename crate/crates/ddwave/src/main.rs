//! Command line driver: run, sweep, check, preset list.
//!
//! Exit codes: 0 run completed, 2 blow-up detected, 3 configuration error
//! (including usage errors), 4 theorem-gate failure in strict mode.

use std::path::Path;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use ddwave::config::{parse_config, RunPlan};
use ddwave::error::{DdError, Result};
use ddwave::runner::{self, RunSummary, EXIT_CONFIG};
use ddwave::symbols::{make_preset, PRESET_NAMES};

#[derive(Parser)]
#[command(
    name = "ddwave",
    version,
    about = "Pseudospectral solver for doubly dispersive nonlinear wave equations"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Execute a plan: gate checks, certificate attempt, time loop, outputs.
    Run { config: std::path::PathBuf },
    /// One run per value of a swept parameter, plus an aggregate CSV.
    Sweep {
        config: std::path::PathBuf,
        /// Parameter to vary: initial.amplitude, time.dt, or grid.N.
        #[arg(long)]
        param: String,
        /// Comma-separated values, one run each.
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
    },
    /// Gate checks and certificate attempt only, no time loop.
    Check { config: std::path::PathBuf },
    /// Preset utilities.
    Preset {
        #[command(subcommand)]
        cmd: PresetCmd,
    },
}

#[derive(Subcommand)]
enum PresetCmd {
    /// List the built-in equation families.
    List,
}

/// Prints a line, ignoring broken pipes so `ddwave ... | head` stays quiet.
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

fn load_plan(path: &Path) -> Result<RunPlan> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6e}")).unwrap_or_else(|| "-".into())
}

fn print_summary(summary: &RunSummary) {
    say!("final t        : {:.6}", summary.final_t);
    say!("energy drift   : {:.6e}", summary.energy_drift);
    if summary.bound_worst_u_ratio.is_some() {
        say!(
            "global bounds  : worst u ratio {}, worst u_t ratio {}, violations {}",
            fmt_opt(summary.bound_worst_u_ratio),
            fmt_opt(summary.bound_worst_ut_ratio),
            summary.bound_violations.unwrap_or(0)
        );
    }
    match &summary.certificate {
        Some(c) if c.valid => {
            say!(
                "certificate    : valid (nu {}, E0 {:.6e}, t1 bound {})",
                c.nu,
                c.e0,
                fmt_opt(c.t1_bound)
            );
        }
        Some(c) => {
            say!(
                "certificate    : not applicable ({})",
                c.reason.as_deref().unwrap_or("unknown")
            );
        }
        None => {}
    }
    if let Some(event) = &summary.blowup {
        say!(
            "blow-up        : t_escape {:.6} ({})",
            event.t_escape,
            event.trigger.as_str()
        );
    }
    if let Some(note) = &summary.note {
        say!("note           : {note}");
    }
    say!("exit           : {}", summary.exit);
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.cmd {
        Cmd::Run { config } => {
            let plan = load_plan(&config)?;
            let summary = runner::run_plan(&plan)?;
            say!("outputs        : {}", plan.out_dir.display());
            print_summary(&summary);
            Ok(summary.exit)
        }
        Cmd::Sweep {
            config,
            param,
            values,
        } => {
            let plan = load_plan(&config)?;
            let rows = runner::sweep(&plan, &param, &values)?;
            say!("value,exit,drift,t_escape,t1_bound");
            for row in &rows {
                say!(
                    "{:?},{},{:.6e},{},{}",
                    row.value,
                    row.exit,
                    row.drift,
                    fmt_opt(row.t_escape),
                    fmt_opt(row.t1_bound)
                );
            }
            say!(
                "aggregate      : {}",
                plan.out_dir.join("sweep.csv").display()
            );
            Ok(0)
        }
        Cmd::Check { config } => {
            let plan = load_plan(&config)?;
            let (gates, cert, exit) = runner::check_plan(&plan)?;
            for report in &gates {
                say!(
                    "[{}] {}",
                    if report.pass { "pass" } else { "FAIL" },
                    report.gate.as_str()
                );
                for c in &report.conditions {
                    say!(
                        "       {} {} (value {:.4}, threshold {:.4})",
                        if c.pass { "ok  " } else { "fail" },
                        c.name,
                        c.value,
                        c.threshold
                    );
                }
                for note in &report.notes {
                    say!("       note: {note}");
                }
            }
            match &cert {
                Some(c) if c.valid => say!(
                    "certificate: valid (E0 {:.6e}, t1 bound {})",
                    c.e0,
                    fmt_opt(c.t1_bound)
                ),
                Some(c) => say!(
                    "certificate: not applicable ({})",
                    c.reason.as_deref().unwrap_or("unknown")
                ),
                None => say!("certificate: no exponent nu available for this nonlinearity"),
            }
            Ok(exit)
        }
        Cmd::Preset {
            cmd: PresetCmd::List,
        } => {
            for name in PRESET_NAMES {
                let eq = make_preset(name).expect("built-in preset");
                let line = format!("{name}: rho = {}, r = {}", eq.rho, eq.r);
                match &eq.warning {
                    Some(w) => say!("{line} [warning: {w}]"),
                    None => say!("{line}"),
                }
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap's own exit code (2) is reserved for blow-up here
            let _ = err.print();
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_CONFIG as u8),
            };
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error [{}]: {err}", kind_tag(&err));
            ExitCode::from(EXIT_CONFIG as u8)
        }
    }
}

fn kind_tag(err: &DdError) -> &'static str {
    err.kind()
}
