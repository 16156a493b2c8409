//! Subcommand implementations and the error-to-exit-code mapping.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use thiserror::Error;

use twinch_core::force::{dominance_crossover, helix_angle};
use twinch_core::sim::{ratio_map, SweepChannel};
use twinch_core::{
    twist_force, velocity_sweep, winch_force, ModelError, SimulationAborted, TraceSample,
    WinchTorque,
};

use crate::config::{parse_config, ConfigError, RunConfig, SweepKind};
use crate::emit::{render_table, render_trace, write_file, EmitError};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    /// Bad command line (unknown subcommand, missing argument).
    pub const USAGE: i32 = 2;
    /// Config is not valid TOML, has unknown keys, or has unreadable quantities.
    pub const PARSE: i32 = 3;
    /// Config parsed but violates an invariant.
    pub const VALIDATION: i32 = 4;
    /// Model domain violated: overtwist, exhausted string, singular twist law,
    /// or a force query on a rigid string.
    pub const DOMAIN: i32 = 5;
    /// Implicit solver did not converge.
    pub const SOLVER: i32 = 6;
    /// Reading the config or writing output failed.
    pub const IO: i32 = 7;
}

#[derive(Debug, Parser)]
#[command(name = "twinch", version, about = "Twisted-string + winch actuator models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the scenario's phases and write the trace.
    Simulate(Args),
    /// Velocity or force sweep described by the `[sweep]` section.
    Sweep(Args),
    /// Stalled-output force over the `[force]` twist x torque grid.
    Force(Args),
    /// Transmission ratios over the `[ratio]` twist x winch grid.
    Ratio(Args),
}

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Config file (TOML).
    pub config: PathBuf,
    /// Output table; overrides `[output] path`. Defaults to stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Aborted(#[from] Box<SimulationAborted>),
    #[error(transparent)]
    Emit(#[from] EmitError),
    #[error("config has no `[{0}]` section")]
    MissingSection(&'static str),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Read { .. } | CliError::Emit(_) => exit::IO,
            CliError::Config(ConfigError::Parse { .. }) => exit::PARSE,
            CliError::Config(ConfigError::Validation { .. }) | CliError::MissingSection(_) => {
                exit::VALIDATION
            }
            CliError::Model(e) => model_code(e),
            CliError::Aborted(a) => model_code(&a.source),
        }
    }
}

fn model_code(e: &ModelError) -> i32 {
    match e {
        ModelError::NonConvergence { .. } => exit::SOLVER,
        ModelError::InvalidParameter { .. } => exit::VALIDATION,
        _ if e.is_domain() => exit::DOMAIN,
        _ => exit::VALIDATION,
    }
}

/// Result of a subcommand: the table plus a human-readable summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub table: String,
    pub summary: String,
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(parse_config(&text)?)
}

fn simulation_summary(cfg: &RunConfig, trace: &[TraceSample]) -> String {
    let mut s = String::new();
    let (Some(first), Some(last)) = (trace.first(), trace.last()) else {
        return s;
    };
    let winch_part = cfg.winch.winch_radius * (last.phi_eff - first.phi_eff);
    let total = last.total_contraction - first.total_contraction;
    let peak_speed = trace.iter().map(|x| x.x_dot.abs()).fold(0.0, f64::max);
    let _ = writeln!(s, "samples            {}", trace.len());
    let _ = writeln!(s, "duration           {:.6} s", last.t);
    let _ = writeln!(s, "final theta_eff    {:.6} rad", last.theta_eff);
    let _ = writeln!(s, "final phi_eff      {:.6} rad", last.phi_eff);
    let _ = writeln!(s, "motor angles       theta1 {:.6} rad, theta2 {:.6} rad", last.theta1, last.theta2);
    let _ = writeln!(s, "displacement       {:.6} mm", total * 1e3);
    let _ = writeln!(s, "  winch term       {:.6} mm", winch_part * 1e3);
    let _ = writeln!(s, "  twist + coupling {:.6} mm", (total - winch_part) * 1e3);
    let _ = writeln!(s, "peak speed         {:.6} mm/s", peak_speed * 1e3);
    if let Some(f) = last.f_total {
        let _ = writeln!(s, "final f_total      {:.6} N", f);
    }
    s
}

/// Runs the scenario. On abort the partial trace is still returned alongside
/// the error so it can be written out.
pub fn simulate(cfg: &RunConfig) -> Result<Report, (CliError, Option<String>)> {
    if cfg.phases.is_empty() {
        return Err((
            CliError::Config(ConfigError::Validation {
                field: "phase".into(),
                message: "simulate needs at least one [[phase]]".into(),
            }),
            None,
        ));
    }
    match twinch_core::run(&cfg.scenario()) {
        Ok(trace) => {
            let table = render_trace(&trace).map_err(|e| (e.into(), None))?;
            Ok(Report {
                table,
                summary: simulation_summary(cfg, &trace),
            })
        }
        Err(aborted) => {
            let partial = render_trace(&aborted.trace).ok();
            Err((CliError::Aborted(Box::new(aborted)), partial))
        }
    }
}

pub fn sweep(cfg: &RunConfig) -> Result<Report, CliError> {
    let spec = cfg.sweep.as_ref().ok_or(CliError::MissingSection("sweep"))?;
    let values = twinch_core::sim::linspace(spec.from, spec.to, spec.steps);
    let mut summary = String::new();
    let table = match spec.kind {
        SweepKind::TwistVelocity | SweepKind::WinchVelocity => {
            let channel = if spec.kind == SweepKind::TwistVelocity {
                SweepChannel::Twist
            } else {
                SweepChannel::Winch
            };
            // a sweep needs a phase list only for its base state
            let mut base = cfg.scenario();
            base.phases = vec![twinch_core::Phase::hold(spec.duration)];
            let points = velocity_sweep(&base, channel, &values, spec.duration)
                .map_err(|a| CliError::Aborted(Box::new(a)))?;
            let _ = writeln!(
                summary,
                "{} points, {:?} channel, {:.3}..{:.3} rad/s",
                points.len(),
                channel,
                spec.from,
                spec.to
            );
            render_table(
                &["rate_rad_s", "x_dot_mm_s", "ratio_mm_per_rad"],
                points.iter().map(|p| {
                    vec![
                        Some(p.rate),
                        Some(p.velocity * 1e3),
                        (p.rate != 0.0).then(|| p.velocity / p.rate * 1e3),
                    ]
                }),
            )
        }
        SweepKind::TwistForce => {
            let rows = values
                .iter()
                .map(|&theta| {
                    Ok(vec![
                        Some(theta),
                        Some(theta / std::f64::consts::TAU),
                        Some(helix_angle(spec.length, theta, cfg.params.initial_radius)?),
                        Some(twist_force(&cfg.params, spec.length, theta)?),
                    ])
                })
                .collect::<Result<Vec<_>, ModelError>>()?;
            let _ = writeln!(summary, "{} twist points at X = {:.3} mm", rows.len(), spec.length * 1e3);
            render_table(&["theta_rad", "turns", "helix_angle_rad", "f_twist_N"], rows)
        }
        SweepKind::WinchForce => {
            let rows = values
                .iter()
                .map(|&tau| {
                    Ok(vec![
                        Some(tau),
                        Some(winch_force(WinchTorque::new(tau)?, &cfg.winch)?),
                        Some(tau / cfg.winch.winch_radius),
                    ])
                })
                .collect::<Result<Vec<_>, ModelError>>()?;
            let _ = writeln!(summary, "{} torque points", rows.len());
            render_table(&["torque_N_m", "f_winch_N", "f_ideal_N"], rows)
        }
    };
    Ok(Report { table, summary })
}

pub fn force(cfg: &RunConfig) -> Result<Report, CliError> {
    let grid = cfg.force.as_ref().ok_or(CliError::MissingSection("force"))?;
    let thetas = grid.twist.values();
    let torques = grid.torque.values();
    let mut rows = Vec::with_capacity(thetas.len() * torques.len());
    for &theta in &thetas {
        let f_twist = twist_force(&cfg.params, grid.length, theta)?;
        for &tau in &torques {
            let f_winch = winch_force(WinchTorque::new(tau)?, &cfg.winch)?;
            rows.push(vec![
                Some(theta),
                Some(tau),
                Some(f_twist),
                Some(f_winch),
                Some(twinch_core::total_force(f_twist, f_winch)),
            ]);
        }
    }
    let mut summary = String::new();
    let theta_max = thetas.iter().cloned().fold(0.0, f64::max);
    for &tau in &torques {
        if theta_max <= 0.0 {
            break;
        }
        let crossing = dominance_crossover(
            &cfg.params,
            &cfg.winch,
            grid.length,
            WinchTorque::new(tau)?,
            theta_max,
        )?;
        let _ = match crossing {
            Some(theta) => writeln!(
                summary,
                "tau = {tau:.4} N*m: twisting overtakes winching at {theta:.3} rad ({:.2} turns)",
                theta / std::f64::consts::TAU
            ),
            None => writeln!(summary, "tau = {tau:.4} N*m: winching dominates over the whole grid"),
        };
    }
    Ok(Report {
        table: render_table(
            &["theta_rad", "torque_N_m", "f_twist_N", "f_winch_N", "f_total_N"],
            rows,
        ),
        summary,
    })
}

pub fn ratio(cfg: &RunConfig) -> Result<Report, CliError> {
    let grid = cfg.ratio.as_ref().ok_or(CliError::MissingSection("ratio"))?;
    let points = ratio_map(
        &cfg.params,
        &cfg.winch,
        &cfg.load,
        &grid.theta.values(),
        &grid.phi.values(),
    )?;
    let (lo, hi) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        (lo.min(p.ratio.twist), hi.max(p.ratio.twist))
    });
    let summary = format!(
        "{} grid points; twist ratio {:.6}..{:.6} mm/rad, winch ratio {:.6} mm/rad\n",
        points.len(),
        lo * 1e3,
        hi * 1e3,
        cfg.winch.winch_radius * 1e3
    );
    Ok(Report {
        table: render_table(
            &[
                "theta_eff_rad",
                "phi_eff_rad",
                "dX_total_mm",
                "tr_twist_mm_per_rad",
                "tr_winch_mm_per_rad",
                "tr_winch_coupled_mm_per_rad",
            ],
            points.iter().map(|p| {
                vec![
                    Some(p.theta_eff),
                    Some(p.phi_eff),
                    Some(p.total_contraction * 1e3),
                    Some(p.ratio.twist * 1e3),
                    Some(p.ratio.winch * 1e3),
                    Some(p.ratio.winch_coupled * 1e3),
                ]
            }),
        ),
        summary,
    })
}

fn deliver(
    table: &str,
    target: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    match target {
        Some(path) => Ok(write_file(path, table)?),
        None => stdout.write_all(table.as_bytes()).map_err(|source| {
            CliError::Emit(EmitError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            })
        }),
    }
}

/// Entry point used by the binary; returns the process exit code.
pub fn cli_main<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    exit::OK
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    exit::USAGE
                }
            };
        }
    };

    let (Command::Simulate(args) | Command::Sweep(args) | Command::Force(args) | Command::Ratio(args)) =
        &cli.command;

    let outcome = (|| -> Result<Report, CliError> {
        let cfg = load_config(&args.config)?;
        let target = args.output.clone().or_else(|| cfg.output.path.clone());
        let report = match &cli.command {
            Command::Simulate(_) => match simulate(&cfg) {
                Ok(r) => r,
                Err((err, partial)) => {
                    if let Some(table) = partial {
                        let _ = deliver(&table, target.as_deref(), stdout);
                    }
                    return Err(err);
                }
            },
            Command::Sweep(_) => sweep(&cfg)?,
            Command::Force(_) => force(&cfg)?,
            Command::Ratio(_) => ratio(&cfg)?,
        };
        deliver(&report.table, target.as_deref(), stdout)?;
        Ok(report)
    })();

    match outcome {
        Ok(report) => {
            let _ = stderr.write_all(report.summary.as_bytes());
            exit::OK
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
