//! Run configuration: a TOML document with unit-suffixed scalars.
//!
//! ```toml
//! [string]
//! length = "500 mm"
//! radius = "1 mm"
//! stiffness = "60 kN/m"        # or "rigid"
//!
//! [winch]
//! radius = "5 mm"
//!
//! [[phase]]
//! duration = "2 s"
//! winch_rate = "2 rad/s"
//! ```
//!
//! Unknown keys are rejected. Omitted sections take the defaults documented
//! on [`RunConfig`].

use std::ops::Range;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use toml::Spanned;

use twinch_core::sim::{TWIST_SWEEP_RANGE, WINCH_SWEEP_RANGE};
use twinch_core::{
    AllocationPolicy, ControlSettings, EffectiveRates, GearTrain, LoadCondition, ModelError,
    Phase, PhaseTarget, Scenario, Stiffness, StringParams, WinchGeometry, WinchTorque,
};

use crate::units::{format_quantity, parse_quantity, Dimension};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    /// Malformed TOML, unknown key, or an unreadable quantity.
    #[error("parse error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse {
        line: Option<usize>,
        message: String,
    },
    /// Well-formed but violates a model or config invariant.
    #[error("invalid config: {field}: {message}")]
    Validation { field: String, message: String },
}

fn invalid(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Validation {
        field: field.to_string(),
        message: message.into(),
    }
}

fn model_invalid(field: &str, e: ModelError) -> ConfigError {
    invalid(field, e.to_string())
}

// Default values applied to omitted keys.
pub const DEFAULT_STRING_RADIUS: f64 = 1e-3;
pub const DEFAULT_STIFFNESS: f64 = 60e3;
pub const DEFAULT_BUSHING_DISTANCE: f64 = 20e-3;
pub const DEFAULT_FRICTION: f64 = 0.0;
pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_SWITCH_CONTRACTION: f64 = 50e-3;
pub const DEFAULT_TWIST_FRACTION: f64 = 0.5;
pub const DEFAULT_SWEEP_STEPS: usize = 10;
pub const DEFAULT_SWEEP_DURATION: f64 = 10e-3;

#[derive(Debug, Clone, PartialEq)]
pub enum SweepKind {
    /// Output velocity against effective twist rate.
    TwistVelocity,
    /// Output velocity against effective winch rate.
    WinchVelocity,
    /// Stalled twist force against twist angle.
    TwistForce,
    /// Winch force against spool torque.
    WinchForce,
}

impl SweepKind {
    fn name(&self) -> &'static str {
        match self {
            SweepKind::TwistVelocity => "twist_velocity",
            SweepKind::WinchVelocity => "winch_velocity",
            SweepKind::TwistForce => "twist_force",
            SweepKind::WinchForce => "winch_force",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "twist_velocity" => SweepKind::TwistVelocity,
            "winch_velocity" => SweepKind::WinchVelocity,
            "twist_force" => SweepKind::TwistForce,
            "winch_force" => SweepKind::WinchForce,
            _ => return None,
        })
    }

    fn dimension(&self) -> Dimension {
        match self {
            SweepKind::TwistVelocity | SweepKind::WinchVelocity => Dimension::AngularVelocity,
            SweepKind::TwistForce => Dimension::Angle,
            SweepKind::WinchForce => Dimension::Torque,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    /// Run length per point for velocity sweeps [s].
    pub duration: f64,
    /// Fixed-end string length for force sweeps [m].
    pub length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridAxis {
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

impl GridAxis {
    pub fn values(&self) -> Vec<f64> {
        twinch_core::sim::linspace(self.from, self.to, self.steps)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForceGrid {
    /// Fixed-end string length [m].
    pub length: f64,
    pub twist: GridAxis,
    pub torque: GridAxis,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioGrid {
    pub theta: GridAxis,
    pub phi: GridAxis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: OutputFormat,
}

/// Validated run configuration, SI throughout.
///
/// Defaults: radius 1 mm, stiffness 60 kN/m (not rigid), bushing distance
/// 20 mm, friction 0, gears `a = b = 2` with 2:1 ratios, no load,
/// winch-then-twist switching at 50 mm, `theta_min = 1 rad`, no rate cap,
/// `dt = 1 ms`, start at zero twist and winch angle.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: StringParams,
    pub winch: WinchGeometry,
    pub train: GearTrain,
    pub load: LoadCondition,
    pub policy: AllocationPolicy,
    pub control: ControlSettings,
    pub dt: f64,
    pub initial_theta: f64,
    pub initial_phi: f64,
    pub probe_torque: Option<WinchTorque>,
    pub phases: Vec<Phase>,
    pub sweep: Option<SweepSpec>,
    pub force: Option<ForceGrid>,
    pub ratio: Option<RatioGrid>,
    pub output: OutputSpec,
}

impl RunConfig {
    /// Scenario built from the model sections and the phase list.
    pub fn scenario(&self) -> Scenario {
        Scenario {
            params: self.params,
            winch: self.winch,
            train: self.train,
            load: self.load,
            policy: self.policy,
            control: self.control,
            initial_theta: self.initial_theta,
            initial_phi: self.initial_phi,
            phases: self.phases.clone(),
            dt: self.dt,
            force_probe: self.probe_torque,
        }
    }
}

// ---------------------------------------------------------------------------
// raw document

type Q = Option<Spanned<String>>;

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    string: RawString,
    #[serde(default)]
    winch: RawWinch,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gears: Option<RawGears>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    load: Option<RawLoad>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    control: Option<RawControl>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sim: Option<RawSim>,
    #[serde(default, rename = "phase", skip_serializing_if = "Vec::is_empty")]
    phases: Vec<RawPhase>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sweep: Option<RawSweep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    force: Option<RawForce>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ratio: Option<RawRatio>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    output: Option<RawOutput>,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawString {
    length: Q,
    #[serde(skip_serializing_if = "Option::is_none")]
    radius: Q,
    #[serde(skip_serializing_if = "Option::is_none")]
    stiffness: Q,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawWinch {
    radius: Q,
    #[serde(skip_serializing_if = "Option::is_none")]
    bushing_distance: Q,
    #[serde(skip_serializing_if = "Option::is_none")]
    friction: Option<f64>,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawGears {
    bevel_count: Option<i64>,
    bevel_ratio: Option<f64>,
    turret_count: Option<i64>,
    turret_ratio: Option<f64>,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawLoad {
    axial_force: Q,
    twist_moment: Q,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawControl {
    #[serde(skip_serializing_if = "Option::is_none")]
    policy: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    switch_contraction: Q,
    #[serde(skip_serializing_if = "Option::is_none")]
    twist_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta_min: Q,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta_dot_max: Q,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawSim {
    #[serde(skip_serializing_if = "Option::is_none")]
    dt: Q,
    #[serde(skip_serializing_if = "Option::is_none")]
    initial_twist: Q,
    #[serde(skip_serializing_if = "Option::is_none")]
    initial_winch: Q,
    #[serde(skip_serializing_if = "Option::is_none")]
    probe_torque: Q,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawPhase {
    duration: Q,
    #[serde(skip_serializing_if = "Option::is_none")]
    twist_rate: Q,
    #[serde(skip_serializing_if = "Option::is_none")]
    winch_rate: Q,
    #[serde(skip_serializing_if = "Option::is_none")]
    velocity: Q,
    #[serde(skip_serializing_if = "Option::is_none")]
    hold: Option<bool>,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    from: Q,
    #[serde(skip_serializing_if = "Option::is_none")]
    to: Q,
    #[serde(skip_serializing_if = "Option::is_none")]
    steps: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    duration: Q,
    #[serde(skip_serializing_if = "Option::is_none")]
    length: Q,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawForce {
    #[serde(skip_serializing_if = "Option::is_none")]
    length: Q,
    twist_from: Q,
    twist_to: Q,
    twist_steps: Option<i64>,
    torque_from: Q,
    torque_to: Q,
    torque_steps: Option<i64>,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawRatio {
    theta_from: Q,
    theta_to: Q,
    theta_steps: Option<i64>,
    phi_from: Q,
    phi_to: Q,
    phi_steps: Option<i64>,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    #[serde(skip_serializing_if = "Option::is_none")]
    path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    format: Option<String>,
}

// ---------------------------------------------------------------------------
// parsing

struct Ctx<'a> {
    text: &'a str,
}

impl Ctx<'_> {
    fn line_of(&self, span: Range<usize>) -> usize {
        let end = span.start.min(self.text.len());
        self.text[..end].bytes().filter(|&b| b == b'\n').count() + 1
    }

    fn quantity(&self, q: &Q, field: &str, dim: Dimension) -> Result<Option<f64>, ConfigError> {
        let Some(s) = q else { return Ok(None) };
        parse_quantity(s.get_ref(), dim)
            .map(Some)
            .map_err(|e| ConfigError::Parse {
                line: Some(self.line_of(s.span())),
                message: format!("{field}: {e}"),
            })
    }

    fn required(&self, q: &Q, field: &str, dim: Dimension) -> Result<f64, ConfigError> {
        self.quantity(q, field, dim)?
            .ok_or_else(|| invalid(field, "required"))
    }
}

fn count(v: Option<i64>, field: &str, default: usize, min: usize) -> Result<usize, ConfigError> {
    match v {
        None => Ok(default),
        Some(n) if n >= min as i64 && n <= 1_000_000 => Ok(n as usize),
        Some(n) => Err(invalid(field, format!("{n} out of range [{min}, 1000000]"))),
    }
}

fn axis(
    ctx: &Ctx<'_>,
    prefix: &str,
    from: &Q,
    to: &Q,
    steps: Option<i64>,
    dim: Dimension,
) -> Result<GridAxis, ConfigError> {
    let from = ctx.required(from, &format!("{prefix}_from"), dim)?;
    let to = ctx.required(to, &format!("{prefix}_to"), dim)?;
    let steps = count(steps, &format!("{prefix}_steps"), DEFAULT_SWEEP_STEPS, 1)?;
    Ok(GridAxis { from, to, steps })
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.span().map(|s| Ctx { text }.line_of(s)),
        message: e.message().trim().to_string(),
    })?;
    let ctx = Ctx { text };

    let length = ctx.required(&raw.string.length, "string.length", Dimension::Length)?;
    let radius = ctx
        .quantity(&raw.string.radius, "string.radius", Dimension::Length)?
        .unwrap_or(DEFAULT_STRING_RADIUS);
    let stiffness = match &raw.string.stiffness {
        Some(s) if s.get_ref().trim() == "rigid" => Stiffness::Rigid,
        other => Stiffness::Finite(
            ctx.quantity(other, "string.stiffness", Dimension::Stiffness)?
                .unwrap_or(DEFAULT_STIFFNESS),
        ),
    };
    let params = StringParams::new(length, radius, stiffness).map_err(|e| model_invalid("string", e))?;

    let winch = WinchGeometry::new(
        ctx.required(&raw.winch.radius, "winch.radius", Dimension::Length)?,
        ctx.quantity(
            &raw.winch.bushing_distance,
            "winch.bushing_distance",
            Dimension::Length,
        )?
        .unwrap_or(DEFAULT_BUSHING_DISTANCE),
        raw.winch.friction.unwrap_or(DEFAULT_FRICTION),
    )
    .map_err(|e| model_invalid("winch", e))?;

    let train = match &raw.gears {
        None => GearTrain::default(),
        Some(g) => {
            let d = GearTrain::default();
            let gear_count = |v: Option<i64>, field: &str, default: u32| match v {
                None => Ok(default),
                Some(n) if (1..=1000).contains(&n) => Ok(n as u32),
                Some(n) => Err(invalid(field, format!("{n} must be in [1, 1000]"))),
            };
            GearTrain::new(
                gear_count(g.bevel_count, "gears.bevel_count", d.bevel_gear_count)?,
                g.bevel_ratio.unwrap_or(d.bevel_ratio),
                gear_count(g.turret_count, "gears.turret_count", d.turret_gear_count)?,
                g.turret_ratio.unwrap_or(d.turret_ratio),
            )
            .map_err(|e| model_invalid("gears", e))?
        }
    };

    let load = match &raw.load {
        None => LoadCondition::default(),
        Some(l) => LoadCondition::new(
            ctx.quantity(&l.axial_force, "load.axial_force", Dimension::Force)?
                .unwrap_or(0.0),
            ctx.quantity(&l.twist_moment, "load.twist_moment", Dimension::Torque)?
                .unwrap_or(0.0),
        )
        .map_err(|e| model_invalid("load", e))?,
    };

    let (policy, control) = parse_control(&ctx, raw.control.as_ref())?;

    let sim = raw.sim.as_ref();
    let q = |f: fn(&RawSim) -> &Q| sim.map(f).cloned().flatten();
    let dt = ctx
        .quantity(&q(|s| &s.dt), "sim.dt", Dimension::Time)?
        .unwrap_or(DEFAULT_DT);
    if !(dt > 0.0) {
        return Err(invalid("sim.dt", "must be positive"));
    }
    let initial_theta = ctx
        .quantity(&q(|s| &s.initial_twist), "sim.initial_twist", Dimension::Angle)?
        .unwrap_or(0.0);
    if initial_theta < 0.0 {
        return Err(invalid("sim.initial_twist", "must be non-negative"));
    }
    let initial_phi = ctx
        .quantity(&q(|s| &s.initial_winch), "sim.initial_winch", Dimension::Angle)?
        .unwrap_or(0.0);
    let probe_torque = ctx
        .quantity(&q(|s| &s.probe_torque), "sim.probe_torque", Dimension::Torque)?
        .map(WinchTorque::new)
        .transpose()
        .map_err(|e| model_invalid("sim.probe_torque", e))?;

    let phases = raw
        .phases
        .iter()
        .enumerate()
        .map(|(i, p)| parse_phase(&ctx, i, p))
        .collect::<Result<Vec<_>, _>>()?;

    let sweep = raw
        .sweep
        .as_ref()
        .map(|s| parse_sweep(&ctx, s, length))
        .transpose()?;

    let force = match &raw.force {
        None => None,
        Some(f) => {
            let grid = ForceGrid {
                length: ctx
                    .quantity(&f.length, "force.length", Dimension::Length)?
                    .unwrap_or(length),
                twist: axis(&ctx, "force.twist", &f.twist_from, &f.twist_to, f.twist_steps, Dimension::Angle)?,
                torque: axis(
                    &ctx,
                    "force.torque",
                    &f.torque_from,
                    &f.torque_to,
                    f.torque_steps,
                    Dimension::Torque,
                )?,
            };
            if !(grid.length > 0.0) {
                return Err(invalid("force.length", "must be positive"));
            }
            if grid.twist.from.min(grid.twist.to) < 0.0 {
                return Err(invalid("force.twist", "angles must be non-negative"));
            }
            if grid.torque.from.min(grid.torque.to) < 0.0 {
                return Err(invalid("force.torque", "torques must be non-negative"));
            }
            Some(grid)
        }
    };

    let ratio = match &raw.ratio {
        None => None,
        Some(r) => {
            let grid = RatioGrid {
                theta: axis(&ctx, "ratio.theta", &r.theta_from, &r.theta_to, r.theta_steps, Dimension::Angle)?,
                phi: axis(&ctx, "ratio.phi", &r.phi_from, &r.phi_to, r.phi_steps, Dimension::Angle)?,
            };
            if grid.theta.from.min(grid.theta.to) < 0.0 {
                return Err(invalid("ratio.theta", "angles must be non-negative"));
            }
            Some(grid)
        }
    };

    let output = match &raw.output {
        None => OutputSpec::default(),
        Some(o) => OutputSpec {
            path: o.path.as_ref().map(PathBuf::from),
            format: match o.format.as_deref() {
                None | Some("csv") => OutputFormat::Csv,
                Some(other) => {
                    return Err(invalid("output.format", format!("unknown format `{other}`")))
                }
            },
        },
    };

    Ok(RunConfig {
        params,
        winch,
        train,
        load,
        policy,
        control,
        dt,
        initial_theta,
        initial_phi,
        probe_torque,
        phases,
        sweep,
        force,
        ratio,
        output,
    })
}

fn parse_control(
    ctx: &Ctx<'_>,
    raw: Option<&RawControl>,
) -> Result<(AllocationPolicy, ControlSettings), ConfigError> {
    let Some(c) = raw else {
        return Ok((
            AllocationPolicy::WinchThenTwist {
                switch_contraction: DEFAULT_SWITCH_CONTRACTION,
            },
            ControlSettings::default(),
        ));
    };
    let name = c.policy.as_deref().unwrap_or("winch_then_twist");
    let switch = ctx.quantity(&c.switch_contraction, "control.switch_contraction", Dimension::Length)?;
    if switch.is_some() && name != "winch_then_twist" {
        return Err(invalid(
            "control.switch_contraction",
            "only valid with policy = \"winch_then_twist\"",
        ));
    }
    if c.twist_fraction.is_some() && name != "proportional" {
        return Err(invalid(
            "control.twist_fraction",
            "only valid with policy = \"proportional\"",
        ));
    }
    let policy = match name {
        "winch_only" => AllocationPolicy::WinchOnly,
        "twist_only" => AllocationPolicy::TwistOnly,
        "winch_then_twist" => AllocationPolicy::WinchThenTwist {
            switch_contraction: switch.unwrap_or(DEFAULT_SWITCH_CONTRACTION),
        },
        "proportional" => AllocationPolicy::Proportional {
            twist_fraction: c.twist_fraction.unwrap_or(DEFAULT_TWIST_FRACTION),
        },
        other => return Err(invalid("control.policy", format!("unknown policy `{other}`"))),
    };
    policy.validate().map_err(|e| model_invalid("control", e))?;
    let control = ControlSettings {
        theta_min: ctx
            .quantity(&c.theta_min, "control.theta_min", Dimension::Angle)?
            .unwrap_or(ControlSettings::default().theta_min),
        theta_dot_max: ctx.quantity(&c.theta_dot_max, "control.theta_dot_max", Dimension::AngularVelocity)?,
    };
    control.validate().map_err(|e| model_invalid("control", e))?;
    Ok((policy, control))
}

fn parse_phase(ctx: &Ctx<'_>, i: usize, p: &RawPhase) -> Result<Phase, ConfigError> {
    let field = |name: &str| format!("phase[{i}].{name}");
    let duration = ctx.required(&p.duration, &field("duration"), Dimension::Time)?;
    if !(duration > 0.0) {
        return Err(invalid(&field("duration"), "must be positive"));
    }
    let twist = ctx.quantity(&p.twist_rate, &field("twist_rate"), Dimension::AngularVelocity)?;
    let winch = ctx.quantity(&p.winch_rate, &field("winch_rate"), Dimension::AngularVelocity)?;
    let velocity = ctx.quantity(&p.velocity, &field("velocity"), Dimension::Velocity)?;
    let hold = p.hold.unwrap_or(false);

    let rates = twist.is_some() || winch.is_some();
    let targets = [rates, velocity.is_some(), hold]
        .iter()
        .filter(|&&b| b)
        .count();
    if targets != 1 {
        return Err(invalid(
            &format!("phase[{i}]"),
            "needs exactly one of rates (twist_rate/winch_rate), velocity, or hold = true",
        ));
    }
    let target = if rates {
        PhaseTarget::Rates(EffectiveRates {
            phi_dot_eff: winch.unwrap_or(0.0),
            theta_dot_eff: twist.unwrap_or(0.0),
        })
    } else if let Some(v) = velocity {
        PhaseTarget::Velocity(v)
    } else {
        PhaseTarget::Hold
    };
    Ok(Phase { duration, target })
}

fn parse_sweep(ctx: &Ctx<'_>, s: &RawSweep, string_length: f64) -> Result<SweepSpec, ConfigError> {
    let name = s
        .kind
        .as_deref()
        .ok_or_else(|| invalid("sweep.kind", "required"))?;
    let kind = SweepKind::from_name(name)
        .ok_or_else(|| invalid("sweep.kind", format!("unknown sweep kind `{name}`")))?;
    let dim = kind.dimension();
    let (default_from, default_to) = match kind {
        SweepKind::TwistVelocity => (Some(TWIST_SWEEP_RANGE.0), Some(TWIST_SWEEP_RANGE.1)),
        SweepKind::WinchVelocity => (Some(WINCH_SWEEP_RANGE.0), Some(WINCH_SWEEP_RANGE.1)),
        _ => (None, None),
    };
    let from = ctx
        .quantity(&s.from, "sweep.from", dim)?
        .or(default_from)
        .ok_or_else(|| invalid("sweep.from", "required for this sweep kind"))?;
    let to = ctx
        .quantity(&s.to, "sweep.to", dim)?
        .or(default_to)
        .ok_or_else(|| invalid("sweep.to", "required for this sweep kind"))?;
    if matches!(kind, SweepKind::TwistForce | SweepKind::WinchForce) && from.min(to) < 0.0 {
        return Err(invalid("sweep", "force sweep bounds must be non-negative"));
    }
    let duration = ctx
        .quantity(&s.duration, "sweep.duration", Dimension::Time)?
        .unwrap_or(DEFAULT_SWEEP_DURATION);
    if !(duration > 0.0) {
        return Err(invalid("sweep.duration", "must be positive"));
    }
    let length = ctx
        .quantity(&s.length, "sweep.length", Dimension::Length)?
        .unwrap_or(string_length);
    if !(length > 0.0) {
        return Err(invalid("sweep.length", "must be positive"));
    }
    Ok(SweepSpec {
        kind,
        from,
        to,
        steps: count(s.steps, "sweep.steps", DEFAULT_SWEEP_STEPS, 1)?,
        duration,
        length,
    })
}

// ---------------------------------------------------------------------------
// serialisation

fn q(value: f64, dim: Dimension) -> Q {
    Some(Spanned::new(0..0, format_quantity(value, dim)))
}

/// Writes a config back out with every value explicit, in SI units.
pub fn serialize_config(cfg: &RunConfig) -> String {
    let raw = RawConfig {
        string: RawString {
            length: q(cfg.params.unloaded_length, Dimension::Length),
            radius: q(cfg.params.initial_radius, Dimension::Length),
            stiffness: Some(Spanned::new(
                0..0,
                match cfg.params.stiffness {
                    Stiffness::Rigid => "rigid".to_string(),
                    Stiffness::Finite(k) => format_quantity(k, Dimension::Stiffness),
                },
            )),
        },
        winch: RawWinch {
            radius: q(cfg.winch.winch_radius, Dimension::Length),
            bushing_distance: q(cfg.winch.bushing_distance, Dimension::Length),
            friction: Some(cfg.winch.friction_coeff),
        },
        gears: Some(RawGears {
            bevel_count: Some(cfg.train.bevel_gear_count as i64),
            bevel_ratio: Some(cfg.train.bevel_ratio),
            turret_count: Some(cfg.train.turret_gear_count as i64),
            turret_ratio: Some(cfg.train.turret_ratio),
        }),
        load: Some(RawLoad {
            axial_force: q(cfg.load.axial_force, Dimension::Force),
            twist_moment: q(cfg.load.twist_moment, Dimension::Torque),
        }),
        control: Some({
            let (policy, switch_contraction, twist_fraction) = match cfg.policy {
                AllocationPolicy::WinchOnly => ("winch_only", None, None),
                AllocationPolicy::TwistOnly => ("twist_only", None, None),
                AllocationPolicy::WinchThenTwist { switch_contraction } => (
                    "winch_then_twist",
                    q(switch_contraction, Dimension::Length),
                    None,
                ),
                AllocationPolicy::Proportional { twist_fraction } => {
                    ("proportional", None, Some(twist_fraction))
                }
            };
            RawControl {
                policy: Some(policy.to_string()),
                switch_contraction,
                twist_fraction,
                theta_min: q(cfg.control.theta_min, Dimension::Angle),
                theta_dot_max: cfg
                    .control
                    .theta_dot_max
                    .and_then(|v| q(v, Dimension::AngularVelocity)),
            }
        }),
        sim: Some(RawSim {
            dt: q(cfg.dt, Dimension::Time),
            initial_twist: q(cfg.initial_theta, Dimension::Angle),
            initial_winch: q(cfg.initial_phi, Dimension::Angle),
            probe_torque: cfg
                .probe_torque
                .and_then(|t| q(t.value(), Dimension::Torque)),
        }),
        phases: cfg
            .phases
            .iter()
            .map(|p| {
                let mut raw = RawPhase {
                    duration: q(p.duration, Dimension::Time),
                    ..RawPhase::default()
                };
                match p.target {
                    PhaseTarget::Rates(r) => {
                        raw.twist_rate = q(r.theta_dot_eff, Dimension::AngularVelocity);
                        raw.winch_rate = q(r.phi_dot_eff, Dimension::AngularVelocity);
                    }
                    PhaseTarget::Velocity(v) => raw.velocity = q(v, Dimension::Velocity),
                    PhaseTarget::Hold => raw.hold = Some(true),
                }
                raw
            })
            .collect(),
        sweep: cfg.sweep.as_ref().map(|s| RawSweep {
            kind: Some(s.kind.name().to_string()),
            from: q(s.from, s.kind.dimension()),
            to: q(s.to, s.kind.dimension()),
            steps: Some(s.steps as i64),
            duration: q(s.duration, Dimension::Time),
            length: q(s.length, Dimension::Length),
        }),
        force: cfg.force.as_ref().map(|f| RawForce {
            length: q(f.length, Dimension::Length),
            twist_from: q(f.twist.from, Dimension::Angle),
            twist_to: q(f.twist.to, Dimension::Angle),
            twist_steps: Some(f.twist.steps as i64),
            torque_from: q(f.torque.from, Dimension::Torque),
            torque_to: q(f.torque.to, Dimension::Torque),
            torque_steps: Some(f.torque.steps as i64),
        }),
        ratio: cfg.ratio.as_ref().map(|r| RawRatio {
            theta_from: q(r.theta.from, Dimension::Angle),
            theta_to: q(r.theta.to, Dimension::Angle),
            theta_steps: Some(r.theta.steps as i64),
            phi_from: q(r.phi.from, Dimension::Angle),
            phi_to: q(r.phi.to, Dimension::Angle),
            phi_steps: Some(r.phi.steps as i64),
        }),
        output: Some(RawOutput {
            path: cfg
                .output
                .path
                .as_ref()
                .map(|p| p.to_string_lossy().into_owned()),
            format: Some("csv".to_string()),
        }),
    };
    toml::to_string(&raw).expect("config serialises to TOML")
}
