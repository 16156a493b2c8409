//! Discrete-time scenario runner.
//!
//! Effective angles are integrated with explicit Euler steps; every sample is
//! then re-solved through the displacement model, so integration error only
//! affects the commanded trajectory, never the consistency of a sample.

use thiserror::Error;

use crate::actuator::{
    solve_total_contraction_with, ActuatorState, SolverOptions,
};
use crate::control::{r_var_rate, velocity_command, AllocationPolicy, ControlSettings};
use crate::error::{finite, require, ModelError, Result};
use crate::force::{twist_force, winch_force, WinchTorque};
use crate::gear::{motor_angles, EffectiveRates, GearTrain};
use crate::params::{LoadCondition, StringParams, WinchGeometry};

/// Finite-difference step for transmission ratios [rad].
pub const RATIO_STEP: f64 = 1e-4;

/// Solver settings used by the runner and for finite differences: the default
/// 1e-9 m tolerance would swamp a 1e-4 rad step or a 0.1 ms velocity difference.
pub const PRECISE_SOLVER: SolverOptions = SolverOptions {
    damping: 0.5,
    tolerance: 1e-14,
    max_iterations: 400,
    overtwist_margin: 0.01,
};

/// Default effective twist-rate sweep bounds [rad/s].
pub const TWIST_SWEEP_RANGE: (f64, f64) = (0.40, 4.02);
/// Default effective winch-rate sweep bounds [rad/s].
pub const WINCH_SWEEP_RANGE: (f64, f64) = (0.20, 2.01);

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseTarget {
    /// Constant effective rates.
    Rates(EffectiveRates),
    /// Desired output velocity [m/s], split by the scenario's policy.
    Velocity(f64),
    /// Both channels braked.
    Hold,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phase {
    pub duration: f64,
    pub target: PhaseTarget,
}

impl Phase {
    pub fn rates(duration: f64, theta_dot_eff: f64, phi_dot_eff: f64) -> Self {
        Self {
            duration,
            target: PhaseTarget::Rates(EffectiveRates {
                phi_dot_eff,
                theta_dot_eff,
            }),
        }
    }

    pub fn velocity(duration: f64, x_dot: f64) -> Self {
        Self {
            duration,
            target: PhaseTarget::Velocity(x_dot),
        }
    }

    pub fn hold(duration: f64) -> Self {
        Self {
            duration,
            target: PhaseTarget::Hold,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub params: StringParams,
    pub winch: WinchGeometry,
    pub train: GearTrain,
    pub load: LoadCondition,
    pub policy: AllocationPolicy,
    pub control: ControlSettings,
    /// Effective twist angle at `t = 0` [rad].
    pub initial_theta: f64,
    /// Effective winch angle at `t = 0` [rad].
    pub initial_phi: f64,
    pub phases: Vec<Phase>,
    /// Integration step [s].
    pub dt: f64,
    /// When set, each sample also reports the stalled-output force with this
    /// winch torque and the twist at that sample.
    pub force_probe: Option<WinchTorque>,
}

impl Scenario {
    /// Scenario with default gearing, no load, the default policy and a 1 ms step.
    pub fn new(params: StringParams, winch: WinchGeometry, phases: Vec<Phase>) -> Self {
        Self {
            params,
            winch,
            train: GearTrain::default(),
            load: LoadCondition::default(),
            policy: AllocationPolicy::default(),
            control: ControlSettings::default(),
            initial_theta: 0.0,
            initial_phi: 0.0,
            phases,
            dt: 1e-3,
            force_probe: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.winch.validate()?;
        self.train.validate()?;
        self.load.validate()?;
        self.policy.validate()?;
        self.control.validate()?;
        finite("dt", self.dt)?;
        require(self.dt > 0.0, "dt", self.dt, "must be positive")?;
        finite("initial_theta", self.initial_theta)?;
        require(
            self.initial_theta >= 0.0,
            "initial_theta",
            self.initial_theta,
            "must be non-negative",
        )?;
        finite("initial_phi", self.initial_phi)?;
        require(
            !self.phases.is_empty(),
            "phases",
            0.0,
            "must contain at least one phase",
        )?;
        for phase in &self.phases {
            finite("duration", phase.duration)?;
            require(phase.duration > 0.0, "duration", phase.duration, "must be positive")?;
            match phase.target {
                PhaseTarget::Rates(r) => {
                    finite("theta_dot_eff", r.theta_dot_eff)?;
                    finite("phi_dot_eff", r.phi_dot_eff)?;
                }
                PhaseTarget::Velocity(v) => finite("velocity", v)?,
                PhaseTarget::Hold => {}
            }
        }
        if self.force_probe.is_some() && self.params.stiffness.is_rigid() {
            return Err(ModelError::RigidString(
                "force probe needs a finite stiffness",
            ));
        }
        Ok(())
    }
}

/// Winch `wind_length` [m] at `winch_rate`, brake for `brake` seconds, then
/// twist through `twist_angle` at `twist_rate`.
pub fn staged_phases(
    winch_radius: f64,
    wind_length: f64,
    winch_rate: f64,
    brake: f64,
    twist_angle: f64,
    twist_rate: f64,
) -> Vec<Phase> {
    let wind_angle = wind_length / winch_radius;
    vec![
        Phase::rates(wind_angle / winch_rate, 0.0, winch_rate),
        Phase::hold(brake),
        Phase::rates(twist_angle / twist_rate, twist_rate, 0.0),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSample {
    pub t: f64,
    /// Index of the phase that produced this sample (0 for the initial sample).
    pub phase: usize,
    pub theta_eff: f64,
    pub phi_eff: f64,
    pub theta1: f64,
    pub theta2: f64,
    /// Output displacement [m].
    pub total_contraction: f64,
    /// Backward-differenced output velocity [m/s].
    pub x_dot: f64,
    /// Stalled-output force [N], only with a force probe.
    pub f_total: Option<f64>,
    /// `dX/dtheta_eff` [m/rad].
    pub ratio_twist: f64,
    /// `dX/dphi_eff` [m/rad].
    pub ratio_winch: f64,
}

/// A run stopped early; `trace` holds every sample produced before the failure.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("scenario aborted at t = {t} s: {source}")]
pub struct SimulationAborted {
    pub t: f64,
    #[source]
    pub source: ModelError,
    pub trace: Vec<TraceSample>,
}

/// Channel-wise transmission ratios at one state [m/rad].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmissionRatio {
    /// `dX_total / dtheta_eff` at fixed winch angle.
    pub twist: f64,
    /// Winch channel alone: `dX_total / dphi_eff` with the twist channel idle.
    pub winch: f64,
    /// `dX_total / dphi_eff` at the current twist, including the change in
    /// twist contraction caused by shortening `L_c`.
    pub winch_coupled: f64,
}

/// Central differences of [`solve_total_contraction`] with step [`RATIO_STEP`],
/// solved at [`PRECISE_SOLVER`] tolerance.
///
/// The model is even in twist, so the backward twist point is taken at
/// `|theta - h|`. Where the forward point leaves the domain a backward
/// difference is used instead.
pub fn transmission_ratio(
    state: &ActuatorState,
    params: &StringParams,
    winch: &WinchGeometry,
    load: &LoadCondition,
) -> Result<TransmissionRatio> {
    let h = RATIO_STEP;
    let dx = |theta: f64, phi: f64| {
        solve_total_contraction_with(params, winch, load, theta, phi, &PRECISE_SOLVER)
            .map(|s| s.total_contraction)
    };
    let (theta, phi) = (state.theta_eff, state.phi_eff);
    let centre = dx(theta, phi)?;

    let twist = {
        let back = dx((theta - h).abs(), phi)?;
        match dx(theta + h, phi) {
            Ok(fwd) => (fwd - back) / (2.0 * h),
            Err(e) if e.is_domain() => (centre - back) / h,
            Err(e) => return Err(e),
        }
    };
    let coupled = {
        let back = dx(theta, phi - h)?;
        match dx(theta, phi + h) {
            Ok(fwd) => (fwd - back) / (2.0 * h),
            Err(e) if e.is_domain() => (centre - back) / h,
            Err(e) => return Err(e),
        }
    };
    let winch_only = {
        let back = dx(0.0, phi - h)?;
        match dx(0.0, phi + h) {
            Ok(fwd) => (fwd - back) / (2.0 * h),
            Err(e) if e.is_domain() => (dx(0.0, phi)? - back) / h,
            Err(e) => return Err(e),
        }
    };
    Ok(TransmissionRatio {
        twist,
        winch: winch_only,
        winch_coupled: coupled,
    })
}

struct Runner<'a> {
    sc: &'a Scenario,
    trace: Vec<TraceSample>,
}

impl Runner<'_> {
    fn sample(
        &self,
        t: f64,
        phase: usize,
        state: &ActuatorState,
        x_dot: f64,
    ) -> Result<TraceSample> {
        let sc = self.sc;
        let motors = motor_angles(state.phi_eff, state.theta_eff, &sc.train);
        let ratio = transmission_ratio(state, &sc.params, &sc.winch, &sc.load)?;
        let f_total = match sc.force_probe {
            Some(tau) => Some(
                twist_force(&sc.params, state.contracted_length, state.theta_eff)?
                    + winch_force(tau, &sc.winch)?,
            ),
            None => None,
        };
        Ok(TraceSample {
            t,
            phase,
            theta_eff: state.theta_eff,
            phi_eff: state.phi_eff,
            theta1: motors.theta1,
            theta2: motors.theta2,
            total_contraction: state.total_contraction,
            x_dot,
            f_total,
            ratio_twist: ratio.twist,
            ratio_winch: ratio.winch,
        })
    }

    fn abort(self, t: f64, source: ModelError) -> SimulationAborted {
        SimulationAborted {
            t,
            source,
            trace: self.trace,
        }
    }
}

/// Runs every phase of `sc` and returns one sample per step plus the initial one.
///
/// Each phase is split into `round(duration / dt)` equal steps (at least one),
/// so phase boundaries land exactly on their nominal times.
pub fn run(sc: &Scenario) -> std::result::Result<Vec<TraceSample>, SimulationAborted> {
    let mut runner = Runner {
        sc,
        trace: Vec::new(),
    };
    if let Err(e) = sc.validate() {
        return Err(runner.abort(0.0, e));
    }
    let solve = |theta: f64, phi: f64| {
        finite("theta_eff", theta)?;
        if theta < 0.0 {
            return Err(ModelError::InvalidParameter {
                name: "theta_eff",
                value: theta,
                reason: "untwisted past zero",
            });
        }
        solve_total_contraction_with(&sc.params, &sc.winch, &sc.load, theta, phi, &PRECISE_SOLVER)
    };

    let mut state = match solve(sc.initial_theta, sc.initial_phi) {
        Ok(s) => s,
        Err(e) => return Err(runner.abort(0.0, e)),
    };
    match runner.sample(0.0, 0, &state, 0.0) {
        Ok(s) => runner.trace.push(s),
        Err(e) => return Err(runner.abort(0.0, e)),
    }

    let mut prev: Option<ActuatorState> = None;
    let mut phase_start = 0.0;
    for (index, phase) in sc.phases.iter().enumerate() {
        let steps = ((phase.duration / sc.dt).round() as usize).max(1);
        let step = phase.duration / steps as f64;
        for k in 1..=steps {
            let t = phase_start + k as f64 * step;
            let next = (|| {
                let (theta_dot, phi_dot) = match phase.target {
                    PhaseTarget::Rates(r) => (r.theta_dot_eff, r.phi_dot_eff),
                    PhaseTarget::Hold => (0.0, 0.0),
                    PhaseTarget::Velocity(v) => {
                        let r_dot = r_var_rate(prev.as_ref(), &state, step)?;
                        let cmd = velocity_command(
                            v,
                            &sc.policy,
                            &state,
                            r_dot,
                            sc.winch.winch_radius,
                            &sc.control,
                        )?;
                        (cmd.theta_dot_eff, cmd.phi_dot_eff)
                    }
                };
                let next = solve(
                    state.theta_eff + theta_dot * step,
                    state.phi_eff + phi_dot * step,
                )?;
                let x_dot = (next.total_contraction - state.total_contraction) / step;
                let sample = runner.sample(t, index + 1, &next, x_dot)?;
                Ok((next, sample))
            })();
            match next {
                Ok((next, sample)) => {
                    runner.trace.push(sample);
                    prev = Some(state);
                    state = next;
                }
                Err(e) => return Err(runner.abort(t, e)),
            }
        }
        phase_start += phase.duration;
    }
    Ok(runner.trace)
}

/// Which channel a velocity sweep drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepChannel {
    Twist,
    Winch,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    /// Commanded effective rate [rad/s].
    pub rate: f64,
    /// Mean model output velocity over the run [m/s].
    pub velocity: f64,
}

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// Runs one constant-rate scenario of length `duration` per rate, starting
/// from `base`'s initial angles, and differences the trace end points.
pub fn velocity_sweep(
    base: &Scenario,
    channel: SweepChannel,
    rates: &[f64],
    duration: f64,
) -> std::result::Result<Vec<SweepPoint>, SimulationAborted> {
    rates
        .iter()
        .map(|&rate| {
            let mut sc = base.clone();
            sc.phases = vec![match channel {
                SweepChannel::Twist => Phase::rates(duration, rate, 0.0),
                SweepChannel::Winch => Phase::rates(duration, 0.0, rate),
            }];
            let trace = run(&sc)?;
            let first = trace.first().expect("run yields an initial sample");
            let last = trace.last().expect("run yields an initial sample");
            Ok(SweepPoint {
                rate,
                velocity: (last.total_contraction - first.total_contraction)
                    / (last.t - first.t),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioPoint {
    pub theta_eff: f64,
    pub phi_eff: f64,
    pub total_contraction: f64,
    pub ratio: TransmissionRatio,
}

/// Transmission ratios over the grid `thetas x phis` (theta-major order).
pub fn ratio_map(
    params: &StringParams,
    winch: &WinchGeometry,
    load: &LoadCondition,
    thetas: &[f64],
    phis: &[f64],
) -> Result<Vec<RatioPoint>> {
    let mut out = Vec::with_capacity(thetas.len() * phis.len());
    for &theta in thetas {
        for &phi in phis {
            let state = solve_total_contraction_with(params, winch, load, theta, phi, &PRECISE_SOLVER)?;
            out.push(RatioPoint {
                theta_eff: theta,
                phi_eff: phi,
                total_contraction: state.total_contraction,
                ratio: transmission_ratio(&state, params, winch, load)?,
            });
        }
    }
    Ok(out)
}
