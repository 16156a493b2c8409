//! Velocity commands: split a desired output velocity between the twist and
//! winch channels, then invert each channel's displacement law.

use crate::actuator::ActuatorState;
use crate::error::{finite, require, ModelError, Result};

/// How a desired output velocity is shared between the two channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AllocationPolicy {
    WinchOnly,
    TwistOnly,
    /// Winch until the total contraction reaches `switch_contraction` [m], then twist.
    WinchThenTwist { switch_contraction: f64 },
    /// Fixed share of the velocity goes to twisting.
    Proportional { twist_fraction: f64 },
}

impl Default for AllocationPolicy {
    fn default() -> Self {
        AllocationPolicy::WinchThenTwist {
            switch_contraction: 0.05,
        }
    }
}

impl AllocationPolicy {
    pub fn validate(&self) -> Result<()> {
        match *self {
            AllocationPolicy::WinchThenTwist { switch_contraction } => {
                finite("switch_contraction", switch_contraction)?;
                require(
                    switch_contraction >= 0.0,
                    "switch_contraction",
                    switch_contraction,
                    "must be non-negative",
                )
            }
            AllocationPolicy::Proportional { twist_fraction } => require(
                (0.0..=1.0).contains(&twist_fraction),
                "twist_fraction",
                twist_fraction,
                "out of range [0, 1]",
            ),
            _ => Ok(()),
        }
    }
}

/// Linear velocity share per channel [m/s]; the two always sum to the request.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityAllocation {
    pub x_dot_theta: f64,
    pub x_dot_phi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityCommand {
    pub theta_dot_eff: f64,
    pub phi_dot_eff: f64,
    /// Set when the singular-twist rule or the rate cap changed the command.
    pub saturated: bool,
}

/// Limits applied around the twist-channel singularity at zero twist.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlSettings {
    /// Twist [rad] at or below which the twist law is not evaluated.
    pub theta_min: f64,
    /// Optional cap on `|theta_dot_eff|` [rad/s]. When set, singular twist
    /// requests produce a capped command instead of an error.
    pub theta_dot_max: Option<f64>,
}

impl Default for ControlSettings {
    fn default() -> Self {
        Self {
            theta_min: 1.0,
            theta_dot_max: None,
        }
    }
}

impl ControlSettings {
    pub fn validate(&self) -> Result<()> {
        finite("theta_min", self.theta_min)?;
        require(self.theta_min > 0.0, "theta_min", self.theta_min, "must be positive")?;
        if let Some(max) = self.theta_dot_max {
            finite("theta_dot_max", max)?;
            require(max > 0.0, "theta_dot_max", max, "must be positive")?;
        }
        Ok(())
    }
}

pub fn allocate(
    x_dot_des: f64,
    policy: &AllocationPolicy,
    state: &ActuatorState,
) -> VelocityAllocation {
    let twist_share = match *policy {
        AllocationPolicy::WinchOnly => 0.0,
        AllocationPolicy::TwistOnly => x_dot_des,
        AllocationPolicy::WinchThenTwist { switch_contraction } => {
            if state.total_contraction < switch_contraction {
                0.0
            } else {
                x_dot_des
            }
        }
        AllocationPolicy::Proportional { twist_fraction } => twist_fraction * x_dot_des,
    };
    VelocityAllocation {
        x_dot_theta: twist_share,
        x_dot_phi: x_dot_des - twist_share,
    }
}

/// Twist rate producing contraction rate `x_dot` at twist `theta`, for
/// contracted length `l_c`, bundle radius `r` and radius rate `r_dot`.
///
/// `theta_dot = x_dot sqrt(L_c^2 - theta^2 r^2) / (theta r^2) - theta r_dot / r`
pub fn twist_rate(x_dot: f64, theta: f64, l_c: f64, r: f64, r_dot: f64) -> Result<f64> {
    let span = theta * r;
    if !(span < l_c) {
        return Err(ModelError::Overtwist {
            theta,
            limit: l_c / r,
        });
    }
    let x = ((l_c - span) * (l_c + span)).sqrt();
    Ok(x_dot * x / (theta * r * r) - theta * r_dot / r)
}

/// Twist-channel velocity law evaluated at `state`.
///
/// Below `settings.theta_min` the law is singular: returns
/// [`ModelError::Singularity`], or a saturated command if a rate cap is set.
pub fn twist_velocity_command(
    x_dot_theta: f64,
    state: &ActuatorState,
    r_dot: f64,
    settings: &ControlSettings,
) -> Result<(f64, bool)> {
    finite("x_dot_theta", x_dot_theta)?;
    finite("r_dot", r_dot)?;
    settings.validate()?;
    if !(state.theta_eff > settings.theta_min) {
        return match settings.theta_dot_max {
            Some(max) if x_dot_theta > 0.0 => Ok((max, true)),
            Some(_) => Ok((0.0, true)),
            None => Err(ModelError::Singularity {
                theta: state.theta_eff,
                theta_min: settings.theta_min,
            }),
        };
    }
    let rate = twist_rate(
        x_dot_theta,
        state.theta_eff,
        state.contracted_length,
        state.variable_radius,
        r_dot,
    )?;
    if !rate.is_finite() {
        return Err(ModelError::InvalidParameter {
            name: "x_dot_theta",
            value: x_dot_theta,
            reason: "produces a non-finite twist rate",
        });
    }
    match settings.theta_dot_max {
        Some(max) if rate.abs() > max => Ok((max.copysign(rate), true)),
        _ => Ok((rate, false)),
    }
}

/// `phi_dot = x_dot_phi / r_w`.
pub fn winch_velocity_command(x_dot_phi: f64, winch_radius: f64) -> Result<f64> {
    finite("x_dot_phi", x_dot_phi)?;
    finite("winch_radius", winch_radius)?;
    require(winch_radius > 0.0, "winch_radius", winch_radius, "must be positive")?;
    Ok(x_dot_phi / winch_radius)
}

/// Backward difference of the bundle radius; zero on the first step.
pub fn r_var_rate(prev: Option<&ActuatorState>, curr: &ActuatorState, dt: f64) -> Result<f64> {
    finite("dt", dt)?;
    require(dt > 0.0, "dt", dt, "must be positive")?;
    Ok(match prev {
        Some(p) => (curr.variable_radius - p.variable_radius) / dt,
        None => 0.0,
    })
}

/// Full command for a desired output velocity.
///
/// Under [`AllocationPolicy::WinchThenTwist`] a twist request at or below
/// `theta_min` is handed to the winch instead (flagged as saturated). An idle
/// twist channel commands zero twist rate.
pub fn velocity_command(
    x_dot_des: f64,
    policy: &AllocationPolicy,
    state: &ActuatorState,
    r_dot: f64,
    winch_radius: f64,
    settings: &ControlSettings,
) -> Result<VelocityCommand> {
    finite("x_dot_des", x_dot_des)?;
    policy.validate()?;
    let mut alloc = allocate(x_dot_des, policy, state);
    let mut saturated = false;

    if matches!(policy, AllocationPolicy::WinchThenTwist { .. })
        && alloc.x_dot_theta != 0.0
        && !(state.theta_eff > settings.theta_min)
    {
        alloc = VelocityAllocation {
            x_dot_theta: 0.0,
            x_dot_phi: x_dot_des,
        };
        saturated = true;
    }

    let theta_dot_eff = if alloc.x_dot_theta == 0.0 {
        0.0
    } else {
        let (rate, sat) = twist_velocity_command(alloc.x_dot_theta, state, r_dot, settings)?;
        saturated |= sat;
        rate
    };
    let phi_dot_eff = winch_velocity_command(alloc.x_dot_phi, winch_radius)?;
    Ok(VelocityCommand {
        theta_dot_eff,
        phi_dot_eff,
        saturated,
    })
}
