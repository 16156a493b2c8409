//! Quasi-static output force with the output end stalled.
//!
//! Twisting a string whose ends cannot move stretches it along the helix; the
//! axial component of that stretch force is the twist contribution. The winch
//! contribution is spool torque over radius, less the friction where the
//! string slides over the exit bushing.

use crate::error::{finite, require, ModelError, Result};
use crate::params::{Stiffness, StringParams, WinchGeometry};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceBreakdown {
    pub f_twist: f64,
    pub f_winch: f64,
    pub f_total: f64,
    pub helix_angle: f64,
    pub exit_angle: f64,
}

/// Torque applied to the winch spool [N m].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct WinchTorque(f64);

impl WinchTorque {
    pub fn new(tau: f64) -> Result<Self> {
        finite("winch_torque", tau)?;
        require(tau >= 0.0, "winch_torque", tau, "must be non-negative")?;
        Ok(Self(tau))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Helix angle of a string of axial length `x` twisted through `theta`:
/// `sin(alpha) = theta r0 / sqrt(x^2 + theta^2 r0^2)`.
pub fn helix_angle(x: f64, theta: f64, initial_radius: f64) -> Result<f64> {
    finite("length", x)?;
    require(x > 0.0, "length", x, "must be positive")?;
    finite("theta", theta)?;
    require(theta >= 0.0, "theta", theta, "must be non-negative")?;
    finite("initial_radius", initial_radius)?;
    require(initial_radius > 0.0, "initial_radius", initial_radius, "must be positive")?;
    // atan2 keeps full precision at both ends of the range
    Ok((theta * initial_radius).atan2(x))
}

/// Axial force from twisting a fixed-end string of length `x` through `theta`.
///
/// The radius stays at `r0` since the length cannot change. Needs a finite
/// stiffness.
pub fn twist_force(params: &StringParams, x: f64, theta: f64) -> Result<f64> {
    params.validate()?;
    let k = match params.stiffness {
        Stiffness::Rigid => {
            return Err(ModelError::RigidString(
                "twist force needs a finite stiffness",
            ))
        }
        Stiffness::Finite(k) => k,
    };
    let alpha = helix_angle(x, theta, params.initial_radius)?;
    let span = theta * params.initial_radius;
    // sqrt(x^2 + s^2) - x, rearranged to avoid cancellation at small twist
    let hyp = x.hypot(span);
    let stretch = span * span / (hyp + x);
    let force = k * stretch * alpha.sin();
    if !force.is_finite() {
        return Err(ModelError::InvalidParameter {
            name: "theta",
            value: theta,
            reason: "produces a non-finite twist force",
        });
    }
    Ok(force)
}

/// `gamma = atan(r_w / d_winch)`.
pub fn exit_angle(winch: &WinchGeometry) -> Result<f64> {
    winch.validate()?;
    Ok(winch.winch_radius.atan2(winch.bushing_distance))
}

/// `(tau_w / r_w) (1 - mu sin(gamma))`.
pub fn winch_force(tau: WinchTorque, winch: &WinchGeometry) -> Result<f64> {
    let gamma = exit_angle(winch)?;
    Ok(tau.value() / winch.winch_radius * (1.0 - gamma.sin() * winch.friction_coeff))
}

pub fn total_force(f_twist: f64, f_winch: f64) -> f64 {
    f_twist + f_winch
}

pub fn force_breakdown(
    params: &StringParams,
    winch: &WinchGeometry,
    x: f64,
    theta: f64,
    tau: WinchTorque,
) -> Result<ForceBreakdown> {
    let f_twist = twist_force(params, x, theta)?;
    let f_winch = winch_force(tau, winch)?;
    Ok(ForceBreakdown {
        f_twist,
        f_winch,
        f_total: total_force(f_twist, f_winch),
        helix_angle: helix_angle(x, theta, params.initial_radius)?,
        exit_angle: exit_angle(winch)?,
    })
}

/// Smallest twist at which the twist force matches the winch force produced
/// by `tau`, found by bisection on `[0, theta_max]`.
///
/// Returns `None` when twisting up to `theta_max` never catches up.
pub fn dominance_crossover(
    params: &StringParams,
    winch: &WinchGeometry,
    x: f64,
    tau: WinchTorque,
    theta_max: f64,
) -> Result<Option<f64>> {
    finite("theta_max", theta_max)?;
    require(theta_max > 0.0, "theta_max", theta_max, "must be positive")?;
    let target = winch_force(tau, winch)?;
    if target == 0.0 {
        return Ok(Some(0.0));
    }
    if twist_force(params, x, theta_max)? < target {
        return Ok(None);
    }
    let (mut lo, mut hi) = (0.0, theta_max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if twist_force(params, x, mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(hi))
}
