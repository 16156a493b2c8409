//! Displacement model of the combined twist + winch actuator.
//!
//! Twisting a string of contracted length `L_c` through `theta` shortens it to
//! `X = sqrt(L_c^2 - theta^2 r^2)`. With the bundle radius growing as the
//! string shortens, `r = r0 sqrt(L_c / X)`, the length `X` appears on both
//! sides and is found numerically:
//!
//! ```text
//! X = sqrt(L_c^2 - theta^2 r0^2 L_c / X)      <=>      X^3 - L_c^2 X + theta^2 r0^2 L_c = 0
//! ```
//!
//! The cubic has a physical root continuing from `X = L_c` at zero twist. It
//! lives on `[L_c / sqrt(3), L_c]` and disappears in a fold once
//! `theta r0 > L_c sqrt(2 / (3 sqrt 3))`. Past the fold the model has no
//! solution; that is the overtwist boundary used throughout this crate.

use crate::error::{finite, require, ModelError, Result};
use crate::params::{LoadCondition, Stiffness, StringParams, WinchGeometry};

/// `sqrt(2 / (3 sqrt 3))`: largest `theta r0 / L_c` with a real solution of the
/// variable-radius model.
pub const FOLD_RATIO: f64 = 0.620_403_239_401_399_7;

/// Settings for the implicit length solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Weight of the new iterate in the damped fixed-point update.
    pub damping: f64,
    /// Bound on the fixed-point residual and on the estimated error [m].
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Inputs within this fraction of the overtwist boundary are rejected.
    pub overtwist_margin: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            damping: 0.5,
            tolerance: 1e-9,
            max_iterations: 200,
            overtwist_margin: 0.01,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    /// Zero twist; no iteration needed.
    Untwisted,
    FixedPoint,
    /// Fixed point stalled or left the domain; bracketed bisection finished the job.
    Bisection,
}

/// Solution of the variable-radius twist equation for one contracted length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwistSolution {
    /// Axial length of the twisted string [m].
    pub length: f64,
    /// Effective bundle radius `r0 sqrt(L_c / X)` [m].
    pub radius: f64,
    pub iterations: usize,
    pub method: SolveMethod,
}

/// Kinematic state of the actuator at one pair of effective angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActuatorState {
    /// Effective twist angle [rad].
    pub theta_eff: f64,
    /// Effective winch angle [rad].
    pub phi_eff: f64,
    /// Loaded, winch-adjusted string length `L_c` [m].
    pub contracted_length: f64,
    /// Axial length of the twisted section `X_total` [m].
    pub total_length: f64,
    /// Effective bundle radius [m].
    pub variable_radius: f64,
    /// Output displacement `L_c - X_total + r_w phi_eff` [m].
    pub total_contraction: f64,
}

impl ActuatorState {
    /// Contraction produced by twisting alone, `L_c - X_total`.
    pub fn twist_contraction(&self) -> f64 {
        self.contracted_length - self.total_length
    }
}

/// Largest admissible twist for a contracted length, after the safety margin.
pub fn twist_limit(contracted_length: f64, initial_radius: f64, margin: f64) -> f64 {
    (1.0 - margin) * FOLD_RATIO * contracted_length / initial_radius
}

fn check_twist_inputs(contracted_length: f64, initial_radius: f64, theta: f64) -> Result<()> {
    finite("contracted_length", contracted_length)?;
    require(
        contracted_length > 0.0,
        "contracted_length",
        contracted_length,
        "must be positive",
    )?;
    finite("initial_radius", initial_radius)?;
    require(
        initial_radius > 0.0,
        "initial_radius",
        initial_radius,
        "must be positive",
    )?;
    finite("theta_eff", theta)?;
    require(theta >= 0.0, "theta_eff", theta, "must be non-negative")
}

/// Length of a string twisted at constant radius: `sqrt(L_c^2 - theta^2 r0^2)`.
///
/// Rejects twists within 1% of `theta r0 = L_c`.
pub fn contracted_length(contracted_length: f64, initial_radius: f64, theta: f64) -> Result<f64> {
    check_twist_inputs(contracted_length, initial_radius, theta)?;
    let limit = (1.0 - SolverOptions::default().overtwist_margin) * contracted_length / initial_radius;
    if theta >= limit {
        return Err(ModelError::Overtwist { theta, limit });
    }
    let span = theta * initial_radius;
    Ok(((contracted_length - span) * (contracted_length + span)).sqrt())
}

/// Contraction from twisting with the variable-radius correction.
pub fn twist_contraction(contracted_length: f64, initial_radius: f64, theta: f64) -> Result<f64> {
    let sol = solve_twisted_length(
        contracted_length,
        initial_radius,
        theta,
        &SolverOptions::default(),
    )?;
    Ok(contracted_length - sol.length)
}

/// Solves `X = sqrt(L_c^2 - theta^2 r0^2 L_c / X)` for the physical root.
///
/// Damped fixed-point iteration starting from `X = L_c`; falls back to
/// bisection on the cubic over `[L_c / sqrt 3, L_c]` when the iteration stalls
/// or steps outside the domain.
pub fn solve_twisted_length(
    contracted_length: f64,
    initial_radius: f64,
    theta: f64,
    opts: &SolverOptions,
) -> Result<TwistSolution> {
    check_twist_inputs(contracted_length, initial_radius, theta)?;
    let l_c = contracted_length;
    if theta == 0.0 {
        return Ok(TwistSolution {
            length: l_c,
            radius: initial_radius,
            iterations: 0,
            method: SolveMethod::Untwisted,
        });
    }
    let limit = twist_limit(l_c, initial_radius, opts.overtwist_margin);
    if theta > limit {
        return Err(ModelError::Overtwist { theta, limit });
    }

    // c = theta^2 r0^2 L_c
    let c = theta * theta * initial_radius * initial_radius * l_c;
    let map = |x: f64| {
        let arg = l_c * l_c - c / x;
        (arg > 0.0).then(|| arg.sqrt())
    };

    let mut x = l_c;
    let mut iterations = 0;
    let mut fixed_point = None;
    while iterations < opts.max_iterations {
        iterations += 1;
        let Some(fx) = map(x) else { break };
        let residual = (fx - x).abs();
        // slope of the undamped map; the linearised distance to the root is
        // residual / (1 - slope)
        let slope = c / (2.0 * x * x * fx);
        if slope < 1.0 && residual <= opts.tolerance && residual / (1.0 - slope) <= 0.5 * opts.tolerance {
            fixed_point = Some(x);
            break;
        }
        x += opts.damping * (fx - x);
    }

    let (length, method) = match fixed_point {
        Some(x) => (x, SolveMethod::FixedPoint),
        None => {
            let (x, n) = bisect_cubic(l_c, c, opts.max_iterations);
            iterations += n;
            (x, SolveMethod::Bisection)
        }
    };

    let residual = match map(length) {
        Some(fx) => (fx - length).abs(),
        None => f64::INFINITY,
    };
    if !(residual <= opts.tolerance) {
        return Err(ModelError::NonConvergence {
            iterations,
            residual,
        });
    }

    Ok(TwistSolution {
        length,
        radius: initial_radius * (l_c / length).sqrt(),
        iterations,
        method,
    })
}

/// Bisection on `h(X) = X^3 - L_c^2 X + c` over `[L_c / sqrt 3, L_c]`, where
/// `h(L_c) = c > 0` and `h` is increasing.
fn bisect_cubic(l_c: f64, c: f64, max_iterations: usize) -> (f64, usize) {
    let h = |x: f64| x * (x * x - l_c * l_c) + c;
    let mut lo = l_c / 3f64.sqrt();
    let mut hi = l_c;
    let mut n = 0;
    // limit of 200 halvings is far beyond f64 resolution on any bracket
    while n < max_iterations.max(64) {
        n += 1;
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (0.5 * (lo + hi), n)
}

/// Contracted length under load after winching: `L + F_i / K - r_w phi_eff`.
///
/// The stiffness term is dropped for a rigid string.
pub fn loaded_length(
    params: &StringParams,
    load: &LoadCondition,
    phi_eff: f64,
    winch_radius: f64,
) -> Result<f64> {
    params.validate()?;
    load.validate()?;
    finite("phi_eff", phi_eff)?;
    finite("winch_radius", winch_radius)?;
    require(winch_radius > 0.0, "winch_radius", winch_radius, "must be positive")?;
    let stretch = match params.stiffness {
        Stiffness::Rigid => 0.0,
        Stiffness::Finite(k) => load.internal_force(params.initial_radius) / k,
    };
    let length = params.unloaded_length + stretch - winch_radius * phi_eff;
    if !(length > 0.0) {
        return Err(ModelError::StringExhausted { length });
    }
    Ok(length)
}

/// Total output contraction for given effective twist and winch angles.
pub fn solve_total_contraction(
    params: &StringParams,
    winch: &WinchGeometry,
    load: &LoadCondition,
    theta_eff: f64,
    phi_eff: f64,
) -> Result<ActuatorState> {
    solve_total_contraction_with(params, winch, load, theta_eff, phi_eff, &SolverOptions::default())
}

pub fn solve_total_contraction_with(
    params: &StringParams,
    winch: &WinchGeometry,
    load: &LoadCondition,
    theta_eff: f64,
    phi_eff: f64,
    opts: &SolverOptions,
) -> Result<ActuatorState> {
    winch.validate()?;
    finite("theta_eff", theta_eff)?;
    require(theta_eff >= 0.0, "theta_eff", theta_eff, "must be non-negative")?;
    let l_c = loaded_length(params, load, phi_eff, winch.winch_radius)?;
    let sol = solve_twisted_length(l_c, params.initial_radius, theta_eff, opts)?;
    Ok(ActuatorState {
        theta_eff,
        phi_eff,
        contracted_length: l_c,
        total_length: sol.length,
        variable_radius: sol.radius,
        total_contraction: l_c - sol.length + winch.winch_radius * phi_eff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rigid() -> StringParams {
        StringParams::rigid(0.5, 1e-3).unwrap()
    }

    fn winch() -> WinchGeometry {
        WinchGeometry::new(5e-3, 20e-3, 0.1).unwrap()
    }

    #[test]
    fn fold_ratio_constant() {
        assert!((FOLD_RATIO - (2.0 / (3.0 * 3f64.sqrt())).sqrt()).abs() < 1e-16);
    }

    #[test]
    fn constant_radius_length() {
        assert_eq!(contracted_length(0.5, 1e-3, 0.0).unwrap(), 0.5);
        assert!((contracted_length(0.5, 1e-3, 300.0).unwrap() - 0.4).abs() < 1e-15);
        assert!(matches!(
            contracted_length(0.5, 1e-3, 500.0),
            Err(ModelError::Overtwist { .. })
        ));
        assert!(contracted_length(0.5, 1e-3, -1.0).is_err());
    }

    #[test]
    fn zero_twist_no_contraction() {
        for l in [0.1, 0.5, 2.0] {
            assert_eq!(twist_contraction(l, 1e-3, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn twist_contraction_increasing() {
        let mut prev = 0.0;
        for i in 1..=300 {
            let dx = twist_contraction(0.5, 1e-3, i as f64).unwrap();
            assert!(dx > prev, "not increasing at {i}");
            prev = dx;
        }
    }

    #[test]
    fn beyond_fold_is_overtwist() {
        // fold at theta = 0.5 * 0.6204 / 1e-3 ~ 310.2 rad
        assert!(twist_contraction(0.5, 1e-3, 305.0).is_ok());
        assert!(matches!(
            twist_contraction(0.5, 1e-3, 308.0),
            Err(ModelError::Overtwist { .. })
        ));
        assert!(matches!(
            twist_contraction(0.5, 1e-3, 400.0),
            Err(ModelError::Overtwist { .. })
        ));
    }

    #[test]
    fn near_fold_uses_bisection() {
        // at 99% of the fold the map slope is ~0.71 and fixed point still wins
        let theta = twist_limit(0.5, 1e-3, 0.01);
        let sol = solve_twisted_length(0.5, 1e-3, theta, &SolverOptions::default()).unwrap();
        assert_eq!(sol.method, SolveMethod::FixedPoint);
        let fx = (0.25 - theta * theta * 1e-6 * 0.5 / sol.length).sqrt();
        assert!((fx - sol.length).abs() < 1e-9);

        let opts = SolverOptions {
            overtwist_margin: 1e-6,
            ..SolverOptions::default()
        };
        let theta = twist_limit(0.5, 1e-3, 1e-6);
        let sol = solve_twisted_length(0.5, 1e-3, theta, &opts).unwrap();
        assert_eq!(sol.method, SolveMethod::Bisection);
        let fx = (0.25 - theta * theta * 1e-6 * 0.5 / sol.length).sqrt();
        assert!((fx - sol.length).abs() < 1e-9);
    }

    #[test]
    fn loaded_length_cases() {
        let load = LoadCondition::new(30.0, 0.0).unwrap();
        assert_eq!(loaded_length(&rigid(), &load, 0.0, 5e-3).unwrap(), 0.5);
        let stiff = StringParams::new(0.5, 1e-3, Stiffness::Finite(60e3)).unwrap();
        assert!((loaded_length(&stiff, &load, 0.0, 5e-3).unwrap() - 0.5005).abs() < 1e-15);
        let half = 0.5 / (2.0 * 5e-3);
        assert!((loaded_length(&rigid(), &load, half, 5e-3).unwrap() - 0.25).abs() < 1e-15);
        assert!(matches!(
            loaded_length(&rigid(), &load, 100.0, 5e-3),
            Err(ModelError::StringExhausted { .. })
        ));
    }

    #[test]
    fn identity_and_pure_winch() {
        let s = solve_total_contraction(&rigid(), &winch(), &LoadCondition::default(), 0.0, 0.0)
            .unwrap();
        assert_eq!(s.total_contraction, 0.0);
        let s = solve_total_contraction(&rigid(), &winch(), &LoadCondition::default(), 0.0, 7.3)
            .unwrap();
        assert_eq!(s.total_contraction, 5e-3 * 7.3);
        assert_eq!(s.variable_radius, 1e-3);
    }

    #[test]
    fn deeper_winch_more_twist_displacement() {
        let load = LoadCondition::default();
        let shallow = solve_total_contraction(&rigid(), &winch(), &load, 200.0, 12.17e-3 / 5e-3)
            .unwrap();
        let deep = solve_total_contraction(&rigid(), &winch(), &load, 200.0, 90.56e-3 / 5e-3)
            .unwrap();
        assert!(deep.twist_contraction() > shallow.twist_contraction());
    }

    #[test]
    fn rejects_negative_twist() {
        let r = solve_total_contraction(&rigid(), &winch(), &LoadCondition::default(), -0.1, 0.0);
        assert!(matches!(r, Err(ModelError::InvalidParameter { name: "theta_eff", .. })));
    }
}
