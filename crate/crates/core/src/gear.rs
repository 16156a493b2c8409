//! Motor-side to effective angle and velocity maps through the turret gearing.
//!
//! Motor 2 spins the turret through a train of `b` gears with ratio `N_theta`;
//! motor 1 drives the winch through `a` bevel gears with ratio `N_phi` housed
//! in the turret. Because the bevel stage rides on the turret, turret rotation
//! alone also turns the winch.

use crate::error::{finite, require, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GearTrain {
    pub bevel_gear_count: u32,
    pub bevel_ratio: f64,
    pub turret_gear_count: u32,
    pub turret_ratio: f64,
}

impl Default for GearTrain {
    /// Two-gear stages with 2:1 reductions on both channels.
    fn default() -> Self {
        Self {
            bevel_gear_count: 2,
            bevel_ratio: 2.0,
            turret_gear_count: 2,
            turret_ratio: 2.0,
        }
    }
}

impl GearTrain {
    pub fn new(
        bevel_gear_count: u32,
        bevel_ratio: f64,
        turret_gear_count: u32,
        turret_ratio: f64,
    ) -> Result<Self> {
        let g = Self {
            bevel_gear_count,
            bevel_ratio,
            turret_gear_count,
            turret_ratio,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        require(
            self.bevel_gear_count >= 1,
            "bevel_gear_count",
            self.bevel_gear_count as f64,
            "must be at least 1",
        )?;
        require(
            self.turret_gear_count >= 1,
            "turret_gear_count",
            self.turret_gear_count as f64,
            "must be at least 1",
        )?;
        finite("bevel_ratio", self.bevel_ratio)?;
        require(self.bevel_ratio > 0.0, "bevel_ratio", self.bevel_ratio, "must be positive")?;
        finite("turret_ratio", self.turret_ratio)?;
        require(
            self.turret_ratio > 0.0,
            "turret_ratio",
            self.turret_ratio,
            "must be positive",
        )
    }

    /// `(-1)^(a+1)`: direction flip of the bevel stage.
    pub fn bevel_parity(&self) -> f64 {
        parity(self.bevel_gear_count)
    }

    /// `(-1)^(b+1)`: direction flip of the turret stage.
    pub fn turret_parity(&self) -> f64 {
        parity(self.turret_gear_count)
    }
}

fn parity(count: u32) -> f64 {
    if count % 2 == 1 {
        1.0
    } else {
        -1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MotorAngles {
    pub theta1: f64,
    pub theta2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MotorRates {
    pub theta1_dot: f64,
    pub theta2_dot: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EffectiveAngles {
    pub phi_eff: f64,
    pub theta_eff: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EffectiveRates {
    pub phi_dot_eff: f64,
    pub theta_dot_eff: f64,
}

pub fn effective_angles(motors: MotorAngles, train: &GearTrain) -> EffectiveAngles {
    let theta_eff = motors.theta2 * train.turret_parity() / train.turret_ratio;
    let phi_eff = (motors.theta1 * train.bevel_parity() + theta_eff) / train.bevel_ratio;
    EffectiveAngles { phi_eff, theta_eff }
}

/// Inverse of [`effective_angles`].
pub fn motor_angles(phi_eff: f64, theta_eff: f64, train: &GearTrain) -> MotorAngles {
    // parities are +-1, so dividing by them is multiplying
    MotorAngles {
        theta1: (train.bevel_ratio * phi_eff - theta_eff) * train.bevel_parity(),
        theta2: train.turret_ratio * theta_eff * train.turret_parity(),
    }
}

pub fn motor_velocities(rates: EffectiveRates, train: &GearTrain) -> MotorRates {
    MotorRates {
        theta1_dot: (train.bevel_ratio * rates.phi_dot_eff - rates.theta_dot_eff)
            * train.bevel_parity(),
        theta2_dot: train.turret_ratio * rates.theta_dot_eff * train.turret_parity(),
    }
}

/// Inverse of [`motor_velocities`].
pub fn effective_rates(motors: MotorRates, train: &GearTrain) -> EffectiveRates {
    let theta_dot_eff = motors.theta2_dot * train.turret_parity() / train.turret_ratio;
    let phi_dot_eff = (motors.theta1_dot * train.bevel_parity() + theta_dot_eff) / train.bevel_ratio;
    EffectiveRates {
        phi_dot_eff,
        theta_dot_eff,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn train(a: u32, na: f64, b: u32, nb: f64) -> GearTrain {
        GearTrain::new(a, na, b, nb).unwrap()
    }

    #[test]
    fn zero_maps_to_zero() {
        let t = GearTrain::default();
        assert_eq!(
            effective_angles(MotorAngles::default(), &t),
            EffectiveAngles::default()
        );
        let m = motor_angles(0.0, 0.0, &t);
        assert_eq!(m.theta1, 0.0);
        assert_eq!(m.theta2, 0.0);
        let v = motor_velocities(EffectiveRates::default(), &t);
        assert_eq!(v.theta1_dot, 0.0);
        assert_eq!(v.theta2_dot, 0.0);
    }

    #[test]
    fn motor_one_only() {
        let t = train(2, 2.0, 2, 2.0);
        let e = effective_angles(
            MotorAngles {
                theta1: 2.0 * PI,
                theta2: 0.0,
            },
            &t,
        );
        assert!((e.phi_eff + PI).abs() < 1e-15);
        assert_eq!(e.theta_eff, 0.0);

        let m = motor_angles(-PI, 0.0, &t);
        assert!((m.theta1 - 2.0 * PI).abs() < 1e-15);
        assert_eq!(m.theta2, 0.0);
    }

    #[test]
    fn turret_rotation_turns_winch() {
        let t = train(2, 2.0, 2, 2.0);
        let e = effective_angles(
            MotorAngles {
                theta1: 0.0,
                theta2: 4.0 * PI,
            },
            &t,
        );
        assert!((e.theta_eff + 2.0 * PI).abs() < 1e-15);
        assert!((e.phi_eff + PI).abs() < 1e-15);
    }

    #[test]
    fn winch_rate_to_motor_one() {
        let t = train(2, 2.0, 2, 2.0);
        let v = motor_velocities(
            EffectiveRates {
                phi_dot_eff: 1.0,
                theta_dot_eff: 0.0,
            },
            &t,
        );
        assert_eq!(v.theta1_dot, -2.0);
        assert_eq!(v.theta2_dot, 0.0);
        let back = effective_rates(v, &t);
        assert_eq!(back.phi_dot_eff, 1.0);
        assert_eq!(back.theta_dot_eff, 0.0);
    }

    #[test]
    fn odd_gear_counts_keep_direction() {
        let t = train(1, 3.0, 3, 4.0);
        assert_eq!(t.bevel_parity(), 1.0);
        assert_eq!(t.turret_parity(), 1.0);
        let e = effective_angles(
            MotorAngles {
                theta1: 3.0,
                theta2: 4.0,
            },
            &t,
        );
        assert!((e.theta_eff - 1.0).abs() < 1e-15);
        assert!((e.phi_eff - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_train() {
        assert!(GearTrain::new(0, 2.0, 2, 2.0).is_err());
        assert!(GearTrain::new(2, 0.0, 2, 2.0).is_err());
        assert!(GearTrain::new(2, 2.0, 2, f64::INFINITY).is_err());
    }
}
