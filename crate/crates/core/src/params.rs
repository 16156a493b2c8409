//! Physical description of the string, the winch stage and the external load.
//!
//! All quantities are SI: metres, radians, newtons.

use crate::error::{finite, require, Result};

/// Axial stiffness of the string.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stiffness {
    /// Infinitely stiff string; the load term drops out of the contracted length.
    Rigid,
    /// Finite stiffness in N/m.
    Finite(f64),
}

impl Stiffness {
    pub fn is_rigid(&self) -> bool {
        matches!(self, Stiffness::Rigid)
    }

    pub fn value(&self) -> Option<f64> {
        match *self {
            Stiffness::Rigid => None,
            Stiffness::Finite(k) => Some(k),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StringParams {
    /// Unloaded, untwisted string length `L` [m].
    pub unloaded_length: f64,
    /// Unloaded string radius `r0` [m].
    pub initial_radius: f64,
    pub stiffness: Stiffness,
}

impl StringParams {
    pub fn new(unloaded_length: f64, initial_radius: f64, stiffness: Stiffness) -> Result<Self> {
        let p = Self {
            unloaded_length,
            initial_radius,
            stiffness,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn rigid(unloaded_length: f64, initial_radius: f64) -> Result<Self> {
        Self::new(unloaded_length, initial_radius, Stiffness::Rigid)
    }

    pub fn validate(&self) -> Result<()> {
        finite("unloaded_length", self.unloaded_length)?;
        require(
            self.unloaded_length > 0.0,
            "unloaded_length",
            self.unloaded_length,
            "must be positive",
        )?;
        finite("initial_radius", self.initial_radius)?;
        require(
            self.initial_radius > 0.0,
            "initial_radius",
            self.initial_radius,
            "must be positive",
        )?;
        if let Stiffness::Finite(k) = self.stiffness {
            finite("stiffness", k)?;
            require(k > 0.0, "stiffness", k, "must be positive")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WinchGeometry {
    /// Spool radius `r_w` [m].
    pub winch_radius: f64,
    /// Distance from the spool centre to the exit bushing [m].
    pub bushing_distance: f64,
    /// Sliding friction coefficient between string and exit bushing.
    pub friction_coeff: f64,
}

impl WinchGeometry {
    pub fn new(winch_radius: f64, bushing_distance: f64, friction_coeff: f64) -> Result<Self> {
        let w = Self {
            winch_radius,
            bushing_distance,
            friction_coeff,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        finite("winch_radius", self.winch_radius)?;
        require(
            self.winch_radius > 0.0,
            "winch_radius",
            self.winch_radius,
            "must be positive",
        )?;
        finite("bushing_distance", self.bushing_distance)?;
        require(
            self.bushing_distance > 0.0,
            "bushing_distance",
            self.bushing_distance,
            "must be positive",
        )?;
        finite("friction_coeff", self.friction_coeff)?;
        require(
            (0.0..1.0).contains(&self.friction_coeff),
            "friction_coeff",
            self.friction_coeff,
            "out of range [0, 1)",
        )
    }
}

/// External load acting on the output end of the string.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LoadCondition {
    /// Axial force `F_x` [N].
    pub axial_force: f64,
    /// External twisting moment `tau_L` [N m].
    pub twist_moment: f64,
}

impl LoadCondition {
    pub fn new(axial_force: f64, twist_moment: f64) -> Result<Self> {
        let l = Self {
            axial_force,
            twist_moment,
        };
        l.validate()?;
        Ok(l)
    }

    pub fn axial(axial_force: f64) -> Result<Self> {
        Self::new(axial_force, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        finite("axial_force", self.axial_force)?;
        require(
            self.axial_force >= 0.0,
            "axial_force",
            self.axial_force,
            "must be non-negative",
        )?;
        finite("twist_moment", self.twist_moment)?;
        require(
            self.twist_moment >= 0.0,
            "twist_moment",
            self.twist_moment,
            "must be non-negative",
        )
    }

    /// Combined internal force `F_i = sqrt(F_tau^2 + F_x^2)` with `F_tau = tau_L / r0`.
    pub fn internal_force(&self, initial_radius: f64) -> f64 {
        let f_tau = self.twist_moment / initial_radius;
        f_tau.hypot(self.axial_force)
    }
}
