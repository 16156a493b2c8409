use thiserror::Error;

/// Failures raised by the actuator models.
///
/// Every path that would otherwise produce a non-finite number ends up here.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{name} {reason} (got {value})")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// Twist beyond the admissible limit for the current contracted length.
    #[error("overtwist: theta_eff = {theta} rad exceeds the admissible limit {limit} rad")]
    Overtwist { theta: f64, limit: f64 },

    /// The winch has paid out (or wound in) the whole string.
    #[error("string fully wound: contracted length would be {length} m")]
    StringExhausted { length: f64 },

    #[error("solver did not converge after {iterations} iterations (residual {residual:e} m)")]
    NonConvergence { iterations: usize, residual: f64 },

    /// Twist-channel velocity law evaluated at or below the singular threshold.
    #[error("twist command singular: theta_eff = {theta} rad <= theta_min = {theta_min} rad")]
    Singularity { theta: f64, theta_min: f64 },

    #[error("rigid string: {0}")]
    RigidString(&'static str),
}

impl ModelError {
    /// True for errors caused by leaving the model's valid domain (as opposed
    /// to bad parameters or numerical failure).
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            ModelError::Overtwist { .. }
                | ModelError::StringExhausted { .. }
                | ModelError::Singularity { .. }
                | ModelError::RigidString(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, ModelError>;

pub(crate) fn require(
    ok: bool,
    name: &'static str,
    value: f64,
    reason: &'static str,
) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter {
            name,
            value,
            reason,
        })
    }
}

pub(crate) fn finite(name: &'static str, value: f64) -> Result<()> {
    require(value.is_finite(), name, value, "must be finite")
}
