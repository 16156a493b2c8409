//! Unit-suffixed scalars such as `"12.5 mm"` or `"2 rad/s"`.
//!
//! Every physical value in a config file carries an explicit unit; bare
//! numbers are rejected. Parsed values are SI.

use std::f64::consts::PI;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Length,
    Angle,
    Force,
    Torque,
    Stiffness,
    Time,
    AngularVelocity,
    Velocity,
}

impl Dimension {
    /// Accepted suffixes and their factor to SI.
    fn units(self) -> &'static [(&'static str, f64)] {
        match self {
            Dimension::Length => &[("m", 1.0), ("cm", 1e-2), ("mm", 1e-3), ("um", 1e-6)],
            Dimension::Angle => &[
                ("rad", 1.0),
                ("deg", PI / 180.0),
                ("turn", 2.0 * PI),
                ("turns", 2.0 * PI),
            ],
            Dimension::Force => &[("N", 1.0), ("kN", 1e3), ("mN", 1e-3)],
            Dimension::Torque => &[
                ("N*m", 1.0),
                ("N·m", 1.0),
                ("Nm", 1.0),
                ("N*mm", 1e-3),
                ("N·mm", 1e-3),
                ("mN*m", 1e-3),
                ("mN·m", 1e-3),
            ],
            Dimension::Stiffness => &[("N/m", 1.0), ("kN/m", 1e3), ("N/mm", 1e3)],
            Dimension::Time => &[("s", 1.0), ("ms", 1e-3), ("us", 1e-6), ("min", 60.0)],
            Dimension::AngularVelocity => &[
                ("rad/s", 1.0),
                ("deg/s", PI / 180.0),
                ("rpm", 2.0 * PI / 60.0),
            ],
            Dimension::Velocity => &[("m/s", 1.0), ("mm/s", 1e-3), ("cm/s", 1e-2)],
        }
    }

    /// Unit written back out when serialising.
    pub fn si_unit(self) -> &'static str {
        match self {
            Dimension::Length => "m",
            Dimension::Angle => "rad",
            Dimension::Force => "N",
            Dimension::Torque => "N*m",
            Dimension::Stiffness => "N/m",
            Dimension::Time => "s",
            Dimension::AngularVelocity => "rad/s",
            Dimension::Velocity => "m/s",
        }
    }

    fn name(self) -> &'static str {
        match self {
            Dimension::Length => "length",
            Dimension::Angle => "angle",
            Dimension::Force => "force",
            Dimension::Torque => "torque",
            Dimension::Stiffness => "stiffness",
            Dimension::Time => "time",
            Dimension::AngularVelocity => "angular velocity",
            Dimension::Velocity => "velocity",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitError {
    pub input: String,
    pub message: String,
}

impl fmt::Display for UnitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}`: {}", self.input, self.message)
    }
}

impl std::error::Error for UnitError {}

/// Parses `"<number> <unit>"` (the space is optional) into SI.
pub fn parse_quantity(text: &str, dim: Dimension) -> Result<f64, UnitError> {
    let err = |message: String| UnitError {
        input: text.to_string(),
        message,
    };
    let trimmed = text.trim();
    let (number, unit) = split_number(trimmed);
    let unit = unit.trim();
    if number.is_empty() {
        return Err(err("expected a number followed by a unit".into()));
    }
    let value: f64 = number
        .parse()
        .map_err(|_| err(format!("`{number}` is not a number")))?;
    if !value.is_finite() {
        return Err(err("value must be finite".into()));
    }
    if unit.is_empty() {
        return Err(err(format!(
            "missing unit; expected a {} such as `{value} {}`",
            dim.name(),
            dim.si_unit()
        )));
    }
    let factor = dim
        .units()
        .iter()
        .find(|(u, _)| *u == unit)
        .map(|(_, f)| *f)
        .ok_or_else(|| {
            let known: Vec<&str> = dim.units().iter().map(|(u, _)| *u).collect();
            err(format!(
                "unknown {} unit `{unit}` (expected one of {})",
                dim.name(),
                known.join(", ")
            ))
        })?;
    Ok(value * factor)
}

/// Formats an SI value so that [`parse_quantity`] reads it back bit-exactly.
pub fn format_quantity(value: f64, dim: Dimension) -> String {
    format!("{value:?} {}", dim.si_unit())
}

fn split_number(s: &str) -> (&str, &str) {
    let bytes = s.as_bytes();
    let mut end = 0;
    let mut seen_digit = false;
    while end < bytes.len() {
        let c = bytes[end];
        let ok = match c {
            b'0'..=b'9' => {
                seen_digit = true;
                true
            }
            b'.' => true,
            b'+' | b'-' => end == 0 || matches!(bytes[end - 1], b'e' | b'E'),
            // exponent only when followed by a digit or sign, so "5 e" isn't eaten
            b'e' | b'E' => {
                seen_digit
                    && bytes
                        .get(end + 1)
                        .is_some_and(|n| n.is_ascii_digit() || *n == b'+' || *n == b'-')
            }
            _ => false,
        };
        if !ok {
            break;
        }
        end += 1;
    }
    (&s[..end], &s[end..])
}
