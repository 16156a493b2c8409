//! Comma-separated output tables.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;
use twinch_core::TraceSample;

pub const TRACE_HEADER: [&str; 10] = [
    "t_s",
    "theta_eff_rad",
    "phi_eff_rad",
    "theta1_rad",
    "theta2_rad",
    "dX_total_mm",
    "x_dot_mm_s",
    "f_total_N",
    "tr_twist_mm_per_rad",
    "tr_winch_mm_per_rad",
];

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("nothing to write: empty sample list")]
    Empty,
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

/// Formats `v` with 9 significant digits, `%g` style: plain notation for
/// exponents in `[-5, 9)`, scientific otherwise, trailing zeros trimmed.
pub fn fmt_sig(v: f64) -> String {
    const DIGITS: usize = 9;
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    // exponent after rounding to the requested precision
    let sci = format!("{:.*e}", DIGITS - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..DIGITS as i32).contains(&exp) {
        let decimals = (DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Renders a table; `None` cells are left empty.
pub fn render_table(header: &[&str], rows: impl IntoIterator<Item = Vec<Option<f64>>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            if let Some(v) = cell {
                let _ = write!(out, "{}", fmt_sig(*v));
            }
        }
        out.push('\n');
    }
    out
}

/// Trace table in display units (mm for lengths); `f_total_N` is empty
/// unless the run had a force probe.
pub fn render_trace(samples: &[TraceSample]) -> Result<String, EmitError> {
    if samples.is_empty() {
        return Err(EmitError::Empty);
    }
    Ok(render_table(
        &TRACE_HEADER,
        samples.iter().map(|s| {
            vec![
                Some(s.t),
                Some(s.theta_eff),
                Some(s.phi_eff),
                Some(s.theta1),
                Some(s.theta2),
                Some(s.total_contraction * 1e3),
                Some(s.x_dot * 1e3),
                s.f_total,
                Some(s.ratio_twist * 1e3),
                Some(s.ratio_winch * 1e3),
            ]
        }),
    ))
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), EmitError> {
    fs::write(path, contents).map_err(|source| EmitError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes the trace table to `path`.
pub fn emit_trace(samples: &[TraceSample], path: &Path) -> Result<(), EmitError> {
    write_file(path, &render_trace(samples)?)
}
