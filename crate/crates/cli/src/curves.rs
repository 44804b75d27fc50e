//! Sampled potential curves for plotting.

use std::fmt::Write as _;
use std::str::FromStr;

use clap::ValueEnum;
use spectra_core::PotentialParams;

use crate::error::{CliError, CliResult};
use crate::report::e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    V,
    U,
    Both,
}

impl FromStr for Which {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Which as ValueEnum>::from_str(s, true)
    }
}

/// CSV of `V` and/or `U` on a uniform grid over `[0, r_max]`.
///
/// `V` is singular at the origin, so its first cell is left empty.
pub fn emit_curves(p: &PotentialParams, r_max: f64, points: usize, which: Which) -> CliResult<String> {
    if !(r_max > 0.0 && r_max.is_finite()) {
        return Err(CliError::Invalid(format!("r-max must be positive (got {r_max})")));
    }
    if points < 2 {
        return Err(CliError::Invalid(format!("points must be at least 2 (got {points})")));
    }
    let (with_v, with_u) = (which != Which::U, which != Which::V);
    let mut out = String::from("r");
    if with_v {
        out.push_str(",V");
    }
    if with_u {
        out.push_str(",U");
    }
    out.push('\n');
    for i in 0..points {
        let r = if i == points - 1 {
            r_max
        } else {
            r_max * i as f64 / (points - 1) as f64
        };
        out.push_str(&e12(r));
        if with_v {
            out.push(',');
            if r > 0.0 {
                out.push_str(&e12(p.eval_v(r)?));
            }
        }
        if with_u {
            let _ = write!(out, ",{}", e12(p.eval_u(r)));
        }
        out.push('\n');
    }
    Ok(out)
}
