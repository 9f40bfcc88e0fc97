//! z-test of attributed values against their uncertainty.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::Z_95;

pub const DEFAULT_Z_CRIT: f64 = Z_95;

/// A z within this distance of the threshold is reported as borderline.
pub const BORDERLINE_MARGIN: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignificanceRow {
    pub label: String,
    pub v: f64,
    pub sd: f64,
    /// `|v| / sd`; infinite when `sd = 0` and `v != 0`, zero when both vanish.
    pub z: f64,
    pub significant: bool,
}

impl SignificanceRow {
    pub fn new(label: impl Into<String>, v: f64, r: f64, z_crit: f64) -> Result<Self> {
        if r < 0.0 {
            return Err(Error::NegativeVariance(r));
        }
        let sd = r.sqrt();
        let z = if sd > 0.0 {
            v.abs() / sd
        } else if v != 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        Ok(SignificanceRow {
            label: label.into(),
            v,
            sd,
            z,
            significant: z > z_crit,
        })
    }

    pub fn is_borderline(&self, z_crit: f64) -> bool {
        (self.z - z_crit).abs() <= BORDERLINE_MARGIN
    }
}

/// Rows of `(label, V, R)` at the default 1.96 threshold.
pub fn significance_table<S: AsRef<str>>(rows: &[(S, f64, f64)]) -> Result<Vec<SignificanceRow>> {
    significance_table_with(rows, DEFAULT_Z_CRIT)
}

pub fn significance_table_with<S: AsRef<str>>(
    rows: &[(S, f64, f64)],
    z_crit: f64,
) -> Result<Vec<SignificanceRow>> {
    if z_crit.is_nan() || z_crit <= 0.0 {
        return Err(Error::NonPositiveThreshold(z_crit));
    }
    rows.iter()
        .map(|(label, v, r)| SignificanceRow::new(label.as_ref(), *v, *r, z_crit))
        .collect()
}
