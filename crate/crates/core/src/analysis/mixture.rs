//! Payoff-mixture formulas: a player receives `alpha d_i G(S) + (1 - alpha) V_i`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::Z_95;

/// Weight on the realised marginal contribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureParams {
    alpha: f64,
}

impl MixtureParams {
    pub fn new(alpha: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&alpha) {
            Ok(MixtureParams { alpha })
        } else {
            Err(Error::InvalidAlpha(alpha))
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// Payoff variance, `alpha^2 R`.
pub fn mixture_variance(p: MixtureParams, r: f64) -> Result<f64> {
    if r < 0.0 {
        return Err(Error::NegativeVariance(r));
    }
    Ok(p.alpha * p.alpha * r)
}

/// Chebyshev bound on `Pr{|payoff / V - 1| >= c}`: `min(1, alpha^2 R / (c^2 V^2))`.
pub fn chebyshev_bound(p: MixtureParams, v: f64, r: f64, c: f64) -> Result<f64> {
    if v == 0.0 {
        return Err(Error::ZeroValue);
    }
    if c.is_nan() || c <= 0.0 {
        return Err(Error::NonPositiveThreshold(c));
    }
    let var = mixture_variance(p, r)?;
    Ok((var / (c * c * v * v)).min(1.0))
}

/// Half-width of the 95% band around `V` when payoffs are roughly normal.
pub fn normal_deviation_band(p: MixtureParams, r: f64) -> f64 {
    debug_assert!(r >= 0.0);
    Z_95 * p.alpha * r.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mp(a: f64) -> MixtureParams {
        MixtureParams::new(a).unwrap()
    }

    #[test]
    fn variance_scales_with_alpha_squared() {
        assert_eq!(mixture_variance(mp(0.0), 12.0).unwrap(), 0.0);
        assert_eq!(mixture_variance(mp(1.0), 299.0).unwrap(), 299.0);
        assert_eq!(mixture_variance(mp(0.5), 299.0).unwrap(), 74.75);
        assert_eq!(
            mixture_variance(mp(0.5), -1.0),
            Err(Error::NegativeVariance(-1.0))
        );
        assert!(MixtureParams::new(1.01).is_err());
        assert!(MixtureParams::new(-0.1).is_err());
    }

    #[test]
    fn chebyshev() {
        assert!((chebyshev_bound(mp(1.0), 20.0, 299.0, 1.0).unwrap() - 0.7475).abs() < 1e-15);
        assert_eq!(chebyshev_bound(mp(1.0), 20.0, 0.0, 1.0).unwrap(), 0.0);
        assert_eq!(chebyshev_bound(mp(1.0), 1.0, 50.0, 0.5).unwrap(), 1.0);
        let mut last = f64::INFINITY;
        for c in [0.5, 1.0, 2.0, 10.0, 1e3, 1e6] {
            let b = chebyshev_bound(mp(1.0), 20.0, 299.0, c).unwrap();
            assert!(b <= last);
            last = b;
        }
        assert!(last < 1e-9);
        assert_eq!(
            chebyshev_bound(mp(1.0), 0.0, 1.0, 1.0),
            Err(Error::ZeroValue)
        );
        assert!(chebyshev_bound(mp(1.0), 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn normal_band() {
        assert_eq!(normal_deviation_band(mp(1.0), 1.0), 1.96);
        assert!((normal_deviation_band(mp(1.0), 299.0) - 33.89).abs() < 0.005);
        assert_eq!(normal_deviation_band(mp(0.0), 299.0), 0.0);
    }
}
