//! Coalition distributions for probabilistic values.
//!
//! Every weighting here is size-dependent: the probability that player `i`
//! joins a particular coalition `S` of the other players depends only on
//! `|S|`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Normalisation slack accepted for custom densities.
const NORMALIZATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Weighting {
    /// `|S|! (n - |S| - 1)! / n!`
    Shapley,
    /// `1 / 2^(n-1)`
    Banzhaf,
    /// Per-coalition probability by size, `p[s]` for `s in 0..n`.
    Custom(Vec<f64>),
}

/// `s! (n - s - 1)! / n!` by the recurrence `w(0) = 1/n`,
/// `w(s+1) = w(s) (s+1) / (n-s-1)`.
pub fn shapley_weight(s: usize, n: usize) -> Result<f64> {
    if n == 0 || s >= n {
        return Err(Error::OutOfRange { size: s, n });
    }
    let mut w = 1.0 / n as f64;
    for k in 0..s {
        w *= (k + 1) as f64 / (n - k - 1) as f64;
    }
    Ok(w)
}

/// `2^-(n-1)`.
pub fn banzhaf_weight(n: usize) -> f64 {
    debug_assert!(n >= 1);
    0.5f64.powi(n.saturating_sub(1) as i32)
}

/// `C(m, s)` for `s in 0..=m` in double precision.
pub(crate) fn binomial_row(m: usize) -> Vec<f64> {
    let mut row = Vec::with_capacity(m + 1);
    let mut c = 1.0f64;
    for s in 0..=m {
        row.push(c);
        c = c * (m - s) as f64 / (s + 1) as f64;
    }
    row
}

impl Weighting {
    /// Validates a custom size-dependent density for `n` players.
    pub fn custom(n: usize, p: Vec<f64>) -> Result<Weighting> {
        let w = Weighting::Custom(p);
        w.per_coalition(n)?;
        Ok(w)
    }

    /// Whether the induced coalition-size law is uniform on `0..n`.
    pub fn is_shapley(&self) -> bool {
        matches!(self, Weighting::Shapley)
    }

    /// Probability of each individual coalition of size `s`, `s in 0..n`.
    pub fn per_coalition(&self, n: usize) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::NoPlayers);
        }
        match self {
            Weighting::Shapley => {
                let mut out = Vec::with_capacity(n);
                let mut w = 1.0 / n as f64;
                for s in 0..n {
                    out.push(w);
                    if s + 1 < n {
                        w *= (s + 1) as f64 / (n - s - 1) as f64;
                    }
                }
                Ok(out)
            }
            Weighting::Banzhaf => Ok(vec![banzhaf_weight(n); n]),
            Weighting::Custom(p) => {
                if p.len() != n {
                    return Err(Error::LengthMismatch {
                        expected: n,
                        actual: p.len(),
                    });
                }
                if let Some(&bad) = p.iter().find(|&&x| x < 0.0 || !x.is_finite()) {
                    return Err(Error::InvalidWeighting(format!(
                        "negative or non-finite density {bad}"
                    )));
                }
                let total: f64 = binomial_row(n - 1).iter().zip(p).map(|(c, x)| c * x).sum();
                if (total - 1.0).abs() > NORMALIZATION_TOL {
                    return Err(Error::InvalidWeighting(format!("total mass {total}")));
                }
                Ok(p.clone())
            }
        }
    }

    /// Law of the joined coalition's size: `C(n-1, s) p(s)`.
    pub fn size_distribution(&self, n: usize) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::NoPlayers);
        }
        match self {
            Weighting::Shapley => Ok(vec![1.0 / n as f64; n]),
            Weighting::Banzhaf => {
                let b = banzhaf_weight(n);
                Ok(binomial_row(n - 1).into_iter().map(|c| c * b).collect())
            }
            Weighting::Custom(_) => {
                let p = self.per_coalition(n)?;
                Ok(binomial_row(n - 1)
                    .into_iter()
                    .zip(p)
                    .map(|(c, x)| c * x)
                    .collect())
            }
        }
    }
}
