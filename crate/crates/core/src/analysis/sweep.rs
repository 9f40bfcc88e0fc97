//! Exact sweeps over game size for the majority, production and market
//! families, with the theory-scaled uncertainty column.
//!
//! Majority games are scaled as `R / N` (reference 1). The two-type
//! families are scaled as `R N / ln N` against `1 / (16 (1-k)^3)` for
//! workers and `1 / (16 k^3)` for capitalists and apple traders.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fastpath::{symmetric_profile, two_type_profile};
use crate::game::{Game, GameForm, TypeTag};

/// Allowed relative distance from the reference at the largest size.
pub const TREND_TOLERANCE: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Majority,
    ProductionWorker,
    ProductionCapitalist,
    MarketTrader,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::Majority,
        Family::ProductionWorker,
        Family::ProductionCapitalist,
        Family::MarketTrader,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Majority => "majority",
            Family::ProductionWorker => "production-worker",
            Family::ProductionCapitalist => "production-capitalist",
            Family::MarketTrader => "market-trader",
        }
    }

    /// Limit the scaled column is compared against.
    pub fn scaled_reference(self, k: f64) -> f64 {
        match self {
            Family::Majority => 1.0,
            Family::ProductionWorker => 1.0 / (16.0 * (1.0 - k).powi(3)),
            Family::ProductionCapitalist | Family::MarketTrader => 1.0 / (16.0 * k.powi(3)),
        }
    }

    /// Large-N value of `V`.
    pub fn value_reference(self, k: f64) -> f64 {
        match self {
            Family::Majority => 1.0,
            Family::ProductionWorker => 0.5 * (k / (1.0 - k)).sqrt(),
            Family::ProductionCapitalist | Family::MarketTrader => 0.5 * ((1.0 - k) / k).sqrt(),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown family '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    /// Type-A players (capitalists or apple traders); 0 for majority games.
    pub n_a: usize,
    pub k_actual: f64,
    pub v: f64,
    pub r: f64,
    pub scaled: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendDiagnostics {
    /// Scaled column is monotone in `N`.
    pub monotone: bool,
    /// Distance to the reference never grows from one size to the next.
    pub approaching: bool,
    /// Relative distance to the reference at the largest size.
    pub final_rel_gap: f64,
    pub within_tolerance: bool,
}

impl TrendDiagnostics {
    pub fn passed(&self) -> bool {
        self.approaching && self.within_tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub family: Family,
    pub k: f64,
    pub reference: f64,
    pub rows: Vec<SweepRow>,
    pub trend: TrendDiagnostics,
}

/// Type-A count for `n` players at fraction `k`.
fn type_a_count(family: Family, k: f64, n: usize) -> Result<usize> {
    let n_a = (k * n as f64).round() as usize;
    if n_a == 0 || n_a >= n {
        return Err(Error::SizeNotRepresentable(
            n,
            format!("{family} needs both player types, k*N rounds to {n_a}"),
        ));
    }
    Ok(n_a)
}

/// The game a sweep row is computed from.
pub fn family_game(family: Family, k: f64, n: usize) -> Result<Game> {
    match family {
        Family::Majority => Game::majority(n),
        _ => {
            let n_a = type_a_count(family, k, n)?;
            Game::sqrt_product(n_a, n - n_a)
        }
    }
}

pub fn sweep_row(family: Family, k: f64, n: usize) -> Result<SweepRow> {
    if n < 2 && family != Family::Majority {
        return Err(Error::SizeNotRepresentable(
            n,
            "ln N vanishes below 2 players".into(),
        ));
    }
    if n == 0 {
        return Err(Error::SizeNotRepresentable(n, "empty game".into()));
    }
    let game = family_game(family, k, n)?;
    let (n_a, profile) = match (family, game.form()) {
        (Family::Majority, GameForm::Symmetric(g)) => (0, symmetric_profile(n, g)?),
        (_, GameForm::TwoType { n_a, n_b, worth }) => {
            let tag = if family == Family::ProductionWorker {
                TypeTag::B
            } else {
                TypeTag::A
            };
            (*n_a, two_type_profile(*n_a, *n_b, worth, tag)?)
        }
        _ => unreachable!("family games have closed forms"),
    };
    let nf = n as f64;
    let scaled = match family {
        Family::Majority => profile.r / nf,
        _ => profile.r * nf / nf.ln(),
    };
    Ok(SweepRow {
        n,
        n_a,
        k_actual: if family == Family::Majority {
            0.0
        } else {
            n_a as f64 / nf
        },
        v: profile.v,
        r: profile.r,
        scaled,
    })
}

pub fn asymptotic_sweep(family: Family, k: f64, sizes: &[usize]) -> Result<SweepReport> {
    if family != Family::Majority && !(k > 0.0 && k < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "k must lie in (0, 1), got {k}"
        )));
    }
    if sizes.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut sorted = sizes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let rows = sorted
        .iter()
        .map(|&n| sweep_row(family, k, n))
        .collect::<Result<Vec<_>>>()?;
    let reference = family.scaled_reference(k);
    let trend = diagnose(&rows, reference);
    Ok(SweepReport {
        family,
        k,
        reference,
        rows,
        trend,
    })
}

fn diagnose(rows: &[SweepRow], reference: f64) -> TrendDiagnostics {
    let scaled: Vec<f64> = rows.iter().map(|r| r.scaled).collect();
    let monotone =
        scaled.windows(2).all(|w| w[1] >= w[0]) || scaled.windows(2).all(|w| w[1] <= w[0]);
    let dist: Vec<f64> = scaled.iter().map(|s| (s - reference).abs()).collect();
    let approaching = dist.windows(2).all(|w| w[1] <= w[0]);
    let final_rel_gap = dist.last().copied().unwrap_or(f64::NAN) / reference.abs();
    TrendDiagnostics {
        monotone,
        approaching,
        final_rel_gap,
        within_tolerance: final_rel_gap <= TREND_TOLERANCE,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn majority_rows() {
        let rep = asymptotic_sweep(Family::Majority, 0.0, &[3, 11, 101]).unwrap();
        let r: Vec<f64> = rep.rows.iter().map(|x| x.r).collect();
        assert_eq!(r, [2.0, 10.0, 100.0]);
        assert!(rep.rows.iter().all(|x| x.v == 1.0));
        let scaled: Vec<f64> = rep.rows.iter().map(|x| x.scaled).collect();
        for (s, want) in scaled.iter().zip([0.667, 0.909, 0.990]) {
            assert!((s - want).abs() < 5e-4);
        }
        assert!(rep.trend.monotone && rep.trend.approaching);
    }

    #[test]
    fn reference_constants() {
        assert_eq!(Family::ProductionWorker.scaled_reference(0.5), 0.5);
        assert_eq!(Family::ProductionCapitalist.scaled_reference(0.5), 0.5);
        assert_eq!(Family::ProductionWorker.value_reference(0.5), 0.5);
        assert!((Family::MarketTrader.value_reference(0.25) - 0.5 * 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn worker_value_at_half() {
        for n in [10, 50, 200] {
            let row = sweep_row(Family::ProductionWorker, 0.5, n).unwrap();
            assert!((row.v - 0.5).abs() < 1.0 / n as f64, "n={n} v={}", row.v);
        }
    }

    #[test]
    fn market_matches_capitalists() {
        for n in [4, 9, 40] {
            let a = sweep_row(Family::MarketTrader, 0.3, n).unwrap();
            let b = sweep_row(Family::ProductionCapitalist, 0.3, n).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn unrepresentable_sizes() {
        assert!(matches!(
            sweep_row(Family::ProductionWorker, 0.1, 4),
            Err(Error::SizeNotRepresentable(4, _))
        ));
        assert!(sweep_row(Family::ProductionWorker, 0.5, 1).is_err());
        assert!(asymptotic_sweep(Family::ProductionWorker, 1.5, &[10]).is_err());
        assert_eq!(
            asymptotic_sweep(Family::Majority, 0.0, &[]),
            Err(Error::EmptyInput)
        );
    }

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
    }
}
