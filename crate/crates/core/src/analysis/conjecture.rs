//! Empirical probe of `R_i(G+H) >= d(n) (R_i(G) + R_i(H))` over random
//! superadditive pairs. The output is the smallest ratio seen, with the
//! pair that produced it; it bounds nothing.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{random_table, trial_rng};
use crate::error::{Error, Result};
use crate::exact::all_profiles;
use crate::game::Game;
use crate::weighting::Weighting;

/// Denominators below this are skipped.
const MIN_DENOMINATOR: f64 = 1e-12;

const PROBE_TAG: u64 = 0xC0_4A_EC;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjectureWitness {
    pub trial: u64,
    pub player: usize,
    /// Tables indexed by coalition mask.
    pub g: Vec<f64>,
    pub h: Vec<f64>,
    pub r_g: f64,
    pub r_h: f64,
    pub r_sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    /// `(trial, player)` ratios actually evaluated.
    pub evaluated: u64,
    pub skipped: u64,
    pub worst_ratio: f64,
    pub witness: ConjectureWitness,
}

/// Random superadditive game: uniform draws, each coalition raised to the
/// best split of itself, then screened by [`Game::is_superadditive`].
pub fn random_superadditive(n: usize, rng: &mut impl Rng) -> Game {
    loop {
        let mut t = random_table(n, rng);
        for s in 1..t.len() {
            let mut sub = (s - 1) & s;
            while sub > 0 {
                let split = t[sub] + t[s ^ sub];
                if split > t[s] {
                    t[s] = split;
                }
                sub = (sub - 1) & s;
            }
        }
        let g = Game::from_table(n, t).expect("valid table");
        if g.is_superadditive() == Ok(true) {
            return g;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairUncertainty {
    /// `R_i(G+H) / (R_i(G) + R_i(H))`, `None` where the denominator vanishes.
    pub ratio: Option<f64>,
    pub r_g: f64,
    pub r_h: f64,
    pub r_sum: f64,
}

/// Per-player uncertainties of `G`, `H` and `G + H`.
pub fn uncertainty_ratios(g: &Game, h: &Game) -> Result<Vec<PairUncertainty>> {
    let w = Weighting::Shapley;
    let (pg, ph, ps) = (
        all_profiles(g, &w)?,
        all_profiles(h, &w)?,
        all_profiles(&g.add(h)?, &w)?,
    );
    Ok((0..g.n_players())
        .map(|i| {
            let den = pg[i].r + ph[i].r;
            let ratio = (den >= MIN_DENOMINATOR).then(|| ps[i].r / den);
            PairUncertainty {
                ratio,
                r_g: pg[i].r,
                r_h: ph[i].r,
                r_sum: ps[i].r,
            }
        })
        .collect())
}

pub fn conjecture_probe(n: usize, trials: u64, seed: u64) -> Result<ConjectureReport> {
    if !(2..=7).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "probe supports 2..=7 players, got {n}"
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument(
            "at least one trial is required".into(),
        ));
    }
    type TrialResult = Result<(u64, u64, Option<ConjectureWitness>, f64)>;
    let per_trial: Vec<TrialResult> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, PROBE_TAG, t);
            let g = random_superadditive(n, &mut rng);
            let h = random_superadditive(n, &mut rng);
            let mut best: Option<(f64, ConjectureWitness)> = None;
            let (mut evaluated, mut skipped) = (0, 0);
            for (i, pair) in uncertainty_ratios(&g, &h)?.into_iter().enumerate() {
                let Some(ratio) = pair.ratio else {
                    skipped += 1;
                    continue;
                };
                evaluated += 1;
                if best.as_ref().is_none_or(|(b, _)| ratio < *b) {
                    let table = |x: &Game| match x.form() {
                        crate::game::GameForm::Tabular(v) => v.clone(),
                        _ => unreachable!("probe games are tabular"),
                    };
                    best = Some((
                        ratio,
                        ConjectureWitness {
                            trial: t,
                            player: i,
                            g: table(&g),
                            h: table(&h),
                            r_g: pair.r_g,
                            r_h: pair.r_h,
                            r_sum: pair.r_sum,
                        },
                    ));
                }
            }
            let (ratio, witness) = match best {
                Some((r, w)) => (r, Some(w)),
                None => (f64::INFINITY, None),
            };
            Ok((evaluated, skipped, witness, ratio))
        })
        .collect();

    let (mut evaluated, mut skipped) = (0, 0);
    let mut worst: Option<(f64, ConjectureWitness)> = None;
    for item in per_trial {
        let (e, s, witness, ratio) = item?;
        evaluated += e;
        skipped += s;
        if let Some(w) = witness {
            if worst.as_ref().is_none_or(|(b, _)| ratio < *b) {
                worst = Some((ratio, w));
            }
        }
    }
    let (worst_ratio, witness) = worst.ok_or(Error::DegenerateDenominators)?;
    Ok(ConjectureReport {
        n,
        trials,
        seed,
        evaluated,
        skipped,
        worst_ratio,
        witness,
    })
}
