//! Randomized checks of the structural properties of the uncertainty.
//!
//! Each property is a theorem, so a correct engine reports zero violations.
//! Trials draw from independent streams keyed by `(seed, property, trial)`
//! and run in parallel; reports do not depend on scheduling.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{fingerprint, random_game, random_table, trial_rng};
use crate::coalition::{Coalition, PlayerId};
use crate::error::{Error, Result};
use crate::exact::{all_profiles, marginal_covariance, ordering_marginal_sum, PlayerProfile};
use crate::game::{Game, GameForm};
use crate::sampling::sample_ordering;
use crate::weighting::Weighting;

/// Tolerance for every check, absolute on games bounded by 1 in magnitude
/// and relative to `max(1, |rhs|)` otherwise.
pub const SUITE_TOLERANCE: f64 = 1e-9;

/// Violations kept verbatim in a report; the rest are only counted.
const MAX_RECORDED: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    Scaling,
    Dummy,
    Symmetry,
    StrongSymmetry,
    VarianceSumBound,
    Convexity,
    CorollarySum,
    SymmetricConvexSuperadd,
    MonotoneCovarianceLemma,
    EfficiencyPerOrdering,
}

impl Property {
    pub const ALL: [Property; 10] = [
        Property::Scaling,
        Property::Dummy,
        Property::Symmetry,
        Property::StrongSymmetry,
        Property::VarianceSumBound,
        Property::Convexity,
        Property::CorollarySum,
        Property::SymmetricConvexSuperadd,
        Property::MonotoneCovarianceLemma,
        Property::EfficiencyPerOrdering,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::Scaling => "scaling",
            Property::Dummy => "dummy",
            Property::Symmetry => "symmetry",
            Property::StrongSymmetry => "strong-symmetry",
            Property::VarianceSumBound => "variance-sum-bound",
            Property::Convexity => "convexity",
            Property::CorollarySum => "corollary-sum",
            Property::SymmetricConvexSuperadd => "symmetric-convex-superadd",
            Property::MonotoneCovarianceLemma => "monotone-covariance-lemma",
            Property::EfficiencyPerOrdering => "efficiency-per-ordering",
        }
    }

    fn tag(self) -> u64 {
        Property::ALL.iter().position(|&p| p == self).unwrap() as u64 + 1
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Property::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown property '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub trials: u64,
    pub seed: u64,
    /// Player count for generated games; ignored by the two-player and
    /// distribution-only properties.
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub trial: u64,
    pub fingerprint: String,
    pub player: Option<usize>,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub detail: String,
    /// Tables (or distribution and functions) needed to replay the failure.
    pub witness: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: Property,
    pub n: usize,
    pub instances: u64,
    pub checks: u64,
    pub violation_count: u64,
    pub violations: Vec<Violation>,
    /// Largest `gap` seen; a check fails when its gap exceeds `tolerance`.
    pub max_gap: f64,
    pub tolerance: f64,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }
}

/// Profiles used by the suites. Swappable so the harness can be checked
/// against a deliberately broken engine.
pub type ProfileFn<'a> = dyn Fn(&Game) -> Result<Vec<PlayerProfile>> + Sync + 'a;

fn exact_profiles(g: &Game) -> Result<Vec<PlayerProfile>> {
    all_profiles(g, &Weighting::Shapley)
}

/// One evaluated comparison. `gap > tolerance` is a violation.
struct Check {
    player: Option<usize>,
    lhs: f64,
    rhs: f64,
    gap: f64,
    detail: String,
}

impl Check {
    /// `lhs <= rhs`.
    fn le(player: Option<usize>, lhs: f64, rhs: f64, detail: impl Into<String>) -> Check {
        Check {
            player,
            lhs,
            rhs,
            gap: (lhs - rhs) / 1f64.max(rhs.abs()),
            detail: detail.into(),
        }
    }

    /// `lhs == rhs`.
    fn eq(player: Option<usize>, lhs: f64, rhs: f64, detail: impl Into<String>) -> Check {
        Check {
            player,
            lhs,
            rhs,
            gap: (lhs - rhs).abs() / 1f64.max(rhs.abs()),
            detail: detail.into(),
        }
    }

    fn failed(detail: impl Into<String>) -> Check {
        Check {
            player: None,
            lhs: f64::NAN,
            rhs: f64::NAN,
            gap: f64::INFINITY,
            detail: detail.into(),
        }
    }
}

struct TrialOutcome {
    checks: Vec<Check>,
    witness: Vec<Vec<f64>>,
}

fn table_of(g: &Game) -> Vec<f64> {
    match g.to_tabular().map(|t| t.form().clone()) {
        Ok(GameForm::Tabular(v)) => v,
        _ => Vec::new(),
    }
}

pub fn run_property_suite(property: Property, cfg: &SuiteConfig) -> Result<PropertyReport> {
    run_property_suite_with(property, cfg, &exact_profiles)
}

pub fn run_property_suite_with(
    property: Property,
    cfg: &SuiteConfig,
    profiles: &ProfileFn,
) -> Result<PropertyReport> {
    if cfg.trials == 0 {
        return Err(Error::InvalidArgument(
            "at least one trial is required".into(),
        ));
    }
    let n = match property {
        Property::StrongSymmetry => 2,
        Property::Dummy | Property::Symmetry => cfg.n.max(2),
        _ => cfg.n.max(1),
    };
    if n > 12 {
        return Err(Error::InvalidArgument(format!(
            "suites are limited to 12 players, got {n}"
        )));
    }
    let outcomes: Vec<TrialOutcome> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(cfg.seed, property.tag(), t);
            run_trial(property, n, &mut rng, profiles)
        })
        .collect();

    let mut report = PropertyReport {
        property,
        n,
        instances: cfg.trials,
        checks: 0,
        violation_count: 0,
        violations: Vec::new(),
        max_gap: f64::MIN,
        tolerance: SUITE_TOLERANCE,
    };
    for (trial, outcome) in outcomes.into_iter().enumerate() {
        let print = fingerprint(outcome.witness.iter().flatten());
        for c in outcome.checks {
            report.checks += 1;
            report.max_gap = report.max_gap.max(c.gap);
            if c.gap.is_nan() || c.gap > SUITE_TOLERANCE {
                report.violation_count += 1;
                if report.violations.len() < MAX_RECORDED {
                    report.violations.push(Violation {
                        trial: trial as u64,
                        fingerprint: print.clone(),
                        player: c.player,
                        lhs: c.lhs,
                        rhs: c.rhs,
                        gap: c.gap,
                        detail: c.detail,
                        witness: outcome.witness.clone(),
                    });
                }
            }
        }
    }
    Ok(report)
}

fn run_trial(
    property: Property,
    n: usize,
    rng: &mut impl Rng,
    profiles: &ProfileFn,
) -> TrialOutcome {
    let result = match property {
        Property::Scaling => scaling(n, rng, profiles),
        Property::Dummy => dummy(n, rng, profiles),
        Property::Symmetry => symmetry(n, rng, profiles),
        Property::StrongSymmetry => strong_symmetry(rng, profiles),
        Property::VarianceSumBound => variance_sum_bound(n, rng, profiles),
        Property::Convexity => convexity(n, rng, profiles),
        Property::CorollarySum => corollary_sum(n, rng, profiles),
        Property::SymmetricConvexSuperadd => symmetric_convex(n, rng, profiles),
        Property::MonotoneCovarianceLemma => Ok(monotone_lemma(n, rng)),
        Property::EfficiencyPerOrdering => efficiency(n, rng, profiles),
    };
    result.unwrap_or_else(|e| TrialOutcome {
        checks: vec![Check::failed(format!("evaluation error: {e}"))],
        witness: Vec::new(),
    })
}

fn scaling(n: usize, rng: &mut impl Rng, profiles: &ProfileFn) -> Result<TrialOutcome> {
    let g = random_game(n, rng);
    let t: f64 = rng.random_range(-10.0..=10.0);
    let base = profiles(&g)?;
    let scaled = profiles(&g.scale(t)?)?;
    let mut checks = Vec::new();
    for (p, q) in base.iter().zip(&scaled) {
        let i = Some(p.player.0);
        checks.push(Check::eq(
            i,
            q.v,
            t * p.v,
            format!("V(tG) = t V(G), t = {t}"),
        ));
        checks.push(Check::eq(
            i,
            q.r,
            t * t * p.r,
            format!("R(tG) = t^2 R(G), t = {t}"),
        ));
    }
    Ok(TrialOutcome {
        checks,
        witness: vec![table_of(&g), vec![t]],
    })
}

fn dummy(n: usize, rng: &mut impl Rng, profiles: &ProfileFn) -> Result<TrialOutcome> {
    let rest = random_table(n - 1, rng);
    let dummy = rng.random_range(0..n);
    let own: f64 = rng.random_range(-1.0..=1.0);
    let low = (1usize << dummy) - 1;
    let table: Vec<f64> = (0..1usize << n)
        .map(|m| {
            let compact = (m & low) | ((m >> (dummy + 1)) << dummy);
            let with = if m >> dummy & 1 == 1 { own } else { 0.0 };
            rest[compact] + with
        })
        .collect();
    let g = Game::from_table(n, table)?;
    let p = profiles(&g)?[dummy];
    Ok(TrialOutcome {
        checks: vec![
            Check::eq(Some(dummy), p.r, 0.0, "dummy player has R = 0"),
            Check::eq(Some(dummy), p.v, own, "dummy player has V = G({i})"),
        ],
        witness: vec![table_of(&g)],
    })
}

fn swap_bits(m: usize, i: usize, j: usize) -> usize {
    let (bi, bj) = (m >> i & 1, m >> j & 1);
    if bi == bj {
        m
    } else {
        m ^ (1 << i) ^ (1 << j)
    }
}

fn symmetry(n: usize, rng: &mut impl Rng, profiles: &ProfileFn) -> Result<TrialOutcome> {
    let i = rng.random_range(0..n);
    let j = (i + rng.random_range(1..n)) % n;
    let raw = random_table(n, rng);
    let table = (0..raw.len())
        .map(|m| raw[m.min(swap_bits(m, i, j))])
        .collect();
    let g = Game::from_table(n, table)?;
    let ps = profiles(&g)?;
    Ok(TrialOutcome {
        checks: vec![
            Check::eq(
                Some(i),
                ps[i].r,
                ps[j].r,
                format!("R_{i} = R_{j} for exchangeable players"),
            ),
            Check::eq(
                Some(i),
                ps[i].v,
                ps[j].v,
                format!("V_{i} = V_{j} for exchangeable players"),
            ),
        ],
        witness: vec![table_of(&g)],
    })
}

fn strong_symmetry(rng: &mut impl Rng, profiles: &ProfileFn) -> Result<TrialOutcome> {
    let g = random_game(2, rng);
    let ps = profiles(&g)?;
    Ok(TrialOutcome {
        checks: vec![Check::eq(
            Some(0),
            ps[0].r,
            ps[1].r,
            "R_0 = R_1 in a two-player game",
        )],
        witness: vec![table_of(&g)],
    })
}

fn variance_sum_bound(n: usize, rng: &mut impl Rng, profiles: &ProfileFn) -> Result<TrialOutcome> {
    let g = random_game(n, rng);
    let ps = profiles(&g)?;
    let total: f64 = ps.iter().map(|p| p.r).sum();
    let checks = ps
        .iter()
        .map(|p| {
            let bound = (n as f64 - 1.0) * (total - p.r);
            Check::le(
                Some(p.player.0),
                p.r,
                bound,
                "R_i <= (N-1) sum_{j != i} R_j",
            )
        })
        .collect();
    Ok(TrialOutcome {
        checks,
        witness: vec![table_of(&g)],
    })
}

fn convexity(n: usize, rng: &mut impl Rng, profiles: &ProfileFn) -> Result<TrialOutcome> {
    let g = random_game(n, rng);
    let h = random_game(n, rng);
    let (pg, ph) = (profiles(&g)?, profiles(&h)?);
    let mut checks = Vec::new();
    for k in 0..=10 {
        let alpha = k as f64 / 10.0;
        let pm = profiles(&g.mix(&h, alpha)?)?;
        for i in 0..n {
            let rhs = alpha * pg[i].r + (1.0 - alpha) * ph[i].r;
            checks.push(Check::le(
                Some(i),
                pm[i].r,
                rhs,
                format!("R(aG + (1-a)H) <= a R(G) + (1-a) R(H), a = {alpha}"),
            ));
        }
    }
    Ok(TrialOutcome {
        checks,
        witness: vec![table_of(&g), table_of(&h)],
    })
}

fn corollary_sum(n: usize, rng: &mut impl Rng, profiles: &ProfileFn) -> Result<TrialOutcome> {
    let g = random_game(n, rng);
    let h = random_game(n, rng);
    let (pg, ph, ps) = (profiles(&g)?, profiles(&h)?, profiles(&g.add(&h)?)?);
    let checks = (0..n)
        .map(|i| {
            Check::le(
                Some(i),
                ps[i].r,
                2.0 * (pg[i].r + ph[i].r),
                "R(G+H) <= 2 [R(G) + R(H)]",
            )
        })
        .collect();
    Ok(TrialOutcome {
        checks,
        witness: vec![table_of(&g), table_of(&h)],
    })
}

/// Size profile with `g(0) = 0` and nonnegative, nondecreasing integer
/// increments, scaled so `max |g| = 1`.
fn random_convex_profile(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut g = vec![0.0; n + 1];
    let mut step: u32 = rng.random_range(0..=3);
    for s in 1..=n {
        g[s] = g[s - 1] + step as f64;
        step += rng.random_range(0..=3);
    }
    let top = g[n];
    if top > 0.0 {
        for x in &mut g {
            *x /= top;
        }
    }
    g
}

fn symmetric_convex(n: usize, rng: &mut impl Rng, profiles: &ProfileFn) -> Result<TrialOutcome> {
    let g = Game::symmetric(n, random_convex_profile(n, rng))?;
    let h = Game::symmetric(n, random_convex_profile(n, rng))?;
    let sum = g.add(&h)?;
    let (pg, ph, ps) = (profiles(&g)?, profiles(&h)?, profiles(&sum)?);
    let mut checks = Vec::new();
    // The sum can reach magnitude 2; compare on the unit scale.
    let lhs = ps[0].r / 2.0;
    let rhs = (pg[0].r + ph[0].r) / 2.0;
    checks.push(Check::le(
        Some(0),
        rhs,
        lhs,
        "R(G) + R(H) <= R(G+H) for symmetric convex games",
    ));
    let cov = marginal_covariance(&g, &h, PlayerId(0), &Weighting::Shapley)?;
    checks.push(Check::le(Some(0), -cov, 0.0, "Cov(dG, dH) >= 0"));
    let g_tab = g.to_tabular()?;
    let h_tab = h.to_tabular()?;
    let cov_enum = marginal_covariance(&g_tab, &h_tab, PlayerId(0), &Weighting::Shapley)?;
    checks.push(Check::eq(
        Some(0),
        cov_enum,
        cov,
        "covariance closed form = enumeration",
    ));
    let GameForm::Symmetric(gs) = g.form() else {
        unreachable!()
    };
    let GameForm::Symmetric(hs) = h.form() else {
        unreachable!()
    };
    Ok(TrialOutcome {
        checks,
        witness: vec![gs.clone(), hs.clone()],
    })
}

/// `E[f1 f2] >= E[f1] E[f2]` for nonnegative nondecreasing `f1`, `f2` on a
/// random finite distribution. Every fourth trial uses the step functions
/// `1[x >= T]` the argument reduces to.
fn monotone_lemma(n: usize, rng: &mut impl Rng) -> TrialOutcome {
    let support = rng.random_range(1..=n.max(2) + 2);
    let mut mass: Vec<f64> = (0..support).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = mass.iter().sum();
    for m in &mut mass {
        *m /= total;
    }
    let steps = rng.random_range(0..4) == 0;
    let monotone = |rng: &mut dyn rand::RngCore| -> Vec<f64> {
        if steps {
            let threshold = rng.random_range(0..support);
            (0..support)
                .map(|x| if x >= threshold { 1.0 } else { 0.0 })
                .collect()
        } else {
            let mut level = rng.random::<f64>();
            (0..support)
                .map(|_| {
                    let v = level;
                    level += rng.random::<f64>();
                    v
                })
                .collect()
        }
    };
    let f1 = monotone(rng);
    let f2 = monotone(rng);
    let e = |f: &dyn Fn(usize) -> f64| -> f64 { (0..support).map(|x| mass[x] * f(x)).sum() };
    let e12 = e(&|x| f1[x] * f2[x]);
    let e1 = e(&|x| f1[x]);
    let e2 = e(&|x| f2[x]);
    TrialOutcome {
        checks: vec![Check::le(None, e1 * e2, e12, "E[f1] E[f2] <= E[f1 f2]")],
        witness: vec![mass, f1, f2],
    }
}

fn efficiency(n: usize, rng: &mut impl Rng, profiles: &ProfileFn) -> Result<TrialOutcome> {
    let g = random_game(n, rng);
    let grand = g.value(Coalition::grand(n));
    let order = sample_ordering(n, rng);
    let along = ordering_marginal_sum(&g, &order)?;
    let total_v: f64 = profiles(&g)?.iter().map(|p| p.v).sum();
    Ok(TrialOutcome {
        checks: vec![
            Check::eq(
                None,
                along,
                grand,
                format!("marginals along {:?} sum to G(A)", order.as_slice()),
            ),
            Check::eq(None, total_v, grand, "sum of V_i = G(A)"),
        ],
        witness: vec![table_of(&g)],
    })
}
