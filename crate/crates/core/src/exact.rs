//! Exact probabilistic values and uncertainties.
//!
//! The generic path enumerates every coalition of the other players and
//! accumulates compensated per-size sums of the marginal contribution and
//! its square; sizes are weighted afterwards. Symmetric and two-type games
//! are routed to the closed forms in [`crate::fastpath`].

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coalition::{insert_zero_bit, Coalition, PlayerId};
use crate::error::{Error, Result};
use crate::fastpath;
use crate::game::{Game, GameForm, Tally, TypeTag};
use crate::numeric::CompensatedSum;
use crate::weighting::Weighting;

/// Default player cutoff for tabular enumeration.
pub const DEFAULT_EXACT_LIMIT: usize = 25;

/// Largest game for full permutation enumeration.
pub const MAX_ORACLE_PLAYERS: usize = 10;

/// Masks per work unit. Chunk boundaries are fixed, so reductions do not
/// depend on the number of threads.
const CHUNK_BITS: usize = 16;

/// Expected marginal contribution `v` and its variance `r` for one player.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlayerProfile {
    pub player: PlayerId,
    pub v: f64,
    pub r: f64,
    pub sd: f64,
}

impl PlayerProfile {
    /// Builds a profile from the first two moments. Rounding can push
    /// `E[d^2] - V^2` slightly below zero; that is clamped, anything larger
    /// is reported.
    pub fn from_moments(player: PlayerId, v: f64, second_moment: f64) -> Result<Self> {
        let r = second_moment - v * v;
        let r = if r >= 0.0 {
            r
        } else if r > -1e-9 * 1f64.max(v * v) {
            0.0
        } else {
            return Err(Error::NumericalInstability { variance: r });
        };
        Ok(PlayerProfile {
            player,
            v,
            r,
            sd: r.sqrt(),
        })
    }

    pub(crate) fn with_player(mut self, player: PlayerId) -> Self {
        self.player = player;
        self
    }
}

/// A permutation of `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ordering(Vec<usize>);

impl Ordering {
    pub fn new(perm: Vec<usize>) -> Result<Ordering> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidOrdering(format!(
                    "{perm:?} is not a permutation of 0..{n}"
                )));
            }
        }
        Ok(Ordering(perm))
    }

    pub fn identity(n: usize) -> Ordering {
        Ordering((0..n).collect())
    }

    pub(crate) fn from_vec_unchecked(perm: Vec<usize>) -> Ordering {
        debug_assert!(Ordering::new(perm.clone()).is_ok());
        Ordering(perm)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Players that come before `i`.
    pub fn predecessors(&self, i: PlayerId) -> Coalition {
        Coalition::from_members(self.0.iter().copied().take_while(|&p| p != i.0))
    }
}

/// Per-size compensated sums of `d` and `d^2`.
#[derive(Clone)]
struct SizeSums {
    first: Vec<CompensatedSum>,
    second: Vec<CompensatedSum>,
}

impl SizeSums {
    fn new(n: usize) -> Self {
        SizeSums {
            first: vec![CompensatedSum::new(); n],
            second: vec![CompensatedSum::new(); n],
        }
    }

    #[inline]
    fn add(&mut self, size: usize, d: f64) {
        self.first[size].add(d);
        self.second[size].add(d * d);
    }

    fn merge(&mut self, other: &SizeSums) {
        for (a, b) in self.first.iter_mut().zip(&other.first) {
            a.merge(b);
        }
        for (a, b) in self.second.iter_mut().zip(&other.second) {
            a.merge(b);
        }
    }

    fn finish(&self, player: PlayerId, per_coalition: &[f64]) -> Result<PlayerProfile> {
        let mut v = CompensatedSum::new();
        let mut e2 = CompensatedSum::new();
        for (s, &p) in per_coalition.iter().enumerate() {
            v.add(p * self.first[s].value());
            e2.add(p * self.second[s].value());
        }
        PlayerProfile::from_moments(player, v.value(), e2.value())
    }
}

/// Exact evaluation with a configurable tabular cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactEngine {
    pub limit: usize,
}

impl Default for ExactEngine {
    fn default() -> Self {
        ExactEngine {
            limit: DEFAULT_EXACT_LIMIT,
        }
    }
}

impl ExactEngine {
    pub fn new(limit: usize) -> Self {
        ExactEngine { limit }
    }

    fn check_size(&self, game: &Game) -> Result<()> {
        let n = game.n_players();
        if n > self.limit || !game.mask_addressable() {
            Err(Error::GameTooLargeForExact {
                n,
                limit: self.limit,
            })
        } else {
            Ok(())
        }
    }

    /// `(V_i, R_i)` under `w`, using a closed form when the game has one.
    pub fn profile(&self, game: &Game, i: PlayerId, w: &Weighting) -> Result<PlayerProfile> {
        game.check_player(i)?;
        match game.form() {
            GameForm::Symmetric(g) => {
                Ok(fastpath::symmetric_profile_weighted(game.n_players(), g, w)?.with_player(i))
            }
            GameForm::TwoType { n_a, n_b, worth } => {
                let tag = game.type_of(i).expect("two-type game tags every player");
                Ok(fastpath::two_type_profile_weighted(*n_a, *n_b, worth, tag, w)?.with_player(i))
            }
            GameForm::Additive(weights) => {
                w.size_distribution(game.n_players())?;
                PlayerProfile::from_moments(i, weights[i.0], weights[i.0] * weights[i.0])
            }
            _ => self.enumerate(game, i, w),
        }
    }

    /// The generic enumeration path, whatever the game's form.
    pub fn enumerate(&self, game: &Game, i: PlayerId, w: &Weighting) -> Result<PlayerProfile> {
        game.check_player(i)?;
        self.check_size(game)?;
        let n = game.n_players();
        let per = w.per_coalition(n)?;
        let bit = 1u64 << i.0;
        let total = 1u64 << (n - 1);

        let accumulate = |lo: u64, hi: u64| {
            let mut sums = SizeSums::new(n);
            for m in lo..hi {
                let s = insert_zero_bit(m, i.0);
                let d =
                    game.value(Coalition::from_mask(s | bit)) - game.value(Coalition::from_mask(s));
                sums.add(m.count_ones() as usize, d);
            }
            sums
        };
        let sums = reduce_chunks(total, SizeSums::new(n), accumulate, |a, b| a.merge(b));
        sums.finish(i, &per)
    }

    /// Profiles for every player. Tabular games are scanned once, with each
    /// coalition contributing to every non-member's accumulator.
    pub fn all_profiles(&self, game: &Game, w: &Weighting) -> Result<Vec<PlayerProfile>> {
        let n = game.n_players();
        match game.form() {
            GameForm::Symmetric(g) => {
                let p = fastpath::symmetric_profile_weighted(n, g, w)?;
                Ok(game.players().map(|i| p.with_player(i)).collect())
            }
            GameForm::TwoType { n_a, n_b, worth } => {
                let pa = if *n_a > 0 {
                    Some(fastpath::two_type_profile_weighted(
                        *n_a,
                        *n_b,
                        worth,
                        TypeTag::A,
                        w,
                    )?)
                } else {
                    None
                };
                let pb = if *n_b > 0 {
                    Some(fastpath::two_type_profile_weighted(
                        *n_a,
                        *n_b,
                        worth,
                        TypeTag::B,
                        w,
                    )?)
                } else {
                    None
                };
                Ok(game
                    .players()
                    .map(|i| {
                        let p = if i.0 < *n_a { pa } else { pb };
                        p.expect("type present").with_player(i)
                    })
                    .collect())
            }
            GameForm::Additive(_) => game.players().map(|i| self.profile(game, i, w)).collect(),
            _ => self.enumerate_all(game, w),
        }
    }

    fn enumerate_all(&self, game: &Game, w: &Weighting) -> Result<Vec<PlayerProfile>> {
        self.check_size(game)?;
        let n = game.n_players();
        let per = w.per_coalition(n)?;
        let total = 1u64 << n;
        let empty = || vec![SizeSums::new(n); n];

        let accumulate = |lo: u64, hi: u64| {
            let mut sums = empty();
            for s in lo..hi {
                let base = game.value(Coalition::from_mask(s));
                let size = s.count_ones() as usize;
                let mut outside = !s & (total - 1);
                while outside != 0 {
                    let i = outside.trailing_zeros() as usize;
                    outside &= outside - 1;
                    let d = game.value(Coalition::from_mask(s | 1 << i)) - base;
                    sums[i].add(size, d);
                }
            }
            sums
        };
        let sums = reduce_chunks(total, empty(), accumulate, |a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                x.merge(y);
            }
        });
        sums.iter()
            .enumerate()
            .map(|(i, s)| s.finish(PlayerId(i), &per))
            .collect()
    }

    /// `Cov(d_i G, d_i H)` under `w`.
    pub fn marginal_covariance(
        &self,
        g: &Game,
        h: &Game,
        i: PlayerId,
        w: &Weighting,
    ) -> Result<f64> {
        if g.n_players() != h.n_players() {
            return Err(Error::PlayerCountMismatch {
                left: g.n_players(),
                right: h.n_players(),
            });
        }
        g.check_player(i)?;
        let n = g.n_players();
        if let (GameForm::Symmetric(x), GameForm::Symmetric(y)) = (g.form(), h.form()) {
            return fastpath::symmetric_covariance_weighted(n, x, y, w);
        }
        self.check_size(g)?;
        let per = w.per_coalition(n)?;
        let bit = 1u64 << i.0;

        #[derive(Clone)]
        struct CovSums {
            dg: Vec<CompensatedSum>,
            dh: Vec<CompensatedSum>,
            cross: Vec<CompensatedSum>,
        }
        let empty = CovSums {
            dg: vec![CompensatedSum::new(); n],
            dh: vec![CompensatedSum::new(); n],
            cross: vec![CompensatedSum::new(); n],
        };
        let accumulate = |lo: u64, hi: u64| {
            let mut acc = empty.clone();
            for m in lo..hi {
                let s = Coalition::from_mask(insert_zero_bit(m, i.0));
                let t = Coalition::from_mask(s.mask() | bit);
                let a = g.value(t) - g.value(s);
                let b = h.value(t) - h.value(s);
                let k = m.count_ones() as usize;
                acc.dg[k].add(a);
                acc.dh[k].add(b);
                acc.cross[k].add(a * b);
            }
            acc
        };
        let sums = reduce_chunks(1u64 << (n - 1), empty.clone(), accumulate, |a, b| {
            for (x, y) in [
                (&mut a.dg, &b.dg),
                (&mut a.dh, &b.dh),
                (&mut a.cross, &b.cross),
            ] {
                for (p, q) in x.iter_mut().zip(y) {
                    p.merge(q);
                }
            }
        });
        let weighted = |v: &[CompensatedSum]| -> f64 {
            per.iter()
                .zip(v)
                .map(|(p, s)| p * s.value())
                .collect::<CompensatedSum>()
                .value()
        };
        let (eg, eh, egh) = (
            weighted(&sums.dg),
            weighted(&sums.dh),
            weighted(&sums.cross),
        );
        Ok(egh - eg * eh)
    }
}

/// Splits `0..total` into fixed-size chunks, accumulates them (in parallel
/// when there is more than one) and folds the partial results left to right.
fn reduce_chunks<T, A, M>(total: u64, init: T, accumulate: A, merge: M) -> T
where
    T: Send,
    A: Fn(u64, u64) -> T + Sync,
    M: Fn(&mut T, &T),
{
    let chunk = 1u64 << CHUNK_BITS;
    if total <= chunk {
        let part = accumulate(0, total);
        let mut acc = init;
        merge(&mut acc, &part);
        return acc;
    }
    let parts: Vec<T> = (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|c| accumulate(c * chunk, ((c + 1) * chunk).min(total)))
        .collect();
    let mut acc = init;
    for p in &parts {
        merge(&mut acc, p);
    }
    acc
}

pub fn profile(game: &Game, i: PlayerId, w: &Weighting) -> Result<PlayerProfile> {
    ExactEngine::default().profile(game, i, w)
}

pub fn all_profiles(game: &Game, w: &Weighting) -> Result<Vec<PlayerProfile>> {
    ExactEngine::default().all_profiles(game, w)
}

pub fn marginal_covariance(g: &Game, h: &Game, i: PlayerId, w: &Weighting) -> Result<f64> {
    ExactEngine::default().marginal_covariance(g, h, i, w)
}

/// Mean uncertainty across players.
pub fn average_uncertainty(profiles: &[PlayerProfile]) -> Result<f64> {
    if profiles.is_empty() {
        return Err(Error::EmptyInput);
    }
    let total: CompensatedSum = profiles.iter().map(|p| p.r).collect();
    Ok(total.value() / profiles.len() as f64)
}

/// Mean and variance of player `i`'s marginal contribution to its
/// predecessors, over all `n!` orderings.
pub fn permutation_oracle(game: &Game, i: PlayerId) -> Result<PlayerProfile> {
    game.check_player(i)?;
    let n = game.n_players();
    if n > MAX_ORACLE_PLAYERS {
        return Err(Error::TooManyPlayersForOracle(n));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut first = CompensatedSum::new();
    let mut second = CompensatedSum::new();
    let mut count = 0u64;
    loop {
        let pred = Coalition::from_members(perm.iter().copied().take_while(|&p| p != i.0));
        let d = game.value(pred.with(i)) - game.value(pred);
        first.add(d);
        second.add(d * d);
        count += 1;
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let c = count as f64;
    PlayerProfile::from_moments(i, first.value() / c, second.value() / c)
}

/// Lexicographic successor; false once the last permutation is reached.
fn next_permutation(p: &mut [usize]) -> bool {
    let Some(k) = (1..p.len()).rev().find(|&k| p[k - 1] < p[k]) else {
        return false;
    };
    let pivot = k - 1;
    let j = (k..p.len())
        .rev()
        .find(|&j| p[j] > p[pivot])
        .expect("successor exists");
    p.swap(pivot, j);
    p[k..].reverse();
    true
}

/// Sum of every player's marginal contribution along the ordering; telescopes
/// to `G(A)`.
pub fn ordering_marginal_sum(game: &Game, b: &Ordering) -> Result<f64> {
    if b.len() != game.n_players() {
        return Err(Error::LengthMismatch {
            expected: game.n_players(),
            actual: b.len(),
        });
    }
    let mut tally = Tally::default();
    let mut prev = game.tally_value(&tally);
    let mut total = CompensatedSum::new();
    for &p in b.as_slice() {
        tally.insert(game, p);
        let next = game.tally_value(&tally);
        total.add(next - prev);
        prev = next;
    }
    Ok(total.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::tests::three_player_example;
    use crate::numeric::rel_diff;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        rel_diff(a, b) <= tol
    }

    #[test]
    fn three_player_example_profiles() {
        let g = three_player_example();
        let ps = all_profiles(&g, &Weighting::Shapley).unwrap();
        let expected = [(20.0, 299.0), (20.0, 230.0), (20.0, 155.0)];
        for (p, (v, r)) in ps.iter().zip(expected) {
            assert!(close(p.v, v, 1e-12) && close(p.r, r, 1e-12), "{p:?}");
            let single = profile(&g, p.player, &Weighting::Shapley).unwrap();
            assert!(close(single.v, p.v, 1e-13) && close(single.r, p.r, 1e-13));
        }
        assert!(close(average_uncertainty(&ps).unwrap(), 228.0, 1e-12));
    }

    #[test]
    fn additive_game_has_no_uncertainty() {
        let g = Game::additive(vec![1.0, -2.0, 3.5, 4.0]).unwrap();
        for p in all_profiles(&g, &Weighting::Shapley).unwrap() {
            assert_eq!(p.v, [1.0, -2.0, 3.5, 4.0][p.player.0]);
            assert_eq!(p.r, 0.0);
        }
        assert_eq!(
            average_uncertainty(&all_profiles(&g, &Weighting::Banzhaf).unwrap()).unwrap(),
            0.0
        );
    }

    #[test]
    fn one_player_game() {
        let g = Game::from_table(1, vec![0.0, 7.5]).unwrap();
        let p = profile(&g, PlayerId(0), &Weighting::Shapley).unwrap();
        assert_eq!((p.v, p.r), (7.5, 0.0));
        let o = permutation_oracle(&g, PlayerId(0)).unwrap();
        assert_eq!((o.v, o.r), (7.5, 0.0));
    }

    #[test]
    fn majority_three_by_enumeration() {
        let g = Game::majority(3).unwrap().to_tabular().unwrap();
        let p = ExactEngine::default()
            .enumerate(&g, PlayerId(0), &Weighting::Shapley)
            .unwrap();
        assert!(close(p.v, 1.0, 1e-14) && close(p.r, 2.0, 1e-14));
    }

    #[test]
    fn symmetric_games_give_equal_profiles() {
        let g = Game::symmetric(5, vec![0.0, 0.3, 0.1, 2.0, 2.5, 7.0])
            .unwrap()
            .to_tabular()
            .unwrap();
        let ps = all_profiles(&g, &Weighting::Shapley).unwrap();
        for p in &ps[1..] {
            assert!(close(p.v, ps[0].v, 1e-14) && close(p.r, ps[0].r, 1e-14));
        }
    }

    #[test]
    fn oracle_agrees_on_example() {
        let g = three_player_example();
        for (i, r) in [299.0, 230.0, 155.0].into_iter().enumerate() {
            let o = permutation_oracle(&g, PlayerId(i)).unwrap();
            assert!(close(o.v, 20.0, 1e-12) && close(o.r, r, 1e-12));
        }
        let big = Game::from_table(11, vec![0.0; 1 << 11]).unwrap();
        assert_eq!(
            permutation_oracle(&big, PlayerId(0)),
            Err(Error::TooManyPlayersForOracle(11))
        );
    }

    #[test]
    fn next_permutation_visits_all() {
        let mut p = vec![0, 1, 2, 3];
        let mut count = 1;
        while next_permutation(&mut p) {
            count += 1;
        }
        assert_eq!(count, 24);
        assert_eq!(p, vec![3, 2, 1, 0]);
    }

    #[test]
    fn ordering_sums_telescope() {
        let g = three_player_example();
        assert_eq!(
            ordering_marginal_sum(&g, &Ordering::identity(3)).unwrap(),
            60.0
        );
        let mut p = vec![0, 1, 2];
        loop {
            let b = Ordering::new(p.clone()).unwrap();
            assert_eq!(ordering_marginal_sum(&g, &b).unwrap(), 60.0);
            if !next_permutation(&mut p) {
                break;
            }
        }
        let add = Game::additive(vec![1.0, 2.0, 4.0]).unwrap();
        assert_eq!(
            ordering_marginal_sum(&add, &Ordering::new(vec![2, 0, 1]).unwrap()).unwrap(),
            7.0
        );
    }

    #[test]
    fn ordering_validation() {
        assert!(Ordering::new(vec![0, 0, 1]).is_err());
        assert!(Ordering::new(vec![0, 3, 1]).is_err());
        let b = Ordering::new(vec![2, 0, 1]).unwrap();
        assert_eq!(
            b.predecessors(PlayerId(1)),
            Coalition::from_members([0usize, 2])
        );
        assert_eq!(b.predecessors(PlayerId(2)), Coalition::EMPTY);
    }

    #[test]
    fn covariance_identities() {
        let g = three_player_example();
        let w = Weighting::Shapley;
        for i in g.players() {
            let cov = marginal_covariance(&g, &g, i, &w).unwrap();
            assert!(close(cov, profile(&g, i, &w).unwrap().r, 1e-12));
            let add = Game::additive(vec![1.0, 5.0, -2.0]).unwrap();
            assert!(marginal_covariance(&add, &g, i, &w).unwrap().abs() < 1e-12);
        }
        let a = Game::symmetric(3, vec![0.0, 0.0, 1.0, 3.0]).unwrap();
        let b = Game::symmetric(3, vec![0.0, 1.0, 2.0, 4.0]).unwrap();
        let fast = marginal_covariance(&a, &b, PlayerId(0), &w).unwrap();
        let slow = marginal_covariance(
            &a.to_tabular().unwrap(),
            &b.to_tabular().unwrap(),
            PlayerId(0),
            &w,
        )
        .unwrap();
        assert!(fast >= 0.0);
        assert!(close(fast, slow, 1e-13));
        assert!(matches!(
            marginal_covariance(&a, &Game::majority(4).unwrap(), PlayerId(0), &w),
            Err(Error::PlayerCountMismatch { .. })
        ));
    }

    #[test]
    fn size_limit_is_enforced() {
        let g = Game::from_table(12, vec![0.0; 1 << 12]).unwrap();
        let engine = ExactEngine::new(10);
        assert_eq!(
            engine.profile(&g, PlayerId(0), &Weighting::Shapley),
            Err(Error::GameTooLargeForExact { n: 12, limit: 10 })
        );
        assert!(engine.all_profiles(&g, &Weighting::Shapley).is_err());
    }

    #[test]
    fn chunked_enumeration_matches_per_player_path() {
        // 2^18 coalitions forces several chunks in both paths
        let n = 18;
        let table: Vec<f64> = (0..1u64 << n)
            .map(|m| ((m.wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 40) as f64) / (1u64 << 24) as f64)
            .collect();
        let g = Game::from_table(n, table).unwrap();
        let all = all_profiles(&g, &Weighting::Shapley).unwrap();
        for i in [0usize, 7, 17] {
            let p = profile(&g, PlayerId(i), &Weighting::Shapley).unwrap();
            assert!(close(p.v, all[i].v, 1e-12) && close(p.r, all[i].r, 1e-12));
        }
    }

    #[test]
    fn from_moments_clamps_rounding_only() {
        let p = PlayerProfile::from_moments(PlayerId(0), 3.0, 9.0 - 1e-12).unwrap();
        assert_eq!(p.r, 0.0);
        assert!(matches!(
            PlayerProfile::from_moments(PlayerId(0), 3.0, 8.0),
            Err(Error::NumericalInstability { .. })
        ));
    }

    #[test]
    fn average_uncertainty_cases() {
        assert_eq!(average_uncertainty(&[]), Err(Error::EmptyInput));
        let p = PlayerProfile::from_moments(PlayerId(0), 0.0, 7.0).unwrap();
        assert_eq!(average_uncertainty(&[p]).unwrap(), 7.0);
    }
}
