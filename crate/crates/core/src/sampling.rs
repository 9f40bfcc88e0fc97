//! Monte Carlo estimation over uniformly random orderings.
//!
//! The set of players preceding `i` in a uniform ordering has exactly the
//! Shapley coalition law, so each sampled ordering yields one draw of
//! `d_i G(S)`. Streams come from xoshiro256++ seeded with the run seed;
//! chunk `c` advances that stream by `c` jumps of 2^128 draws, so chunks
//! never overlap and chunk 0 reproduces the single-threaded estimator.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coalition::PlayerId;
use crate::error::{Error, Result};
use crate::exact::Ordering;
use crate::game::{Game, Tally};

pub type StreamRng = Xoshiro256PlusPlus;

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.96;

/// RNG for chunk `chunk` of a run seeded with `seed`.
pub fn stream_rng(seed: u64, chunk: usize) -> StreamRng {
    let mut rng = StreamRng::seed_from_u64(seed);
    for _ in 0..chunk {
        rng.jump();
    }
    rng
}

/// Streaming count, mean and sum of squared deviations (Welford).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SampleStats {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl SampleStats {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Combines two disjoint sample sets (Chan et al.).
    pub fn merge(&self, other: &SampleStats) -> SampleStats {
        if other.count == 0 {
            return *self;
        }
        if self.count == 0 {
            return *other;
        }
        let count = self.count + other.count;
        let (na, nb, n) = (self.count as f64, other.count as f64, count as f64);
        let delta = other.mean - self.mean;
        let mean = if self.mean == other.mean {
            self.mean
        } else {
            (na * self.mean + nb * other.mean) / n
        };
        let m2 = self.m2 + other.m2 + delta * delta * na * nb / n;
        SampleStats { count, mean, m2 }
    }

    /// Bessel-corrected variance, clamped at zero.
    pub fn variance(&self) -> Option<f64> {
        (self.count >= 2).then(|| (self.m2 / (self.count - 1) as f64).max(0.0))
    }
}

impl FromIterator<f64> for SampleStats {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = SampleStats::new();
        for x in iter {
            s.push(x);
        }
        s
    }
}

/// Merges partial results pairwise, neighbours first, until one remains.
pub fn tree_merge(parts: &[SampleStats]) -> SampleStats {
    let mut level = parts.to_vec();
    if level.is_empty() {
        return SampleStats::new();
    }
    while level.len() > 1 {
        level = level
            .chunks(2)
            .map(|p| {
                if p.len() == 2 {
                    p[0].merge(&p[1])
                } else {
                    p[0]
                }
            })
            .collect();
    }
    level[0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub player: PlayerId,
    pub v_hat: f64,
    pub r_hat: f64,
    pub se_v: f64,
    pub ci95_v: (f64, f64),
    pub n_samples: u64,
    pub seed: u64,
    pub n_chunks: usize,
}

impl EstimateReport {
    fn from_stats(player: PlayerId, stats: &SampleStats, seed: u64, n_chunks: usize) -> Self {
        let r_hat = stats.variance().unwrap_or(0.0);
        let se_v = (r_hat / stats.count as f64).sqrt();
        EstimateReport {
            player,
            v_hat: stats.mean,
            r_hat,
            se_v,
            ci95_v: (stats.mean - Z_95 * se_v, stats.mean + Z_95 * se_v),
            n_samples: stats.count,
            seed,
            n_chunks,
        }
    }

    pub fn ci_contains(&self, x: f64) -> bool {
        self.ci95_v.0 <= x && x <= self.ci95_v.1
    }
}

/// Uniform permutation of `0..n` by Fisher-Yates.
pub fn sample_ordering<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Ordering {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    Ordering::from_vec_unchecked(perm)
}

fn check_request(game: &Game, i: PlayerId, n_samples: u64) -> Result<()> {
    game.check_player(i)?;
    if n_samples < 2 {
        return Err(Error::InsufficientSamples(n_samples as usize));
    }
    Ok(())
}

fn chunk_sizes(n_samples: u64, n_chunks: usize) -> impl Iterator<Item = u64> {
    let k = n_chunks as u64;
    (0..k).map(move |c| n_samples / k + u64::from(c < n_samples % k))
}

/// Marginal contribution of `i` to its predecessors in a shuffled `perm`.
#[inline]
fn marginal_at(game: &Game, perm: &[usize], i: usize) -> f64 {
    let mut tally = Tally::default();
    for &p in perm {
        if p == i {
            break;
        }
        tally.insert(game, p);
    }
    let before = game.tally_value(&tally);
    tally.insert(game, i);
    game.tally_value(&tally) - before
}

fn run_chunk(game: &Game, i: usize, count: u64, mut rng: StreamRng) -> SampleStats {
    let mut perm: Vec<usize> = (0..game.n_players()).collect();
    let mut stats = SampleStats::new();
    for _ in 0..count {
        perm.shuffle(&mut rng);
        stats.push(marginal_at(game, &perm, i));
    }
    stats
}

/// Single-stream estimate of `(V_i, R_i)`.
pub fn estimate(game: &Game, i: PlayerId, n_samples: u64, seed: u64) -> Result<EstimateReport> {
    check_request(game, i, n_samples)?;
    let stats = run_chunk(game, i.0, n_samples, stream_rng(seed, 0));
    Ok(EstimateReport::from_stats(i, &stats, seed, 1))
}

/// Chunked estimate; bit-reproducible for fixed `(seed, n_chunks)` however
/// the chunks are scheduled.
pub fn estimate_parallel(
    game: &Game,
    i: PlayerId,
    n_samples: u64,
    seed: u64,
    n_chunks: usize,
) -> Result<EstimateReport> {
    check_request(game, i, n_samples)?;
    if n_chunks == 0 {
        return Err(Error::NoChunks);
    }
    let sizes: Vec<u64> = chunk_sizes(n_samples, n_chunks).collect();
    let parts: Vec<SampleStats> = sizes
        .par_iter()
        .enumerate()
        .map(|(c, &count)| run_chunk(game, i.0, count, stream_rng(seed, c)))
        .collect();
    Ok(EstimateReport::from_stats(
        i,
        &tree_merge(&parts),
        seed,
        n_chunks,
    ))
}

/// Estimates every player from the same orderings. Each ordering gives all
/// players one draw, so per-player moments are unbiased but correlated
/// across players.
pub fn estimate_all(
    game: &Game,
    n_samples: u64,
    seed: u64,
    n_chunks: usize,
) -> Result<Vec<EstimateReport>> {
    check_request(game, PlayerId(0), n_samples)?;
    if n_chunks == 0 {
        return Err(Error::NoChunks);
    }
    let n = game.n_players();
    let sizes: Vec<u64> = chunk_sizes(n_samples, n_chunks).collect();
    let parts: Vec<Vec<SampleStats>> = sizes
        .par_iter()
        .enumerate()
        .map(|(c, &count)| {
            let mut rng = stream_rng(seed, c);
            let mut perm: Vec<usize> = (0..n).collect();
            let mut stats = vec![SampleStats::new(); n];
            for _ in 0..count {
                perm.shuffle(&mut rng);
                let mut tally = Tally::default();
                let mut prev = game.tally_value(&tally);
                for &p in &perm {
                    tally.insert(game, p);
                    let next = game.tally_value(&tally);
                    stats[p].push(next - prev);
                    prev = next;
                }
            }
            stats
        })
        .collect();
    Ok((0..n)
        .map(|p| {
            let per_player: Vec<SampleStats> = parts.iter().map(|s| s[p]).collect();
            EstimateReport::from_stats(PlayerId(p), &tree_merge(&per_player), seed, n_chunks)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::profile;
    use crate::game::tests::three_player_example;
    use crate::numeric::rel_diff;
    use crate::weighting::Weighting;
    use std::collections::HashMap;

    #[test]
    fn welford_matches_two_pass() {
        let xs: Vec<f64> = (0..500)
            .map(|k| ((k * 37) % 101) as f64 * 0.25 - 3.0)
            .collect();
        let s: SampleStats = xs.iter().copied().collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        assert!(rel_diff(s.mean, mean) < 1e-13);
        assert!(rel_diff(s.variance().unwrap(), var) < 1e-12);
        assert_eq!(SampleStats::new().variance(), None);
    }

    #[test]
    fn merge_equals_concatenation() {
        let xs: Vec<f64> = (0..300).map(|k| (k as f64).sin() * 10.0).collect();
        let whole: SampleStats = xs.iter().copied().collect();
        for cut in [0, 1, 150, 299, 300] {
            let a: SampleStats = xs[..cut].iter().copied().collect();
            let b: SampleStats = xs[cut..].iter().copied().collect();
            let m = a.merge(&b);
            assert_eq!(m.count, whole.count);
            assert!(rel_diff(m.mean, whole.mean) < 1e-10);
            assert!(rel_diff(m.m2, whole.m2) < 1e-10);
        }
    }

    #[test]
    fn single_player_ordering_is_identity() {
        let mut rng = stream_rng(3, 0);
        for _ in 0..10 {
            assert_eq!(sample_ordering(1, &mut rng).as_slice(), &[0]);
        }
    }

    #[test]
    fn orderings_are_uniform() {
        let mut rng = stream_rng(11, 0);
        let mut freq: HashMap<Vec<usize>, u32> = HashMap::new();
        let total = 60_000;
        for _ in 0..total {
            *freq
                .entry(sample_ordering(3, &mut rng).as_slice().to_vec())
                .or_default() += 1;
        }
        assert_eq!(freq.len(), 6);
        for (perm, c) in freq {
            let f = c as f64 / total as f64;
            assert!((f - 1.0 / 6.0).abs() < 0.01, "{perm:?}: {f}");
        }
    }

    #[test]
    fn seeded_orderings_repeat() {
        let a: Vec<Ordering> = {
            let mut r = stream_rng(42, 0);
            (0..20).map(|_| sample_ordering(7, &mut r)).collect()
        };
        let b: Vec<Ordering> = {
            let mut r = stream_rng(42, 0);
            (0..20).map(|_| sample_ordering(7, &mut r)).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn additive_estimates_are_exact() {
        let g = Game::additive(vec![3.0, -1.0, 2.0, 5.0]).unwrap();
        for n_samples in [2, 17, 1000] {
            let e = estimate(&g, PlayerId(3), n_samples, 9).unwrap();
            assert_eq!((e.v_hat, e.r_hat), (5.0, 0.0));
        }
    }

    #[test]
    fn example_game_estimate() {
        let g = three_player_example();
        let e = estimate(&g, PlayerId(0), 100_000, 2024).unwrap();
        assert!((e.v_hat - 20.0).abs() < 3.0 * e.se_v, "{e:?}");
        assert!(rel_diff(e.r_hat, 299.0) < 0.1);
        assert!(e.ci_contains(e.v_hat));
        assert!(((e.ci95_v.1 - e.ci95_v.0) - 2.0 * Z_95 * e.se_v).abs() < 1e-12);
    }

    #[test]
    fn one_chunk_equals_single_stream() {
        let g = three_player_example();
        let a = estimate(&g, PlayerId(1), 5000, 77).unwrap();
        let b = estimate_parallel(&g, PlayerId(1), 5000, 77, 1).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn chunk_counts_stay_consistent() {
        let g = three_player_example();
        let exact = profile(&g, PlayerId(2), &Weighting::Shapley).unwrap();
        for k in [2, 4, 8] {
            let e = estimate_parallel(&g, PlayerId(2), 40_000, 5, k).unwrap();
            assert_eq!(e.n_samples, 40_000);
            assert!((e.v_hat - exact.v).abs() < 4.0 * e.se_v, "k={k} {e:?}");
            let again = estimate_parallel(&g, PlayerId(2), 40_000, 5, k).unwrap();
            assert_eq!(e, again);
        }
    }

    #[test]
    fn merge_order_is_fixed() {
        let parts: Vec<SampleStats> = (0..7)
            .map(|c| {
                let mut rng = stream_rng(1, c);
                (0..100).map(|_| rng.random::<f64>()).collect()
            })
            .collect();
        assert_eq!(tree_merge(&parts), tree_merge(&parts.clone()));
        let flat: SampleStats = parts.iter().fold(SampleStats::new(), |a, b| a.merge(b));
        let t = tree_merge(&parts);
        assert!(rel_diff(flat.mean, t.mean) < 1e-12 && rel_diff(flat.m2, t.m2) < 1e-12);
    }

    #[test]
    fn errors() {
        let g = three_player_example();
        assert_eq!(
            estimate(&g, PlayerId(0), 1, 0),
            Err(Error::InsufficientSamples(1))
        );
        assert_eq!(
            estimate_parallel(&g, PlayerId(0), 10, 0, 0),
            Err(Error::NoChunks)
        );
        assert!(estimate(&g, PlayerId(3), 10, 0).is_err());
    }

    #[test]
    fn all_players_estimator() {
        let g = three_player_example();
        let all = estimate_all(&g, 50_000, 8, 4).unwrap();
        let sum: f64 = all.iter().map(|e| e.v_hat).sum();
        // every ordering telescopes to G(A) = 60
        assert!((sum - 60.0).abs() < 1e-9);
        for (e, r) in all.iter().zip([299.0, 230.0, 155.0]) {
            assert!((e.v_hat - 20.0).abs() < 4.0 * e.se_v);
            assert!(rel_diff(e.r_hat, r) < 0.1);
        }
    }
}
