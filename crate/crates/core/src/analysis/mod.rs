//! Interpretation formulas, significance testing, randomized property
//! suites, the superadditive-pair probe and asymptotic sweeps.

pub mod conjecture;
pub mod mixture;
pub mod properties;
pub mod significance;
pub mod sweep;

use rand::{Rng, SeedableRng};

use crate::game::Game;
use crate::sampling::StreamRng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent stream for one trial, derived from `(seed, tag, trial)` so
/// trials can run in any order.
pub(crate) fn trial_rng(seed: u64, tag: u64, trial: u64) -> StreamRng {
    let s = splitmix64(splitmix64(splitmix64(seed) ^ tag) ^ trial);
    StreamRng::seed_from_u64(s)
}

/// Tabular game with `G(empty) = 0` and every other value uniform on [-1, 1].
pub(crate) fn random_table(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut t: Vec<f64> = (0..1usize << n)
        .map(|_| rng.random_range(-1.0..=1.0))
        .collect();
    t[0] = 0.0;
    t
}

pub(crate) fn random_game(n: usize, rng: &mut impl Rng) -> Game {
    Game::from_table(n, random_table(n, rng)).expect("valid table")
}

/// FNV-1a over the bit patterns; identifies witness games in reports.
pub(crate) fn fingerprint<'a>(values: impl IntoIterator<Item = &'a f64>) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for v in values {
        for b in v.to_bits().to_le_bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    format!("{h:016x}")
}
