//! Closed forms and the generic enumeration must agree wherever both apply.

use coalition_var::fastpath::{symmetric_profile_weighted, two_type_profile_weighted};
use coalition_var::numeric::rel_diff;
use coalition_var::{ExactEngine, Game, PlayerId, TypeTag, Weighting};

fn close(a: f64, b: f64) -> bool {
    rel_diff(a, b) <= 1e-10
}

#[test]
fn symmetric_games_all_weightings() {
    let engine = ExactEngine::default();
    for n in 1..=12 {
        let g: Vec<f64> = (0..=n)
            .map(|s| ((s * s * 7 + 3 * s) % 11) as f64 - 4.0)
            .collect();
        let game = Game::symmetric(n, g.clone()).unwrap();
        let custom: Vec<f64> = {
            // Weight proportional to s + 1 per size class, spread over its coalitions.
            let binom = |m: usize, k: usize| {
                (0..k).fold(1.0, |acc, j| acc * (m - j) as f64 / (j + 1) as f64)
            };
            let mass: Vec<f64> = (0..n).map(|s| (s + 1) as f64).collect();
            let total: f64 = mass.iter().sum();
            (0..n).map(|s| mass[s] / total / binom(n - 1, s)).collect()
        };
        for w in [
            Weighting::Shapley,
            Weighting::Banzhaf,
            Weighting::custom(n, custom).unwrap(),
        ] {
            let fast = symmetric_profile_weighted(n, &g, &w).unwrap();
            let slow = engine.enumerate(&game, PlayerId(n - 1), &w).unwrap();
            assert!(
                close(fast.v, slow.v) && close(fast.r, slow.r),
                "n={n} {w:?}"
            );
        }
    }
}

#[test]
fn two_type_games_both_types() {
    let engine = ExactEngine::default();
    for n_a in 0..=6 {
        for n_b in 0..=6 {
            if n_a + n_b == 0 {
                continue;
            }
            let game = Game::two_type_from_fn(n_a, n_b, |a, b| {
                (a * a) as f64 + 0.5 * (a * b) as f64 - b as f64
            })
            .unwrap();
            let worth = match game.form() {
                coalition_var::GameForm::TwoType { worth, .. } => worth.clone(),
                _ => unreachable!(),
            };
            for w in [Weighting::Shapley, Weighting::Banzhaf] {
                for (tag, player) in [(TypeTag::A, 0), (TypeTag::B, n_a + n_b - 1)] {
                    let present = match tag {
                        TypeTag::A => n_a > 0,
                        TypeTag::B => n_b > 0,
                    };
                    if !present {
                        continue;
                    }
                    let fast = two_type_profile_weighted(n_a, n_b, &worth, tag, &w).unwrap();
                    let slow = engine.enumerate(&game, PlayerId(player), &w).unwrap();
                    assert!(
                        close(fast.v, slow.v) && close(fast.r, slow.r),
                        "{n_a}x{n_b} {tag:?} {w:?}"
                    );
                }
            }
        }
    }
}

#[test]
fn sqrt_product_matches_enumeration() {
    let engine = ExactEngine::default();
    let game = Game::sqrt_product(7, 9).unwrap();
    for i in [0, 6, 7, 15] {
        let fast = engine
            .profile(&game, PlayerId(i), &Weighting::Shapley)
            .unwrap();
        let slow = engine
            .enumerate(&game, PlayerId(i), &Weighting::Shapley)
            .unwrap();
        assert!(close(fast.v, slow.v) && close(fast.r, slow.r));
    }
}

#[test]
fn all_profiles_matches_single_player_path() {
    let engine = ExactEngine::default();
    let table: Vec<f64> = (0..1u64 << 9)
        .map(|m| ((m * 2654435761) % 1000) as f64 / 100.0)
        .collect();
    let mut table = table;
    table[0] = 0.0;
    let game = Game::from_table(9, table).unwrap();
    let all = engine.all_profiles(&game, &Weighting::Banzhaf).unwrap();
    for p in &all {
        let one = engine
            .enumerate(&game, p.player, &Weighting::Banzhaf)
            .unwrap();
        assert!(close(p.v, one.v) && close(p.r, one.r));
    }
}
