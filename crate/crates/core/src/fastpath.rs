//! Closed forms for games whose worth depends on counts only.
//!
//! Under a size-dependent weighting the size of the joined coalition has law
//! `q(s) = C(n-1, s) p(s)`; for the Shapley weighting it is uniform on
//! `0..n`. In a symmetric game the marginal contribution depends on `s`
//! alone. In a two-type game, given `s`, the number of type-A players among
//! the joined coalition is hypergeometric over the other `n - 1` players.

use crate::coalition::PlayerId;
use crate::error::{Error, Result};
use crate::exact::PlayerProfile;
use crate::game::TypeTag;
use crate::numeric::CompensatedSum;
use crate::weighting::Weighting;

/// Combines per-size conditional moments into a profile. The Shapley law is
/// handled as a plain mean so that integer-valued games stay exact.
fn combine(w: &Weighting, n: usize, first: &[f64], second: &[f64]) -> Result<PlayerProfile> {
    let (v, e2) = if w.is_shapley() {
        let f: CompensatedSum = first.iter().copied().collect();
        let s: CompensatedSum = second.iter().copied().collect();
        (f.value() / n as f64, s.value() / n as f64)
    } else {
        let q = w.size_distribution(n)?;
        let f: CompensatedSum = q.iter().zip(first).map(|(a, b)| a * b).collect();
        let s: CompensatedSum = q.iter().zip(second).map(|(a, b)| a * b).collect();
        (f.value(), s.value())
    };
    PlayerProfile::from_moments(PlayerId(0), v, e2)
}

fn check_profile_len(n: usize, g: &[f64]) -> Result<()> {
    if n == 0 {
        return Err(Error::NoPlayers);
    }
    if g.len() != n + 1 {
        return Err(Error::LengthMismatch {
            expected: n + 1,
            actual: g.len(),
        });
    }
    Ok(())
}

/// Shapley profile of a symmetric game with size profile `g`, in O(n).
pub fn symmetric_profile(n: usize, g: &[f64]) -> Result<PlayerProfile> {
    symmetric_profile_weighted(n, g, &Weighting::Shapley)
}

pub fn symmetric_profile_weighted(n: usize, g: &[f64], w: &Weighting) -> Result<PlayerProfile> {
    check_profile_len(n, g)?;
    let delta: Vec<f64> = g.windows(2).map(|x| x[1] - x[0]).collect();
    let sq: Vec<f64> = delta.iter().map(|d| d * d).collect();
    combine(w, n, &delta, &sq)
}

/// `Cov(d G, d H)` for two symmetric games.
pub fn symmetric_covariance_weighted(n: usize, g: &[f64], h: &[f64], w: &Weighting) -> Result<f64> {
    check_profile_len(n, g)?;
    check_profile_len(n, h)?;
    let q = w.size_distribution(n)?;
    let dg = g.windows(2).map(|x| x[1] - x[0]);
    let dh = h.windows(2).map(|x| x[1] - x[0]);
    let mut eg = CompensatedSum::new();
    let mut eh = CompensatedSum::new();
    let mut egh = CompensatedSum::new();
    for ((a, b), p) in dg.zip(dh).zip(&q) {
        eg.add(p * a);
        eh.add(p * b);
        egh.add(p * a * b);
    }
    Ok(egh.value() - eg.value() * eh.value())
}

/// Hypergeometric pmf of the type-A count in a draw of `s` from a population
/// with `pop_a` type-A and `pop_b` type-B members. Returns the first support
/// point and the probabilities.
///
/// Built by the ratio recurrence outward from the mode, so the largest term
/// is 1 before normalisation and nothing overflows.
pub(crate) fn hypergeometric_pmf(pop_a: usize, pop_b: usize, s: usize) -> (usize, Vec<f64>) {
    debug_assert!(s <= pop_a + pop_b);
    let lo = s.saturating_sub(pop_b);
    let hi = s.min(pop_a);
    let len = hi - lo + 1;
    let mode = (((s + 1) * (pop_a + 1)) / (pop_a + pop_b + 2)).clamp(lo, hi);

    // h(a+1) / h(a)
    let up = |a: usize| ((pop_a - a) * (s - a)) as f64 / ((a + 1) * (pop_b + a + 1 - s)) as f64;

    let mut w = vec![0.0; len];
    w[mode - lo] = 1.0;
    for a in mode..hi {
        w[a + 1 - lo] = w[a - lo] * up(a);
    }
    for a in (lo..mode).rev() {
        w[a - lo] = w[a + 1 - lo] / up(a);
    }
    let total: CompensatedSum = w.iter().copied().collect();
    let total = total.value();
    for x in &mut w {
        *x /= total;
    }
    (lo, w)
}

/// Shapley profile of a type-`tag` player in a two-type game, in O(n^2).
pub fn two_type_profile(
    n_a: usize,
    n_b: usize,
    worth: &[f64],
    tag: TypeTag,
) -> Result<PlayerProfile> {
    two_type_profile_weighted(n_a, n_b, worth, tag, &Weighting::Shapley)
}

pub fn two_type_profile_weighted(
    n_a: usize,
    n_b: usize,
    worth: &[f64],
    tag: TypeTag,
    w: &Weighting,
) -> Result<PlayerProfile> {
    let n = n_a + n_b;
    if n == 0 {
        return Err(Error::NoPlayers);
    }
    let cols = n_b + 1;
    if worth.len() != (n_a + 1) * cols {
        return Err(Error::TableShapeMismatch {
            rows: n_a + 1,
            cols,
            actual: worth.len(),
        });
    }
    let (other_a, other_b) = match tag {
        TypeTag::A if n_a > 0 => (n_a - 1, n_b),
        TypeTag::B if n_b > 0 => (n_a, n_b - 1),
        _ => {
            return Err(Error::InvalidPlayer {
                player: PlayerId(0),
                n,
            })
        }
    };
    let at = |a: usize, b: usize| worth[a * cols + b];
    let marginal = |a: usize, b: usize| match tag {
        TypeTag::A => at(a + 1, b) - at(a, b),
        TypeTag::B => at(a, b + 1) - at(a, b),
    };

    let mut first = Vec::with_capacity(n);
    let mut second = Vec::with_capacity(n);
    for s in 0..n {
        let (lo, pmf) = hypergeometric_pmf(other_a, other_b, s);
        let mut m1 = CompensatedSum::new();
        let mut m2 = CompensatedSum::new();
        for (k, &p) in pmf.iter().enumerate() {
            let a = lo + k;
            let d = marginal(a, s - a);
            m1.add(p * d);
            m2.add(p * d * d);
        }
        first.push(m1.value());
        second.push(m2.value());
    }
    combine(w, n, &first, &second)
}
