//! Characteristic-function games.
//!
//! A [`Game`] is immutable once built. Tabular games store one value per
//! coalition mask; the closed forms (additive, symmetric, two-type) evaluate
//! on demand and the last two also answer count-based queries, so they scale
//! past the mask limit.

use serde::{Deserialize, Serialize};

use crate::coalition::{Coalition, PlayerId, MAX_MASK_PLAYERS};
use crate::error::{Error, Result};

/// Largest game that may be expanded into an explicit table.
pub const MAX_TABULAR_PLAYERS: usize = 30;

/// Largest game for the O(3^n) superadditivity scan over tabular values.
pub const MAX_SUPERADDITIVE_CHECK: usize = 16;

/// Player type in a two-type game. Players `0..n_a` are type A, the rest B.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TypeTag {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GameForm {
    /// One value per coalition mask, length `2^n`.
    Tabular(Vec<f64>),
    /// `G(S) = sum of weights[i] over i in S`.
    Additive(Vec<f64>),
    /// `G(S) = g[|S|]`, length `n + 1`.
    Symmetric(Vec<f64>),
    /// `G(S) = worth[a * (n_b + 1) + b]` where `a`, `b` count the type-A and
    /// type-B members of `S`.
    TwoType {
        n_a: usize,
        n_b: usize,
        worth: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Game {
    n: usize,
    form: GameForm,
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().find(|v| !v.is_finite()) {
        Some(&v) => Err(Error::NonFinite(v)),
        None => Ok(()),
    }
}

impl Game {
    /// Builds a tabular game from `(coalition, value)` pairs.
    ///
    /// Every non-empty coalition must appear exactly once. The empty
    /// coalition may be given; it defaults to 0.
    pub fn tabular<I>(n: usize, values: I) -> Result<Game>
    where
        I: IntoIterator<Item = (Coalition, f64)>,
    {
        if n == 0 {
            return Err(Error::NoPlayers);
        }
        if n > MAX_MASK_PLAYERS {
            return Err(Error::TooManyPlayers {
                n,
                limit: MAX_MASK_PLAYERS,
            });
        }
        if n > MAX_TABULAR_PLAYERS {
            return Err(Error::TooManyPlayers {
                n,
                limit: MAX_TABULAR_PLAYERS,
            });
        }
        let size = 1usize << n;
        let mut table = vec![0.0; size];
        let mut seen = vec![false; size];
        for (c, v) in values {
            if !c.fits(n) {
                return Err(Error::InvalidCoalition { coalition: c, n });
            }
            if !v.is_finite() {
                return Err(Error::NonFinite(v));
            }
            let m = c.mask() as usize;
            if seen[m] {
                return Err(Error::DuplicateCoalition(c));
            }
            seen[m] = true;
            table[m] = v;
        }
        if let Some(m) = (1..size).find(|&m| !seen[m]) {
            return Err(Error::MissingCoalition(Coalition::from_mask(m as u64)));
        }
        Ok(Game {
            n,
            form: GameForm::Tabular(table),
        })
    }

    /// Builds a tabular game from a dense table indexed by coalition mask.
    pub fn from_table(n: usize, table: Vec<f64>) -> Result<Game> {
        if n == 0 {
            return Err(Error::NoPlayers);
        }
        if n > MAX_TABULAR_PLAYERS {
            return Err(Error::TooManyPlayers {
                n,
                limit: MAX_TABULAR_PLAYERS,
            });
        }
        if table.len() != 1 << n {
            return Err(Error::LengthMismatch {
                expected: 1 << n,
                actual: table.len(),
            });
        }
        check_finite(&table)?;
        Ok(Game {
            n,
            form: GameForm::Tabular(table),
        })
    }

    pub fn additive(weights: Vec<f64>) -> Result<Game> {
        if weights.is_empty() {
            return Err(Error::NoPlayers);
        }
        if weights.len() > MAX_MASK_PLAYERS {
            return Err(Error::TooManyPlayers {
                n: weights.len(),
                limit: MAX_MASK_PLAYERS,
            });
        }
        check_finite(&weights)?;
        Ok(Game {
            n: weights.len(),
            form: GameForm::Additive(weights),
        })
    }

    /// Worth `n` for coalitions larger than half the players, 0 otherwise.
    pub fn majority(n: usize) -> Result<Game> {
        if n == 0 {
            return Err(Error::NoPlayers);
        }
        let g = (0..=n)
            .map(|s| if 2 * s > n { n as f64 } else { 0.0 })
            .collect();
        Ok(Game {
            n,
            form: GameForm::Symmetric(g),
        })
    }

    /// Worth depends only on coalition size: `G(S) = g[|S|]`.
    pub fn symmetric(n: usize, g: Vec<f64>) -> Result<Game> {
        if n == 0 {
            return Err(Error::NoPlayers);
        }
        if g.len() != n + 1 {
            return Err(Error::LengthMismatch {
                expected: n + 1,
                actual: g.len(),
            });
        }
        check_finite(&g)?;
        Ok(Game {
            n,
            form: GameForm::Symmetric(g),
        })
    }

    /// Worth depends only on the type counts; `worth` is row-major over
    /// `a in 0..=n_a`, `b in 0..=n_b`.
    pub fn two_type(n_a: usize, n_b: usize, worth: Vec<f64>) -> Result<Game> {
        if n_a + n_b == 0 {
            return Err(Error::NoPlayers);
        }
        let (rows, cols) = (n_a + 1, n_b + 1);
        if worth.len() != rows * cols {
            return Err(Error::TableShapeMismatch {
                rows,
                cols,
                actual: worth.len(),
            });
        }
        check_finite(&worth)?;
        Ok(Game {
            n: n_a + n_b,
            form: GameForm::TwoType { n_a, n_b, worth },
        })
    }

    pub fn two_type_from_fn<F>(n_a: usize, n_b: usize, f: F) -> Result<Game>
    where
        F: Fn(usize, usize) -> f64,
    {
        let worth = (0..=n_a)
            .flat_map(|a| (0..=n_b).map(move |b| (a, b)))
            .map(|(a, b)| f(a, b))
            .collect();
        Game::two_type(n_a, n_b, worth)
    }

    /// `sqrt(a * b)`: the production economy (capitalists and workers) and
    /// the two-good market economy share this worth function.
    pub fn sqrt_product(n_a: usize, n_b: usize) -> Result<Game> {
        Game::two_type_from_fn(n_a, n_b, |a, b| ((a * b) as f64).sqrt())
    }

    pub fn n_players(&self) -> usize {
        self.n
    }

    pub fn form(&self) -> &GameForm {
        &self.form
    }

    pub fn grand_coalition(&self) -> Coalition {
        Coalition::grand(self.n)
    }

    pub fn players(&self) -> impl Iterator<Item = PlayerId> {
        (0..self.n).map(PlayerId)
    }

    pub fn check_player(&self, i: PlayerId) -> Result<()> {
        if i.0 < self.n {
            Ok(())
        } else {
            Err(Error::InvalidPlayer {
                player: i,
                n: self.n,
            })
        }
    }

    /// Whether coalitions of this game can be addressed by mask.
    pub fn mask_addressable(&self) -> bool {
        self.n <= MAX_MASK_PLAYERS
    }

    pub fn type_of(&self, i: PlayerId) -> Option<TypeTag> {
        match self.form {
            GameForm::TwoType { n_a, .. } if i.0 < self.n => {
                Some(if i.0 < n_a { TypeTag::A } else { TypeTag::B })
            }
            _ => None,
        }
    }

    #[inline]
    fn type_a_mask(n_a: usize) -> u64 {
        if n_a >= 64 {
            u64::MAX
        } else {
            (1u64 << n_a) - 1
        }
    }

    /// `G(S)`. The coalition must fit the game.
    #[inline]
    pub fn value(&self, s: Coalition) -> f64 {
        debug_assert!(s.fits(self.n));
        match &self.form {
            GameForm::Tabular(t) => t[s.mask() as usize],
            GameForm::Additive(w) => s.members().map(|p| w[p.0]).sum(),
            GameForm::Symmetric(g) => g[s.len()],
            GameForm::TwoType { n_a, n_b, worth } => {
                let a = (s.mask() & Self::type_a_mask(*n_a)).count_ones() as usize;
                let b = s.len() - a;
                worth[a * (n_b + 1) + b]
            }
        }
    }

    /// `G(N)`, available at any size.
    pub fn grand_value(&self) -> f64 {
        match &self.form {
            GameForm::Tabular(t) => t[t.len() - 1],
            GameForm::Additive(w) => w.iter().sum(),
            GameForm::Symmetric(g) => g[self.n],
            GameForm::TwoType { worth, .. } => worth[worth.len() - 1],
        }
    }

    /// `G(S+i) - G(S)`.
    pub fn marginal_contribution(&self, i: PlayerId, s: Coalition) -> Result<f64> {
        self.check_player(i)?;
        if !s.fits(self.n) {
            return Err(Error::InvalidCoalition {
                coalition: s,
                n: self.n,
            });
        }
        if s.contains(i) {
            return Err(Error::PlayerInCoalition {
                player: i,
                coalition: s,
            });
        }
        Ok(self.value(s.with(i)) - self.value(s))
    }

    /// Size profile `g` when the worth depends only on coalition size.
    pub fn size_profile(&self) -> Option<Vec<f64>> {
        match &self.form {
            GameForm::Symmetric(g) => Some(g.clone()),
            GameForm::Additive(w) => {
                if w.iter().all(|&x| x == w[0]) {
                    // Same summation path as `value`.
                    let g = (0..=self.n)
                        .map(|s| std::iter::repeat_n(w[0], s).sum())
                        .collect();
                    Some(g)
                } else {
                    None
                }
            }
            GameForm::TwoType { n_a, n_b, worth } => {
                let cols = n_b + 1;
                let mut g: Vec<Option<f64>> = vec![None; self.n + 1];
                for a in 0..=*n_a {
                    for b in 0..=*n_b {
                        let v = worth[a * cols + b];
                        match g[a + b] {
                            None => g[a + b] = Some(v),
                            Some(prev) if prev != v => return None,
                            _ => {}
                        }
                    }
                }
                g.into_iter().collect()
            }
            GameForm::Tabular(t) => {
                let mut g: Vec<Option<f64>> = vec![None; self.n + 1];
                for (m, &v) in t.iter().enumerate() {
                    let s = m.count_ones() as usize;
                    match g[s] {
                        None => g[s] = Some(v),
                        Some(prev) if prev != v => return None,
                        _ => {}
                    }
                }
                g.into_iter().collect()
            }
        }
    }

    /// Expands any form into an explicit table.
    pub fn to_tabular(&self) -> Result<Game> {
        if let GameForm::Tabular(_) = self.form {
            return Ok(self.clone());
        }
        if self.n > MAX_TABULAR_PLAYERS {
            return Err(Error::TooManyPlayers {
                n: self.n,
                limit: MAX_TABULAR_PLAYERS,
            });
        }
        let table = (0..1u64 << self.n)
            .map(|m| self.value(Coalition::from_mask(m)))
            .collect();
        Ok(Game {
            n: self.n,
            form: GameForm::Tabular(table),
        })
    }

    fn same_players(&self, other: &Game) -> Result<()> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(Error::PlayerCountMismatch {
                left: self.n,
                right: other.n,
            })
        }
    }

    fn map_values(&self, f: impl Fn(f64) -> f64) -> Game {
        let map = |v: &Vec<f64>| v.iter().map(|&x| f(x)).collect::<Vec<_>>();
        let form = match &self.form {
            GameForm::Tabular(t) => GameForm::Tabular(map(t)),
            GameForm::Additive(w) => GameForm::Additive(map(w)),
            GameForm::Symmetric(g) => GameForm::Symmetric(map(g)),
            GameForm::TwoType { n_a, n_b, worth } => GameForm::TwoType {
                n_a: *n_a,
                n_b: *n_b,
                worth: map(worth),
            },
        };
        Game { n: self.n, form }
    }

    /// Pointwise combination, keeping a shared closed form when possible.
    fn zip_values(&self, other: &Game, f: impl Fn(f64, f64) -> f64) -> Result<Game> {
        self.same_players(other)?;
        let zip = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(&a, &b)| f(a, b)).collect();
        let form = match (&self.form, &other.form) {
            (GameForm::Additive(x), GameForm::Additive(y)) => GameForm::Additive(zip(x, y)),
            (GameForm::Symmetric(x), GameForm::Symmetric(y)) => GameForm::Symmetric(zip(x, y)),
            (
                GameForm::TwoType { n_a, n_b, worth: x },
                GameForm::TwoType {
                    n_a: n_a2,
                    worth: y,
                    ..
                },
            ) if n_a == n_a2 => GameForm::TwoType {
                n_a: *n_a,
                n_b: *n_b,
                worth: zip(x, y),
            },
            _ => {
                let (a, b) = (self.to_tabular()?, other.to_tabular()?);
                match (a.form, b.form) {
                    (GameForm::Tabular(x), GameForm::Tabular(y)) => GameForm::Tabular(zip(&x, &y)),
                    _ => unreachable!("to_tabular returns tabular games"),
                }
            }
        };
        Ok(Game { n: self.n, form })
    }

    /// `tG`.
    pub fn scale(&self, t: f64) -> Result<Game> {
        if !t.is_finite() {
            return Err(Error::NonFinite(t));
        }
        Ok(self.map_values(|x| t * x))
    }

    /// `G + H`.
    pub fn add(&self, other: &Game) -> Result<Game> {
        self.zip_values(other, |x, y| x + y)
    }

    /// `alpha G + (1 - alpha) H`, evaluated as `H + alpha (G - H)` so that
    /// mixing a game with itself returns it unchanged.
    pub fn mix(&self, other: &Game, alpha: f64) -> Result<Game> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidAlpha(alpha));
        }
        if alpha == 1.0 {
            self.same_players(other)?;
            return Ok(self.clone());
        }
        self.zip_values(other, |g, h| h + alpha * (g - h))
    }

    /// `G(S u T) >= G(S) + G(T)` for all disjoint `S`, `T`.
    pub fn is_superadditive(&self) -> Result<bool> {
        match &self.form {
            GameForm::Additive(_) => Ok(true),
            GameForm::Symmetric(g) => {
                let n = self.n;
                Ok((0..=n).all(|s| (0..=n - s).all(|t| g[s + t] >= g[s] + g[t])))
            }
            GameForm::TwoType { n_a, n_b, worth } => {
                let cols = n_b + 1;
                let w = |a: usize, b: usize| worth[a * cols + b];
                for a1 in 0..=*n_a {
                    for b1 in 0..=*n_b {
                        for a2 in 0..=n_a - a1 {
                            for b2 in 0..=n_b - b1 {
                                if w(a1 + a2, b1 + b2) < w(a1, b1) + w(a2, b2) {
                                    return Ok(false);
                                }
                            }
                        }
                    }
                }
                Ok(true)
            }
            GameForm::Tabular(t) => {
                if self.n > MAX_SUPERADDITIVE_CHECK {
                    return Err(Error::TooLargeForExactCheck(self.n));
                }
                if t[0] > 0.0 {
                    return Ok(false);
                }
                for s in 1..t.len() {
                    // Proper non-empty submasks; each split is visited twice.
                    let mut sub = (s - 1) & s;
                    while sub > 0 {
                        if t[s] < t[sub] + t[s ^ sub] {
                            return Ok(false);
                        }
                        sub = (sub - 1) & s;
                    }
                }
                Ok(true)
            }
        }
    }

    /// Worth depends only on size through a nondecreasing function with
    /// nondecreasing increments.
    pub fn is_symmetric_convex(&self) -> Result<bool> {
        let g = self.size_profile().ok_or(Error::NotSymmetric)?;
        let diffs: Vec<f64> = g.windows(2).map(|w| w[1] - w[0]).collect();
        Ok(diffs.first().is_none_or(|&d| d >= 0.0) && diffs.windows(2).all(|w| w[1] >= w[0]))
    }
}

/// Incremental coalition state used when walking an ordering; works for any
/// player count the closed forms support.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Tally {
    mask: u64,
    size: usize,
    count_a: usize,
}

impl Tally {
    #[inline]
    pub(crate) fn insert(&mut self, game: &Game, p: usize) {
        if p < 64 {
            self.mask |= 1u64 << p;
        }
        self.size += 1;
        if let GameForm::TwoType { n_a, .. } = game.form {
            if p < n_a {
                self.count_a += 1;
            }
        }
    }
}

impl Game {
    #[inline]
    pub(crate) fn tally_value(&self, t: &Tally) -> f64 {
        match &self.form {
            GameForm::Tabular(v) => v[t.mask as usize],
            GameForm::Additive(_) => self.value(Coalition::from_mask(t.mask)),
            GameForm::Symmetric(g) => g[t.size],
            GameForm::TwoType { n_b, worth, .. } => {
                worth[t.count_a * (n_b + 1) + t.size - t.count_a]
            }
        }
    }
}
