//! Players and coalitions.
//!
//! A coalition is a bit mask: player `i` is bit `i`. Masks cover up to
//! [`MAX_MASK_PLAYERS`] players; symmetric and two-type games can go beyond
//! that through count-based queries on [`crate::game::Game`].

use std::fmt;

use serde::{Deserialize, Serialize};

/// Largest player count that fits the mask encoding.
pub const MAX_MASK_PLAYERS: usize = 62;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PlayerId(pub usize);

impl PlayerId {
    pub fn index(self) -> usize {
        self.0
    }

    #[inline]
    pub(crate) fn bit(self) -> u64 {
        1u64 << self.0
    }
}

impl fmt::Display for PlayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<usize> for PlayerId {
    fn from(i: usize) -> Self {
        PlayerId(i)
    }
}

#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct Coalition(u64);

impl Coalition {
    pub const EMPTY: Coalition = Coalition(0);

    pub fn from_mask(mask: u64) -> Self {
        Coalition(mask)
    }

    /// The grand coalition of `n` players.
    pub fn grand(n: usize) -> Self {
        debug_assert!(n <= 64);
        if n >= 64 {
            Coalition(u64::MAX)
        } else {
            Coalition((1u64 << n) - 1)
        }
    }

    pub fn from_members<I>(members: I) -> Self
    where
        I: IntoIterator,
        I::Item: Into<PlayerId>,
    {
        Coalition(members.into_iter().fold(0, |m, p| m | p.into().bit()))
    }

    #[inline]
    pub fn mask(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn contains(self, p: PlayerId) -> bool {
        p.0 < 64 && self.0 & p.bit() != 0
    }

    #[inline]
    pub fn with(self, p: PlayerId) -> Self {
        Coalition(self.0 | p.bit())
    }

    #[inline]
    pub fn without(self, p: PlayerId) -> Self {
        Coalition(self.0 & !p.bit())
    }

    #[inline]
    pub fn union(self, other: Coalition) -> Self {
        Coalition(self.0 | other.0)
    }

    #[inline]
    pub fn is_disjoint(self, other: Coalition) -> bool {
        self.0 & other.0 == 0
    }

    /// True when every member is below `n`.
    pub fn fits(self, n: usize) -> bool {
        n >= 64 || self.0 >> n == 0
    }

    /// Members in increasing index order.
    pub fn members(self) -> Members {
        Members(self.0)
    }

    /// All subsets of this coalition, starting from the empty set.
    pub fn subsets(self) -> Subsets {
        Subsets {
            set: self.0,
            next: Some(0),
        }
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, p) in self.members().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("}")
    }
}

pub struct Members(u64);

impl Iterator for Members {
    type Item = PlayerId;

    fn next(&mut self) -> Option<PlayerId> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(PlayerId(i))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Members {}

/// Submask enumeration in increasing numeric order.
pub struct Subsets {
    set: u64,
    next: Option<u64>,
}

impl Iterator for Subsets {
    type Item = Coalition;

    fn next(&mut self) -> Option<Coalition> {
        let cur = self.next?;
        self.next = if cur == self.set {
            None
        } else {
            Some(cur.wrapping_sub(self.set) & self.set)
        };
        Some(Coalition(cur))
    }
}

/// Spreads the bits of `compact` (a mask over the `n - 1` players other than
/// `skip`) into a full mask with a zero at position `skip`.
#[inline]
pub(crate) fn insert_zero_bit(compact: u64, skip: usize) -> u64 {
    let low = compact & ((1u64 << skip) - 1);
    let high = (compact >> skip) << (skip + 1);
    low | high
}
