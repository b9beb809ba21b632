//! The maximum system `C_max`: moves `C` with `σ(X + C) ≠ σ(X)` for every
//! position `X`.
//!
//! Its complement (the non-moves) is decided by level sets. `F` is in level
//! `L` when its digit-0 column sums to zero and, for some admissible carry
//! vector `r`, the chopped vector `F̂ + r` is in level `L − 1` of the chopped
//! base; level `−1` is `{0}`. A vector whose largest coordinate is at most
//! `β^(L+1) − β^(L)` is a non-move exactly when it is in level `L`.

use std::collections::{BTreeSet, HashMap};
use std::sync::RwLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::{Base, Nat, Position};

/// The carry vectors into digit 1 that adding some position to `F` can
/// produce: `r ∈ {0,1}^m` with `r^i ≤ f^i_0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct CarrySet {
    pub members: BTreeSet<Position>,
}

impl CarrySet {
    pub fn contains(&self, r: &[Nat]) -> bool {
        self.members.contains(r)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Carry vectors for radix `radix` in lexicographic order.
fn carries(radix: Nat, f: &[Nat]) -> Vec<Position> {
    let free: Vec<usize> = (0..f.len()).filter(|&i| !f[i].is_multiple_of(radix)).collect();
    let mut out: Vec<Position> = (0..1u64 << free.len())
        .map(|mask| {
            let mut r = vec![0; f.len()];
            for (bit, &i) in free.iter().enumerate() {
                r[i] = (mask >> bit) & 1;
            }
            r
        })
        .collect();
    out.sort();
    out
}

pub fn carry_set(base: &Base, f: &[Nat]) -> CarrySet {
    CarrySet {
        members: carries(base.radix_at(0), f).into_iter().collect(),
    }
}

/// Least `L` with `max F ≤ β^(L+1) − β^(L)`.
pub fn admissible_level(base: &Base, f: &[Nat]) -> usize {
    let top = f.iter().copied().max().unwrap_or(0) as u128;
    let mut place: u128 = 1;
    let mut level = 0;
    loop {
        let radix = base.radix_at(level) as u128;
        // `place` stays below 2^64 · radix here, so the product fits.
        if place * (radix - 1) >= top {
            return level;
        }
        place *= radix;
        level += 1;
    }
}

fn add_vectors(a: &[Nat], b: &[Nat]) -> Result<Position> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.checked_add(*y).ok_or(Error::Overflow))
        .collect()
}

/// One step of a level-set derivation: the vector at some chop depth and the
/// carry chosen to reach the next depth.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelStep {
    pub depth: usize,
    pub vector: Position,
    pub carry: Position,
}

/// Level-set queries over one base with a shared memo keyed by
/// `(chop depth, level, vector)`.
#[derive(Debug)]
pub struct LevelQuery {
    base: Base,
    memo: RwLock<HashMap<(usize, i64, Position), bool>>,
}

impl LevelQuery {
    pub fn new(base: Base) -> Self {
        Self {
            base,
            memo: RwLock::new(HashMap::new()),
        }
    }

    pub fn base(&self) -> &Base {
        &self.base
    }

    /// Membership of `f` in level `level ≥ −1`.
    pub fn in_f_level(&self, f: &[Nat], level: i64) -> Result<bool> {
        if level < -1 {
            return Err(Error::PreconditionFailed(format!("level {level} is below -1")));
        }
        self.level_at(0, f, level)
    }

    fn level_at(&self, depth: usize, f: &[Nat], level: i64) -> Result<bool> {
        if level < 0 {
            return Ok(f.iter().all(|&v| v == 0));
        }
        let key = (depth, level, f.to_vec());
        if let Some(&hit) = self.memo.read().unwrap().get(&key) {
            return Ok(hit);
        }
        let found = self.carry_choice(depth, f, level)?.is_some();
        self.memo.write().unwrap().insert(key, found);
        Ok(found)
    }

    /// The first carry `r` (lexicographically) with `F̂ + r` in the next
    /// level down, if `f` is in `level` at all.
    fn carry_choice(&self, depth: usize, f: &[Nat], level: i64) -> Result<Option<(Position, Position)>> {
        let radix = self.base.radix_at(depth);
        let column: u128 = f.iter().map(|&v| (v % radix) as u128).sum();
        if !column.is_multiple_of(radix as u128) {
            return Ok(None);
        }
        let chopped: Position = f.iter().map(|&v| v / radix).collect();
        for r in carries(radix, f) {
            let next = add_vectors(&chopped, &r)?;
            if self.level_at(depth + 1, &next, level - 1)? {
                return Ok(Some((r, next)));
            }
        }
        Ok(None)
    }

    pub fn in_max(&self, c: &[Nat]) -> Result<bool> {
        if c.iter().all(|&v| v == 0) {
            return Ok(false);
        }
        let level = admissible_level(&self.base, c) as i64;
        Ok(!self.level_at(0, c, level)?)
    }

    /// The carry path proving `f` is a non-move, or `None` for members of
    /// the maximum system.
    pub fn derivation(&self, f: &[Nat]) -> Result<Option<Vec<LevelStep>>> {
        let mut level = admissible_level(&self.base, f) as i64;
        if !self.level_at(0, f, level)? {
            return Ok(None);
        }
        let mut steps = Vec::new();
        let mut current = f.to_vec();
        let mut depth = 0;
        while level >= 0 {
            let (carry, next) = self
                .carry_choice(depth, &current, level)?
                .expect("level membership implies a carry choice");
            steps.push(LevelStep {
                depth,
                vector: current,
                carry,
            });
            current = next;
            depth += 1;
            level -= 1;
        }
        debug_assert!(current.iter().all(|&v| v == 0));
        Ok(Some(steps))
    }

    /// A position `X` with `σ(X + F) = σ(X)`.
    ///
    /// Unwinds the derivation from the bottom: at each depth the digit-0
    /// entries `β_0 − f^i_0` (where `r^i = 1`) or `0` force exactly the chosen
    /// carries, and the deeper witness is shifted up one digit.
    pub fn nonmove_witness(&self, f: &[Nat]) -> Result<Position> {
        let steps = self.derivation(f)?.ok_or(Error::NotAFudge)?;
        let mut x = vec![0 as Nat; f.len()];
        for step in steps.iter().rev() {
            let radix = self.base.radix_at(step.depth);
            for i in 0..x.len() {
                let low = if step.carry[i] == 1 {
                    radix - step.vector[i] % radix
                } else {
                    0
                };
                x[i] = x[i]
                    .checked_mul(radix)
                    .and_then(|v| v.checked_add(low))
                    .ok_or(Error::Overflow)?;
            }
        }
        assert!(
            is_nonmove_witness(&self.base, f, &x)?,
            "constructed witness {x:?} does not preserve the nim sum of {f:?}"
        );
        Ok(x)
    }
}

pub fn in_f_level(base: &Base, f: &[Nat], level: i64) -> Result<bool> {
    LevelQuery::new(base.clone()).in_f_level(f, level)
}

pub fn in_max(base: &Base, c: &[Nat]) -> Result<bool> {
    LevelQuery::new(base.clone()).in_max(c)
}

pub fn nonmove_witness(base: &Base, f: &[Nat]) -> Result<Position> {
    LevelQuery::new(base.clone()).nonmove_witness(f)
}

/// Whether `σ(X + F) = σ(X)`.
pub fn is_nonmove_witness(base: &Base, f: &[Nat], x: &[Nat]) -> Result<bool> {
    if f.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: f.len(),
            got: x.len(),
        });
    }
    Ok(base.nim_sum(&add_vectors(x, f)?)? == base.nim_sum(x)?)
}

/// `C_max = C_ord` iff `β = (β_0, 2, 2, …)`; always for `m ≤ 1`.
pub fn max_equals_ord(base: &Base, m: usize) -> bool {
    m <= 1 || base.is_constant_from(1, 2)
}
