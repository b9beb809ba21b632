//! Move systems: intensional membership for the canonical systems, the
//! structural operators on explicit sets, the decidable existence criteria
//! for minimum systems, and the constructive winning-move finder.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game_oracle::GridBox;
use crate::maximum_system::LevelQuery;
use crate::{Base, Nat, Position};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SystemKind {
    /// Ordinary Nim moves: exactly one nonzero coordinate.
    WeightOne,
    /// `ord(Σ c^i) = mord(C)`.
    Ord,
    /// Moves with a nonempty `Nj(C)`.
    Nmin,
    /// The maximum system: moves that never preserve the Nim sum.
    Max,
    Explicit(BTreeSet<Position>),
}

/// A canonical system adjusted by finite sets of added and removed moves.
///
/// Membership is `(kind(C) || C ∈ plus) && C ∉ minus`, and the zero vector is
/// never a member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoveSystem {
    kind: SystemKind,
    plus: BTreeSet<Position>,
    minus: BTreeSet<Position>,
}

impl MoveSystem {
    pub fn new(kind: SystemKind) -> Self {
        Self {
            kind,
            plus: BTreeSet::new(),
            minus: BTreeSet::new(),
        }
    }

    pub fn weight_one() -> Self {
        Self::new(SystemKind::WeightOne)
    }

    pub fn ord() -> Self {
        Self::new(SystemKind::Ord)
    }

    pub fn nmin() -> Self {
        Self::new(SystemKind::Nmin)
    }

    pub fn max() -> Self {
        Self::new(SystemKind::Max)
    }

    pub fn explicit<I: IntoIterator<Item = Position>>(moves: I) -> Self {
        Self::new(SystemKind::Explicit(moves.into_iter().collect()))
    }

    pub fn kind(&self) -> &SystemKind {
        &self.kind
    }

    pub fn added(&self) -> &BTreeSet<Position> {
        &self.plus
    }

    pub fn removed(&self) -> &BTreeSet<Position> {
        &self.minus
    }

    /// Adds moves; an added move is no longer removed.
    pub fn with_plus<I: IntoIterator<Item = Position>>(mut self, moves: I) -> Self {
        for c in moves {
            self.minus.remove(&c);
            self.plus.insert(c);
        }
        self
    }

    /// Removes moves; a removed move is no longer added.
    pub fn with_minus<I: IntoIterator<Item = Position>>(mut self, moves: I) -> Self {
        for c in moves {
            self.plus.remove(&c);
            self.minus.insert(c);
        }
        self
    }

    /// Binds the system to a base for repeated membership queries.
    pub fn membership<'a>(&'a self, base: &'a Base) -> Membership<'a> {
        let levels = matches!(self.kind, SystemKind::Max).then(|| LevelQuery::new(base.clone()));
        Membership {
            base,
            system: self,
            levels,
        }
    }

    pub fn contains(&self, base: &Base, c: &[Nat]) -> Result<bool> {
        self.membership(base).contains(c)
    }

    /// Parses `ord | nmin | max | wt1 | explicit@FILE` followed by any number
    /// of `+{(…),…}` / `-{(…),…}` adjustments. `load` resolves explicit files.
    pub fn parse_with<F>(text: &str, load: F) -> Result<Self>
    where
        F: Fn(&str) -> Result<BTreeSet<Position>>,
    {
        let text = text.trim();
        let split = [text.find("+{"), text.find("-{")]
            .into_iter()
            .flatten()
            .min()
            .unwrap_or(text.len());
        let head = &text[..split];
        let kind = match head {
            "ord" => SystemKind::Ord,
            "nmin" => SystemKind::Nmin,
            "max" => SystemKind::Max,
            "wt1" => SystemKind::WeightOne,
            _ => match head.strip_prefix("explicit@") {
                Some(path) if !path.is_empty() => SystemKind::Explicit(load(path)?),
                _ => {
                    return Err(Error::Parse {
                        position: 0,
                        message: format!(
                            "unknown system `{head}` (expected ord, nmin, max, wt1 or explicit@FILE)"
                        ),
                    })
                }
            },
        };
        let mut system = Self::new(kind);
        let mut pos = split;
        while pos < text.len() {
            let rest = &text[pos..];
            let sign = rest.as_bytes()[0];
            if !(sign == b'+' || sign == b'-') || !rest[1..].starts_with('{') {
                return Err(Error::Parse {
                    position: pos,
                    message: "expected `+{` or `-{`".into(),
                });
            }
            let close = rest.find('}').ok_or_else(|| Error::Parse {
                position: pos,
                message: "unterminated `{`".into(),
            })?;
            let moves = parse_tuples(&rest[2..close], pos + 2)?;
            system = if sign == b'+' {
                system.with_plus(moves)
            } else {
                system.with_minus(moves)
            };
            pos += close + 1;
        }
        Ok(system)
    }
}

/// Parses `(a,b),(c,d)` into vectors; empty input yields no vectors.
fn parse_tuples(text: &str, offset: usize) -> Result<Vec<Position>> {
    let mut out = Vec::new();
    let mut pos = 0;
    let bytes = text.as_bytes();
    while pos < bytes.len() {
        match bytes[pos] {
            b' ' | b',' => pos += 1,
            b'(' => {
                let close = text[pos..].find(')').ok_or_else(|| Error::Parse {
                    position: offset + pos,
                    message: "unterminated `(`".into(),
                })?;
                let inner = &text[pos + 1..pos + close];
                out.push(crate::mixed_radix::parse_list(inner, offset + pos + 1)?);
                pos += close + 1;
            }
            _ => {
                return Err(Error::Parse {
                    position: offset + pos,
                    message: "expected `(`".into(),
                })
            }
        }
    }
    Ok(out)
}

fn fmt_tuple(c: &[Nat]) -> String {
    let items: Vec<String> = c.iter().map(|v| v.to_string()).collect();
    format!("({})", items.join(","))
}

impl fmt::Display for MoveSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            SystemKind::WeightOne => f.write_str("wt1")?,
            SystemKind::Ord => f.write_str("ord")?,
            SystemKind::Nmin => f.write_str("nmin")?,
            SystemKind::Max => f.write_str("max")?,
            SystemKind::Explicit(set) => write!(f, "explicit[{}]", set.len())?,
        }
        for (sign, set) in [("+", &self.plus), ("-", &self.minus)] {
            if !set.is_empty() {
                let items: Vec<String> = set.iter().map(|c| fmt_tuple(c)).collect();
                write!(f, "{sign}{{{}}}", items.join(","))?;
            }
        }
        Ok(())
    }
}

/// A system bound to a base. Maximum-system queries share one level cache.
pub struct Membership<'a> {
    base: &'a Base,
    system: &'a MoveSystem,
    levels: Option<LevelQuery>,
}

impl Membership<'_> {
    pub fn contains(&self, c: &[Nat]) -> Result<bool> {
        if c.iter().all(|&v| v == 0) || self.system.minus.contains(c) {
            return Ok(false);
        }
        if self.system.plus.contains(c) {
            return Ok(true);
        }
        match &self.system.kind {
            SystemKind::WeightOne => Ok(hamming_weight(c) == 1),
            SystemKind::Ord => in_ord(self.base, c),
            SystemKind::Nmin => Ok(in_nmin(self.base, c)),
            SystemKind::Max => self.levels.as_ref().expect("level cache").in_max(c),
            SystemKind::Explicit(set) => Ok(set.contains(c)),
        }
    }

    /// Membership of every vector in the box, indexed row-major.
    pub fn table(&self, grid: &GridBox) -> Result<Vec<bool>> {
        (0..grid.len())
            .into_par_iter()
            .map(|idx| self.contains(&grid.position(idx)))
            .collect()
    }
}

/// `Nj(C)` in product form `N(C) × j(C)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum NjInfo {
    Empty,
    /// `{L ≥ n_min} × {j}`.
    WeightOne { n_min: usize, j: usize },
    /// `{n} × j_set` with `j_set` nonempty.
    FixedN { n: usize, j_set: BTreeSet<usize> },
}

impl NjInfo {
    pub fn contains(&self, level: usize, pivot: usize) -> bool {
        match self {
            NjInfo::Empty => false,
            NjInfo::WeightOne { n_min, j } => level >= *n_min && pivot == *j,
            NjInfo::FixedN { n, j_set } => level == *n && j_set.contains(&pivot),
        }
    }
}

pub fn hamming_weight(c: &[Nat]) -> usize {
    c.iter().filter(|&&v| v != 0).count()
}

/// `min{m, sup{β_L − 1}}`.
pub fn sigma_weight(base: &Base, m: usize) -> usize {
    let sup = (base.max_radix() - 1) as usize;
    m.min(sup)
}

pub fn in_ord(base: &Base, c: &[Nat]) -> Result<bool> {
    if c.iter().all(|&v| v == 0) {
        return Ok(false);
    }
    let total = c
        .iter()
        .try_fold(0 as Nat, |acc, &v| acc.checked_add(v))
        .ok_or(Error::Overflow)?;
    Ok(base.ord(total) == base.mord(c))
}

/// Whether `(level, pivot)` satisfies (C1)–(C3) for `c`.
fn satisfies_nj(base: &Base, c: &[Nat], level: usize, pivot: usize) -> bool {
    let head = c[pivot];
    if head == 0 {
        return false;
    }
    let radix = base.radix_at(level);
    let place = match base.place_value(level) {
        Ok(p) => p,
        Err(_) => return false,
    };
    // The pivot has no digits above `level`.
    if let Some(limit) = place.checked_mul(radix) {
        if head >= limit {
            return false;
        }
    }
    // The other coordinates are a single digit at `level`.
    for (i, &v) in c.iter().enumerate() {
        if i != pivot && (v % place != 0 || v / place >= radix) {
            return false;
        }
    }
    let digits: Vec<Nat> = c.iter().map(|&v| base.digit(v, level)).collect();
    let pivot_digit = digits[pivot];
    let delta = u128::from(pivot_digit == 0);
    let column: u128 = digits.iter().map(|&d| d as u128).sum();
    column + delta < radix as u128 && digits.iter().all(|&d| d <= pivot_digit + 1)
}

pub fn nj_info(base: &Base, c: &[Nat]) -> NjInfo {
    let support: Vec<usize> = (0..c.len()).filter(|&i| c[i] != 0).collect();
    match support.len() {
        0 => NjInfo::Empty,
        1 => {
            let j = support[0];
            NjInfo::WeightOne {
                n_min: base.to_digits(c[j]).len() - 1,
                j,
            }
        }
        _ => {
            let top = c.iter().map(|&v| base.to_digits(v).len()).max().unwrap_or(0);
            for level in 0..top {
                let j_set: BTreeSet<usize> = support
                    .iter()
                    .copied()
                    .filter(|&j| satisfies_nj(base, c, level, j))
                    .collect();
                if !j_set.is_empty() {
                    return NjInfo::FixedN { n: level, j_set };
                }
            }
            NjInfo::Empty
        }
    }
}

pub fn in_nmin(base: &Base, c: &[Nat]) -> bool {
    nj_info(base, c) != NjInfo::Empty
}

/// Keeps the elements vanishing off `subset`, projected onto `subset`.
pub fn restrict(set: &BTreeSet<Position>, subset: &BTreeSet<usize>) -> Result<BTreeSet<Position>> {
    let mut out = BTreeSet::new();
    for c in set {
        if let Some(&bad) = subset.iter().find(|&&i| i >= c.len()) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                dim: c.len(),
            });
        }
        let vanishes = (0..c.len()).all(|i| subset.contains(&i) || c[i] == 0);
        if vanishes {
            out.insert(subset.iter().map(|&i| c[i]).collect());
        }
    }
    Ok(out)
}

/// Places the coordinates of `c` at the indices of `subset` in a zero vector
/// of length `m`.
pub fn lift(c: &[Nat], subset: &BTreeSet<usize>, m: usize) -> Result<Position> {
    if c.len() != subset.len() {
        return Err(Error::DimensionMismatch {
            expected: subset.len(),
            got: c.len(),
        });
    }
    let mut out = vec![0; m];
    for (&i, &v) in subset.iter().zip(c) {
        if i >= m {
            return Err(Error::IndexOutOfRange { index: i, dim: m });
        }
        out[i] = v;
    }
    Ok(out)
}

/// All coordinate permutations of `c`.
pub fn orbit(c: &[Nat]) -> BTreeSet<Position> {
    let mut current = c.to_vec();
    current.sort_unstable();
    let mut out = BTreeSet::new();
    loop {
        out.insert(current.clone());
        if !next_permutation(&mut current) {
            return out;
        }
    }
}

fn next_permutation(v: &mut [Nat]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).unwrap();
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

pub fn is_symmetric(set: &BTreeSet<Position>) -> bool {
    set.iter().all(|c| orbit(c).iter().all(|p| set.contains(p)))
}

/// Minimum system exists iff `β = (β_0, 2, 2, …)`; always for `m ≤ 1`.
pub fn has_minimum_system(base: &Base, m: usize) -> bool {
    m <= 1 || base.is_constant_from(1, 2)
}

/// Minimum symmetric system exists iff `β = (β_0, 2, 2, …)` or
/// `β = (2, 3, 2, 2, …)`; always for `m ≤ 1`.
pub fn has_minimum_symmetric_system(base: &Base, m: usize) -> bool {
    has_minimum_system(base, m)
        || (base.radix_at(0) == 2 && base.radix_at(1) == 3 && base.is_constant_from(2, 2))
}

/// Members of the system inside the box, in lexicographic order.
pub fn enumerate_system(base: &Base, system: &MoveSystem, grid: &GridBox) -> Result<Vec<Position>> {
    let table = system.membership(base).table(grid)?;
    Ok(table
        .iter()
        .enumerate()
        .filter(|(_, &member)| member)
        .map(|(idx, _)| grid.position(idx))
        .collect())
}

/// A move found by [`find_move_detailed`] with the digit and pivot it was
/// built around.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MoveChoice {
    #[serde(rename = "move")]
    pub c: Position,
    /// Highest digit where the current and target values differ.
    pub level: usize,
    pub pivot: usize,
}

pub fn find_move(base: &Base, x: &[Nat], target: Nat) -> Result<Position> {
    find_move_detailed(base, x, target).map(|choice| choice.c)
}

/// Builds `C ∈ C_nmin` with `σ(X − C) = target`.
///
/// Only digit `N` (the top digit where `σ(X)` and `target` differ) of the
/// non-pivot coordinates changes; the pivot's digits up to `N` absorb the
/// rest. The pivot is the smallest index maximizing `x mod β^(N+1)`.
pub fn find_move_detailed(base: &Base, x: &[Nat], target: Nat) -> Result<MoveChoice> {
    let value = base.nim_sum(x)?;
    if target >= value {
        return Err(Error::LosingPosition {
            nim_sum: value,
            target,
        });
    }
    let value_digits = base.to_digits(value);
    let level = (0..value_digits.len())
        .rev()
        .find(|&l| base.digit(value, l) != base.digit(target, l))
        .expect("target below value differs in some digit");
    let radix = base.radix_at(level);
    let place = base.place_value(level)?;
    let low_part = |v: Nat| match place.checked_mul(radix) {
        Some(limit) => v % limit,
        None => v,
    };
    let pivot = (0..x.len())
        .rev()
        .max_by_key(|&i| low_part(x[i]))
        .expect("nonzero value implies a coordinate");

    let column: Vec<Nat> = x.iter().map(|&v| base.digit(v, level)).collect();
    let value_n = base.digit(value, level);
    let target_n = base.digit(target, level);
    let mut remaining = value_n - target_n;

    // The pivot's digit dominates every other digit at `level`, and the column
    // sum is at least `value_n`, so taking as much as possible from the pivot
    // always leaves a remainder the others can cover.
    let mut decrements = vec![0; x.len()];
    decrements[pivot] = column[pivot].min(remaining);
    remaining -= decrements[pivot];
    for i in (0..x.len()).filter(|&i| i != pivot) {
        let d = column[i].min(decrements[pivot]).min(remaining);
        decrements[i] = d;
        remaining -= d;
    }
    debug_assert_eq!(remaining, 0);

    let mut c = vec![0; x.len()];
    for i in (0..x.len()).filter(|&i| i != pivot) {
        c[i] = decrements[i] * place;
    }
    let mut new_low = (column[pivot] - decrements[pivot]) * place;
    for l in 0..level {
        let r = base.radix_at(l);
        let digit = (base.digit(x[pivot], l) + r - base.digit(value, l) + base.digit(target, l)) % r;
        new_low += digit * base.place_value(l)?;
    }
    c[pivot] = low_part(x[pivot]) - new_low;
    Ok(MoveChoice { c, level, pivot })
}
