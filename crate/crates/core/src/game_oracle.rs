//! Brute-force ground truth on bounded boxes: Sprague-Grundy tables by mex,
//! cover queries, and the two conditions that make a move set a
//! Sprague-Grundy system of the Nim sum.
//!
//! Boxes are downward closed, so every option of an in-box position is in the
//! box and every move usable from it is in the box as well. Box answers about
//! the positions they contain are therefore exact.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canonical_systems::MoveSystem;
use crate::error::{Error, Result};
use crate::{Base, Nat, Position};

/// The positions `X` with `x^i < bounds[i]` for every `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GridBox {
    bounds: Vec<Nat>,
}

impl GridBox {
    pub fn new(bounds: Vec<Nat>) -> Result<Self> {
        let len = bounds
            .iter()
            .try_fold(1usize, |acc, &b| acc.checked_mul(usize::try_from(b).ok()?))
            .ok_or(Error::Overflow)?;
        // Row-major indices are also used as move indices; keep them addressable.
        if len > isize::MAX as usize {
            return Err(Error::Overflow);
        }
        Ok(Self { bounds })
    }

    pub fn cube(m: usize, side: Nat) -> Result<Self> {
        Self::new(vec![side; m])
    }

    pub fn bounds(&self) -> &[Nat] {
        &self.bounds
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn len(&self) -> usize {
        self.bounds.iter().map(|&b| b as usize).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, x: &[Nat]) -> bool {
        x.len() == self.dim() && x.iter().zip(&self.bounds).all(|(v, b)| v < b)
    }

    /// Row-major index; lexicographic order of positions.
    pub fn index(&self, x: &[Nat]) -> usize {
        x.iter()
            .zip(&self.bounds)
            .fold(0usize, |acc, (&v, &b)| acc * b as usize + v as usize)
    }

    pub fn position(&self, mut idx: usize) -> Position {
        let mut x = vec![0; self.dim()];
        for i in (0..self.dim()).rev() {
            let b = self.bounds[i] as usize;
            x[i] = (idx % b) as Nat;
            idx /= b;
        }
        x
    }

    /// Row-major indices grouped by coordinate sum, each group ascending.
    pub fn layers(&self) -> Vec<Vec<usize>> {
        let mut layers: Vec<Vec<usize>> = Vec::new();
        for idx in 0..self.len() {
            let s: Nat = self.position(idx).iter().sum();
            let s = s as usize;
            if layers.len() <= s {
                layers.resize_with(s + 1, Vec::new);
            }
            layers[s].push(idx);
        }
        layers
    }

    /// Indices in `(|X|₁, X)` order.
    pub fn scan_order(&self) -> Vec<usize> {
        self.layers().into_iter().flatten().collect()
    }
}

/// Calls `f` with every `C ≤ upper` (componentwise) in lexicographic order.
/// Stops early when `f` returns `Some`.
pub(crate) fn for_each_below<R>(upper: &[Nat], mut f: impl FnMut(&[Nat]) -> Option<R>) -> Option<R> {
    let mut c = vec![0; upper.len()];
    loop {
        if let Some(r) = f(&c) {
            return Some(r);
        }
        let mut i = upper.len();
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if c[i] < upper[i] {
                c[i] += 1;
                break;
            }
            c[i] = 0;
        }
    }
}

fn difference(x: &[Nat], c: &[Nat]) -> Position {
    x.iter().zip(c).map(|(a, b)| a - b).collect()
}

/// Least natural number not in `values`.
pub fn mex<I: IntoIterator<Item = Nat>>(values: I) -> Nat {
    let mut v: Vec<Nat> = values.into_iter().collect();
    v.sort_unstable();
    v.dedup();
    v.iter()
        .enumerate()
        .find(|&(i, &val)| val != i as Nat)
        .map_or(v.len() as Nat, |(i, _)| i as Nat)
}

/// Sprague-Grundy values of `Γ(box, system ∩ box)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SgTable {
    pub base: Base,
    pub grid: GridBox,
    pub values: Vec<Nat>,
}

#[derive(Serialize, Deserialize)]
struct SgTableJson {
    base: String,
    #[serde(rename = "box")]
    grid: Vec<Nat>,
    values: Vec<Nat>,
}

impl SgTable {
    pub fn value_at(&self, x: &[Nat]) -> Nat {
        self.values[self.grid.index(x)]
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(SgTableJson {
            base: self.base.to_string(),
            grid: self.grid.bounds().to_vec(),
            values: self.values.clone(),
        })
        .expect("plain data serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let raw: SgTableJson = serde_json::from_value(value.clone()).map_err(|e| Error::Parse {
            position: 0,
            message: e.to_string(),
        })?;
        let grid = GridBox::new(raw.grid)?;
        if raw.values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: raw.values.len(),
            });
        }
        Ok(Self {
            base: raw.base.parse()?,
            grid,
            values: raw.values,
        })
    }

    /// Rows indexed by `x^0`, columns by `x^1`; only for two heaps.
    pub fn to_tsv(&self) -> Result<String> {
        if self.grid.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: self.grid.dim(),
            });
        }
        let cols = self.grid.bounds()[1] as usize;
        let mut out = String::new();
        for row in self.values.chunks(cols.max(1)) {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", cells.join("\t")).unwrap();
        }
        Ok(out)
    }
}

/// Computes the table layer by layer in coordinate-sum order. Positions in
/// one layer only read earlier layers, so each layer is evaluated in parallel.
pub fn sg_table(base: &Base, grid: &GridBox, system: &MoveSystem) -> Result<SgTable> {
    let members = system.membership(base).table(grid)?;
    let mut values = vec![0 as Nat; grid.len()];
    for layer in grid.layers() {
        let computed: Vec<Nat> = layer
            .par_iter()
            .map(|&idx| {
                let x = grid.position(idx);
                let mut options = Vec::new();
                for_each_below(&x, |c| {
                    let cidx = grid.index(c);
                    if members[cidx] {
                        // Row-major index is linear in the coordinates.
                        options.push(values[idx - cidx]);
                    }
                    None::<()>
                });
                mex(options)
            })
            .collect();
        for (&idx, v) in layer.iter().zip(computed) {
            values[idx] = v;
        }
    }
    Ok(SgTable {
        base: base.clone(),
        grid: grid.clone(),
        values,
    })
}

/// The lexicographically least member `C ≤ X` with `σ(X − C) = target`.
pub fn covers(base: &Base, system: &MoveSystem, x: &[Nat], target: Nat) -> Result<Option<Position>> {
    let membership = system.membership(base);
    let mut failure = None;
    let found = for_each_below(x, |c| {
        let attempt = || -> Result<bool> {
            Ok(membership.contains(c)? && base.nim_sum(&difference(x, c))? == target)
        };
        match attempt() {
            Ok(true) => Some(c.to_vec()),
            Ok(false) => None,
            Err(e) => {
                failure = Some(e);
                Some(Vec::new())
            }
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(found),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum VerifyReport {
    Ok,
    /// `C` moves from `X` to a position of the same Nim sum.
    Sg1Violation { x: Position, c: Position },
    /// No move from `X` reaches Nim sum `h < σ(X)`.
    Sg2Violation { x: Position, h: Nat },
}

impl VerifyReport {
    pub fn is_ok(&self) -> bool {
        matches!(self, VerifyReport::Ok)
    }
}

/// Nim sums of every position in the box, row-major.
pub(crate) fn nim_sum_table(base: &Base, grid: &GridBox) -> Result<Vec<Nat>> {
    (0..grid.len())
        .into_par_iter()
        .map(|idx| base.nim_sum(&grid.position(idx)))
        .collect()
}

/// Checks both system conditions at every position of the box, scanning in
/// `(|X|₁, X)` order and reporting the first failure. At a position the
/// repeat condition is checked before the coverage condition, and the
/// coverage failure reported is the least uncovered value.
pub fn verify_system(base: &Base, system: &MoveSystem, grid: &GridBox) -> Result<VerifyReport> {
    let members = system.membership(base).table(grid)?;
    verify_with_members(grid, &nim_sum_table(base, grid)?, &members)
}

pub(crate) fn verify_with_members(grid: &GridBox, sums: &[Nat], members: &[bool]) -> Result<VerifyReport> {
    for idx in grid.scan_order() {
        let x = grid.position(idx);
        let value = sums[idx];
        let mut reached = Vec::new();
        let mut repeat = None;
        for_each_below(&x, |c| {
            let cidx = grid.index(c);
            if members[cidx] {
                let v = sums[idx - cidx];
                if v == value {
                    repeat = Some(c.to_vec());
                    return Some(());
                }
                reached.push(v);
            }
            None
        });
        if let Some(c) = repeat {
            return Ok(VerifyReport::Sg1Violation { x, c });
        }
        let h = mex(reached);
        if h < value {
            return Ok(VerifyReport::Sg2Violation { x, h });
        }
    }
    Ok(VerifyReport::Ok)
}
