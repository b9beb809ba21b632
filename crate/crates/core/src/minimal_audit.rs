//! Box-bounded minimality evidence.
//!
//! A move `C` of a system is *necessary* when some position `X` in the box
//! and value `h < σ(X)` are covered by `C` and by no other member: dropping
//! `C` leaves `X` uncovered at `h`. The audit never claims redundancy.

use rayon::prelude::*;
use serde::Serialize;

use crate::canonical_systems::{has_minimum_system, hamming_weight, in_nmin, MoveSystem};
use crate::error::{Error, Result};
use crate::game_oracle::{for_each_below, nim_sum_table, GridBox};
use crate::{Base, Nat, Position};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NecessaryMove {
    #[serde(rename = "move")]
    pub c: Position,
    pub witness_x: Position,
    pub h: Nat,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub necessary: Vec<NecessaryMove>,
    pub undetermined: Vec<Position>,
}

/// Precomputed membership and Nim sums over one box.
struct BoxView<'a> {
    grid: &'a GridBox,
    members: Vec<bool>,
    sums: Vec<Nat>,
}

impl<'a> BoxView<'a> {
    fn new(base: &Base, system: &MoveSystem, grid: &'a GridBox) -> Result<Self> {
        Ok(Self {
            grid,
            members: system.membership(base).table(grid)?,
            sums: nim_sum_table(base, grid)?,
        })
    }

    /// First `(X, h)` in `(|X|₁, X)` order at which `c` is the only member
    /// covering `X` at `h`.
    fn witness(&self, c: &[Nat]) -> Option<(Position, Nat)> {
        let grid = self.grid;
        let cidx = grid.index(c);
        for idx in grid.scan_order() {
            let x = grid.position(idx);
            if x.iter().zip(c).any(|(a, b)| a < b) {
                continue;
            }
            let h = self.sums[idx - cidx];
            if h >= self.sums[idx] {
                continue;
            }
            let rival = for_each_below(&x, |other| {
                let oidx = grid.index(other);
                (oidx != cidx && self.members[oidx] && self.sums[idx - oidx] == h).then_some(())
            });
            if rival.is_none() {
                return Some((x, h));
            }
        }
        None
    }
}

/// Least `(X, h)` showing `C` is needed by `system` inside the box.
pub fn necessity_witness(
    base: &Base,
    system: &MoveSystem,
    c: &[Nat],
    grid: &GridBox,
) -> Result<Option<(Position, Nat)>> {
    if !grid.contains(c) {
        return Err(Error::PreconditionFailed(format!("move {c:?} lies outside the box")));
    }
    if !system.contains(base, c)? {
        return Err(Error::PreconditionFailed(format!("move {c:?} is not in the system")));
    }
    Ok(BoxView::new(base, system, grid)?.witness(c))
}

/// Splits the in-box members into necessary (with witnesses) and
/// undetermined, both in lexicographic order.
pub fn audit_minimal(base: &Base, system: &MoveSystem, grid: &GridBox) -> Result<AuditReport> {
    let view = BoxView::new(base, system, grid)?;
    let candidates: Vec<usize> = (0..grid.len()).filter(|&i| view.members[i]).collect();
    let verdicts: Vec<(Position, Option<(Position, Nat)>)> = candidates
        .par_iter()
        .map(|&idx| {
            let c = grid.position(idx);
            let w = view.witness(&c);
            (c, w)
        })
        .collect();
    let mut report = AuditReport::default();
    for (c, verdict) in verdicts {
        match verdict {
            Some((witness_x, h)) => report.necessary.push(NecessaryMove { c, witness_x, h }),
            None => report.undetermined.push(c),
        }
    }
    Ok(report)
}

/// Compares `C_nmin` with `{wt(C) = 1} ∪ {1 ≤ Σ c^i ≤ β_0 − 1}` on the box.
/// Requires every radix past the first to be 2.
pub fn nmin_closed_form_check(base: &Base, m: usize, grid: &GridBox) -> Result<bool> {
    if !base.is_constant_from(1, 2) {
        return Err(Error::PreconditionFailed(format!(
            "base {base} has a radix other than 2 past index 0"
        )));
    }
    if grid.dim() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: grid.dim(),
        });
    }
    debug_assert!(has_minimum_system(base, m));
    let first = base.radix_at(0);
    Ok((0..grid.len()).into_par_iter().all(|idx| {
        let c = grid.position(idx);
        let total: u128 = c.iter().map(|&v| v as u128).sum();
        let closed = hamming_weight(&c) == 1 || (1..first as u128).contains(&total);
        closed == in_nmin(base, &c)
    }))
}
