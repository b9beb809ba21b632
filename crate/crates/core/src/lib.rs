//! Take-away games on `N^m` whose Sprague-Grundy function is the Nim sum of
//! the heap sizes in a mixed base.
//!
//! The crate decides membership in the canonical move systems (`C_ord`, the
//! smaller `C_nmin`, and the maximum system `C_max`), constructs winning
//! moves, and checks every claim on bounded boxes against a brute-force
//! Sprague-Grundy oracle.
//!
//! Digit arithmetic in [`mixed_radix`] is generic over the unsigned scalar
//! type; the game layers work with [`Nat`] (`u64`).

pub mod canonical_systems;
pub mod cli;
pub mod error;
pub mod game_oracle;
pub mod maximum_system;
pub mod minimal_audit;
pub mod mixed_radix;

pub use canonical_systems::{MoveSystem, NjInfo, SystemKind};
pub use error::{Error, Result};
pub use game_oracle::{GridBox, SgTable, VerifyReport};
pub use maximum_system::{CarrySet, LevelQuery};
pub use minimal_audit::AuditReport;
pub use mixed_radix::{Digits, MixedBase, Natural, OrdValue};

/// Heap sizes, digits and Nim sums in the game layers.
pub type Nat = u64;

/// A base over [`Nat`].
pub type Base = MixedBase<Nat>;

/// A position or move: one heap size per coordinate.
pub type Position = Vec<Nat>;

pub type Base32 = MixedBase<u32>;
pub type Base128 = MixedBase<u128>;
