//! Exact and empirical computation for polynomial sequences over the
//! function field F_q(t).
//!
//! The crate is `no_std` (it needs `alloc`). Modules, bottom up:
//!
//! - [`algebra`]: F_q, F_q[t] and F_q(t).
//! - [`torus`]: truncated Laurent series and the torus F_q((1/t)) / F_q[t].
//! - [`polyseq`]: polynomial sequences in standard and additive/separable form.
//! - [`subtorus`]: F_p-linear algebra on truncated tori, Φ-subtorus images,
//!   orbit closures.
//! - [`equidist`]: Følner boxes, character sums and distribution verdicts.
//! - [`intersective`]: roots mod prime powers, Hensel lifting, intersectivity.
//! - [`recurrence`]: rotations on finite tori and return-time statistics.
#![no_std]

extern crate alloc;

pub mod algebra;
pub mod equidist;
pub mod error;
pub mod intersective;
pub mod polyseq;
pub mod recurrence;
pub mod subtorus;
pub mod torus;

pub use error::{Error, Result};
