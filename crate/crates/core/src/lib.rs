//! Desk-scale computations around a hyperbolic `Out(F_n)`-graph built from
//! an annulus system on a space of trees.
//!
//! The crate is `no_std` with `alloc`. Modules, bottom up:
//!
//! - [`word`], [`class`], [`aut`], [`whitehead`]: exact free group
//!   combinatorics (reduced words, conjugacy classes, automorphisms,
//!   outer-class fingerprints, Whitehead graphs, primitivity, balls).
//! - [`train_track`]: train track maps on the rose, legal structure,
//!   Perron–Frobenius data, critical constant, tightened iteration.
//! - [`limits`]: finite stand-ins for stable trees (length functions on a
//!   test set) and stable currents (subword frequencies), pairings.
//! - [`bowditch`]: annuli, chain-counted crossratios, the triple
//!   quasi-metric, the graph `G_r`, and the orbit experiments.
#![no_std]

extern crate alloc;

pub mod aut;
pub mod bitset;
pub mod bowditch;
pub mod class;
pub mod error;
pub mod limits;
pub mod linalg;
pub mod train_track;
pub mod whitehead;
pub mod word;

pub use aut::{enumerate_ball, nielsen_generators, FreeGroupAut, OuterFingerprint};
pub use class::ConjClass;
pub use error::{Error, Result};
pub use whitehead::{is_primitive, WhiteheadGraph};
pub use word::{Basis, Letter, Word};
