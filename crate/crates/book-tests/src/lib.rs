//! The guide's chapters as doc comments, so `cargo test` runs every listing.

#[doc = include_str!("../../../book/src/intro.md")]
pub mod intro {}
#[doc = include_str!("../../../book/src/ring.md")]
pub mod chapter1 {}
#[doc = include_str!("../../../book/src/skein.md")]
pub mod chapter2 {}
#[doc = include_str!("../../../book/src/mcg.md")]
pub mod chapter3 {}
#[doc = include_str!("../../../book/src/rep.md")]
pub mod chapter4 {}
#[doc = include_str!("../../../book/src/manifolds.md")]
pub mod chapter5 {}
#[doc = include_str!("../../../book/src/fkb.md")]
pub mod chapter6 {}
#[doc = include_str!("../../../book/src/stochastic.md")]
pub mod chapter7 {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod chapter8 {}
