//! Exact quantum topology toolkit.
//!
//! The crate computes SO(3) Witten–Reshetikhin–Turaev invariants at an odd
//! prime level `p` inside the localized cyclotomic ring `Z[ζ_{4p}, 1/p]`,
//! Dijkgraaf–Witten invariants for finite gauge groups, the projective
//! quantum representations of genus 1 and 2 mapping class groups together
//! with their reductions modulo split primes `q ≡ 1 (mod 4p)`, and the
//! Frohman–Kania-Bartoszyńska ideal machinery used to certify that one
//! 3-manifold does not embed in another.
//!
//! Modules, bottom-up:
//!
//! * [`ring`]: exact cyclotomic arithmetic, residue maps, ideal lattices.
//! * [`skein`]: quantum integers, theta/tetrahedron/6j coefficients, genus-1 `S` and `T`.
//! * [`mcg`]: Dehn-twist words, homology and fundamental-group actions, certified subgroup words.
//! * [`rep`]: the quantum representations and their mod-`q` reductions.
//! * [`manifold`]: manifold descriptions, homology, DW and WRT invariants.
//! * [`fkb`]: boundary vectors, FKB ideals and embedding obstructions.
//! * [`stochastic`]: finite group closure, mixing, hyperplane probabilities, Monte Carlo.

pub mod error;
pub mod fkb;
pub mod linalg;
pub mod manifold;
pub mod matrix;
pub mod mcg;
pub mod rep;
pub mod ring;
pub mod skein;
pub mod stochastic;

pub use error::{Error, Result};
