//! Stability of the ball for attractive-repulsive nonlocal energies.
//!
//! The energy of a set E ⊂ R^d is the sum of a singular repulsive and a
//! growing attractive pairwise interaction,
//!
//! ```text
//! F_γ(E) = ∫_E ∫_E |x-y|^{-α} dx dy + γ ∫_E ∫_E |x-y|^{β} dx dy,
//! ```
//!
//! with α ∈ (0, d-1), β > 0, γ > 0. This crate computes, at desk scale,
//! everything about the stability of the unit ball for this family:
//!
//! * the spectrum μ_k(σ) of the boundary seminorm on spherical
//!   harmonics, and the coupling thresholds γ₊ (stability for F_γ) and
//!   γ₊₊ (stability for -F_γ), both in closed form and by brute force
//!   ([`spectral`]);
//! * sphere quadrature, real harmonic bases, and the second-variation
//!   quadratic form on finite expansions ([`harmonics`]);
//! * the ball potential ψ, exact star-shaped energy differences, a
//!   seeded Monte Carlo oracle, and ball-ball interactions
//!   ([`energy`]);
//! * end-to-end verification drivers: spectral extremizer checks, the
//!   quadratic energy expansion around the ball, and the construction
//!   of competitors beating a stable ball in the L¹ topology
//!   ([`scenarios`]);
//! * a deterministic CSV/JSON command-line front end ([`report`]).
//!
//! A narrative guide lives in `book/`; its code snippets compile and
//! run as part of `cargo test` (see [`book`]).

pub mod error;
pub mod special;
#[macro_use]
pub mod quad;
pub mod harmonics;
pub mod spectral;

pub mod energy;
pub mod report;
pub mod scenarios;

pub mod book;

pub use error::{Error, Result};
pub use special::Dimension;
pub use spectral::ModelParams;
