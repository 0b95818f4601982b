//! # athermality
//!
//! A numerical toolkit for the quantum relative entropy and the resource
//! theory of athermality at desk scale (Hilbert-space dimension <= 64).
//!
//! The crate computes entropic quantities exactly at small dimension,
//! constructs and verifies Gibbs-preserving and catalytic transitions, and
//! decides transition feasibility by convex projection on Choi matrices.
//! A seeded verification harness checks the defining properties of the
//! relative entropy (continuity, data processing, additivity,
//! super-additivity) and of the free-energy monotone, and searches for
//! super-additivity counterexamples in the Renyi families.
//!
//! | Module | Provides |
//! |--------|----------|
//! | [`linalg`] | Hermitian eigendecompositions, tensor products, partial traces, seeded sampling |
//! | [`channels`] | CPTP maps with Kraus/Choi representations |
//! | [`divergences`] | Von Neumann entropy, relative entropy, Renyi families, mutual information |
//! | [`thermo`] | Gibbs states, free energy, Gibbs-preserving maps, catalytic swap constructions |
//! | [`feasibility`] | Existence of a Gibbs-preserving channel between two objects |
//! | [`harness`] | Randomized, replayable property suites |
//! | [`cli`] | The `athermality` command-line front end |
//!
//! Runnable walkthroughs for each capability live in `examples/`.

pub mod channels;
pub mod cli;
pub mod divergences;
pub mod error;
pub mod feasibility;
pub mod harness;
pub mod linalg;
pub mod thermo;
pub mod tol;

pub use error::{Error, Result};
