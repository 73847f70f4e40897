//! Orlicz-space analysis on discrete hypergroups.
//!
//! The crate provides four layers that build on each other:
//!
//! * [`young`] — Young-function calculus: evaluation, numerical convex
//!   conjugation, Δ₂ probing, the `|x|^p (ln(1+|x|))^γ` family, and
//!   sequence-condition verdicts for pairs of Young functions.
//! * [`hypergroup`] — discrete hypergroups given by structure-constant
//!   tables: built-in carriers (ℤ, ℤ_m, Chebyshev), axiom validation,
//!   Haar weights, center and aperiodicity queries, set translates.
//! * [`orlicz`] — modulars, Luxemburg and Amemiya (Orlicz) norms,
//!   weighted variants, convolution and translation of finitely
//!   supported functions.
//! * [`counterexample`] / [`operators`] — the divergent-convolution
//!   construction driven by an aperiodic center element, and the
//!   vanishing-at-infinity criterion for compact convolution operators.
//!
//! All verdicts produced here are numeric certificates: grid evidence
//! plus closed-form tail bounds where a family admits them. They are
//! labeled as evidence, never as proofs of the underlying limit
//! statements.
//!
//! Heavy inner loops (series partial sums, per-point norm profiles,
//! convolution tables) run data-parallel through [`parallel`] when the
//! `parallel` feature is enabled (default) and fall back to identical
//! sequential code otherwise. Both paths produce bit-identical results.

pub mod counterexample;
pub mod error;
pub mod expr;
pub mod hypergroup;
pub mod operators;
pub mod orlicz;
pub mod parallel;
pub mod sample;
pub mod schema;
pub mod young;

pub use error::{Error, Result};
pub use hypergroup::{DiscreteHypergroup, FiniteMeasure, Point, Window};
pub use orlicz::{OrliczFunction, Weight};
pub use young::{SequenceWitness, YoungFunction};
