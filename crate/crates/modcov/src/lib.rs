//! Exact arithmetic workbench for modules of covariants of cyclic p-groups.
//!
//! The crate computes, degree by degree, the kernels K_n of powers of the
//! twisted derivation Δ = σ − ι attached to a unipotent cyclic-group action
//! on a polynomial ring over F_p, identifies them with modules of covariants,
//! and certifies that explicit candidate sets freely generate each K_n over a
//! homogeneous system of parameters.  Certification is a graded Nakayama
//! argument cross-checked against the Hilbert-series rank and s-invariant.

// Index-based loops are the natural idiom for the dense matrix arithmetic here.
#![allow(clippy::needless_range_loop)]

pub mod action;
pub mod arith;
pub mod cases;
pub mod certify;
pub mod cli;
pub mod hilbert;
pub mod poly;
pub mod slices;
pub mod suite;
