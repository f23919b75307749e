//! Transport of monokinetic phase-space measures under Hamiltonian flows.
//!
//! The crate integrates flows with their tangent maps, enumerates fold
//! preimages and caustics of rough momentum profiles, pushes densities
//! forward with their Lebesgue decomposition, and compares the classical
//! predictions with a scaled Schrödinger solver.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::redundant_guards)]

pub mod expr;
pub mod flow;
pub mod folds;
pub mod harness;
pub mod profiles;
pub mod quad;
pub mod quantum;
pub mod smooth;
pub mod transport;
