//! Numerical laboratory for thermal-state Lindbladians at desk scale.
//!
//! Everything here is dense: Hamiltonians, jump operators, frequency-resolved
//! jumps, Lindblad generators, discriminants, and the gate-level circuits that
//! block-encode them. Identities are checked exactly (to floating-point
//! tolerances) and inequalities/scaling laws empirically on 1-3 qubit systems.

pub mod numkit;
pub mod model;
pub mod oft;
pub mod generator;
pub mod discriminant;
pub mod dynamics;
pub mod circuits;

pub use numkit::{CMat, CVec, DenseOperator, Superoperator, Picture};
