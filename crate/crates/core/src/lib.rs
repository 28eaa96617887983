//! Numerical verification of weak almost contact metric structures.
//!
//! Structures are given as expression matrices over a chart; every derived
//! quantity (connection, curvature, Lie derivatives, Nijenhuis tensors) is
//! computed pointwise from exact second-order jets.

pub mod catalog;
pub mod classify;
pub mod cli;
pub mod expr;
pub mod geometry;
pub mod jet;
pub mod linalg;
pub mod structure;
pub mod suites;
