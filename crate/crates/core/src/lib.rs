//! Exact symbolic verification of two non-commutative surface singularities
//! and the Cohen–Macaulay classification attached to good elliptic reduction
//! cycles.

pub mod blowup;
pub mod bundles;
pub mod catalog;
pub mod excurve;
pub mod expr;
pub mod pipeline;
pub mod polyring;
pub mod scalars;
pub mod structalg;
