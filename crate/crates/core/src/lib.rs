//! Hyers-Ulam stability of the planar linear system `x' = Ax`.
//!
//! [`stability::analyze`] classifies `A`, decides stability (no eigenvalue on
//! the imaginary axis) and returns the constant `K` together with the lower
//! bound `‖A⁻¹‖∞`. [`harness`] builds perturbed trajectories and checks
//! `sup ‖φ − x‖∞ ≤ Kε` against them; [`second_order`] handles scalar
//! second-order equations through their 2×2 reductions.

pub mod cli;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod report;
pub mod second_order;
pub mod stability;

pub use error::{HusError, Result};
pub use linalg::{EigenClass, Mat2, Vec2};
pub use stability::{analyze, StabilityReport};
