//! Curvature measures of parallel sets of self-similar fractals.
//!
//! The crate is organised bottom-up:
//!
//! * [`ifs`] holds the exact geometry of the self-similar set: similarities,
//!   code words, the Hausdorff dimension, error-bounded distances to `F` and
//!   masses of balls under the natural self-similar measure `μ`.
//! * [`grid`] realises parallel sets `F(ε)` on voxel grids through an exact
//!   Euclidean distance transform.
//! * [`curvature`] computes total and localized curvatures `C_0..C_d` of the
//!   voxelized parallel sets, by a cubical Euler characteristic and by
//!   Steiner-polynomial extraction from inner collar volumes. A third, exact
//!   estimator handles planar unions of discs.
//! * [`nets`] builds locally homogeneous neighbourhood nets and the rescaled
//!   log-averaged fractal curvatures (global totals, region measures, local
//!   densities).
//! * [`dynamics`] is the code-space shift system and its Birkhoff averages.
//! * [`oracles`] contains the closed-form reference values for the Cantor dust
//!   and the Menger sponge.
//! * [`cli`] is the command-line front end.

pub mod cli;
pub mod curvature;
pub mod dynamics;
pub mod error;
pub mod grid;
pub mod ifs;
pub mod nets;
pub mod oracles;
pub mod shapes;

pub use error::{Error, Result};
