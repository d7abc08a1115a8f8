//! Total and localized curvatures of voxelized parallel sets.
//!
//! Two grid estimators are provided: the cubical Euler characteristic together with the
//! volume and its radial derivative, and a fit of the inner collar volume polynomial whose
//! coefficients carry all curvatures. Planar unions of discs have an exact estimator in
//! [`discs`].

mod bounds;
mod collar;
mod components;
pub mod discs;
mod euler;
mod localize;
mod steiner;
mod totals;

pub use bounds::{bound_lemma41, bound_lemma43};
pub use collar::InnerCollar;
pub use components::{label_components, BoundedComponent, ComponentCounts};
pub use euler::euler_characteristic;
pub use localize::{localized_curvature, sum_feet};
pub use steiner::{sample_depths, steiner_extract, unit_ball_volume, SteinerFit, DEFAULT_WINDOW, RESIDUAL_LIMIT};
pub use totals::{curvature_totals, fit_window, near_critical, REACH_SHARE, CurvatureProfile, Method, ProfileRow, TotalsOptions};
