//! Voxel realization of parallel sets.
//!
//! Sites approximating `F` are marked cells of a [`GridSpec`]; an exact separable
//! distance transform turns them into a [`DistanceField`], whose sublevel sets are the
//! voxelized parallel sets [`BinaryGrid`].

mod binary;
mod cache;
mod edt;
mod field;
mod raster;
mod spec;

pub use binary::BinaryGrid;
pub use cache::{cache_key, load_field, load_or_compute, store_field};
pub use edt::{squared_edt, EdtOutput};
pub use field::{DistanceField, VolumeProfile};
pub use raster::{rasterize_points, rasterize_sites, site_depth, SiteSet, DEFAULT_SITE_BUDGET};
pub use spec::GridSpec;
