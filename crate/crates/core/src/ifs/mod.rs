//! Exact, error-bounded geometry and measure of a self-similar set.

mod dimension;
mod distance;
mod interval;
mod measure;
mod scene;
mod similarity;
mod system;
mod word;

pub use dimension::{solve_dimension, DimensionSolution};
pub use distance::distance_to_f;
pub use interval::Interval;
pub use measure::{dset_constants, mu_ball_mass, sample_mu, DSetConstants, MuSampler};
pub use scene::{parse_scene, SceneFile, SceneMap};
pub use similarity::{Affine, Aabb, Similarity};
pub use system::Ifs;
pub use word::{apply_word, project_word, InfiniteWord, Word};
