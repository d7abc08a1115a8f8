use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("parallel radius {radius} exceeds the grid margin {margin}")]
    OutsideMargin { radius: f64, margin: f64 },

    #[error("site budget exceeded: {count} sites > {budget}; use a coarser grid spacing")]
    SiteBudget { count: usize, budget: usize },

    #[error("empty site set")]
    EmptySites,

    #[error("scene parse error: {0}")]
    Scene(String),

    #[error("cache format error: {0}")]
    Cache(String),

    #[error("profile does not cover the requested range: {0}")]
    ProfileGap(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
