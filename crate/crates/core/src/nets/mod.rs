//! Locally homogeneous neighbourhood nets `A_F(x, ε)` and the rescaled log-averaged
//! fractal curvatures built on them.

mod diagnostic;
mod estimate;
mod identity;
mod local;
mod region;

use std::fmt;
use std::str::FromStr;

use crate::ifs::{dset_constants, mu_ball_mass, Ifs, Interval};
use crate::{Error, Result};

pub use diagnostic::{boundedness_diagnostic, cantor_windows, BoundednessReport, DiagnosticOptions, WindowSup};
pub use estimate::{
    delta_schedule, eps_schedule, fractal_measure_of_region, global_fractal_curvature, log_average,
    region_series, self_similar_extension, series, FractalEstimate,
};
pub use identity::{check_identity_31, IdentityCheck};
pub use local::{local_density, LocalOptions};
pub use region::{net_region, NetRegion};

/// Relative tolerance of the mass comparisons behind `ρ_F`.
const MASS_TOL: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NetVariant {
    /// `∂F(ε) ∩ B(x, aε)`.
    Ball,
    /// Boundary points all of whose foot points on `F` lie in `B(x, ε)`.
    Footpoint,
    /// Boundary points `z` with `|x − z| ≤ ρ_F(z, ε)`.
    Mass,
}

impl fmt::Display for NetVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NetVariant::Ball => "ball",
            NetVariant::Footpoint => "footpoint",
            NetVariant::Mass => "mass",
        })
    }
}

impl FromStr for NetVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ball" => Ok(NetVariant::Ball),
            "footpoint" => Ok(NetVariant::Footpoint),
            "mass" => Ok(NetVariant::Mass),
            _ => Err(Error::InvalidInput(format!("unknown net {s:?}; expected ball, footpoint or mass"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NetSpec {
    pub variant: NetVariant,
    pub a: f64,
    pub eps0: f64,
    /// `max(2a, |J|/ε₀)`.
    pub b: f64,
    pub mass_m: f64,
}

impl NetSpec {
    pub fn new(ifs: &Ifs, variant: NetVariant, a: f64) -> Result<Self> {
        if !(a > 1.0 && a.is_finite()) {
            return Err(Error::InvalidInput(format!("net constant a = {a} must exceed 1")));
        }
        let eps0 = ifs.eps0();
        Ok(Self {
            variant,
            a,
            eps0,
            b: (2.0 * a).max(ifs.cube().diameter() / eps0),
            mass_m: ifs.mass(),
        })
    }

    /// Mass net with `a = 2 ĉ^{−1/D}`, `ĉ` the empirical lower D-set constant.
    pub fn mass(ifs: &Ifs, seed: u64) -> Result<Self> {
        Self::new(ifs, NetVariant::Mass, 2.0 * mass_radius_factor(ifs, seed))
    }
}

/// `ĉ^{−1/D}` for the empirical lower D-set constant `ĉ`: `ρ_F(x, ε) ≤ ĉ^{−1/D} ε` on `F`.
pub fn mass_radius_factor(ifs: &Ifs, seed: u64) -> f64 {
    let top = ifs.eps0().min(ifs.cube().diameter());
    let radii: Vec<f64> = (0..12).map(|i| top * 0.6f64.powi(i)).collect();
    let c = dset_constants(ifs, 64, &radii, seed);
    c.c_lower.powf(-1.0 / ifs.dimension())
}

/// Whether `m·μ(B(z, s)) < ε^D`, i.e. `s < ρ_F(z, ε)`.
pub fn within_mass_radius(ifs: &Ifs, z: &[f64], s: f64, eps: f64) -> bool {
    let target = eps.powf(ifs.dimension()) / ifs.mass();
    let iv = mu_ball_mass(ifs, z, s, MASS_TOL * target);
    iv.mid() < target
}

/// Interval containing `ρ_F(z, ε) = min{ρ : m·μ(B(z, ρ)) ≥ ε^D}`, of width at most `tol`.
pub fn rho_f(ifs: &Ifs, z: &[f64], eps: f64, tol: f64) -> Result<Interval> {
    let eps0 = ifs.eps0();
    if !(eps > 0.0 && eps < eps0) {
        return Err(Error::InvalidInput(format!("ρ_F needs 0 < ε < ε₀ = {eps0}, got {eps}")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let target = eps.powf(ifs.dimension()) / ifs.mass();
    let mass_tol = MASS_TOL * target;
    let mut lo = ifs.cube().distance_to(z);
    let mut hi = ifs.cube().farthest_distance(z);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let iv = mu_ball_mass(ifs, z, mid, mass_tol);
        if iv.lo >= target {
            hi = mid;
        } else if iv.hi < target {
            lo = mid;
        } else if iv.mid() < target {
            // mass resolved only to the tolerance: decide by the midpoint
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Interval::new(lo, hi))
}
