use rayon::prelude::*;
use serde::Serialize;

use super::{rho_f, NetSpec};
use crate::curvature::{curvature_totals, fit_window, sample_depths, steiner_extract, InnerCollar, Method, TotalsOptions};
use crate::dynamics::sample_seed;
use crate::grid::DistanceField;
use crate::ifs::{Ifs, MuSampler};
use crate::{Error, Result};

/// Cell side of the lattice carrying `ρ_F` for the full-body (`k = d`) check, relative to `|J|`.
const BODY_LATTICE: f64 = 1.0 / 243.0;

/// Monte Carlo comparison of `m·E_μ[C_k(F(ε), A_F(x, ε))]` with `ε^D C_k(F(ε))`.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub k: usize,
    pub eps: f64,
    pub samples: usize,
    /// `m` times the sample mean.
    pub mean: f64,
    /// `ε^D C_k(F(ε))`.
    pub target: f64,
    pub relative_error: f64,
    /// Three standard errors of the mean, relative to the target.
    pub confidence: f64,
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        self.relative_error.abs() <= self.confidence
    }
}

/// Mass-net check of the identity behind the density formula. `k = d` uses the full-body
/// region on a lattice of side `|J|/243` (or the grid spacing if coarser), with `ρ_F` computed
/// once per lattice cell; `k = d − 1` splits the Steiner fit into per-foot contributions and
/// computes `ρ_F` once per foot. Other `k` are rejected.
pub fn check_identity_31(
    ifs: &Ifs,
    field: &DistanceField,
    net: &NetSpec,
    eps: f64,
    k: usize,
    n_samples: usize,
    seed: u64,
    opts: &TotalsOptions,
) -> Result<IdentityCheck> {
    let grid = field.grid();
    let d = grid.dim();
    if !(eps > 0.0 && eps < net.eps0) {
        return Err(Error::InvalidInput(format!("ε = {eps} must lie in (0, ε₀)")));
    }
    if n_samples == 0 {
        return Err(Error::InvalidInput("need at least one sample".into()));
    }
    let tol = 1e-4 * eps;
    // (point, radius, weight) carriers of C_k(F(ε), ·)
    let (carriers, target): (Vec<(Vec<f64>, f64)>, f64) = if k == d {
        let stride = ((BODY_LATTICE * ifs.cube().diameter() / grid.h).round() as usize).max(1);
        let cell = (stride as f64 * grid.h).powi(d as i32);
        let threshold = field.threshold(eps);
        let mut cells = Vec::new();
        for (i, &d2) in field.d2().iter().enumerate() {
            let c = grid.coords(i);
            if d2 <= threshold && c.iter().all(|&v| v % stride == stride / 2) {
                cells.push((grid.center(&c), grid.weight(&c) as f64 * cell));
            }
        }
        let total = field.volume(eps)?;
        (cells, total)
    } else if k + 1 == d {
        if grid.is_mirrored() {
            return Err(Error::InvalidInput("per-foot contributions need an unmirrored grid".into()));
        }
        let t_max = fit_window(eps, opts);
        let depths = sample_depths(d, t_max);
        let collar = InnerCollar::parallel_set(field, eps, true)?;
        let feet = collar.foot_volumes(&depths).expect("collar built with feet");
        // the fit is linear in the node volumes: weight of node j in C_k
        let weights: Vec<f64> = (0..d)
            .map(|j| {
                let mut unit: Vec<(f64, f64)> = depths.iter().map(|&t| (t, 0.0)).collect();
                unit[j].1 = 1.0;
                steiner_extract(&unit, d, t_max).map(|f| f.curvatures[k])
            })
            .collect::<Result<_>>()?;
        let cells: Vec<_> = feet
            .iter()
            .map(|(foot, v)| {
                let c: f64 = (0..d).map(|j| weights[j] * v[j]).sum();
                (grid.center(&grid.coords(*foot)), c)
            })
            .collect();
        let total = curvature_totals(field, eps, Method::Steiner, opts)?.c[k];
        (cells, total)
    } else {
        return Err(Error::InvalidInput(format!("identity check covers k ∈ {{d−1, d}}, not {k}")));
    };
    let radii: Vec<f64> = carriers
        .par_iter()
        .map(|(z, _)| rho_f(ifs, z, eps, tol).map(|r| r.mid().min(net.a * eps)))
        .collect::<Result<_>>()?;

    let depth = MuSampler::depth_for(ifs, 1e-3 * tol);
    let values: Vec<f64> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let (x, _) = MuSampler::new(ifs, sample_seed(seed, i), depth).draw();
            let v: f64 = carriers
                .iter()
                .zip(&radii)
                .filter(|((z, _), &r)| z.iter().zip(&x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() < r * r)
                .map(|((_, w), _)| w)
                .sum();
            net.mass_m * v
        })
        .collect();
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    let target = eps.powf(ifs.dimension()) * target;
    let std_err = if n_samples > 1 { (var / n).sqrt() } else { f64::INFINITY };
    Ok(IdentityCheck {
        k,
        eps,
        samples: n_samples,
        mean,
        target,
        relative_error: (mean - target) / target,
        confidence: 3.0 * std_err / target.abs(),
    })
}
