use std::collections::BTreeMap;

use super::estimate::integrate;
use super::{net_region, within_mass_radius, FractalEstimate, NetSpec, NetVariant};
use crate::curvature::{fit_window, sample_depths, steiner_extract, sum_feet, unit_ball_volume, InnerCollar, TotalsOptions};
use crate::dynamics::Orbit;
use crate::grid::DistanceField;
use crate::ifs::{distance_to_f, Ifs};
use crate::{Error, Result};

/// Grid of reduced radii used with a distance field: 64 per decade.
const FIELD_STEPS_PER_DECADE: f64 = 64.0;

#[derive(Clone, Debug)]
pub struct LocalOptions {
    /// Samples of `ε` per decade.
    pub per_decade: usize,
    /// Quasi-Monte Carlo points per volume for `k = d`.
    pub qmc_points: usize,
    /// `ĉ^{−1/D}`: `ρ_F(p, ε) ≤ radius_factor·ε` for `p ∈ F`.
    pub radius_factor: f64,
    pub totals: TotalsOptions,
}

impl Default for LocalOptions {
    fn default() -> Self {
        Self {
            per_decade: 16,
            qmc_points: 1024,
            radius_factor: f64::INFINITY,
            totals: TotalsOptions::default(),
        }
    }
}

/// The local average (22) at `x`: `(1/|ln δ|) ∫_δ^{b⁻¹d(x,J^c)} ε^{−k} C_k(F(ε), A_F(x,ε)) dε/ε`.
///
/// Every `ε` is reduced along the orbit of `x`: for `m ≤ n(x, ε)` the net is homogeneous, so
/// the integrand equals its value at `(T^m x, ε/r_{x|m})`. For `k = d` the set is the full-body
/// region `{z ∈ F(ε) : z ∈ A_F(x, ε)}` measured by quasi-Monte Carlo against the exact
/// distance and mass oracles; for `k < d` the localized Steiner fit on `field` is used.
/// `δ`s at or above `b⁻¹d(x,J^c)` are dropped from the estimate.
pub fn local_density(
    ifs: &Ifs,
    field: Option<&DistanceField>,
    net: &NetSpec,
    x: &mut Orbit<'_>,
    k: usize,
    delta_list: &[f64],
    opts: &LocalOptions,
) -> Result<FractalEstimate> {
    let d = ifs.dim();
    if k > d {
        return Err(Error::InvalidInput(format!("k = {k} exceeds the dimension {d}")));
    }
    let b = net.b;
    let upper = x.boundary_distance(0)? / b;
    let deltas: Vec<f64> = delta_list.iter().cloned().filter(|&v| v < upper).collect();
    let Some(&dmin) = deltas.last() else {
        return Err(Error::InvalidInput(format!("every δ lies above b⁻¹d(x, J^c) = {upper:.4e}")));
    };
    let step = std::f64::consts::LN_10 / opts.per_decade.max(1) as f64;
    let count = ((upper / dmin).ln() / step).ceil() as usize;
    // ln δ(x, n) until it falls below the smallest ε
    let mut ln_delta = vec![x.log_delta(0, b)?];
    while *ln_delta.last().unwrap() >= dmin.ln() {
        let n = ln_delta.len();
        ln_delta.push(x.log_delta(n, b)?);
    }
    let level = |eps: f64| ln_delta.partition_point(|&l| l >= eps.ln()) - 1;

    let mut samples = Vec::with_capacity(count + 1);
    if k == d {
        if net.variant == NetVariant::Footpoint {
            return Err(Error::InvalidInput("the full-body region is defined for the ball and mass nets".into()));
        }
        let pts = ball_points(d, opts.qmc_points);
        for i in 0..=count {
            let eps = (upper.ln() - i as f64 * step).exp();
            let m = level(eps);
            let reduced = eps * (-x.log_ratio(m)).exp();
            let (y, _) = x.point(m);
            samples.push((eps, body_volume(ifs, net, &y, reduced, opts, &pts) / reduced.powi(d as i32)));
        }
    } else {
        let field = field.ok_or_else(|| Error::InvalidInput("k < d needs a distance field".into()))?;
        let gstep = std::f64::consts::LN_10 / FIELD_STEPS_PER_DECADE;
        // requests grouped by the reduced radius on the fixed grid
        let mut groups: BTreeMap<i64, Vec<(f64, Vec<f64>)>> = BTreeMap::new();
        for i in 0..=count {
            let eps = (upper.ln() - i as f64 * step).exp();
            // the deepest admissible level gives the largest reduced radius
            let m = level(eps);
            let lr = x.log_ratio(m);
            let reduced = eps * (-lr).exp();
            let cap = x.boundary_distance(m)? / b;
            let mut g = (reduced.ln() / gstep).round() as i64;
            if (g as f64 * gstep).exp() > cap {
                g -= 1;
            }
            let (y, _) = x.point(m);
            groups.entry(g).or_default().push(((g as f64 * gstep).exp() * lr.exp(), y));
        }
        for (g, reqs) in groups {
            let reduced = (g as f64 * gstep).exp();
            let collar = InnerCollar::parallel_set(field, reduced, true)?;
            let grid = field.grid();
            let t_max = fit_window(reduced, &opts.totals);
            let depths = sample_depths(d, t_max);
            let feet = collar.foot_volumes(&depths).expect("collar built with feet");
            for (eps, y) in reqs {
                let region = net_region(net, ifs, field, &y, reduced)?;
                let vols = sum_feet(&depths, &feet, |foot| region.contains(&grid.center(&grid.coords(foot))));
                let fit = steiner_extract(&vols, d, t_max)?;
                samples.push((eps, fit.curvatures[k] / reduced.powi(k as i32)));
            }
        }
    }
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    samples.dedup_by(|a, b| a.0 == b.0);
    // weight ε^{k−k}: the samples already carry ε^{−k}
    let values = integrate(&samples, k as f64, k, &deltas, upper, None)?;
    FractalEstimate::from_values(k, deltas, values, net.eps0, net.mass_m)
}

fn radical_inverse(mut i: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// The first `n` Halton points of `[−1,1]^d` inside the unit ball.
pub(crate) fn ball_points(d: usize, n: usize) -> Vec<Vec<f64>> {
    const BASES: [usize; 3] = [2, 3, 5];
    let mut out = Vec::with_capacity(n);
    let mut i = 1;
    while out.len() < n {
        let p: Vec<f64> = (0..d).map(|a| 2.0 * radical_inverse(i, BASES[a]) - 1.0).collect();
        if p.iter().map(|v| v * v).sum::<f64>() <= 1.0 {
            out.push(p);
        }
        i += 1;
    }
    out
}

/// Volume of `{z ∈ F(ε) : z ∈ A_F(y, ε)}`, the region confined to `B(y, R)` with
/// `R = (ĉ^{−1/D} + 1)ε` for the mass net.
fn body_volume(ifs: &Ifs, net: &NetSpec, y: &[f64], eps: f64, opts: &LocalOptions, pts: &[Vec<f64>]) -> f64 {
    let d = y.len();
    let radius = match net.variant {
        NetVariant::Mass => net.a.min(opts.radius_factor + 1.0) * eps,
        _ => net.a * eps,
    };
    let mut z = vec![0.0; d];
    let mut hits = 0usize;
    for p in pts {
        for i in 0..d {
            z[i] = y[i] + radius * p[i];
        }
        let iv = distance_to_f(ifs, &z, 1e-3 * eps);
        let inside = if iv.hi <= eps {
            true
        } else if iv.lo > eps {
            false
        } else {
            iv.mid() <= eps
        };
        if !inside {
            continue;
        }
        let keep = match net.variant {
            NetVariant::Mass => {
                let s = z.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                within_mass_radius(ifs, &z, s, eps)
            }
            _ => true,
        };
        hits += keep as usize;
    }
    hits as f64 / pts.len() as f64 * unit_ball_volume(d) * radius.powi(d as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halton_points_fill_the_ball() {
        assert_eq!(radical_inverse(6, 2), 0.375);
        assert!((radical_inverse(5, 3) - 7.0 / 9.0).abs() < 1e-15);
        let pts = ball_points(2, 4000);
        assert!(pts.iter().all(|p| p[0] * p[0] + p[1] * p[1] <= 1.0));
        let quadrant = pts.iter().filter(|p| p[0] > 0.0 && p[1] > 0.0).count() as f64 / 4000.0;
        assert!((quadrant - 0.25).abs() < 0.01);
    }

    #[test]
    fn full_body_of_a_ball_region() {
        // a ball net with aε beyond the hull covers all of F(ε)
        use crate::grid::{rasterize_sites, GridSpec};
        let ifs = Ifs::cantor_dust(1.0 / 3.0).unwrap();
        let net = NetSpec::new(&ifs, NetVariant::Ball, 50.0).unwrap();
        let v = body_volume(&ifs, &net, &[0.5, 0.5], 0.05, &LocalOptions::default(), &ball_points(2, 40000));
        let grid = GridSpec::covering(ifs.cube(), 1.0 / 729.0, 0.06).unwrap();
        let field = DistanceField::from_sites(&rasterize_sites(&ifs, &grid, 1 << 22).unwrap(), false).unwrap();
        let w = field.volume(0.05).unwrap();
        assert!((v - w).abs() < 0.02 * w, "{v} {w}");
    }

    #[test]
    fn footpoint_is_rejected_for_volume() {
        let ifs = Ifs::cantor_dust(1.0 / 3.0).unwrap();
        let net = NetSpec::new(&ifs, NetVariant::Footpoint, 2.0).unwrap();
        let mut x = Orbit::random(&ifs, 3);
        assert!(local_density(&ifs, None, &net, &mut x, 2, &[1e-3], &LocalOptions::default()).is_err());
        assert!(local_density(&ifs, None, &net, &mut x, 1, &[1e-3], &LocalOptions::default()).is_err());
    }
}
