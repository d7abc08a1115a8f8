use std::io::Write;

use serde::Serialize;

use crate::curvature::{localized_curvature, CurvatureProfile, Method, ProfileRow};
use crate::grid::DistanceField;
use crate::ifs::Ifs;
use crate::{Error, Result};

/// Coarsest log-ε spacing accepted by the log averages: 16 samples per decade.
const MAX_LOG_STEP: f64 = std::f64::consts::LN_10 / 16.0;

/// Rescaled log-averages `Ĉ(δ)` for a descending list of `δ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FractalEstimate {
    pub k: usize,
    pub delta_list: Vec<f64>,
    pub values: Vec<f64>,
    /// Mean over the last quartile of `δ`s.
    pub extrapolated: f64,
    /// `max − min` over the last quartile.
    pub band: f64,
    pub eps0: f64,
    pub m: f64,
}

fn quartile_stats(v: &[f64]) -> (f64, f64) {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
    (mean, max - min)
}

impl FractalEstimate {
    pub fn from_values(k: usize, delta_list: Vec<f64>, values: Vec<f64>, eps0: f64, m: f64) -> Result<Self> {
        if values.is_empty() || values.len() != delta_list.len() {
            return Err(Error::InvalidInput("estimate needs one value per δ".into()));
        }
        if delta_list.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidInput("δ list must be strictly descending".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Degenerate("non-finite fractal curvature estimate".into()));
        }
        let q = (values.len() / 4).max(1);
        let (extrapolated, band) = quartile_stats(&values[values.len() - q..]);
        Ok(Self {
            k,
            delta_list,
            values,
            extrapolated,
            band,
            eps0,
            m,
        })
    }

    /// `max − min` over the first quartile of `δ`s.
    pub fn first_band(&self) -> f64 {
        let q = (self.values.len() / 4).max(1);
        quartile_stats(&self.values[..q]).1
    }

    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "delta,value")?;
        for (d, v) in self.delta_list.iter().zip(&self.values) {
            writeln!(w, "{d},{v}")?;
        }
        Ok(())
    }

    /// `{k, extrapolated, band, eps0, m}`.
    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "k": self.k,
            "extrapolated": self.extrapolated,
            "band": self.band,
            "eps0": self.eps0,
            "m": self.m,
        })
    }
}

/// Geometric radii from `eps_min` to `eps_max` at `per_decade` per decade, with `refine`
/// times that density inside `c ± width` for every critical radius `c`. Ascending.
pub fn eps_schedule(
    eps_min: f64,
    eps_max: f64,
    per_decade: usize,
    critical: &[f64],
    width: f64,
    refine: usize,
) -> Result<Vec<f64>> {
    if !(eps_min > 0.0 && eps_max > eps_min) || per_decade == 0 {
        return Err(Error::InvalidInput(format!("bad ε range [{eps_min}, {eps_max}]")));
    }
    let step = std::f64::consts::LN_10 / per_decade as f64;
    let n = ((eps_max / eps_min).ln() / step).ceil() as usize;
    let mut out: Vec<f64> = (0..=n).map(|i| (eps_max.ln() - i as f64 * step).exp().max(eps_min)).collect();
    let fine = step / refine.max(1) as f64;
    for &c in critical {
        let (lo, hi) = ((c - width).max(eps_min), (c + width).min(eps_max));
        if lo >= hi {
            continue;
        }
        let m = ((hi / lo).ln() / fine).ceil() as usize;
        out.extend((0..=m).map(|i| lo * ((hi / lo).ln() * i as f64 / m.max(1) as f64).exp()));
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
    Ok(out)
}

/// `δ = ε₀/2, ratio·ε₀/2, …` down to `floor`.
pub fn delta_schedule(eps0: f64, floor: f64, ratio: f64) -> Result<Vec<f64>> {
    if !(ratio > 0.0 && ratio < 1.0) || !(floor > 0.0) {
        return Err(Error::InvalidInput("δ schedule needs 0 < ratio < 1 and a positive floor".into()));
    }
    let mut out = Vec::new();
    let mut d = 0.5 * eps0;
    while d >= floor {
        out.push(d);
        d *= ratio;
    }
    if out.is_empty() {
        return Err(Error::InvalidInput(format!("floor {floor} lies above ε₀/2")));
    }
    Ok(out)
}

/// `(ε, C_k)` pairs from a profile, ascending; the cubical row wins where both exist.
pub fn series(profile: &CurvatureProfile, k: usize) -> Result<Vec<(f64, f64)>> {
    if k > profile.d {
        return Err(Error::InvalidInput(format!("k = {k} exceeds the dimension {}", profile.d)));
    }
    let mut rows: Vec<&ProfileRow> = profile.rows.iter().filter(|r| r.c[k].is_finite()).collect();
    rows.sort_by(|a, b| a.eps.total_cmp(&b.eps).then_with(|| (a.method != Method::Cubical).cmp(&(b.method != Method::Cubical))));
    rows.dedup_by(|a, b| a.eps == b.eps);
    Ok(rows.iter().map(|r| (r.eps, r.c[k])).collect())
}

/// `(1/|ln δ|) ∫_δ^{upper} ε^{D−k} C_k(ε) dε/ε` for every `δ`, by the trapezoid rule in `ln ε`
/// on the sample grid. Samples must be ascending in `ε`.
pub fn log_average(samples: &[(f64, f64)], dim: f64, k: usize, deltas: &[f64], upper: f64) -> Result<Vec<f64>> {
    integrate(samples, dim, k, deltas, upper, Some(MAX_LOG_STEP))
}

/// [`log_average`] for samples placed by the caller, without the sampling density check.
pub(crate) fn integrate(
    samples: &[(f64, f64)],
    dim: f64,
    k: usize,
    deltas: &[f64],
    upper: f64,
    max_step: Option<f64>,
) -> Result<Vec<f64>> {
    if samples.len() < 2 {
        return Err(Error::ProfileGap("fewer than two samples".into()));
    }
    let lo = samples[0].0;
    let hi = samples[samples.len() - 1].0;
    let slack = 1e-9;
    if upper > hi * (1.0 + slack) {
        return Err(Error::ProfileGap(format!("samples end at {hi}, below ε₀ = {upper}")));
    }
    let dmin = deltas.iter().cloned().fold(f64::INFINITY, f64::min);
    if dmin < lo * (1.0 - slack) {
        return Err(Error::ProfileGap(format!("samples start at {lo}, above δ = {dmin}")));
    }
    let u: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
    let limit = max_step.unwrap_or(f64::INFINITY);
    if let Some(w) = u.windows(2).find(|w| w[1] - w[0] > limit * (1.0 + 1e-6) && w[1] > dmin.ln() && w[0] < upper.ln()) {
        return Err(Error::ProfileGap(format!(
            "gap between ε = {} and {} exceeds 16 samples per decade",
            w[0].exp(),
            w[1].exp()
        )));
    }
    let g: Vec<f64> = samples.iter().map(|&(e, c)| e.powf(dim - k as f64) * c).collect();
    // value of the integrand at log-radius v, linear between samples
    let at = |v: f64| -> f64 {
        let j = u.partition_point(|&x| x < v).clamp(1, u.len() - 1);
        let t = ((v - u[j - 1]) / (u[j] - u[j - 1])).clamp(0.0, 1.0);
        g[j - 1] + t * (g[j] - g[j - 1])
    };
    // ∫ from v to upper.ln()
    let integral = |v: f64| -> f64 {
        let top = upper.ln();
        let mut total = 0.0;
        let mut a = v;
        let mut fa = at(v);
        for (j, &uj) in u.iter().enumerate() {
            if uj <= v {
                continue;
            }
            if uj >= top {
                break;
            }
            total += 0.5 * (fa + g[j]) * (uj - a);
            a = uj;
            fa = g[j];
        }
        total + 0.5 * (fa + at(top)) * (top - a)
    };
    Ok(deltas
        .iter()
        .map(|&d| integral(d.ln()) / d.ln().abs())
        .collect())
}

/// Rows below the first-level separation generated from the scaling identity
/// `C_k(F(ε)) = N r^k C_k(F(ε/r))`, valid for `N` maps of a common ratio `r` while `ε` is below
/// half the gap between first-level boxes. Needs rows covering `[g/2, g/(2r)]`.
pub fn self_similar_extension(profile: &CurvatureProfile, ifs: &Ifs, eps_min: f64) -> Result<CurvatureProfile> {
    let r = ifs.max_ratio();
    if (ifs.min_ratio() - r).abs() > 1e-12 * r {
        return Err(Error::InvalidInput("self-similar extension needs a common ratio".into()));
    }
    let g = ifs.first_level_gap();
    if !(g > 0.0) {
        return Err(Error::InvalidInput("self-similar extension needs separated first-level boxes".into()));
    }
    let n = ifs.len() as f64;
    let split = 0.5 * g;
    let base: Vec<&ProfileRow> = profile
        .rows
        .iter()
        .filter(|row| row.eps >= split && row.eps < split / r)
        .collect();
    if base.is_empty() {
        return Err(Error::ProfileGap(format!("no rows in [{split}, {}]", split / r)));
    }
    let mut out = CurvatureProfile::new(profile.d);
    out.rows.extend(profile.rows.iter().filter(|row| row.eps >= split).cloned());
    let mut l = 1i32;
    loop {
        let scale = r.powi(l);
        // one period below eps_min keeps the lower end covered
        if split / r * scale < eps_min * r {
            break;
        }
        let copies = n.powi(l);
        for row in &base {
            let eps = row.eps * scale;
            let c = row
                .c
                .iter()
                .enumerate()
                .map(|(k, v)| v * copies * scale.powi(k as i32))
                .collect();
            out.rows.push(ProfileRow {
                eps,
                c,
                components: row.components * copies as u64,
                b1: row.b1 * copies as i64,
                b2: row.b2 * copies as u64,
                ..(*row).clone()
            });
        }
        l += 1;
    }
    out.rows.sort_by(|a, b| a.eps.total_cmp(&b.eps));
    Ok(out)
}

/// `Ĉ_k(δ)` from a profile covering `[min δ, ε₀]`.
pub fn global_fractal_curvature(
    profile: &CurvatureProfile,
    dim: f64,
    k: usize,
    delta_list: &[f64],
    eps0: f64,
) -> Result<FractalEstimate> {
    let s = series(profile, k)?;
    let values = log_average(&s, dim, k, delta_list, eps0)?;
    FractalEstimate::from_values(k, delta_list.to_vec(), values, eps0, eps0.powf(dim))
}

/// `(ε, C_k(F(ε), region))`: cell volume of `F(ε) ∩ region` for `k = d`, otherwise the
/// localized Steiner fit over boundary points in `region` with the given window fractions.
pub fn region_series(
    field: &DistanceField,
    eps_list: &[f64],
    k: usize,
    region: impl Fn(&[f64]) -> bool,
    window: impl Fn(f64) -> f64,
) -> Result<Vec<(f64, f64)>> {
    let grid = field.grid();
    let d = grid.dim();
    if k > d {
        return Err(Error::InvalidInput(format!("k = {k} exceeds the dimension {d}")));
    }
    let mut out = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let v = if k == d {
            let body = field.parallel_set(eps)?;
            let w: u64 = body
                .iter_ones()
                .filter_map(|i| {
                    let c = grid.coords(i);
                    region(&grid.center(&c)).then(|| grid.weight(&c))
                })
                .sum();
            w as f64 * grid.cell_volume()
        } else {
            localized_curvature(field, eps, &region, window(eps))?.curvatures[k]
        };
        out.push((eps, v));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}

/// Log-averaged `C_k(F(ε), region)`, the fractal curvature measure of the region.
pub fn fractal_measure_of_region(
    region_series: &[(f64, f64)],
    dim: f64,
    k: usize,
    delta_list: &[f64],
    eps0: f64,
) -> Result<FractalEstimate> {
    let values = log_average(region_series, dim, k, delta_list, eps0)?;
    FractalEstimate::from_values(k, delta_list.to_vec(), values, eps0, eps0.powf(dim))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::{curvature_totals, TotalsOptions};
    use crate::grid::{rasterize_sites, GridSpec};
    use crate::oracles::cantor_euler;

    #[test]
    fn power_law_averages_to_its_constant() {
        let (dim, k) = (1.26, 1);
        let eps = eps_schedule(1e-6, 1.0, 32, &[], 0.0, 1).unwrap();
        let samples: Vec<(f64, f64)> = eps.iter().map(|&e| (e, 2.5 * e.powf(k as f64 - dim))).collect();
        let deltas = delta_schedule(1.0, 1e-5, 0.5).unwrap();
        let v = log_average(&samples, dim, k, &deltas, 1.0).unwrap();
        assert!(v.iter().all(|x| (x - 2.5).abs() < 1e-9), "{v:?}");
        // with ε₀ below one the head vanishes like ln ε₀ / ln δ
        let v = log_average(&samples, dim, k, &[1e-5], 0.1).unwrap();
        assert!((v[0] - 2.5 * 4.0 / 5.0).abs() < 1e-9);
    }

    #[test]
    fn sparse_samples_are_rejected() {
        let samples = vec![(1e-3, 1.0), (1e-2, 1.0), (1.0, 1.0)];
        assert!(matches!(log_average(&samples, 1.0, 1, &[1e-3], 1.0), Err(Error::ProfileGap(_))));
        assert!(matches!(log_average(&samples[..1], 1.0, 1, &[1e-3], 1.0), Err(Error::ProfileGap(_))));
        let dense: Vec<(f64, f64)> = eps_schedule(1e-2, 1.0, 16, &[], 0.0, 1).unwrap().into_iter().map(|e| (e, 1.0)).collect();
        assert!(matches!(log_average(&dense, 1.0, 1, &[1e-3], 1.0), Err(Error::ProfileGap(_))));
    }

    #[test]
    fn schedules() {
        let e = eps_schedule(0.01, 1.0, 10, &[0.1], 0.01, 4).unwrap();
        assert!(e.windows(2).all(|w| w[0] < w[1]));
        assert_eq!((e[0], *e.last().unwrap()), (0.01, 1.0));
        let near = e.iter().filter(|v| (**v - 0.1).abs() <= 0.01).count();
        assert!(near >= 5, "{near}");
        let d = delta_schedule(1.0, 1e-3, 0.5).unwrap();
        assert_eq!(d[0], 0.5);
        assert!(*d.last().unwrap() >= 1e-3 && d.len() == 9);
        assert!(delta_schedule(1.0, 0.6, 0.5).is_err());
        assert!(delta_schedule(1.0, 1e-3, 1.0).is_err());
    }

    #[test]
    fn quartile_extrapolation() {
        let deltas = vec![0.5, 0.25, 0.125, 0.0625, 0.03, 0.01, 0.005, 0.001];
        let values = vec![9.0, 8.0, 7.0, 6.0, 5.0, 4.0, 3.0, 1.0];
        let e = FractalEstimate::from_values(2, deltas.clone(), values.clone(), 1.0, 1.0).unwrap();
        assert_eq!((e.extrapolated, e.band), (2.0, 2.0));
        assert_eq!(e.first_band(), 1.0);
        let mut rev = deltas.clone();
        rev.reverse();
        assert!(FractalEstimate::from_values(2, rev, values, 1.0, 1.0).is_err());
    }

    #[test]
    fn extension_matches_euler_oracle() {
        let ifs = Ifs::cantor_dust(1.0 / 3.0).unwrap();
        let grid = GridSpec::covering(ifs.cube(), 1.0 / 243.0, 0.55).unwrap();
        let field = DistanceField::from_sites(&rasterize_sites(&ifs, &grid, 1 << 22).unwrap(), false).unwrap();
        let mut profile = CurvatureProfile::new(2);
        let opts = TotalsOptions { skip_topology: true, ..Default::default() };
        for eps in [0.18, 0.22, 0.3, 0.4, 0.45] {
            profile.rows.push(curvature_totals(&field, eps, Method::Cubical, &opts).unwrap());
        }
        let ext = self_similar_extension(&profile, &ifs, 0.005).unwrap();
        assert!(ext.rows.iter().any(|r| r.eps < 0.005));
        for row in &ext.rows {
            if let Some(chi) = cantor_euler(1.0 / 3.0, row.eps).unwrap() {
                assert_eq!(row.c[0], chi as f64, "ε = {}", row.eps);
            }
        }
        let v = ext.rows.iter().find(|r| (r.eps - 0.02).abs() < 1e-12).unwrap();
        let base = profile.rows.iter().find(|r| r.eps == 0.18).unwrap();
        assert!((v.c[2] - 16.0 / 81.0 * base.c[2]).abs() < 1e-12);
    }
}
