use serde::Serialize;

use super::estimate::integrate;
use super::local::ball_points;
use crate::curvature::discs::DiscSites;
use crate::curvature::unit_ball_volume;
use crate::ifs::{distance_to_f, Ifs, MuSampler, Word};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct DiagnosticOptions {
    /// Ball net constant: the curvature is localized to `B(x, aε)`.
    pub a: f64,
    /// Level of the cylinder boxes whose corners stand in for `F`.
    pub site_level: usize,
    /// Radii sampled strictly inside each window.
    pub eps_per_window: usize,
    /// `μ`-random centres added to the level-2 cylinder corners.
    pub mu_centres: usize,
    /// Radii per decade for the log-average.
    pub per_decade: usize,
    /// Quasi-Monte Carlo points for `k = 2` volumes.
    pub qmc_points: usize,
    pub seed: u64,
}

impl Default for DiagnosticOptions {
    fn default() -> Self {
        Self {
            a: 2.0,
            site_level: 7,
            eps_per_window: 5,
            mu_centres: 64,
            per_decade: 64,
            qmc_points: 256,
            seed: 1,
        }
    }
}

/// Largest sampled `ε^{−k}|C_k(F(ε), B(x, aε))|` inside one window of radii.
#[derive(Clone, Debug, Serialize)]
pub struct WindowSup {
    pub label: String,
    pub lo: f64,
    pub hi: f64,
    pub sup: f64,
    pub at_eps: f64,
    pub at_x: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundednessReport {
    pub k: usize,
    pub windows: Vec<WindowSup>,
    /// `δ` and `(1/|ln δ|) ∫_δ^{ε₀} ε^{−k} sup_x C_k^var(F(ε), B(x, aε)) dε/ε`.
    pub averages: Vec<(f64, f64)>,
}

impl BoundednessReport {
    pub fn window(&self, label: &str) -> Option<&WindowSup> {
        self.windows.iter().find(|w| w.label == label)
    }

    pub fn average_at(&self, delta: f64) -> Option<f64> {
        self.averages
            .iter()
            .find(|(d, _)| (d - delta).abs() <= 1e-12 * delta)
            .map(|p| p.1)
    }
}

/// Hole-birth windows `ρ^l τ (√(1+ρ^{2k+2}), √(1+ρ^{2k}))` of the Cantor dust, labelled by `k`.
pub fn cantor_windows(rho: f64, l: u32, k_max: u32) -> Vec<(String, f64, f64)> {
    let tau = 0.5 - rho;
    let s = rho.powi(l as i32) * tau;
    (0..=k_max)
        .map(|k| {
            let lo = s * (1.0 + rho.powi(2 * k as i32 + 2)).sqrt();
            let hi = s * (1.0 + rho.powi(2 * k as i32)).sqrt();
            (format!("k{k}"), lo, hi)
        })
        .collect()
}

fn corner_sites(ifs: &Ifs, level: usize) -> Vec<[f64; 2]> {
    let mut words = vec![Word::empty()];
    for _ in 0..level {
        words = words.iter().flat_map(|w| (0..ifs.len()).map(move |j| w.child(j))).collect();
    }
    let mut out = Vec::with_capacity(words.len() << 2);
    for w in &words {
        for c in ifs.cube().image_bounds(&w.map(ifs)).corners() {
            out.push([c[0], c[1]]);
        }
    }
    out
}

struct Evaluator<'a> {
    ifs: &'a Ifs,
    k: usize,
    a: f64,
    sites: DiscSites,
    centres: Vec<[f64; 2]>,
    qmc: Vec<[f64; 2]>,
}

impl Evaluator<'_> {
    /// `(sup_x ε^{−k}|C_k|, sup_x ε^{−k} C_k^var, argmax x)` over the centres.
    fn sup(&self, eps: f64) -> Result<(f64, f64, [f64; 2])> {
        let radius = self.a * eps;
        let mut best = (f64::NEG_INFINITY, f64::NEG_INFINITY, self.centres[0]);
        let union = if self.k < 2 { Some(self.sites.union(eps)?) } else { None };
        for &x in &self.centres {
            let (val, var) = match &union {
                Some(u) => {
                    let c = u.localized(x, radius);
                    if self.k == 0 {
                        (c.c0.abs(), c.c0_var)
                    } else {
                        (c.c1 / eps, c.c1 / eps)
                    }
                }
                None => {
                    let v = self.volume(x, eps) / (eps * eps);
                    (v, v)
                }
            };
            if val > best.0 {
                best.0 = val;
                best.2 = x;
            }
            best.1 = best.1.max(var);
        }
        Ok(best)
    }

    fn volume(&self, x: [f64; 2], eps: f64) -> f64 {
        let r = self.a * eps;
        let hits = self
            .qmc
            .iter()
            .filter(|p| {
                let z = [x[0] + r * p[0], x[1] + r * p[1]];
                distance_to_f(self.ifs, &z, 1e-3 * eps).mid() <= eps
            })
            .count();
        hits as f64 / self.qmc.len() as f64 * unit_ball_volume(2) * r * r
    }
}

/// Contrast between the pointwise bound (24) and the averaged bound (32) on a planar scene.
///
/// `F` is replaced by the corners of its level-`site_level` cylinder boxes (points of `F` for
/// scenes whose maps fix the cube corners) and curvatures come from the exact disc-union
/// estimator (`k ∈ {0, 1}`) or quasi-Monte Carlo volumes (`k = 2`). Centres `x` are the
/// level-2 box corners plus `μ`-random points. For the log-average the integrand below
/// `g/(a+1)` (`g` the first-level gap) repeats with period `r` in `ε`, since `B(x, aε)` then
/// sees a single first-level copy; this needs a common ratio `r`.
pub fn boundedness_diagnostic(
    ifs: &Ifs,
    k: usize,
    windows: &[(String, f64, f64)],
    deltas: &[f64],
    opts: &DiagnosticOptions,
) -> Result<BoundednessReport> {
    if ifs.dim() != 2 {
        return Err(Error::InvalidInput("the boundedness diagnostic is planar".into()));
    }
    if k > 2 {
        return Err(Error::InvalidInput(format!("k = {k} exceeds the dimension 2")));
    }
    let mut centres: Vec<[f64; 2]> = corner_sites(ifs, 2);
    let mut sampler = MuSampler::new(ifs, opts.seed, 60);
    centres.extend((0..opts.mu_centres).map(|_| {
        let (p, _) = sampler.draw();
        [p[0], p[1]]
    }));
    centres.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    centres.dedup();
    let qmc: Vec<[f64; 2]> = ball_points(2, opts.qmc_points).into_iter().map(|p| [p[0], p[1]]).collect();
    let ev = Evaluator {
        ifs,
        k,
        a: opts.a,
        sites: DiscSites::new(&corner_sites(ifs, opts.site_level))?,
        centres,
        qmc,
    };

    let mut out = Vec::with_capacity(windows.len());
    for (label, lo, hi) in windows {
        let mut best = WindowSup {
            label: label.clone(),
            lo: *lo,
            hi: *hi,
            sup: f64::NEG_INFINITY,
            at_eps: f64::NAN,
            at_x: Vec::new(),
        };
        let m = opts.eps_per_window.max(1);
        for j in 0..m {
            let eps = lo + (hi - lo) * (j as f64 + 0.5) / m as f64;
            let (v, _, x) = ev.sup(eps)?;
            if v > best.sup {
                best.sup = v;
                best.at_eps = eps;
                best.at_x = x.to_vec();
            }
        }
        out.push(best);
    }

    let mut averages = Vec::new();
    if !deltas.is_empty() {
        let r = ifs.max_ratio();
        if (ifs.min_ratio() - r).abs() > 1e-12 * r || !(ifs.first_level_gap() > 0.0) {
            return Err(Error::InvalidInput("the log-average needs a common ratio and separated boxes".into()));
        }
        let eps0 = ifs.eps0();
        let split = ifs.first_level_gap() / (opts.a + 1.0);
        if split >= eps0 {
            return Err(Error::InvalidInput("ε₀ lies below the period start".into()));
        }
        let step = std::f64::consts::LN_10 / opts.per_decade as f64;
        let n = ((eps0 / split).ln() / step).ceil() as usize;
        let mut base: Vec<(f64, f64)> = (0..=n)
            .map(|i| {
                let eps = split * (i as f64 * step).exp().min(eps0 / split);
                ev.sup(eps).map(|s| (eps, s.1))
            })
            .collect::<Result<_>>()?;
        base.dedup_by(|a, b| a.0 == b.0);
        let dmin = deltas.iter().cloned().fold(f64::INFINITY, f64::min);
        let period: Vec<(f64, f64)> = base.iter().cloned().filter(|p| p.0 < split / r).collect();
        let mut samples = base.clone();
        let mut scale = r;
        while split * scale / r >= dmin * r {
            samples.extend(period.iter().map(|&(e, v)| (e * scale, v)));
            scale *= r;
        }
        samples.sort_by(|a, b| a.0.total_cmp(&b.0));
        samples.dedup_by(|a, b| (a.0 - b.0).abs() <= 1e-12 * b.0);
        // the samples already carry ε^{−k}
        let values = integrate(&samples, k as f64, k, deltas, eps0, None)?;
        averages = deltas.iter().cloned().zip(values).collect();
    }
    Ok(BoundednessReport { k, windows: out, averages })
}
