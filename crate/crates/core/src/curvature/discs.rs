//! Exact curvatures of planar unions of equal discs.
//!
//! The boundary of `⋃ B(y, ε)` consists of circular arcs, each lying in the Voronoi cell of
//! its center, joined at reentrant vertices. Gauss–Bonnet gives `C_0` as the total arc
//! angle minus the total vertex turning, over `2π`; both parts are measures on the boundary
//! and can be restricted to a ball exactly.

use std::f64::consts::{PI, TAU};

use spade::{DelaunayTriangulation, HasPosition, Point2, Triangulation};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug)]
struct Site {
    p: Point2<f64>,
    id: usize,
}

impl HasPosition for Site {
    type Scalar = f64;
    fn position(&self) -> Point2<f64> {
        self.p
    }
}

/// Uncovered arcs of one circle and the turning at their endpoints.
#[derive(Clone, Debug, Default)]
struct CircleBoundary {
    /// `(start angle, length)`, start in `[0, 2π)`.
    arcs: Vec<(f64, f64)>,
    /// `(angle, turning share)`: each endpoint carries half the exterior angle of its vertex.
    ends: Vec<(f64, f64)>,
}

/// Curvature values of a union of discs, total or restricted to a ball.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DiscCurvatures {
    /// Gauss curvature `C_0`.
    pub c0: f64,
    /// Total variation `C_0^var`: arc part plus vertex part.
    pub c0_var: f64,
    /// Half the boundary length.
    pub c1: f64,
}

/// Boundary structure of `⋃ B(y, ε)` over a planar site set.
pub struct DiscUnion {
    sites: Vec<[f64; 2]>,
    eps: f64,
    circles: Vec<CircleBoundary>,
}

/// Planar sites with their Delaunay neighbours, reusable across radii.
pub struct DiscSites {
    sites: Vec<[f64; 2]>,
    /// Per site: `(direction, distance)` of every Delaunay neighbour.
    neighbours: Vec<Vec<(f64, f64)>>,
}

impl DiscSites {
    pub fn new(sites: &[[f64; 2]]) -> Result<Self> {
        let mut pts: Vec<[f64; 2]> = sites.to_vec();
        if pts.iter().any(|p| !(p[0].is_finite() && p[1].is_finite())) {
            return Err(Error::InvalidInput("non-finite site".into()));
        }
        pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        pts.dedup();
        if pts.is_empty() {
            return Err(Error::EmptySites);
        }
        let mut neighbours = vec![Vec::new(); pts.len()];
        if pts.len() > 1 {
            let input: Vec<Site> = pts
                .iter()
                .enumerate()
                .map(|(id, p)| Site {
                    p: Point2::new(p[0], p[1]),
                    id,
                })
                .collect();
            let tri: DelaunayTriangulation<Site> = Triangulation::bulk_load(input)
                .map_err(|e| Error::InvalidInput(format!("triangulation failed: {e:?}")))?;
            for v in tri.vertices() {
                let y = v.data();
                for e in v.out_edges() {
                    let q = *e.to().data();
                    let (dx, dy) = (q.p.x - y.p.x, q.p.y - y.p.y);
                    neighbours[y.id].push((dy.atan2(dx), dx.hypot(dy)));
                }
            }
        }
        Ok(Self { sites: pts, neighbours })
    }

    pub fn sites(&self) -> &[[f64; 2]] {
        &self.sites
    }

    pub fn union(&self, eps: f64) -> Result<DiscUnion> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidInput(format!("radius {eps} must be positive")));
        }
        let circles = self
            .neighbours
            .iter()
            .map(|nb| {
                let excl: Vec<(f64, f64)> = nb
                    .iter()
                    .filter(|&&(_, s)| s < 2.0 * eps)
                    .map(|&(dir, s)| (dir, (s / (2.0 * eps)).acos()))
                    .collect();
                circle_boundary(&excl)
            })
            .collect();
        Ok(DiscUnion {
            sites: self.sites.clone(),
            eps,
            circles,
        })
    }
}

impl DiscUnion {
    pub fn new(sites: &[[f64; 2]], eps: f64) -> Result<Self> {
        DiscSites::new(sites)?.union(eps)
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Deduplicated sites, in the order used internally.
    pub fn sites(&self) -> &[[f64; 2]] {
        &self.sites
    }

    pub fn totals(&self) -> DiscCurvatures {
        let mut arc = 0.0;
        let mut turn = 0.0;
        for c in &self.circles {
            arc += c.arcs.iter().map(|a| a.1).sum::<f64>();
            turn += c.ends.iter().map(|e| e.1).sum::<f64>();
        }
        self.finish(arc, turn)
    }

    /// Curvatures of the boundary part inside the closed ball `B(center, radius)`.
    pub fn localized(&self, center: [f64; 2], radius: f64) -> DiscCurvatures {
        let eps = self.eps;
        let mut arc = 0.0;
        let mut turn = 0.0;
        for (y, c) in self.sites.iter().zip(&self.circles) {
            let (dx, dy) = (center[0] - y[0], center[1] - y[1]);
            let s = dx.hypot(dy);
            if s >= radius + eps {
                continue;
            }
            if s + eps <= radius {
                arc += c.arcs.iter().map(|a| a.1).sum::<f64>();
                turn += c.ends.iter().map(|e| e.1).sum::<f64>();
                continue;
            }
            // the circle meets the ball in the angular window mid ± half
            let cosg = ((s * s + eps * eps - radius * radius) / (2.0 * eps * s)).clamp(-1.0, 1.0);
            let half = cosg.acos();
            let mid = dy.atan2(dx);
            for &(a0, len) in &c.arcs {
                arc += overlap(a0, len, mid - half, 2.0 * half);
            }
            for &(ang, share) in &c.ends {
                let p = [y[0] + eps * ang.cos(), y[1] + eps * ang.sin()];
                if (p[0] - center[0]).hypot(p[1] - center[1]) <= radius {
                    turn += share;
                }
            }
        }
        self.finish(arc, turn)
    }

    fn finish(&self, arc: f64, turn: f64) -> DiscCurvatures {
        DiscCurvatures {
            c0: (arc - turn) / TAU,
            c0_var: (arc + turn) / TAU,
            c1: 0.5 * self.eps * arc,
        }
    }
}

fn norm_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Length of the intersection of two arcs given as `(start, length)`.
fn overlap(a0: f64, alen: f64, b0: f64, blen: f64) -> f64 {
    if blen >= TAU {
        return alen;
    }
    let a0 = norm_angle(a0);
    let b0 = norm_angle(b0);
    let mut total = 0.0;
    for shift in [-TAU, 0.0, TAU] {
        let lo = a0.max(b0 + shift);
        let hi = (a0 + alen).min(b0 + shift + blen);
        if hi > lo {
            total += hi - lo;
        }
    }
    total
}

/// Complement of the union of exclusion windows `center ± half` on the circle.
fn circle_boundary(excl: &[(f64, f64)]) -> CircleBoundary {
    if excl.is_empty() {
        return CircleBoundary {
            arcs: vec![(0.0, TAU)],
            ends: Vec::new(),
        };
    }
    // (start, end, turning share at start, turning share at end) unrolled onto [0, 4π)
    let mut iv: Vec<(f64, f64, f64)> = excl
        .iter()
        .map(|&(c, beta)| {
            let s = norm_angle(c - beta);
            // exterior angle at the vertex: π − 2β, shared by two endpoints
            (s, s + 2.0 * beta, 0.5 * (PI - 2.0 * beta))
        })
        .collect();
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    // merge; each merged window keeps the share of the interval ending last
    let mut merged: Vec<(f64, f64, f64, f64)> = Vec::new();
    for &(s, e, share) in &iv {
        match merged.last_mut() {
            Some(m) if s <= m.1 => {
                if e > m.1 {
                    m.1 = e;
                    m.3 = share;
                }
            }
            _ => merged.push((s, e, share, share)),
        }
    }
    // wrap: windows reaching past 2π may swallow the first ones
    let first_start = merged[0].0;
    let mut last = *merged.last().unwrap();
    let mut head = 0;
    while head < merged.len() - 1 && merged[head].0 + TAU <= last.1 {
        if merged[head].1 + TAU > last.1 {
            last.1 = merged[head].1 + TAU;
            last.3 = merged[head].3;
        }
        head += 1;
    }
    let mut windows: Vec<(f64, f64, f64, f64)> = merged[head..merged.len() - 1].to_vec();
    windows.push(last);
    if windows.len() == 1 && windows[0].1 - windows[0].0 >= TAU {
        return CircleBoundary::default();
    }
    let _ = first_start;
    let mut out = CircleBoundary::default();
    let n = windows.len();
    for i in 0..n {
        let cur = windows[i];
        let next = if i + 1 < n { windows[i + 1] } else { (windows[0].0 + TAU, 0.0, windows[0].2, 0.0) };
        let len = next.0 - cur.1;
        if len > 0.0 {
            out.arcs.push((norm_angle(cur.1), len));
            out.ends.push((norm_angle(cur.1), cur.3));
            out.ends.push((norm_angle(next.0), next.2));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_disc() {
        let u = DiscUnion::new(&[[0.3, -0.2]], 0.5).unwrap();
        let t = u.totals();
        assert!((t.c0 - 1.0).abs() < 1e-12 && (t.c0_var - 1.0).abs() < 1e-12);
        assert!((t.c1 - 0.5 * PI).abs() < 1e-12);
        let half = u.localized([0.3, 9.8], 10.0);
        // the window half-width γ solves the triangle of the two centers: cos γ = 0.25/10
        assert!((half.c0 - 0.025f64.acos() / PI).abs() < 1e-12, "{half:?}");
    }

    #[test]
    fn two_overlapping_discs() {
        // lens vertices at angle ±β, β = arccos(s/2ε)
        let (s, eps) = (1.0, 0.8);
        let u = DiscUnion::new(&[[0.0, 0.0], [s, 0.0]], eps).unwrap();
        let t = u.totals();
        assert!((t.c0 - 1.0).abs() < 1e-12, "{t:?}");
        let beta = (s / (2.0 * eps)).acos();
        let arc = 2.0 * (TAU - 2.0 * beta);
        assert!((t.c1 - 0.5 * eps * arc).abs() < 1e-12);
        assert!((t.c0_var - (arc + 2.0 * (PI - 2.0 * beta)) / TAU).abs() < 1e-12);
    }

    #[test]
    fn ring_of_discs_has_a_hole() {
        let n = 12;
        let r = 1.0;
        let pts: Vec<[f64; 2]> = (0..n)
            .map(|i| {
                let a = TAU * i as f64 / n as f64;
                [r * a.cos(), r * a.sin()]
            })
            .collect();
        let chord = 2.0 * r * (PI / n as f64).sin();
        let ring = DiscUnion::new(&pts, 0.6 * chord).unwrap();
        assert!(ring.totals().c0.abs() < 1e-9);
        let apart = DiscUnion::new(&pts, 0.45 * chord).unwrap();
        assert!((apart.totals().c0 - n as f64).abs() < 1e-9);
        let filled = DiscUnion::new(&pts, 1.2).unwrap();
        assert!((filled.totals().c0 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn far_ball_sees_nothing() {
        let u = DiscUnion::new(&[[0.0, 0.0], [0.5, 0.0]], 0.4).unwrap();
        assert_eq!(u.localized([10.0, 10.0], 1.0), DiscCurvatures::default());
        let all = u.localized([0.0, 0.0], 100.0);
        let t = u.totals();
        assert!((all.c0 - t.c0).abs() < 1e-12 && (all.c1 - t.c1).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn euler_matches_grid(pts in proptest::collection::vec((0.0f64..1.0, 0.0f64..1.0), 1..12), eps in 0.05f64..0.3) {
            use crate::curvature::{euler_characteristic, label_components};
            use crate::grid::{GridSpec, BinaryGrid};
            use crate::ifs::Aabb;
            let sites: Vec<[f64; 2]> = pts.iter().map(|p| [p.0, p.1]).collect();
            let u = DiscUnion::new(&sites, eps).unwrap();
            // skip configurations close to a topological change
            let near = |a: &[f64; 2], b: &[f64; 2]| ((a[0]-b[0]).hypot(a[1]-b[1]) - 2.0 * eps).abs() < 0.02;
            prop_assume!(!sites.iter().enumerate().any(|(i, a)| sites[i + 1..].iter().any(|b| near(a, b))));
            let h = 1.0 / 512.0;
            let grid = GridSpec::covering(&Aabb::unit(2), h, 0.35).unwrap();
            let g = BinaryGrid::from_fn(grid.clone(), |i| {
                let c = grid.center(&grid.coords(i));
                sites.iter().any(|s| (s[0]-c[0]).hypot(s[1]-c[1]) <= eps)
            });
            // single cells trapped in the cusp of a lens are cubical artifacts, not holes
            let counts = label_components(&g);
            let trapped = counts.bounded_background.iter().filter(|b| b.cells <= 2).count() as f64;
            let chi = euler_characteristic(&g) as f64 + trapped;
            let c0 = u.totals().c0;
            prop_assert!((c0 - c0.round()).abs() < 1e-6);
            prop_assert!((c0 - chi).abs() < 0.5 || small_hole(&sites, eps), "c0 {} chi {}", c0, chi);
        }
    }

    /// True if some circumcenter of three sites lies within 0.02 outside all discs.
    fn small_hole(sites: &[[f64; 2]], eps: f64) -> bool {
        let n = sites.len();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let (a, b, c) = (sites[i], sites[j], sites[k]);
                    let d = 2.0 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]));
                    if d.abs() < 1e-12 {
                        continue;
                    }
                    let sq = |p: [f64; 2]| p[0] * p[0] + p[1] * p[1];
                    let ux = (sq(a) * (b[1] - c[1]) + sq(b) * (c[1] - a[1]) + sq(c) * (a[1] - b[1])) / d;
                    let uy = (sq(a) * (c[0] - b[0]) + sq(b) * (a[0] - c[0]) + sq(c) * (b[0] - a[0])) / d;
                    let r = (a[0] - ux).hypot(a[1] - uy);
                    if (r - eps).abs() < 0.02 {
                        return true;
                    }
                }
            }
        }
        false
    }
}
