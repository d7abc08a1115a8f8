use super::{BinaryGrid, GridSpec};
use crate::ifs::{Affine, Ifs};
use crate::{Error, Result};

/// Default cap on leaves visited while rasterizing.
pub const DEFAULT_SITE_BUDGET: usize = 60_000_000;

/// Marked cells whose centers approximate `F` within `site_error` in Hausdorff distance.
#[derive(Clone, Debug)]
pub struct SiteSet {
    pub mask: BinaryGrid,
    pub site_error: f64,
    /// Word depth `n_F` used for cylinders that never fit inside one cell.
    pub depth: usize,
}

impl SiteSet {
    pub fn count(&self) -> usize {
        self.mask.count_ones()
    }

    /// Centers of the marked cells, in linear-index order.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let g = self.mask.grid();
        self.mask.iter_ones().map(|i| g.center(&g.coords(i))).collect()
    }
}

/// Smallest `n` with `r_max^n·|J| ≤ h/2`.
pub fn site_depth(ifs: &Ifs, h: f64) -> usize {
    let target = 0.5 * h / ifs.cube().diameter();
    if target >= 1.0 {
        return 0;
    }
    let mut n = (target.ln() / ifs.max_ratio().ln()).floor().max(0.0) as usize;
    while ifs.max_ratio().powi(n as i32) * ifs.cube().diameter() > 0.5 * h {
        n += 1;
    }
    n
}

/// Marks one cell per cylinder: the cell holding `J_w` once `J_w` fits in a closed cell,
/// otherwise the cell holding `S_w(center of J)` at depth `n_F`.
pub fn rasterize_sites(ifs: &Ifs, grid: &GridSpec, budget: usize) -> Result<SiteSet> {
    let d = ifs.dim();
    if grid.dim() != d {
        return Err(Error::InvalidInput("grid and scene dimensions differ".into()));
    }
    let extent = grid.extent();
    let cube = ifs.cube();
    if (0..d).any(|i| cube.min[i] < extent.min[i] || cube.max[i] > extent.max[i]) {
        return Err(Error::InvalidInput("grid does not cover the invariant cube".into()));
    }
    let planes: Vec<Option<f64>> = (0..d)
        .map(|i| grid.mirror[i].then(|| grid.center(&vec![grid.cells[i] - 1; d])[i]))
        .collect();
    if grid.is_mirrored() {
        check_mirror_symmetry(ifs, &planes)?;
    }
    let h = grid.h;
    let depth = site_depth(ifs, h);
    let tol = 1e-9 * h;
    let center = cube.center();
    let mut mask = BinaryGrid::empty(grid.clone());
    let mut straddled = false;
    let mut leaves = 0usize;
    let mut stack: Vec<(Affine, usize)> = vec![(Affine::identity(d), 0)];
    let mut c = vec![0.0; d];
    let mut cell = vec![0usize; d];
    while let Some((map, level)) = stack.pop() {
        let bx = cube.image_bounds(&map);
        if planes
            .iter()
            .enumerate()
            .any(|(i, p)| p.is_some_and(|p| bx.min[i] > p + tol))
        {
            continue;
        }
        map.apply_into(&center, &mut c);
        let fits = (0..d).all(|i| {
            let k = ((0.5 * (bx.min[i] + bx.max[i]) - grid.origin[i]) / h).floor();
            let lo = grid.origin[i] + k * h;
            bx.min[i] >= lo - tol && bx.max[i] <= lo + h + tol
        });
        if fits || level >= depth {
            leaves += 1;
            if leaves > budget {
                return Err(Error::SiteBudget {
                    count: leaves,
                    budget,
                });
            }
            if !fits {
                straddled = true;
            }
            let probe: Vec<f64> = if fits {
                (0..d).map(|i| 0.5 * (bx.min[i] + bx.max[i])).collect()
            } else {
                c.clone()
            };
            if locate(grid, &probe, &mut cell) {
                mask.set(grid.linear(&cell), true);
            }
            continue;
        }
        for a in ifs.affines() {
            stack.push((map.then_inner(a), level + 1));
        }
    }
    let mut site_error = 0.5 * h * (d as f64).sqrt();
    if straddled {
        site_error += 0.5 * ifs.max_ratio().powi(depth as i32) * cube.diameter();
    }
    if mask.count_ones() == 0 {
        return Err(Error::EmptySites);
    }
    Ok(SiteSet {
        mask,
        site_error,
        depth,
    })
}

/// Sites at the cells containing explicit points.
pub fn rasterize_points(points: &[Vec<f64>], grid: &GridSpec) -> Result<SiteSet> {
    let d = grid.dim();
    let mut mask = BinaryGrid::empty(grid.clone());
    let mut cell = vec![0usize; d];
    let mut site_error: f64 = 0.0;
    for p in points {
        if p.len() != d {
            return Err(Error::InvalidInput("point of wrong dimension".into()));
        }
        if locate(grid, p, &mut cell) {
            mask.set(grid.linear(&cell), true);
            let c = grid.center(&cell);
            let e = c.iter().zip(p).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            site_error = site_error.max(e);
        }
    }
    if mask.count_ones() == 0 {
        return Err(Error::EmptySites);
    }
    Ok(SiteSet {
        mask,
        site_error,
        depth: 0,
    })
}

/// Cell of `p` in stored coordinates; false when it falls outside or beyond a mirror plane.
fn locate(grid: &GridSpec, p: &[f64], cell: &mut [usize]) -> bool {
    for i in 0..grid.dim() {
        let k = ((p[i] - grid.origin[i]) / grid.h).floor();
        if k < 0.0 || k >= grid.cells[i] as f64 {
            return false;
        }
        cell[i] = k as usize;
    }
    true
}

/// A mirrored grid is only valid when `F` is symmetric about every plane; this holds when all
/// maps are homotheties, `J` is symmetric, and the first-level boxes are permuted by each reflection.
fn check_mirror_symmetry(ifs: &Ifs, planes: &[Option<f64>]) -> Result<()> {
    let d = ifs.dim();
    let cube = ifs.cube();
    let tol = 1e-9 * cube.diameter();
    let homothety = ifs.maps().iter().all(|m| {
        let o = m.orthogonal();
        (0..d).all(|i| (0..d).all(|j| (o[i * d + j] - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12))
    });
    let boxes: Vec<_> = ifs.affines().iter().map(|a| cube.image_bounds(a)).collect();
    for (axis, plane) in planes.iter().enumerate() {
        let Some(p) = *plane else { continue };
        let symmetric_cube = (cube.min[axis] + cube.max[axis] - 2.0 * p).abs() < tol;
        let permuted = boxes.iter().all(|b| {
            boxes.iter().any(|o| {
                (0..d).all(|i| {
                    if i == axis {
                        (o.min[i] - (2.0 * p - b.max[i])).abs() < tol
                            && (o.max[i] - (2.0 * p - b.min[i])).abs() < tol
                    } else {
                        (o.min[i] - b.min[i]).abs() < tol && (o.max[i] - b.max[i]).abs() < tol
                    }
                })
            })
        });
        if !(homothety && symmetric_cube && permuted) {
            return Err(Error::InvalidInput(format!(
                "scene is not symmetric about the mirror plane of axis {axis}"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::{distance_to_f, Aabb, Similarity};
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    #[test]
    fn cantor_depth_and_count() {
        let ifs = Ifs::cantor_dust(1.0 / 3.0).unwrap();
        assert_eq!(site_depth(&ifs, 1.0 / 729.0), 7);
        // cells of side 3^-7 coincide with level-7 cylinders
        let grid = GridSpec::covering(ifs.cube(), 1.0 / 2187.0, 0.05).unwrap();
        let s = rasterize_sites(&ifs, &grid, 1 << 20).unwrap();
        assert_eq!(s.count(), 4usize.pow(7));
        assert!((s.site_error - 0.5 * 2f64.sqrt() / 2187.0).abs() < 1e-15);
    }

    #[test]
    fn sites_are_near_f() {
        let ifs = Ifs::cantor_dust(0.3).unwrap();
        let grid = GridSpec::covering(ifs.cube(), 1.0 / 729.0, 0.05).unwrap();
        let s = rasterize_sites(&ifs, &grid, 1 << 22).unwrap();
        let mut pts = s.points();
        pts.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(4));
        for p in pts.iter().take(100) {
            let iv = distance_to_f(&ifs, p, 1e-9);
            assert!(iv.lo <= s.site_error, "{iv} > {}", s.site_error);
        }
    }

    #[test]
    fn budget_error() {
        let ifs = Ifs::menger().unwrap();
        let grid = GridSpec::covering(ifs.cube(), 1.0 / 243.0, 0.01).unwrap();
        assert!(matches!(rasterize_sites(&ifs, &grid, 1000), Err(Error::SiteBudget { .. })));
    }

    #[test]
    fn octant_matches_full() {
        let ifs = Ifs::menger().unwrap();
        let full = GridSpec::covering(ifs.cube(), 1.0 / 27.0, 0.1).unwrap();
        let oct = GridSpec::octant(ifs.cube(), 1.0 / 27.0, 0.1).unwrap();
        let sf = rasterize_sites(&ifs, &full, 1 << 22).unwrap();
        let so = rasterize_sites(&ifs, &oct, 1 << 22).unwrap();
        assert_eq!(so.mask.weighted_count(), sf.count() as u64);
        for i in so.mask.iter_ones() {
            assert!(sf.mask.get(full.linear(&oct.coords(i))));
        }
    }

    #[test]
    fn asymmetric_scene_rejected_on_mirror() {
        let maps = vec![
            Similarity::scaling(0.5, vec![0.0, 0.0]).unwrap(),
            Similarity::scaling(0.25, vec![0.75, 0.75]).unwrap(),
        ];
        let ifs = Ifs::new(maps, Aabb::unit(2), 1.0).unwrap();
        let oct = GridSpec::octant(ifs.cube(), 1.0 / 27.0, 0.1).unwrap();
        assert!(rasterize_sites(&ifs, &oct, 1 << 20).is_err());
    }

    #[test]
    fn point_sites() {
        let grid = GridSpec::around_point(&[0.0, 0.0], 1.5, 1.0 / 64.0, 0.5).unwrap();
        let s = rasterize_points(&[vec![0.0, 0.0]], &grid).unwrap();
        assert_eq!(s.count(), 1);
        assert!(s.site_error < 1e-12);
    }
}
