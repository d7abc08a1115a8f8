use rayon::prelude::*;

use super::{squared_edt, BinaryGrid, GridSpec, SiteSet};
use crate::{Error, Result};

/// Distances from cell centers to a site set, stored squared in units of `h²`.
#[derive(Clone, Debug)]
pub struct DistanceField {
    grid: GridSpec,
    d2: Vec<u32>,
    feet: Option<Vec<u32>>,
    site_error: f64,
}

impl DistanceField {
    pub fn from_sites(sites: &SiteSet, with_feet: bool) -> Result<Self> {
        let out = squared_edt(&sites.mask, false, with_feet)?;
        Ok(Self {
            grid: sites.mask.grid().clone(),
            d2: out.d2,
            feet: out.feet,
            site_error: sites.site_error,
        })
    }

    pub fn from_parts(grid: GridSpec, d2: Vec<u32>, feet: Option<Vec<u32>>, site_error: f64) -> Result<Self> {
        if d2.len() != grid.len() || feet.as_ref().is_some_and(|f| f.len() != grid.len()) {
            return Err(Error::InvalidInput("distance field size does not match grid".into()));
        }
        Ok(Self {
            grid,
            d2,
            feet,
            site_error,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn site_error(&self) -> f64 {
        self.site_error
    }

    pub fn d2(&self) -> &[u32] {
        &self.d2
    }

    pub fn feet(&self) -> Option<&[u32]> {
        self.feet.as_deref()
    }

    pub fn dist(&self, i: usize) -> f64 {
        (self.d2[i] as f64).sqrt() * self.grid.h
    }

    /// Largest stored squared distance still inside the closed ball of radius `r`.
    pub fn threshold(&self, r: f64) -> u32 {
        let t = (r / self.grid.h).powi(2) * (1.0 + 1e-12);
        t.floor().min(u32::MAX as f64 - 1.0) as u32
    }

    fn check_margin(&self, r: f64) -> Result<()> {
        if r < 0.0 {
            return Err(Error::InvalidInput(format!("negative radius {r}")));
        }
        if r + self.site_error > self.grid.margin + 1e-12 {
            return Err(Error::OutsideMargin {
                radius: r,
                margin: self.grid.margin,
            });
        }
        Ok(())
    }

    /// Cells whose centers lie within distance `r` of the sites.
    pub fn parallel_set(&self, r: f64) -> Result<BinaryGrid> {
        self.check_margin(r)?;
        let t = self.threshold(r);
        Ok(BinaryGrid::from_fn(self.grid.clone(), |i| self.d2[i] <= t))
    }

    pub fn volume(&self, r: f64) -> Result<f64> {
        Ok(VolumeProfile::new(self, r)?.volume(r))
    }

    pub fn volume_profile(&self, eps: &[f64]) -> Result<Vec<(f64, f64)>> {
        let Some(&top) = eps.iter().max_by(|a, b| a.total_cmp(b)) else {
            return Ok(Vec::new());
        };
        let prof = VolumeProfile::new(self, top)?;
        Ok(eps.iter().map(|&e| (e, prof.volume(e))).collect())
    }

    /// Central difference `(V(r+s) − V(r−s))/(2s)`: the boundary measure of `F(r)`.
    pub fn boundary_area(&self, r: f64, halfstep: f64) -> Result<f64> {
        if !(halfstep > 0.0 && halfstep <= self.grid.h * (1.0 + 1e-12)) || r - halfstep < 0.0 {
            return Err(Error::InvalidInput(format!(
                "half step {halfstep} must lie in (0, h] and below r = {r}"
            )));
        }
        let prof = VolumeProfile::new(self, r + halfstep)?;
        Ok((prof.volume(r + halfstep) - prof.volume(r - halfstep)) / (2.0 * halfstep))
    }
}

/// Cumulative weighted histogram of squared distances: `V(r)` for every `r` up to a cap.
pub struct VolumeProfile {
    h: f64,
    d: usize,
    cumulative: Vec<u64>,
}

impl VolumeProfile {
    pub fn new(field: &DistanceField, r_max: f64) -> Result<Self> {
        field.check_margin(r_max)?;
        let cap = field.threshold(r_max) as usize;
        let grid = &field.grid;
        let chunk = grid.cells[0];
        let hist = field
            .d2
            .par_chunks(chunk)
            .enumerate()
            .fold(
                || vec![0u64; cap + 1],
                |mut acc, (row, vals)| {
                    let base = row * chunk;
                    let c = grid.coords(base);
                    let row_weight: u64 = (1..grid.dim()).map(|a| grid.axis_weight(a, c[a])).product();
                    for (i, &v) in vals.iter().enumerate() {
                        if (v as usize) <= cap {
                            acc[v as usize] += row_weight * grid.axis_weight(0, i);
                        }
                    }
                    acc
                },
            )
            .reduce(
                || vec![0u64; cap + 1],
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    a
                },
            );
        let mut cumulative = hist;
        for i in 1..cumulative.len() {
            cumulative[i] += cumulative[i - 1];
        }
        Ok(Self {
            h: grid.h,
            d: grid.dim(),
            cumulative,
        })
    }

    /// Volume of the voxelized `F(r)`; radii above the cap return the capped volume.
    pub fn volume(&self, r: f64) -> f64 {
        if r < 0.0 {
            return 0.0;
        }
        let t = ((r / self.h).powi(2) * (1.0 + 1e-12)).floor();
        let i = (t as usize).min(self.cumulative.len() - 1);
        self.cumulative[i] as f64 * self.h.powi(self.d as i32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{rasterize_points, rasterize_sites};
    use crate::ifs::Ifs;
    use std::f64::consts::PI;

    fn disk_field(h: f64, radius_scale: f64) -> DistanceField {
        let grid = GridSpec::around_point(&[0.0, 0.0], 1.2 * radius_scale, h, 1.1 * radius_scale).unwrap();
        DistanceField::from_sites(&rasterize_points(&[vec![0.0, 0.0]], &grid).unwrap(), false).unwrap()
    }

    #[test]
    fn disk_area_and_perimeter() {
        let f = disk_field(1.0 / 512.0, 1.0);
        let v = f.volume(1.0).unwrap();
        assert!((v - PI).abs() < 0.02 * PI, "{v}");
        let p = f.boundary_area(1.0, 1.0 / 512.0).unwrap();
        assert!((p - 2.0 * PI).abs() < 0.03 * 2.0 * PI, "{p}");
    }

    #[test]
    fn ball_surface() {
        let h = 1.0 / 128.0;
        let grid = GridSpec::around_point(&[0.0; 3], 1.2, h, 1.1).unwrap();
        let f = DistanceField::from_sites(&rasterize_points(&[vec![0.0; 3]], &grid).unwrap(), false).unwrap();
        let a = f.boundary_area(1.0, h).unwrap();
        assert!((a - 4.0 * PI).abs() < 0.05 * 4.0 * PI, "{a}");
        let v = f.volume(1.0).unwrap();
        assert!((v - 4.0 * PI / 3.0).abs() < 0.02 * 4.0, "{v}");
    }

    #[test]
    fn perimeter_scales_linearly() {
        let h = 1.0 / 128.0;
        let a = disk_field(h, 1.0).boundary_area(0.5, h).unwrap();
        let b = disk_field(h, 2.0).boundary_area(1.0, h).unwrap();
        assert!((b / a - 2.0).abs() < 0.03, "{a} {b}");
    }

    #[test]
    fn cantor_parallel_sets() {
        let ifs = Ifs::cantor_dust(1.0 / 3.0).unwrap();
        let grid = GridSpec::covering(ifs.cube(), 1.0 / 243.0, 0.75).unwrap();
        let sites = rasterize_sites(&ifs, &grid, 1 << 20).unwrap();
        let f = DistanceField::from_sites(&sites, false).unwrap();
        let a = f.parallel_set(0.2).unwrap();
        let b = f.parallel_set(0.21).unwrap();
        assert!(a.is_subset_of(&b));
        let big = f.parallel_set(2f64.sqrt() / 2.0).unwrap();
        let inner = GridSpec::covering(ifs.cube(), 1.0 / 243.0, 0.0).unwrap();
        for i in 0..inner.len() {
            let c = inner.coords(i);
            let shifted: Vec<usize> = c.iter().map(|v| v + (grid.cells[0] - 243) / 2).collect();
            assert!(big.get(grid.linear(&shifted)));
        }
        let vols = f.volume_profile(&[0.17, 0.20, 0.24]).unwrap();
        assert!(vols[0].1 < vols[1].1 && vols[1].1 < vols[2].1);
        assert_eq!(vols[1].1, f.volume(0.2).unwrap());
        assert_eq!(f.parallel_set(0.0).unwrap().count_ones(), sites.count());
        assert!(matches!(f.parallel_set(0.8), Err(Error::OutsideMargin { .. })));
    }

    #[test]
    fn mirrored_volume_matches_full() {
        let ifs = Ifs::cantor_dust(1.0 / 3.0).unwrap();
        let full = GridSpec::covering(ifs.cube(), 1.0 / 81.0, 0.3).unwrap();
        let oct = GridSpec::octant(ifs.cube(), 1.0 / 81.0, 0.3).unwrap();
        let ff = DistanceField::from_sites(&rasterize_sites(&ifs, &full, 1 << 20).unwrap(), false).unwrap();
        let fo = DistanceField::from_sites(&rasterize_sites(&ifs, &oct, 1 << 20).unwrap(), false).unwrap();
        for r in [0.05, 0.1, 0.17, 0.25] {
            assert_eq!(ff.volume(r).unwrap(), fo.volume(r).unwrap());
            assert_eq!(ff.parallel_set(r).unwrap().volume(), fo.parallel_set(r).unwrap().volume());
        }
    }
}
