use std::collections::HashMap;

use rayon::prelude::*;

use crate::grid::{squared_edt, BinaryGrid, DistanceField};
use crate::Result;

/// Center offset subtracted from distances to background centers when nothing better is known.
const HALF_CELL: f64 = 0.5;
/// Offset used when the site distance supplies a lower bound for the depth.
const FIELD_OFFSET: f64 = 1.0;

/// Depth of every foreground cell below the boundary of the foreground.
pub struct InnerCollar {
    grid: BinaryGrid,
    depth: Vec<f32>,
    feet: Option<Vec<u32>>,
}

impl InnerCollar {
    /// Depths from an exact distance transform of the background alone: distance to the
    /// nearest background center less half a cell.
    ///
    /// `with_feet` records the nearest background cell of each foreground cell, needed for
    /// localized volumes; it is unavailable on mirrored grids.
    pub fn new(grid: &BinaryGrid, with_feet: bool) -> Result<Self> {
        Self::build(grid, with_feet, HALF_CELL, |_| 0.0)
    }

    /// Depths inside `F(ε) = {dist ≤ ε}`. The depth below the sphere of the nearest site,
    /// `ε − dist`, is exact wherever the nearest boundary point lies on that sphere and a lower
    /// bound elsewhere; the background transform covers the remaining cells.
    pub fn parallel_set(field: &DistanceField, eps: f64, with_feet: bool) -> Result<Self> {
        let body = field.parallel_set(eps)?;
        Self::build(&body, with_feet, FIELD_OFFSET, |i| (eps - field.dist(i)).max(0.0))
    }

    fn build(grid: &BinaryGrid, with_feet: bool, offset: f64, lower: impl Fn(usize) -> f64 + Sync) -> Result<Self> {
        let out = squared_edt(grid, true, with_feet)?;
        let h = grid.grid().h;
        let bits = grid.bits();
        let depth = out
            .d2
            .par_iter()
            .enumerate()
            .map(|(i, &d2)| {
                if !bits[i] {
                    return f32::INFINITY;
                }
                let from_bg = ((d2 as f64).sqrt() - offset).max(0.0) * h;
                from_bg.max(lower(i)) as f32
            })
            .collect();
        Ok(Self {
            grid: grid.clone(),
            depth,
            feet: out.feet,
        })
    }

    pub fn grid(&self) -> &BinaryGrid {
        &self.grid
    }

    /// Nearest background cell of foreground cell `i`.
    pub fn foot(&self, i: usize) -> Option<usize> {
        self.feet.as_ref().map(|f| f[i] as usize)
    }

    pub fn depth(&self, i: usize) -> f64 {
        self.depth[i] as f64
    }

    /// Volumes of `{foreground cells of depth ≤ t}` for each `t`.
    pub fn volumes(&self, t_list: &[f64]) -> Vec<(f64, f64)> {
        self.volumes_where(t_list, |_| true)
    }

    /// As [`InnerCollar::volumes`], keeping only cells whose nearest background cell passes
    /// `region`. Without feet every cell is kept.
    pub fn volumes_where(&self, t_list: &[f64], region: impl Fn(usize) -> bool + Sync) -> Vec<(f64, f64)> {
        let spec = self.grid.grid();
        let mut order: Vec<usize> = (0..t_list.len()).collect();
        order.sort_by(|&a, &b| t_list[a].total_cmp(&t_list[b]));
        let sorted: Vec<f32> = order.iter().map(|&k| t_list[k] as f32).collect();
        let n = sorted.len();
        // counts[j]: doubled weighted cells whose depth lies in (sorted[j−1], sorted[j]]
        let tie = 1e-4 * spec.h as f32;
        let counts = self
            .depth
            .par_iter()
            .enumerate()
            .fold(
                || vec![0u64; n + 1],
                |mut acc, (i, &dep)| {
                    if dep.is_finite() && n > 0 && dep <= sorted[n - 1] + tie {
                        let keep = match &self.feet {
                            Some(f) => region(f[i] as usize),
                            None => true,
                        };
                        if keep {
                            let w = if spec.is_mirrored() { spec.weight(&spec.coords(i)) } else { 1 };
                            add_cell(&mut acc, dep, &sorted, tie, w);
                        }
                    }
                    acc
                },
            )
            .reduce(
                || vec![0u64; n + 1],
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    a
                },
            );
        let cell = spec.cell_volume();
        let mut out = vec![(0.0, 0.0); n];
        let mut run = 0u64;
        for (j, &k) in order.iter().enumerate() {
            run += counts[j];
            let t = t_list[k];
            out[k] = (t, if t <= 0.0 { 0.0 } else { run as f64 * 0.5 * cell });
        }
        out
    }
}

impl InnerCollar {
    /// Collar volumes at each `t` split by the nearest background cell, for every foot with
    /// a nonzero share. Needs feet.
    pub fn foot_volumes(&self, t_list: &[f64]) -> Option<Vec<(usize, Vec<f64>)>> {
        let feet = self.feet.as_ref()?;
        let spec = self.grid.grid();
        let mut order: Vec<usize> = (0..t_list.len()).collect();
        order.sort_by(|&a, &b| t_list[a].total_cmp(&t_list[b]));
        let sorted: Vec<f32> = order.iter().map(|&k| t_list[k] as f32).collect();
        let n = sorted.len();
        let tie = 1e-4 * spec.h as f32;
        let mut per_foot: HashMap<u32, Vec<u64>> = HashMap::new();
        for (i, &dep) in self.depth.iter().enumerate() {
            if dep.is_finite() && n > 0 && dep <= sorted[n - 1] + tie {
                let acc = per_foot.entry(feet[i]).or_insert_with(|| vec![0; n + 1]);
                add_cell(acc, dep, &sorted, tie, 1);
            }
        }
        let cell = spec.cell_volume();
        let mut out: Vec<(usize, Vec<f64>)> = per_foot
            .into_iter()
            .map(|(foot, counts)| {
                let mut v = vec![0.0; n];
                let mut run = 0u64;
                for (j, &k) in order.iter().enumerate() {
                    run += counts[j];
                    v[k] = if t_list[k] <= 0.0 { 0.0 } else { run as f64 * 0.5 * cell };
                }
                (foot as usize, v)
            })
            .collect();
        out.sort_by_key(|e| e.0);
        Some(out)
    }
}

/// Adds a cell of depth `dep` to doubled counts over the bins `(sorted[j−1], sorted[j]]`.
/// A cell whose depth ties a sample within `tie` counts half on each side, and a cell of
/// depth zero counts half.
fn add_cell(acc: &mut [u64], dep: f32, sorted: &[f32], tie: f32, w: u64) {
    let n = sorted.len();
    let j = sorted.partition_point(|&t| t < dep - tie);
    if dep <= tie {
        // on the boundary itself: half inside the body
        acc[j] += w;
    } else if j < n && (sorted[j] - dep).abs() <= tie {
        acc[j] += w;
        acc[j + 1] += w;
    } else {
        acc[j] += 2 * w;
    }
}
