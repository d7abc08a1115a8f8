use serde::{Deserialize, Serialize};

use crate::ifs::Aabb;
use crate::{Error, Result};

/// Largest grid the engine will allocate.
pub const MAX_CELLS: usize = 700_000_000;

/// Regular grid of cubes of side `h`; cell `i` on an axis has center `origin + (i + 1/2)·h`.
///
/// An axis flagged `mirror` stands for a grid reflected about the center of its last cell,
/// so a scene symmetric about that plane is stored once per octant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub origin: Vec<f64>,
    pub h: f64,
    pub cells: Vec<usize>,
    pub margin: f64,
    pub mirror: Vec<bool>,
}

impl GridSpec {
    pub fn new(
        origin: Vec<f64>,
        h: f64,
        cells: Vec<usize>,
        margin: f64,
        mirror: Vec<bool>,
    ) -> Result<Self> {
        let d = origin.len();
        if !(2..=3).contains(&d) && d != 1 {
            return Err(Error::InvalidInput(format!("grids exist in dimension 1..=3, not {d}")));
        }
        if cells.len() != d || mirror.len() != d {
            return Err(Error::InvalidInput("grid spec fields of mismatched dimension".into()));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidInput(format!("grid spacing {h} must be positive")));
        }
        if cells.iter().any(|&n| n == 0) {
            return Err(Error::InvalidInput("grid with an empty axis".into()));
        }
        let total = cells.iter().try_fold(1usize, |a, &n| a.checked_mul(n));
        match total {
            Some(t) if t <= MAX_CELLS => {}
            _ => {
                return Err(Error::InvalidInput(format!(
                    "grid of {cells:?} cells exceeds the {MAX_CELLS}-cell budget; use a coarser h or a mirrored grid"
                )))
            }
        }
        Ok(Self {
            origin,
            h,
            cells,
            margin,
            mirror,
        })
    }

    /// Grid covering `cube` plus `margin` on every side, with cell faces on the cube faces.
    pub fn covering(cube: &Aabb, h: f64, margin: f64) -> Result<Self> {
        let pad = cells_for(margin, h);
        let mut origin = Vec::new();
        let mut cells = Vec::new();
        for i in 0..cube.dim() {
            origin.push(cube.min[i] - pad as f64 * h);
            cells.push(cells_for(cube.max[i] - cube.min[i], h) + 2 * pad);
        }
        Self::new(origin, h, cells, margin, vec![false; cube.dim()])
    }

    /// Lower octant of [`GridSpec::covering`], mirrored about the cube center on all axes.
    ///
    /// The cube center must fall on a cell center.
    pub fn octant(cube: &Aabb, h: f64, margin: f64) -> Result<Self> {
        let pad = cells_for(margin, h);
        let mut origin = Vec::new();
        let mut cells = Vec::new();
        for i in 0..cube.dim() {
            let o = cube.min[i] - pad as f64 * h;
            let c = 0.5 * (cube.min[i] + cube.max[i]);
            let n = (c - o) / h + 0.5;
            if (n - n.round()).abs() > 1e-6 {
                return Err(Error::InvalidInput(format!(
                    "cube center is not a cell center at h = {h}; cannot mirror"
                )));
            }
            origin.push(o);
            cells.push(n.round() as usize);
        }
        Self::new(origin, h, cells, margin, vec![true; cube.dim()])
    }

    /// Mirrored grid whose plane cell is centered at `center`, reaching `reach` beyond it.
    pub fn around_point(center: &[f64], reach: f64, h: f64, margin: f64) -> Result<Self> {
        let n = cells_for(reach, h) + 1;
        let origin = center.iter().map(|c| c - (n as f64 - 0.5) * h).collect();
        Self::new(origin, h, vec![n; center.len()], margin, vec![true; center.len()])
    }

    pub fn dim(&self) -> usize {
        self.origin.len()
    }

    pub fn len(&self) -> usize {
        self.cells.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_mirrored(&self) -> bool {
        self.mirror.iter().any(|&m| m)
    }

    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.dim()];
        for i in 1..self.dim() {
            s[i] = s[i - 1] * self.cells[i - 1];
        }
        s
    }

    pub fn coords(&self, mut idx: usize) -> Vec<usize> {
        self.cells
            .iter()
            .map(|&n| {
                let c = idx % n;
                idx /= n;
                c
            })
            .collect()
    }

    pub fn linear(&self, coords: &[usize]) -> usize {
        coords
            .iter()
            .zip(&self.cells)
            .rev()
            .fold(0, |acc, (&c, &n)| acc * n + c)
    }

    pub fn center(&self, coords: &[usize]) -> Vec<f64> {
        coords
            .iter()
            .zip(&self.origin)
            .map(|(&c, o)| o + (c as f64 + 0.5) * self.h)
            .collect()
    }

    /// Cell containing `x`, if inside the grid (half-open cells).
    pub fn cell_of(&self, x: &[f64]) -> Option<Vec<usize>> {
        let mut out = Vec::with_capacity(self.dim());
        for i in 0..self.dim() {
            let t = ((x[i] - self.origin[i]) / self.h).floor();
            if t < 0.0 || t >= self.cells[i] as f64 {
                return None;
            }
            out.push(t as usize);
        }
        Some(out)
    }

    /// Multiplicity of a cell in the unfolded grid: 2 per mirrored axis, except on the plane.
    pub fn weight(&self, coords: &[usize]) -> u64 {
        coords
            .iter()
            .enumerate()
            .map(|(i, &c)| if self.mirror[i] && c + 1 < self.cells[i] { 2 } else { 1 })
            .product()
    }

    /// Multiplicity factor of coordinate `c` along one axis.
    #[inline]
    pub fn axis_weight(&self, axis: usize, c: usize) -> u64 {
        if self.mirror[axis] && c + 1 < self.cells[axis] {
            2
        } else {
            1
        }
    }

    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.dim() as i32)
    }

    /// Closed box covered by the unfolded grid.
    pub fn extent(&self) -> Aabb {
        let mut min = Vec::new();
        let mut max = Vec::new();
        for i in 0..self.dim() {
            min.push(self.origin[i]);
            let n = self.cells[i] as f64;
            max.push(if self.mirror[i] {
                self.origin[i] + (2.0 * n - 1.0) * self.h
            } else {
                self.origin[i] + n * self.h
            });
        }
        Aabb { min, max }
    }

    pub fn fingerprint(&self) -> String {
        format!(
            "origin={:?};h={:e};cells={:?};margin={:e};mirror={:?}",
            self.origin, self.h, self.cells, self.margin, self.mirror
        )
    }
}

fn cells_for(length: f64, h: f64) -> usize {
    (length / h - 1e-9).ceil().max(0.0) as usize
}
