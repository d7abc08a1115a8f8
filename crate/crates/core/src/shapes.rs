//! Smooth test bodies with known curvatures, and scene scaling.

use std::f64::consts::PI;

use crate::curvature::{curvature_totals, Method, TotalsOptions};
use crate::grid::{rasterize_points, rasterize_sites, DistanceField, GridSpec};
use crate::ifs::{Aabb, Ifs, Similarity};
use crate::Result;

/// Distance field of the origin in `R^d` on a mirrored grid, for parallel sets up to `radius`.
pub fn point_field(d: usize, h: f64, radius: f64) -> Result<DistanceField> {
    let origin = vec![0.0; d];
    let grid = GridSpec::around_point(&origin, 1.2 * radius, h, 1.1 * radius)?;
    DistanceField::from_sites(&rasterize_points(&[origin], &grid)?, false)
}

/// Distance field of the unit square, for parallel sets up to radius `reach`.
pub fn square_field(h: f64, reach: f64) -> Result<DistanceField> {
    let sq = Ifs::unit_cube(2)?;
    let grid = GridSpec::covering(sq.cube(), h, reach * 1.1 + 2.0 * h)?;
    DistanceField::from_sites(&rasterize_sites(&sq, &grid, 1 << 24)?, false)
}

/// The scene conjugated by `x ↦ λx`: same ratios, translations and cube scaled by `λ`.
pub fn scaled(ifs: &Ifs, lambda: f64) -> Result<Ifs> {
    let maps = ifs
        .maps()
        .iter()
        .map(|m| {
            Similarity::new(
                m.ratio(),
                m.orthogonal().to_vec(),
                m.translation().iter().map(|t| t * lambda).collect(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let c = ifs.cube();
    let cube = Aabb::new(
        c.min.iter().map(|v| v * lambda).collect(),
        c.max.iter().map(|v| v * lambda).collect(),
    )?;
    Ifs::new(maps, cube, ifs.mass())
}

/// Steiner-extracted curvatures of one test body next to their exact values.
#[derive(Clone, Debug)]
pub struct ShapeCheck {
    pub name: &'static str,
    pub computed: Vec<f64>,
    pub expected: Vec<f64>,
}

impl ShapeCheck {
    pub fn max_relative_error(&self) -> f64 {
        self.computed
            .iter()
            .zip(&self.expected)
            .map(|(c, e)| ((c - e) / e).abs())
            .fold(0.0, f64::max)
    }
}

/// Unit disk and unit ball as parallel sets of a point, and the square rounded by `1/4`.
pub fn steiner_checks(h2: f64, h3: f64) -> Result<Vec<ShapeCheck>> {
    let opts = TotalsOptions::default();
    let mut out = Vec::new();
    let disk = curvature_totals(&point_field(2, h2, 1.0)?, 1.0, Method::Steiner, &opts)?;
    out.push(ShapeCheck {
        name: "disk",
        computed: disk.c[..2].to_vec(),
        expected: vec![1.0, PI],
    });
    let q = 0.25;
    let square = curvature_totals(&square_field(h2, q)?, q, Method::Steiner, &opts)?;
    out.push(ShapeCheck {
        name: "rounded-square",
        computed: square.c[..2].to_vec(),
        expected: vec![1.0, 2.0 + PI * q],
    });
    let ball = curvature_totals(&point_field(3, h3, 1.0)?, 1.0, Method::Steiner, &opts)?;
    out.push(ShapeCheck {
        name: "ball",
        computed: ball.c[..3].to_vec(),
        expected: vec![1.0, 4.0, 2.0 * PI],
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coarse_shapes() {
        for c in steiner_checks(1.0 / 128.0, 1.0 / 48.0).unwrap() {
            assert!(c.max_relative_error() < 0.06, "{c:?}");
        }
    }

    #[test]
    fn scaling_keeps_dimension() {
        let ifs = Ifs::cantor_dust(1.0 / 3.0).unwrap();
        let big = scaled(&ifs, 3.0).unwrap();
        assert!((big.dimension() - ifs.dimension()).abs() < 1e-12);
        assert_eq!(big.cube().max, vec![3.0, 3.0]);
        assert!((big.first_level_gap() - 3.0 * ifs.first_level_gap()).abs() < 1e-12);
    }
}
