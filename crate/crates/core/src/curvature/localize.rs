use super::{sample_depths, steiner_extract, InnerCollar, SteinerFit};
use crate::grid::DistanceField;
use crate::{Error, Result};

/// Curvatures `C_0..C_{d−1}` of `F(ε)` localized to the boundary points accepted by
/// `region`, via the nearest boundary cell of every collar cell. Needs an unmirrored grid.
pub fn localized_curvature(
    field: &DistanceField,
    eps: f64,
    region: impl Fn(&[f64]) -> bool,
    window: f64,
) -> Result<SteinerFit> {
    let grid = field.grid();
    if grid.is_mirrored() {
        return Err(Error::InvalidInput("localized curvatures need an unmirrored grid".into()));
    }
    let collar = InnerCollar::parallel_set(field, eps, true)?;
    let t_max = window * eps;
    let depths = sample_depths(grid.dim(), t_max);
    let feet = collar.foot_volumes(&depths).expect("collar built with feet");
    let samples = sum_feet(&depths, &feet, |foot| region(&grid.center(&grid.coords(foot))));
    steiner_extract(&samples, grid.dim(), t_max)
}

/// Collar volumes `(t, V(t))` of the feet accepted by `region`; each foot is tested once.
pub fn sum_feet(depths: &[f64], feet: &[(usize, Vec<f64>)], region: impl Fn(usize) -> bool) -> Vec<(f64, f64)> {
    let mut v = vec![0.0; depths.len()];
    for (foot, vols) in feet {
        if region(*foot) {
            v.iter_mut().zip(vols).for_each(|(a, b)| *a += b);
        }
    }
    depths.iter().cloned().zip(v).collect()
}
