use super::{within_mass_radius, NetSpec, NetVariant};
use crate::grid::DistanceField;
use crate::ifs::Ifs;
use crate::{Error, Result};

/// The net set `A_F(x, ε)` as a predicate on boundary points of `F(ε)`.
pub struct NetRegion<'a> {
    net: &'a NetSpec,
    ifs: &'a Ifs,
    field: &'a DistanceField,
    x: Vec<f64>,
    eps: f64,
}

pub fn net_region<'a>(
    net: &'a NetSpec,
    ifs: &'a Ifs,
    field: &'a DistanceField,
    x: &[f64],
    eps: f64,
) -> Result<NetRegion<'a>> {
    if !(eps > 0.0 && eps < net.eps0) {
        return Err(Error::InvalidInput(format!("net needs 0 < ε < ε₀ = {}, got {eps}", net.eps0)));
    }
    if x.len() != ifs.dim() || field.grid().dim() != ifs.dim() {
        return Err(Error::InvalidInput("point, grid and scene dimensions differ".into()));
    }
    Ok(NetRegion {
        net,
        ifs,
        field,
        x: x.to_vec(),
        eps,
    })
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
}

impl NetRegion<'_> {
    /// Radius of the ball around `x` that holds the region.
    pub fn radius(&self) -> f64 {
        match self.net.variant {
            NetVariant::Footpoint => self.net.a.min(2.0) * self.eps,
            _ => self.net.a * self.eps,
        }
    }

    pub fn contains(&self, z: &[f64]) -> bool {
        let s = dist(&self.x, z);
        if s > self.radius() {
            return false;
        }
        match self.net.variant {
            NetVariant::Ball => true,
            NetVariant::Mass => within_mass_radius(self.ifs, z, s, self.eps),
            NetVariant::Footpoint => self.feet_near(z),
        }
    }

    /// Every site within `dist(z) + h` of `z` lies in `B(x, ε)`.
    fn feet_near(&self, z: &[f64]) -> bool {
        let g = self.field.grid();
        let Some(cell) = g.cell_of(z) else { return false };
        let reach = self.field.dist(g.linear(&cell)) + g.h;
        let span = (reach / g.h).ceil() as usize + 1;
        let d = g.dim();
        let lo: Vec<usize> = cell.iter().map(|&c| c.saturating_sub(span)).collect();
        let hi: Vec<usize> = (0..d).map(|i| (cell[i] + span).min(g.cells[i] - 1)).collect();
        let mut c = lo.clone();
        let d2 = self.field.d2();
        loop {
            let i = g.linear(&c);
            if d2[i] == 0 {
                let p = g.center(&c);
                if dist(&p, z) <= reach && dist(&p, &self.x) > self.eps {
                    return false;
                }
            }
            let mut axis = 0;
            loop {
                if axis == d {
                    return true;
                }
                if c[axis] < hi[axis] {
                    c[axis] += 1;
                    break;
                }
                c[axis] = lo[axis];
                axis += 1;
            }
        }
    }
}
