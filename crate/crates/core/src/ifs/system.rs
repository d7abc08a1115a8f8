use super::{solve_dimension, Aabb, Affine, Similarity};
use crate::{Error, Result};

/// Iterated function system of contracting similarities with invariant cube `J`.
#[derive(Clone, Debug)]
pub struct Ifs {
    maps: Vec<Similarity>,
    affines: Vec<Affine>,
    cube: Aabb,
    dimension: f64,
    mass: f64,
    weights: Vec<f64>,
    anchor: Vec<f64>,
    overlap_warning: bool,
}

impl Ifs {
    pub fn new(maps: Vec<Similarity>, cube: Aabb, mass: f64) -> Result<Self> {
        let d = cube.dim();
        if maps.len() < 2 {
            return Err(Error::Degenerate(format!(
                "{} map(s): the attractor is a point",
                maps.len()
            )));
        }
        if let Some(m) = maps.iter().find(|m| m.dim() != d) {
            return Err(Error::InvalidInput(format!(
                "map of dimension {} in a {d}-dimensional scene",
                m.dim()
            )));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidInput(format!("mass parameter {mass} must be positive")));
        }
        let affines: Vec<Affine> = maps.iter().map(Similarity::to_affine).collect();
        let slack = 1e-12 * cube.diameter();
        for (j, a) in affines.iter().enumerate() {
            let img = cube.image_bounds(a);
            for i in 0..d {
                if img.min[i] < cube.min[i] - slack || img.max[i] > cube.max[i] + slack {
                    return Err(Error::InvalidInput(format!(
                        "map {} does not send the cube into itself",
                        j + 1
                    )));
                }
            }
        }
        let ratios: Vec<f64> = maps.iter().map(Similarity::ratio).collect();
        let dimension = solve_dimension(&ratios)?.value;
        if dimension > d as f64 + 1e-9 {
            return Err(Error::InvalidInput(format!(
                "similarity dimension {dimension} exceeds ambient dimension {d}; open set condition fails"
            )));
        }
        let weights = ratios.iter().map(|r| r.powf(dimension)).collect();
        let boxes: Vec<Aabb> = affines.iter().map(|a| cube.image_bounds(a)).collect();
        let mut overlap_warning = false;
        for i in 0..boxes.len() {
            for j in i + 1..boxes.len() {
                if boxes[i].interiors_overlap(&boxes[j], slack) {
                    overlap_warning = true;
                }
            }
        }
        let anchor = fixed_point(&affines[0], &cube.center());
        Ok(Self {
            maps,
            affines,
            cube,
            dimension,
            mass,
            weights,
            anchor,
            overlap_warning,
        })
    }

    /// Planar Cantor dust: four maps of ratio `rho` toward the corners of the unit square.
    pub fn cantor_dust(rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho <= 0.5) {
            return Err(Error::InvalidInput(format!("cantor dust rho {rho} not in (0, 1/2]")));
        }
        let t = 1.0 - rho;
        let maps = (0..4)
            .map(|k| {
                Similarity::scaling(rho, vec![(k & 1) as f64 * t, (k >> 1 & 1) as f64 * t])
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(maps, Aabb::unit(2), 1.0)
    }

    /// Menger sponge: the 20 subcubes of ratio 1/3 with at most one middle coordinate.
    pub fn menger() -> Result<Self> {
        let mut maps = Vec::with_capacity(20);
        for z in 0..3 {
            for y in 0..3 {
                for x in 0..3 {
                    let middles = [x, y, z].iter().filter(|&&c| c == 1).count();
                    if middles <= 1 {
                        maps.push(Similarity::scaling(
                            1.0 / 3.0,
                            vec![x as f64 / 3.0, y as f64 / 3.0, z as f64 / 3.0],
                        )?);
                    }
                }
            }
        }
        Self::new(maps, Aabb::unit(3), 1.0)
    }

    /// The unit cube `[0,1]^d` as the attractor of its `2^d` half-size copies.
    pub fn unit_cube(d: usize) -> Result<Self> {
        let maps = (0..1usize << d)
            .map(|k| {
                Similarity::scaling(0.5, (0..d).map(|i| (k >> i & 1) as f64 * 0.5).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(maps, Aabb::unit(d), 1.0)
    }

    pub fn with_mass(mut self, mass: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidInput(format!("mass parameter {mass} must be positive")));
        }
        self.mass = mass;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.cube.dim()
    }

    pub fn maps(&self) -> &[Similarity] {
        &self.maps
    }

    pub fn affines(&self) -> &[Affine] {
        &self.affines
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn cube(&self) -> &Aabb {
        &self.cube
    }

    pub fn dimension(&self) -> f64 {
        self.dimension
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Symbol probabilities `r_j^D`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn max_ratio(&self) -> f64 {
        self.maps.iter().map(Similarity::ratio).fold(0.0, f64::max)
    }

    pub fn min_ratio(&self) -> f64 {
        self.maps.iter().map(Similarity::ratio).fold(1.0, f64::min)
    }

    /// A point of `F`: the fixed point of the first map.
    pub fn anchor(&self) -> &[f64] {
        &self.anchor
    }

    /// Set when two first-level boxes have overlapping interiors.
    pub fn overlap_warning(&self) -> bool {
        self.overlap_warning
    }

    /// Scale `m^{1/D}` below which rescaled nets are defined.
    pub fn eps0(&self) -> f64 {
        self.mass.powf(1.0 / self.dimension)
    }

    /// Smallest distance between distinct first-level boxes.
    pub fn first_level_gap(&self) -> f64 {
        let boxes: Vec<Aabb> = self.affines.iter().map(|a| self.cube.image_bounds(a)).collect();
        let mut gap = f64::INFINITY;
        for i in 0..boxes.len() {
            for j in i + 1..boxes.len() {
                let g: f64 = (0..self.dim())
                    .map(|k| {
                        let e = (boxes[j].min[k] - boxes[i].max[k])
                            .max(boxes[i].min[k] - boxes[j].max[k])
                            .max(0.0);
                        e * e
                    })
                    .sum::<f64>()
                    .sqrt();
                gap = gap.min(g);
            }
        }
        gap
    }

    /// Stable textual fingerprint used for cache keys and output headers.
    pub fn fingerprint(&self) -> String {
        let mut s = format!("dim={};cube={:?},{:?};m={:e}", self.dim(), self.cube.min, self.cube.max, self.mass);
        for m in &self.maps {
            s.push_str(&format!(";{:e}|{:?}|{:?}", m.ratio(), m.orthogonal(), m.translation()));
        }
        s
    }
}

fn fixed_point(map: &Affine, start: &[f64]) -> Vec<f64> {
    let mut p = start.to_vec();
    let mut q = vec![0.0; p.len()];
    for _ in 0..100_000 {
        map.apply_into(&p, &mut q);
        let delta = p.iter().zip(&q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        std::mem::swap(&mut p, &mut q);
        if delta == 0.0 {
            break;
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_are_valid() {
        let c = Ifs::cantor_dust(1.0 / 3.0).unwrap();
        assert_eq!(c.len(), 4);
        assert!((c.dimension() - 4f64.ln() / 3f64.ln()).abs() < 1e-12);
        assert!(!c.overlap_warning());
        assert_eq!(c.anchor(), &[0.0, 0.0]);
        let m = Ifs::menger().unwrap();
        assert_eq!(m.len(), 20);
        assert!(!m.overlap_warning());
        assert!((m.first_level_gap()).abs() < 1e-15);
        assert!((c.first_level_gap() - 1.0 / 3.0).abs() < 1e-15);
        let sq = Ifs::unit_cube(2).unwrap();
        assert!((sq.dimension() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_systems() {
        let one = vec![Similarity::scaling(0.5, vec![0.0, 0.0]).unwrap()];
        assert!(matches!(Ifs::new(one, Aabb::unit(2), 1.0), Err(Error::Degenerate(_))));
        let escape = vec![
            Similarity::scaling(0.5, vec![0.0, 0.0]).unwrap(),
            Similarity::scaling(0.5, vec![0.6, 0.0]).unwrap(),
        ];
        assert!(Ifs::new(escape, Aabb::unit(2), 1.0).is_err());
        let crowded = vec![Similarity::scaling(0.9, vec![0.0]).unwrap(); 3];
        assert!(Ifs::new(crowded, Aabb::unit(1), 1.0).is_err());
        assert!(Ifs::cantor_dust(0.6).is_err());
    }

    #[test]
    fn overlap_flagged() {
        let maps = vec![
            Similarity::scaling(0.5, vec![0.0]).unwrap(),
            Similarity::scaling(0.5, vec![0.25]).unwrap(),
        ];
        assert!(Ifs::new(maps, Aabb::unit(1), 1.0).unwrap().overlap_warning());
    }

    #[test]
    fn eps0_from_mass() {
        let c = Ifs::cantor_dust(1.0 / 3.0).unwrap().with_mass(4.0).unwrap();
        assert!((c.eps0() - 4f64.powf(1.0 / c.dimension())).abs() < 1e-15);
    }
}
