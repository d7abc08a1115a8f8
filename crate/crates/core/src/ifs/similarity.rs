use crate::{Error, Result};

/// Contracting similarity `x ↦ ratio · O · x + translation` with `O` orthogonal.
#[derive(Clone, Debug, PartialEq)]
pub struct Similarity {
    ratio: f64,
    /// Row-major `d × d` orthogonal matrix.
    orthogonal: Vec<f64>,
    translation: Vec<f64>,
}

impl Similarity {
    pub fn new(ratio: f64, orthogonal: Vec<f64>, translation: Vec<f64>) -> Result<Self> {
        let d = translation.len();
        if d == 0 {
            return Err(Error::InvalidInput("similarity of dimension 0".into()));
        }
        if orthogonal.len() != d * d {
            return Err(Error::InvalidInput(format!(
                "orthogonal part has {} entries, expected {}",
                orthogonal.len(),
                d * d
            )));
        }
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::InvalidInput(format!(
                "contraction ratio {ratio} not in (0, 1)"
            )));
        }
        // O·Oᵀ = I
        for i in 0..d {
            for j in 0..d {
                let dot: f64 = (0..d)
                    .map(|k| orthogonal[i * d + k] * orthogonal[j * d + k])
                    .sum();
                let want = if i == j { 1.0 } else { 0.0 };
                if (dot - want).abs() > 1e-12 {
                    return Err(Error::InvalidInput(format!(
                        "orthogonal part is not orthogonal (entry ({i},{j}) of O·Oᵀ is {dot})"
                    )));
                }
            }
        }
        Ok(Self {
            ratio,
            orthogonal,
            translation,
        })
    }

    /// Homothety `x ↦ ratio · x + translation`.
    pub fn scaling(ratio: f64, translation: Vec<f64>) -> Result<Self> {
        let d = translation.len();
        let mut o = vec![0.0; d * d];
        for i in 0..d {
            o[i * d + i] = 1.0;
        }
        Self::new(ratio, o, translation)
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn orthogonal(&self) -> &[f64] {
        &self.orthogonal
    }

    pub fn translation(&self) -> &[f64] {
        &self.translation
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.apply_into(x, &mut out);
        out
    }

    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        let d = self.dim();
        for i in 0..d {
            let row = &self.orthogonal[i * d..(i + 1) * d];
            let s: f64 = row.iter().zip(x).map(|(a, b)| a * b).sum();
            out[i] = self.ratio * s + self.translation[i];
        }
    }

    pub fn to_affine(&self) -> Affine {
        Affine {
            ratio: self.ratio,
            lin: self.orthogonal.iter().map(|v| v * self.ratio).collect(),
            trans: self.translation.clone(),
        }
    }
}

/// Composite similarity `S_w`, stored as linear part `ratio · O` plus translation.
#[derive(Clone, Debug, PartialEq)]
pub struct Affine {
    pub ratio: f64,
    pub lin: Vec<f64>,
    pub trans: Vec<f64>,
}

impl Affine {
    pub fn identity(d: usize) -> Self {
        let mut lin = vec![0.0; d * d];
        for i in 0..d {
            lin[i * d + i] = 1.0;
        }
        Self {
            ratio: 1.0,
            lin,
            trans: vec![0.0; d],
        }
    }

    pub fn dim(&self) -> usize {
        self.trans.len()
    }

    /// `self ∘ inner`
    pub fn then_inner(&self, inner: &Affine) -> Affine {
        let mut out = Affine {
            ratio: 0.0,
            lin: vec![0.0; self.lin.len()],
            trans: vec![0.0; self.trans.len()],
        };
        self.compose_into(inner, &mut out);
        out
    }

    /// Writes `self ∘ inner` into `out` without allocating.
    pub fn compose_into(&self, inner: &Affine, out: &mut Affine) {
        let d = self.dim();
        out.ratio = self.ratio * inner.ratio;
        for i in 0..d {
            for j in 0..d {
                let mut s = 0.0;
                for k in 0..d {
                    s += self.lin[i * d + k] * inner.lin[k * d + j];
                }
                out.lin[i * d + j] = s;
            }
            let mut s = self.trans[i];
            for k in 0..d {
                s += self.lin[i * d + k] * inner.trans[k];
            }
            out.trans[i] = s;
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.apply_into(x, &mut out);
        out
    }

    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        let d = self.dim();
        for i in 0..d {
            let mut s = self.trans[i];
            for k in 0..d {
                s += self.lin[i * d + k] * x[k];
            }
            out[i] = s;
        }
    }

    /// Inverse image `S⁻¹(x) = (1/r²) · linᵀ · (x − t)`.
    pub fn invert_into(&self, x: &[f64], out: &mut [f64]) {
        let d = self.dim();
        let inv = 1.0 / (self.ratio * self.ratio);
        for i in 0..d {
            let mut s = 0.0;
            for k in 0..d {
                s += self.lin[k * d + i] * (x[k] - self.trans[k]);
            }
            out[i] = s * inv;
        }
    }
}

/// Axis-aligned box.
#[derive(Clone, Debug, PartialEq)]
pub struct Aabb {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl Aabb {
    pub fn new(min: Vec<f64>, max: Vec<f64>) -> Result<Self> {
        if min.len() != max.len() || min.is_empty() {
            return Err(Error::InvalidInput("box corners of mismatched dimension".into()));
        }
        if min.iter().zip(&max).any(|(a, b)| !(a < b)) {
            return Err(Error::InvalidInput("box has empty interior".into()));
        }
        Ok(Self { min, max })
    }

    pub fn unit(d: usize) -> Self {
        Self {
            min: vec![0.0; d],
            max: vec![1.0; d],
        }
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    pub fn diameter(&self) -> f64 {
        self.min
            .iter()
            .zip(&self.max)
            .map(|(a, b)| (b - a) * (b - a))
            .sum::<f64>()
            .sqrt()
    }

    pub fn center(&self) -> Vec<f64> {
        self.min
            .iter()
            .zip(&self.max)
            .map(|(a, b)| 0.5 * (a + b))
            .collect()
    }

    pub fn distance_to(&self, x: &[f64]) -> f64 {
        self.min
            .iter()
            .zip(&self.max)
            .zip(x)
            .map(|((lo, hi), v)| {
                let e = if v < lo {
                    lo - v
                } else if v > hi {
                    v - hi
                } else {
                    0.0
                };
                e * e
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Distance from `x` to the farthest point of the box.
    pub fn farthest_distance(&self, x: &[f64]) -> f64 {
        self.min
            .iter()
            .zip(&self.max)
            .zip(x)
            .map(|((lo, hi), v)| {
                let e = (v - lo).abs().max((hi - v).abs());
                e * e
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Distance from an interior point to the complement, `d(x, Jᶜ)`; zero outside.
    pub fn distance_to_complement(&self, x: &[f64]) -> f64 {
        self.min
            .iter()
            .zip(&self.max)
            .zip(x)
            .map(|((lo, hi), v)| (v - lo).min(hi - v))
            .fold(f64::INFINITY, f64::min)
            .max(0.0)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.min
            .iter()
            .zip(&self.max)
            .zip(x)
            .all(|((lo, hi), v)| *lo <= *v && *v <= *hi)
    }

    pub fn corners(&self) -> Vec<Vec<f64>> {
        let d = self.dim();
        (0..1usize << d)
            .map(|mask| {
                (0..d)
                    .map(|i| if mask >> i & 1 == 1 { self.max[i] } else { self.min[i] })
                    .collect()
            })
            .collect()
    }

    /// Bounding box of the image of this box under `map`.
    pub fn image_bounds(&self, map: &Affine) -> Aabb {
        let d = self.dim();
        let mut min = vec![f64::INFINITY; d];
        let mut max = vec![f64::NEG_INFINITY; d];
        let mut y = vec![0.0; d];
        for c in self.corners() {
            map.apply_into(&c, &mut y);
            for i in 0..d {
                min[i] = min[i].min(y[i]);
                max[i] = max[i].max(y[i]);
            }
        }
        Aabb { min, max }
    }

    pub fn interiors_overlap(&self, other: &Aabb, slack: f64) -> bool {
        self.min
            .iter()
            .zip(&self.max)
            .zip(other.min.iter().zip(&other.max))
            .all(|((a0, a1), (b0, b1))| a0.max(*b0) < a1.min(*b1) - slack)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn rotation(theta: f64) -> Vec<f64> {
        vec![theta.cos(), -theta.sin(), theta.sin(), theta.cos()]
    }

    #[test]
    fn rejects_non_orthogonal() {
        assert!(Similarity::new(0.5, vec![1.0, 0.1, 0.0, 1.0], vec![0.0, 0.0]).is_err());
        assert!(Similarity::new(1.0, rotation(0.3), vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn similarity_scales_distances() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let s = Similarity::new(
                rng.gen_range(0.05..0.95),
                rotation(rng.gen_range(0.0..6.3)),
                vec![rng.gen(), rng.gen()],
            )
            .unwrap();
            let x: Vec<f64> = (0..2).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let y: Vec<f64> = (0..2).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let (sx, sy) = (s.apply(&x), s.apply(&y));
            let dist = |a: &[f64], b: &[f64]| {
                a.iter().zip(b).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt()
            };
            let want = s.ratio() * dist(&x, &y);
            assert!((dist(&sx, &sy) - want).abs() <= 1e-10 * want.max(1e-300));
        }
    }

    #[test]
    fn compose_and_invert() {
        let a = Similarity::new(0.5, rotation(0.7), vec![0.1, 0.2]).unwrap().to_affine();
        let b = Similarity::new(0.3, rotation(-1.1), vec![0.4, -0.3]).unwrap().to_affine();
        let ab = a.then_inner(&b);
        let x = [0.37, -0.52];
        let direct = a.apply(&b.apply(&x));
        let composed = ab.apply(&x);
        for (u, v) in direct.iter().zip(&composed) {
            assert!((u - v).abs() < 1e-14);
        }
        assert!((ab.ratio - 0.15).abs() < 1e-15);
        let mut back = [0.0; 2];
        ab.invert_into(&composed, &mut back);
        assert!((back[0] - x[0]).abs() < 1e-12 && (back[1] - x[1]).abs() < 1e-12);
    }

    #[test]
    fn box_distances() {
        let b = Aabb::unit(2);
        assert_eq!(b.distance_to(&[0.5, 0.5]), 0.0);
        assert!((b.distance_to(&[2.0, 0.5]) - 1.0).abs() < 1e-15);
        assert!((b.farthest_distance(&[0.0, 0.0]) - 2f64.sqrt()).abs() < 1e-15);
        assert!((b.distance_to_complement(&[0.2, 0.7]) - 0.2).abs() < 1e-15);
        assert_eq!(b.distance_to_complement(&[1.0, 0.3]), 0.0);
    }
}
