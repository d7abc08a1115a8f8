use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Affine, Ifs};

/// Finite word over the map indices. Symbols are stored 0-based.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..n.min(self.0.len())].to_vec())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn child(&self, j: usize) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.extend_from_slice(&self.0);
        v.push(j);
        Word(v)
    }

    /// Dropping the first symbol (the shift map on finite words).
    pub fn shift(&self) -> Word {
        Word(self.0.get(1..).map(<[usize]>::to_vec).unwrap_or_default())
    }

    pub fn ratio(&self, ifs: &Ifs) -> f64 {
        self.0.iter().map(|&j| ifs.maps()[j].ratio()).product()
    }

    pub fn map(&self, ifs: &Ifs) -> Affine {
        let mut acc = Affine::identity(ifs.dim());
        let mut tmp = acc.clone();
        for &j in &self.0 {
            acc.compose_into(&ifs.affines()[j], &mut tmp);
            std::mem::swap(&mut acc, &mut tmp);
        }
        acc
    }

    /// Human-readable 1-based form, e.g. `(1,4,4)`.
    pub fn display(&self) -> String {
        let parts: Vec<String> = self.0.iter().map(|j| (j + 1).to_string()).collect();
        format!("({})", parts.join(","))
    }
}

pub fn apply_word(ifs: &Ifs, word: &Word, x: &[f64]) -> Vec<f64> {
    let mut y = x.to_vec();
    let mut tmp = vec![0.0; y.len()];
    for &j in word.0.iter().rev() {
        ifs.maps()[j].apply_into(&y, &mut tmp);
        std::mem::swap(&mut y, &mut tmp);
    }
    y
}

/// `S_{w|n}(x0)` together with the bound `r_{w|n}·|J|` on its distance to `π(w)`.
pub fn project_word(ifs: &Ifs, word: &Word, x0: &[f64]) -> (Vec<f64>, f64) {
    let p = apply_word(ifs, word, x0);
    (p, word.ratio(ifs) * ifs.cube().diameter())
}

/// Seeded stream of i.i.d. symbols drawn with probabilities `r_j^D`.
pub struct InfiniteWord {
    rng: ChaCha8Rng,
    dist: WeightedIndex<f64>,
}

impl InfiniteWord {
    pub fn new(ifs: &Ifs, seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            dist: WeightedIndex::new(ifs.weights()).expect("weights are positive"),
        }
    }

    pub fn take_word(&mut self, n: usize) -> Word {
        Word((0..n).map(|_| self.next_symbol()).collect())
    }

    pub fn next_symbol(&mut self) -> usize {
        self.dist.sample(&mut self.rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::{Aabb, Similarity};

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn cantor_word_images() {
        let ifs = Ifs::cantor_dust(1.0 / 3.0).unwrap();
        assert!(close(&apply_word(&ifs, &Word(vec![0]), &[1.0, 1.0]), &[1.0 / 3.0; 2], 1e-15));
        assert!(close(&apply_word(&ifs, &Word::empty(), &[0.3, 0.9]), &[0.3, 0.9], 0.0));
        assert!(close(&apply_word(&ifs, &Word(vec![3, 3]), &[0.0, 0.0]), &[8.0 / 9.0; 2], 1e-15));
    }

    #[test]
    fn composite_map_matches_pointwise() {
        let ifs = Ifs::menger().unwrap();
        let w = Word(vec![3, 17, 0, 9]);
        let x = [0.2, 0.7, 0.4];
        assert!(close(&w.map(&ifs).apply(&x), &apply_word(&ifs, &w, &x), 1e-15));
        assert!((w.map(&ifs).ratio - 3f64.powi(-4)).abs() < 1e-18);
    }

    #[test]
    fn projection_bounds() {
        let ifs = Ifs::cantor_dust(1.0 / 3.0).unwrap();
        let (p, err) = project_word(&ifs, &Word::empty(), &[0.5, 0.5]);
        assert_eq!(p, vec![0.5, 0.5]);
        assert!((err - 2f64.sqrt()).abs() < 1e-15);
        let (p, err) = project_word(&ifs, &Word(vec![3; 10]), &[0.0, 0.0]);
        assert!((err - 3f64.powi(-10) * 2f64.sqrt()).abs() < 1e-18);
        let dist = ((p[0] - 1.0).powi(2) + (p[1] - 1.0).powi(2)).sqrt();
        assert!(dist <= err);
        let (p, _) = project_word(&ifs, &Word(vec![0; 40]), &[0.9, 0.2]);
        assert!(close(&p, &[0.0, 0.0], 1e-15));
    }

    #[test]
    fn ratio_is_multiplicative() {
        let maps = vec![
            Similarity::scaling(0.5, vec![0.0, 0.0]).unwrap(),
            Similarity::scaling(0.25, vec![0.75, 0.0]).unwrap(),
            Similarity::scaling(0.25, vec![0.75, 0.75]).unwrap(),
        ];
        let ifs = Ifs::new(maps, Aabb::unit(2), 1.0).unwrap();
        let v = Word(vec![0, 1]);
        let w = Word(vec![2, 2, 0]);
        let rv = v.ratio(&ifs);
        let rw = w.ratio(&ifs);
        assert!((v.concat(&w).ratio(&ifs) - rv * rw).abs() < 1e-16);
        let diam = ifs.cube().image_bounds(&w.map(&ifs)).diameter();
        assert!((diam - rw * ifs.cube().diameter()).abs() < 1e-14);
    }
}
