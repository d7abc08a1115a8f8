use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{project_word, Affine, Ifs, InfiniteWord, Interval, Word};

/// Node budget after which `mu_ball_mass` returns its current, possibly wider, interval.
const MASS_NODE_BUDGET: usize = 4_000_000;

struct Cyl {
    mass: f64,
    word: Word,
    map: Affine,
}

impl PartialEq for Cyl {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Cyl {}
impl PartialOrd for Cyl {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cyl {
    // largest mass first, then smallest word
    fn cmp(&self, other: &Self) -> Ordering {
        self.mass
            .total_cmp(&other.mass)
            .then_with(|| other.word.cmp(&self.word))
    }
}

/// Interval containing `μ(F ∩ B(center, radius))` for the natural self-similar measure.
pub fn mu_ball_mass(ifs: &Ifs, center: &[f64], radius: f64, tol: f64) -> Interval {
    assert!(radius >= 0.0 && tol > 0.0);
    let d = ifs.dim();
    let cube = ifs.cube();
    let mut local = vec![0.0; d];
    let classify = |map: &Affine, local: &mut [f64]| -> Option<bool> {
        map.invert_into(center, local);
        if map.ratio * cube.distance_to(local) > radius {
            Some(false)
        } else if map.ratio * cube.farthest_distance(local) <= radius {
            Some(true)
        } else {
            None
        }
    };

    let root = Affine::identity(d);
    match classify(&root, &mut local) {
        Some(true) => return Interval::point(1.0),
        Some(false) => return Interval::point(0.0),
        None => {}
    }
    let mut inside = 0.0;
    let mut ambiguous = 1.0;
    let mut visited = 0usize;
    let mut heap = BinaryHeap::new();
    heap.push(Cyl {
        mass: 1.0,
        word: Word::empty(),
        map: root,
    });
    while ambiguous > tol && visited < MASS_NODE_BUDGET {
        let Some(node) = heap.pop() else { break };
        ambiguous -= node.mass;
        for (j, a) in ifs.affines().iter().enumerate() {
            let map = node.map.then_inner(a);
            let mass = node.mass * ifs.weights()[j];
            visited += 1;
            match classify(&map, &mut local) {
                Some(true) => inside += mass,
                Some(false) => {}
                None => {
                    ambiguous += mass;
                    heap.push(Cyl {
                        mass,
                        word: node.word.child(j),
                        map,
                    });
                }
            }
        }
    }
    // recompute the ambiguous total to shed accumulated rounding
    let ambiguous: f64 = heap.iter().map(|c| c.mass).sum();
    let lo = inside.clamp(0.0, 1.0);
    Interval::new(lo, (inside + ambiguous).clamp(lo, 1.0))
}

/// One `μ`-distributed point (up to `r_max^depth·|J|`) and the word that produced it.
///
/// The returned point is `S_w` applied to the anchor, so it lies in `F` exactly.
pub fn sample_mu(ifs: &Ifs, seed: u64, depth: usize) -> (Vec<f64>, Word) {
    let mut stream = InfiniteWord::new(ifs, seed);
    let w = stream.take_word(depth);
    let (p, _) = project_word(ifs, &w, ifs.anchor());
    (p, w)
}

/// Repeated draws from one seeded stream.
pub struct MuSampler<'a> {
    ifs: &'a Ifs,
    stream: InfiniteWord,
    depth: usize,
}

impl<'a> MuSampler<'a> {
    pub fn new(ifs: &'a Ifs, seed: u64, depth: usize) -> Self {
        Self {
            ifs,
            stream: InfiniteWord::new(ifs, seed),
            depth,
        }
    }

    /// Depth whose cylinders are smaller than `precision`.
    pub fn depth_for(ifs: &Ifs, precision: f64) -> usize {
        let r = ifs.max_ratio();
        ((precision / ifs.cube().diameter()).ln() / r.ln()).ceil().max(1.0) as usize
    }

    pub fn draw(&mut self) -> (Vec<f64>, Word) {
        let w = self.stream.take_word(self.depth);
        let (p, _) = project_word(self.ifs, &w, self.ifs.anchor());
        (p, w)
    }
}

/// Empirical D-set constants `m·μ(B(x,r))/r^D` over sampled `x ∈ F` and the given radii.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DSetConstants {
    pub c_lower: f64,
    pub c_upper: f64,
    /// Set when some mass interval stayed wider than the requested relative tolerance.
    pub ambiguous: bool,
}

pub fn dset_constants(ifs: &Ifs, samples: usize, radii: &[f64], seed: u64) -> DSetConstants {
    assert!(samples >= 1 && !radii.is_empty());
    let d = ifs.dimension();
    let m = ifs.mass();
    let r_min = radii.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut sampler = MuSampler::new(ifs, seed, MuSampler::depth_for(ifs, 1e-6 * r_min));
    let mut c_lower = f64::INFINITY;
    let mut c_upper: f64 = 0.0;
    let mut ambiguous = false;
    for _ in 0..samples {
        let (x, _) = sampler.draw();
        for &r in radii {
            let scale = r.powf(d);
            let tol = 1e-3 * scale;
            let iv = mu_ball_mass(ifs, &x, r, tol);
            if iv.width() > tol * (1.0 + 1e-9) {
                ambiguous = true;
            }
            c_lower = c_lower.min(m * iv.lo / scale);
            c_upper = c_upper.max(m * iv.hi / scale);
        }
    }
    DSetConstants {
        c_lower,
        c_upper,
        ambiguous,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::apply_word;
    use proptest::prelude::*;

    fn cantor() -> Ifs {
        Ifs::cantor_dust(1.0 / 3.0).unwrap()
    }

    #[test]
    fn whole_and_empty() {
        let ifs = cantor();
        let iv = mu_ball_mass(&ifs, &[0.5, 0.5], 2.0, 1e-6);
        assert!(iv.lo >= 1.0 - 1e-6 && iv.hi <= 1.0);
        let iv = mu_ball_mass(&ifs, &[0.5, 0.5], 0.01, 1e-6);
        assert!(iv.lo == 0.0 && iv.hi <= 1e-6);
    }

    #[test]
    fn corner_cylinder() {
        let ifs = cantor();
        let iv = mu_ball_mass(&ifs, &[0.0, 0.0], 0.5, 1e-6);
        assert!(iv.width() <= 1e-6 && iv.contains(0.25), "{iv}");
    }

    #[test]
    fn nested_balls_nest() {
        let ifs = cantor();
        let c = [0.3, 0.2];
        let mut prev = Interval::point(0.0);
        for k in 1..40 {
            let r = 0.02 * k as f64;
            let iv = mu_ball_mass(&ifs, &c, r, 1e-4);
            assert!(iv.lo >= prev.lo - 1e-12 && iv.hi >= prev.hi - 1e-12);
            prev = iv;
        }
    }

    #[test]
    fn self_similar_scaling() {
        let ifs = cantor();
        for (c, r) in [([0.2, 0.7], 0.3), ([0.5, 0.5], 0.4), ([0.9, 0.1], 0.25)] {
            let big = mu_ball_mass(&ifs, &c, r, 1e-5);
            let sc = apply_word(&ifs, &Word(vec![0]), &c);
            let small = mu_ball_mass(&ifs, &sc, r / 3.0, 1e-5);
            let scaled = big.scale(0.25);
            assert!(small.lo <= scaled.hi + 1e-5 && scaled.lo <= small.hi + 1e-5);
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let ifs = cantor();
        assert_eq!(sample_mu(&ifs, 11, 20), sample_mu(&ifs, 11, 20));
        assert_ne!(sample_mu(&ifs, 11, 20).1, sample_mu(&ifs, 12, 20).1);
    }

    #[test]
    fn first_symbol_frequencies() {
        let ifs = cantor();
        let mut sampler = MuSampler::new(&ifs, 5, 1);
        let n = 10_000;
        let mut counts = [0usize; 4];
        for _ in 0..n {
            counts[sampler.draw().1 .0[0]] += 1;
        }
        let sigma = (n as f64 * 0.25 * 0.75).sqrt();
        for c in counts {
            assert!((c as f64 - n as f64 * 0.25).abs() <= 3.0 * sigma, "{counts:?}");
        }
    }

    #[test]
    fn unequal_prefix_frequencies() {
        use crate::ifs::{Aabb, Similarity};
        let maps = vec![
            Similarity::scaling(0.5, vec![0.0]).unwrap(),
            Similarity::scaling(0.25, vec![0.75]).unwrap(),
        ];
        let ifs = Ifs::new(maps, Aabb::unit(1), 1.0).unwrap();
        let mut sampler = MuSampler::new(&ifs, 99, 2);
        let n = 100_000;
        let mut counts = std::collections::HashMap::new();
        for _ in 0..n {
            *counts.entry(sampler.draw().1).or_insert(0usize) += 1;
        }
        for (w, c) in counts {
            let p: f64 = w.0.iter().map(|&j| ifs.weights()[j]).product();
            let sigma = (n as f64 * p * (1.0 - p)).sqrt();
            assert!((c as f64 - n as f64 * p).abs() <= 4.0 * sigma);
        }
    }

    #[test]
    fn sample_mean_is_center() {
        let ifs = cantor();
        let mut sampler = MuSampler::new(&ifs, 3, 30);
        let n = 10_000;
        let mut sum = [0.0; 2];
        let mut sq = [0.0; 2];
        for _ in 0..n {
            let (p, _) = sampler.draw();
            for i in 0..2 {
                sum[i] += p[i];
                sq[i] += p[i] * p[i];
            }
        }
        for i in 0..2 {
            let mean = sum[i] / n as f64;
            let var = sq[i] / n as f64 - mean * mean;
            assert!((mean - 0.5).abs() <= 3.0 * (var / n as f64).sqrt());
        }
    }

    #[test]
    fn dset_constants_positive_and_stable() {
        let ifs = cantor();
        let radii: Vec<f64> = (0..8)
            .map(|k| 1e-3 * (2f64.sqrt() / 1e-3).powf(k as f64 / 7.0))
            .collect();
        let a = dset_constants(&ifs, 1000, &radii, 1);
        let b = dset_constants(&ifs, 1000, &radii, 2);
        assert!(a.c_lower > 0.0 && a.c_lower <= a.c_upper && a.c_upper.is_finite());
        assert!((a.c_lower / b.c_lower - 1.0).abs() < 0.1);
        assert!((a.c_upper / b.c_upper - 1.0).abs() < 0.1);
        let whole = 1.0 / 2f64.sqrt().powf(ifs.dimension());
        assert!(whole <= a.c_upper + 1e-9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn monotone_in_radius(x in 0.0f64..1.0, y in 0.0f64..1.0, r in 0.01f64..0.8, dr in 0.0f64..0.2) {
            let ifs = cantor();
            let a = mu_ball_mass(&ifs, &[x, y], r, 1e-3);
            let b = mu_ball_mass(&ifs, &[x, y], r + dr, 1e-3);
            // each interval is within 1e-3 of the truth, so ordering holds up to that slack
            prop_assert!(b.lo >= a.lo - 1e-3 && b.hi >= a.hi - 1e-3);
        }
    }
}
