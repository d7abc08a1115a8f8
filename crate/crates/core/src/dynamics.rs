//! The shift on code space: `T(x) = S_{x_1}^{−1}(x)` realised on infinite words, the
//! scale index `n(x, δ)` and Birkhoff averages of the log-contraction.

use crate::ifs::{project_word, Ifs, InfiniteWord, Word};
use crate::{Error, Result};

/// Symbols used when projecting a shifted word to a point.
const PROJECTION_DEPTH: usize = 48;
/// Distances to `J^c` below this are treated as a hit of the boundary.
const BOUNDARY_FLOOR: f64 = 1e-13;

/// An infinite word read lazily from a seeded stream, or a finite word padded with the
/// fixed-point tail of its last symbol.
pub struct Orbit<'a> {
    ifs: &'a Ifs,
    word: Word,
    stream: Option<InfiniteWord>,
}

impl<'a> Orbit<'a> {
    /// A `μ`-random orbit.
    pub fn random(ifs: &'a Ifs, seed: u64) -> Self {
        Self {
            ifs,
            word: Word::empty(),
            stream: Some(InfiniteWord::new(ifs, seed)),
        }
    }

    /// The eventually constant word `w j j j …`, `j` the last symbol of `w`.
    pub fn periodic_tail(ifs: &'a Ifs, word: Word) -> Result<Self> {
        if word.is_empty() {
            return Err(Error::InvalidInput("orbit needs a nonempty word".into()));
        }
        if word.0.iter().any(|&j| j >= ifs.len()) {
            return Err(Error::InvalidInput(format!("word {} uses an unknown map", word.display())));
        }
        Ok(Self { ifs, word, stream: None })
    }

    /// The coding of a point `x ∈ F` read off the first-level boxes while that stays well
    /// conditioned (`r_{x|n}^{-1}` times the rounding of `x` below `1e-6` of the box size),
    /// continued by a `μ`-random tail from `seed`. Needs disjoint first-level boxes.
    pub fn from_point(ifs: &'a Ifs, x: &[f64], seed: u64) -> Result<Self> {
        if !(ifs.first_level_gap() > 0.0) {
            return Err(Error::InvalidInput("coding a point needs disjoint first-level boxes".into()));
        }
        if x.len() != ifs.dim() {
            return Err(Error::InvalidInput("point lies outside the invariant cube".into()));
        }
        let boxes: Vec<_> = ifs.affines().iter().map(|a| ifs.cube().image_bounds(a)).collect();
        let mut y = x.to_vec();
        let mut tmp = y.clone();
        let mut word = Word::empty();
        let mut err = f64::EPSILON * (1.0 + y.iter().map(|v| v.abs()).fold(0.0, f64::max));
        let scale = ifs.cube().diameter();
        while err < 1e-6 * scale {
            let (j, gap) = boxes
                .iter()
                .map(|b| b.distance_to(&y))
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("at least two maps");
            if gap > 2.0 * err {
                return Err(Error::InvalidInput(format!(
                    "point is not in F: it leaves the cylinders after {} symbols",
                    word.len()
                )));
            }
            ifs.affines()[j].invert_into(&y, &mut tmp);
            std::mem::swap(&mut y, &mut tmp);
            word.0.push(j);
            err /= ifs.maps()[j].ratio();
        }
        Ok(Self {
            ifs,
            word,
            stream: Some(InfiniteWord::new(ifs, seed)),
        })
    }

    fn ensure(&mut self, n: usize) {
        while self.word.len() < n {
            let s = match &mut self.stream {
                Some(st) => st.next_symbol(),
                None => *self.word.0.last().expect("nonempty"),
            };
            self.word.0.push(s);
        }
    }

    pub fn symbol(&mut self, i: usize) -> usize {
        self.ensure(i + 1);
        self.word.0[i]
    }

    /// The first `n` symbols.
    pub fn prefix(&mut self, n: usize) -> Word {
        self.ensure(n);
        self.word.prefix(n)
    }

    /// `T^i x` and the bound on its distance to the true point.
    pub fn point(&mut self, i: usize) -> (Vec<f64>, f64) {
        self.ensure(i + PROJECTION_DEPTH);
        let w = Word(self.word.0[i..i + PROJECTION_DEPTH].to_vec());
        project_word(self.ifs, &w, self.ifs.anchor())
    }

    /// `ln r_{x|n}`.
    pub fn log_ratio(&mut self, n: usize) -> f64 {
        self.ensure(n);
        self.word.0[..n].iter().map(|&j| self.ifs.maps()[j].ratio().ln()).sum()
    }

    /// `d(T^i x, J^c)`, or an error if `T^i x` lies on `∂J` up to projection accuracy.
    pub fn boundary_distance(&mut self, i: usize) -> Result<f64> {
        let (p, err) = self.point(i);
        let d = self.ifs.cube().distance_to_complement(&p);
        if d <= err + BOUNDARY_FLOOR {
            return Err(Error::Degenerate(format!(
                "T^{i} x lies on the boundary of J (distance {d:.3e})"
            )));
        }
        Ok(d)
    }

    /// `ln δ(x, n) = ln r_{x|n} + ln(b^{−1} d(T^n x, J^c))`.
    pub fn log_delta(&mut self, n: usize, b: f64) -> Result<f64> {
        Ok(self.log_ratio(n) + (self.boundary_distance(n)? / b).ln())
    }
}

pub fn shift(word: &Word) -> Result<Word> {
    if word.is_empty() {
        return Err(Error::InvalidInput("cannot shift the empty word".into()));
    }
    Ok(word.shift())
}

/// `max{n : b^{−1} d(x, (S_{x|n} J)^c) ≥ δ}`, using `d(x, (S_{x|n}J)^c) = r_{x|n} d(T^n x, J^c)`.
/// `None` when even `n = 0` fails.
pub fn n_of_delta(ifs: &Ifs, orbit: &mut Orbit<'_>, delta: f64, b: f64) -> Result<Option<usize>> {
    if !(delta > 0.0 && b > 0.0) {
        return Err(Error::InvalidInput("δ and b must be positive".into()));
    }
    let ln_delta = delta.ln();
    // beyond this n even the largest possible distance falls short
    let d_max = 0.5 * ifs.cube().diameter();
    let ln_rmax = ifs.max_ratio().ln();
    let horizon = ((ln_delta - (d_max / b).ln()) / ln_rmax).ceil().max(0.0) as usize + 1;
    let mut best = None;
    for n in 0..=horizon {
        if orbit.log_delta(n, b)? >= ln_delta {
            best = Some(n);
        }
    }
    Ok(best)
}

/// `(1/n) Σ_{i=1}^n |ln r_{(T^i x)_1}|`.
pub fn birkhoff_log_contraction(ifs: &Ifs, orbit: &mut Orbit<'_>, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let s: f64 = (1..=n).map(|i| ifs.maps()[orbit.symbol(i)].ratio().ln().abs()).sum();
    Ok(s / n as f64)
}

/// `Σ_j r_j^D |ln r_j|`.
pub fn entropy_target(ifs: &Ifs) -> f64 {
    ifs.maps()
        .iter()
        .zip(ifs.weights())
        .map(|(m, w)| w * m.ratio().ln().abs())
        .sum()
}

/// Monte Carlo summary over `μ`-random points.
#[derive(Clone, Debug, PartialEq)]
pub struct MonteCarlo {
    pub mean: f64,
    pub std_error: f64,
    pub used: usize,
    /// Samples discarded because they hit a cylinder boundary.
    pub degenerate: usize,
    pub values: Vec<f64>,
}

impl MonteCarlo {
    fn from_values(values: Vec<f64>, degenerate: usize) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        Self {
            mean,
            std_error: (var / n).sqrt(),
            used: values.len(),
            degenerate,
            values,
        }
    }

    /// More than 1% of the samples were degenerate.
    pub fn degenerate_warning(&self) -> bool {
        self.degenerate * 100 > self.used + self.degenerate
    }
}

/// Seed of sample `i` in a run seeded with `seed`.
pub fn sample_seed(seed: u64, i: usize) -> u64 {
    seed ^ (i as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Mean of `|ln δ(x, n)|/n` over `μ`-random `x`, and the limit `Σ r_j^D |ln r_j|`.
pub fn verify_28(ifs: &Ifs, samples: usize, n: usize, seed: u64, b: f64) -> Result<(MonteCarlo, f64)> {
    if samples == 0 || n == 0 {
        return Err(Error::InvalidInput("need at least one sample and n ≥ 1".into()));
    }
    let mut values = Vec::with_capacity(samples);
    let mut degenerate = 0;
    for i in 0..samples {
        let mut orbit = Orbit::random(ifs, sample_seed(seed, i));
        match orbit.log_delta(n, b) {
            Ok(ld) => values.push(ld.abs() / n as f64),
            Err(Error::Degenerate(_)) => degenerate += 1,
            Err(e) => return Err(e),
        }
    }
    if values.is_empty() {
        return Err(Error::Degenerate("every sample hit a cylinder boundary".into()));
    }
    Ok((MonteCarlo::from_values(values, degenerate), entropy_target(ifs)))
}

/// Monte Carlo mean of `|ln d(y, J^c)|` over `μ`; samples closer than `BOUNDARY_FLOOR`
/// are counted in `degenerate` (and truncated at that distance in the mean).
pub fn verify_integrability_5(ifs: &Ifs, samples: usize, seed: u64) -> Result<MonteCarlo> {
    if samples == 0 {
        return Err(Error::InvalidInput("need at least one sample".into()));
    }
    let mut values = Vec::with_capacity(samples);
    let mut truncated = 0;
    for i in 0..samples {
        let mut orbit = Orbit::random(ifs, sample_seed(seed, i));
        let (p, _) = orbit.point(0);
        let d = ifs.cube().distance_to_complement(&p);
        if d < BOUNDARY_FLOOR {
            truncated += 1;
        }
        values.push(d.max(BOUNDARY_FLOOR).ln().abs());
    }
    Ok(MonteCarlo::from_values(values, truncated))
}
