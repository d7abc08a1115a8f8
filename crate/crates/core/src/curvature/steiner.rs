use crate::{Error, Result};

/// Residual above which a Steiner fit is flagged as leaving the reach window.
pub const RESIDUAL_LIMIT: f64 = 0.02;

/// Default fit window as a fraction of the parallel radius.
pub const DEFAULT_WINDOW: f64 = 0.5;

/// Volume of the unit ball in dimension `i`.
pub fn unit_ball_volume(i: usize) -> f64 {
    match i {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(i - 2) * 2.0 * std::f64::consts::PI / i as f64,
    }
}

/// Fit of the collar volume polynomial `Σ_i a_i (t/t_max)^i` with no constant term.
#[derive(Clone, Debug)]
pub struct SteinerFit {
    pub t_max: f64,
    /// Collar volumes used: the nodes `t_max/j` followed by the check samples.
    pub samples: Vec<(f64, f64)>,
    pub coefficients: Vec<f64>,
    /// Largest deviation on the check samples, relative to the collar volume at `t_max`.
    pub residual: f64,
    /// Curvatures `C_0..C_{d−1}` of the parallel set itself.
    pub curvatures: Vec<f64>,
}

impl SteinerFit {
    pub fn reliable(&self) -> bool {
        self.residual <= RESIDUAL_LIMIT
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        let s = t / self.t_max;
        self.coefficients
            .iter()
            .enumerate()
            .map(|(i, a)| a * s.powi(i as i32 + 1))
            .sum()
    }
}

/// Collar depths at which volumes are needed: the nodes `t_max/j`, `j = 1..d`, then 8 checks.
pub fn sample_depths(d: usize, t_max: f64) -> Vec<f64> {
    let mut t: Vec<f64> = (1..=d).map(|j| t_max / j as f64).collect();
    t.extend((1..=8).map(|k| t_max * (k as f64 - 0.5) / 8.0));
    t
}

/// Solves `M a = V`, `M_{ji} = j^{−i}`, for collar volumes `V_j = V(t_max/j)`, and converts
/// `a_i = ω_i t_max^i C_{d−i}(K̃)` into curvatures of the set via `(−1)^{d−1−k}`.
///
/// `samples` must hold the volumes at [`sample_depths`] in that order.
pub fn steiner_extract(samples: &[(f64, f64)], d: usize, t_max: f64) -> Result<SteinerFit> {
    if !(t_max > 0.0) {
        return Err(Error::InvalidInput(format!("fit window {t_max} must be positive")));
    }
    if samples.len() < d {
        return Err(Error::InvalidInput("missing collar volumes at the fit nodes".into()));
    }
    let mut m = vec![vec![0.0; d + 1]; d];
    for j in 0..d {
        for i in 0..d {
            m[j][i] = ((j + 1) as f64).powi(-(i as i32 + 1));
        }
        m[j][d] = samples[j].1;
    }
    let coefficients = solve(m)?;
    let mut fit = SteinerFit {
        t_max,
        samples: samples.to_vec(),
        coefficients,
        residual: 0.0,
        curvatures: vec![0.0; d],
    };
    let scale = samples[0].1.abs().max(f64::MIN_POSITIVE);
    fit.residual = samples[d..]
        .iter()
        .map(|&(t, v)| (fit.evaluate(t) - v).abs() / scale)
        .fold(0.0, f64::max);
    for i in 1..=d {
        let k = d - i;
        let complement = fit.coefficients[i - 1] / (unit_ball_volume(i) * t_max.powi(i as i32));
        let sign = if (d - 1 - k) % 2 == 0 { 1.0 } else { -1.0 };
        fit.curvatures[k] = sign * complement;
    }
    Ok(fit)
}

/// Gaussian elimination with partial pivoting on an augmented `n × (n+1)` matrix.
pub(crate) fn solve(mut m: Vec<Vec<f64>>) -> Result<Vec<f64>> {
    let n = m.len();
    for col in 0..n {
        let p = (col..n)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .unwrap();
        if m[p][col].abs() < 1e-14 {
            return Err(Error::Degenerate("singular Steiner system".into()));
        }
        m.swap(col, p);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for c in col..=n {
                m[r][c] -= f * m[col][c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| m[r][c] * x[c]).sum();
        x[r] = (m[r][n] - s) / m[r][r];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn exact(d: usize, t_max: f64, v: impl Fn(f64) -> f64) -> SteinerFit {
        let s: Vec<(f64, f64)> = sample_depths(d, t_max).into_iter().map(|t| (t, v(t))).collect();
        steiner_extract(&s, d, t_max).unwrap()
    }

    #[test]
    fn ball_volumes() {
        assert_eq!(unit_ball_volume(1), 2.0);
        assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-15);
    }

    #[test]
    fn disk_collar() {
        // collar of the unit disk: π(1 − (1−t)²)
        let f = exact(2, 0.5, |t| PI * (1.0 - (1.0 - t).powi(2)));
        assert!((f.curvatures[0] - 1.0).abs() < 1e-12);
        assert!((f.curvatures[1] - PI).abs() < 1e-12);
        assert!(f.residual < 1e-12);
    }

    #[test]
    fn ball_collar() {
        let f = exact(3, 0.5, |t| 4.0 * PI / 3.0 * (1.0 - (1.0 - t).powi(3)));
        assert!((f.curvatures[0] - 1.0).abs() < 1e-12);
        assert!((f.curvatures[1] - 4.0).abs() < 1e-12);
        assert!((f.curvatures[2] - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn rounded_square_collar() {
        let q = 0.25;
        let f = exact(2, 0.125, |t| (4.0 + 2.0 * PI * q) * t - PI * t * t);
        assert!((f.curvatures[0] - 1.0).abs() < 1e-12);
        assert!((f.curvatures[1] - (2.0 + PI / 4.0)).abs() < 1e-12);
    }

    #[test]
    fn annulus_has_zero_euler() {
        // disk of radius 2 minus disk of radius 1: collar from both boundaries
        let f = exact(2, 0.2, |t| PI * (4.0 - (2.0 - t).powi(2)) + PI * ((1.0 + t).powi(2) - 1.0));
        assert!(f.curvatures[0].abs() < 1e-12);
        assert!((f.curvatures[1] - 3.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn residual_detects_non_polynomial() {
        let f = exact(2, 0.5, |t| t.sqrt());
        assert!(!f.reliable());
        assert!(steiner_extract(&[(0.1, 1.0)], 2, 0.1).is_err());
        assert!(steiner_extract(&[(0.1, 1.0), (0.05, 0.5)], 2, 0.0).is_err());
    }
}
