use super::steiner::solve;
use super::unit_ball_volume;

/// Upper bound `(2/ε²)(diam/2 + ε)²` for the positive part of the planar Gauss curvature
/// of a parallel set of radius `ε` around a set of diameter `diam`.
pub fn bound_lemma41(eps: f64, diam: f64) -> f64 {
    2.0 / (eps * eps) * (diam / 2.0 + eps).powi(2)
}

/// Upper bound `η (s+ε)^d ε^{k−d}` on the total variation of `C_k` over a set of diameter
/// at most `2s`, for a body of reach at least `ε`.
///
/// Collar volumes at the nodes `ε/j` lie in `[0, L]`, `L = ω_d (s+ε)^d`, so each Steiner
/// coefficient is bounded by the extreme of its row of `M^{−1}` over that box.
pub fn bound_lemma43(s: f64, eps: f64, k: usize, d: usize) -> f64 {
    assert!(k < d, "k must be below the dimension");
    let big_l = unit_ball_volume(d) * (s + eps).powi(d as i32);
    let i = d - k;
    // Row i−1 of M^{−1}, from the columns M^{−1} e_j.
    let row: Vec<f64> = (0..d)
        .map(|j| {
            let mut m = vec![vec![0.0; d + 1]; d];
            for (r, line) in m.iter_mut().enumerate() {
                for (c, v) in line.iter_mut().take(d).enumerate() {
                    *v = ((r + 1) as f64).powi(-(c as i32 + 1));
                }
                line[d] = if r == j { 1.0 } else { 0.0 };
            }
            solve(m).expect("Steiner matrix is regular")[i - 1]
        })
        .collect();
    let pos: f64 = row.iter().filter(|v| **v > 0.0).sum();
    let neg: f64 = -row.iter().filter(|v| **v < 0.0).sum::<f64>();
    big_l * pos.max(neg) / (unit_ball_volume(i) * eps.powi(i as i32))
}
