use crate::{Error, Result};

/// Root of `Σ r_j^D = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DimensionSolution {
    pub value: f64,
    /// Set when the system has a single map and `F` is a point.
    pub degenerate: bool,
}

pub fn solve_dimension(ratios: &[f64]) -> Result<DimensionSolution> {
    if ratios.is_empty() {
        return Err(Error::InvalidInput("empty ratio list".into()));
    }
    if let Some(r) = ratios.iter().find(|r| !(**r > 0.0 && **r < 1.0)) {
        return Err(Error::InvalidInput(format!("ratio {r} not in (0, 1)")));
    }
    if ratios.len() == 1 {
        return Ok(DimensionSolution {
            value: 0.0,
            degenerate: true,
        });
    }
    let f = |d: f64| ratios.iter().map(|r| r.powf(d)).sum::<f64>() - 1.0;
    let mut lo = 0.0;
    let mut hi = 1.0;
    while f(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let value = if f(lo).abs() <= f(hi).abs() { lo } else { hi };
    Ok(DimensionSolution {
        value,
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn menger_dimension() {
        let d = solve_dimension(&[1.0 / 3.0; 20]).unwrap().value;
        assert!((d - 2.726833).abs() < 1e-6);
        assert!((d - 20f64.ln() / 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn unequal_ratios() {
        let d = solve_dimension(&[0.5, 0.25, 0.25]).unwrap().value;
        assert!((d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn equal_ratios_closed_form() {
        let d = solve_dimension(&[1.0 / 3.0; 4]).unwrap().value;
        assert!((d - 4f64.ln() / 3f64.ln()).abs() < 1e-12);
        assert!((d - 1.261860).abs() < 1e-6);
    }

    #[test]
    fn degenerate_and_invalid() {
        let s = solve_dimension(&[0.5]).unwrap();
        assert!(s.degenerate && s.value == 0.0);
        assert!(solve_dimension(&[0.5, 1.0]).is_err());
        assert!(solve_dimension(&[]).is_err());
    }

    proptest! {
        #[test]
        fn moran_sum_is_one(ratios in prop::collection::vec(0.01f64..0.99, 2..12)) {
            let d = solve_dimension(&ratios).unwrap().value;
            let s: f64 = ratios.iter().map(|r| r.powf(d)).sum();
            prop_assert!((s - 1.0).abs() < 1e-12, "sum {}", s);
        }
    }
}
