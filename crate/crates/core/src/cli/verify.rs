use clap::ValueEnum;

use crate::curvature::{bound_lemma41, label_components};
use crate::dynamics::{entropy_target, verify_28, verify_integrability_5};
use crate::grid::{rasterize_sites, DistanceField, GridSpec};
use crate::ifs::Ifs;
use crate::nets::{check_identity_31, NetSpec, NetVariant};
use crate::oracles::{cantor_components, cantor_euler, menger_cavity_count};
use crate::shapes::steiner_checks;
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Cantor,
    Menger,
    Steiner,
    Dynamics,
    Nets,
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Suite::Cantor => "cantor",
            Suite::Menger => "menger",
            Suite::Steiner => "steiner",
            Suite::Dynamics => "dynamics",
            Suite::Nets => "nets",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckRow {
    pub check: String,
    pub computed: f64,
    pub expected: f64,
    /// Absolute for integer checks and bounds, relative otherwise.
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRow {
    fn exact(check: String, computed: f64, expected: f64) -> Self {
        Self {
            check,
            computed,
            expected,
            tolerance: 0.0,
            pass: computed == expected,
        }
    }

    fn relative(check: String, computed: f64, expected: f64, tolerance: f64) -> Self {
        Self {
            check,
            computed,
            expected,
            tolerance,
            pass: ((computed - expected) / expected).abs() <= tolerance,
        }
    }
}

pub fn run_suite(suite: Suite, grid_h: Option<f64>, samples: Option<usize>, seed: u64) -> Result<Vec<CheckRow>> {
    match suite {
        Suite::Cantor => cantor(grid_h.unwrap_or(1.0 / 2187.0)),
        Suite::Menger => menger(grid_h.unwrap_or(1.0 / 729.0)),
        Suite::Steiner => {
            let h = grid_h.unwrap_or(1.0 / 512.0);
            let mut rows = Vec::new();
            for c in steiner_checks(h, 2.0 * h)? {
                for (k, (v, e)) in c.computed.iter().zip(&c.expected).enumerate() {
                    rows.push(CheckRow::relative(format!("{} C{k}", c.name), *v, *e, 0.02));
                }
            }
            Ok(rows)
        }
        Suite::Dynamics => dynamics(samples.unwrap_or(1000), seed),
        Suite::Nets => nets(grid_h.unwrap_or(1.0 / 729.0), samples.unwrap_or(1000), seed),
    }
}

fn cantor(h: f64) -> Result<Vec<CheckRow>> {
    let rho = 1.0 / 3.0;
    let ifs = Ifs::cantor_dust(rho)?;
    let grid = GridSpec::octant(ifs.cube(), h, 0.21)?;
    let field = DistanceField::from_sites(&rasterize_sites(&ifs, &grid, 1 << 26)?, false)?;
    let mut rows = Vec::new();
    for eps in [0.20, 0.17, 0.1672, 0.09, 0.0662, 0.0566, 0.03] {
        let counts = label_components(&field.parallel_set(eps)?);
        if let Some(chi) = cantor_euler(rho, eps)? {
            rows.push(CheckRow::exact(format!("chi eps={eps}"), counts.euler as f64, chi as f64));
        }
        if let Some(c) = cantor_components(rho, eps)? {
            rows.push(CheckRow::exact(format!("components eps={eps}"), counts.components as f64, c as f64));
        }
        let bound = bound_lemma41(eps, 2f64.sqrt());
        rows.push(CheckRow {
            check: format!("chi bound eps={eps}"),
            computed: counts.euler as f64,
            expected: bound,
            tolerance: 0.0,
            pass: (counts.euler as f64) <= bound,
        });
    }
    Ok(rows)
}

/// Cavity counts at `ε = 0.18` and `0.17`, the total change, and the change inside the
/// interior removed cube `[1/3, 2/3]³`.
pub fn menger_cavities(h: f64) -> Result<[(u64, u64); 2]> {
    let ifs = Ifs::menger()?;
    let grid = GridSpec::octant(ifs.cube(), h, 0.2)?;
    let field = DistanceField::from_sites(&rasterize_sites(&ifs, &grid, 1 << 28)?, false)?;
    let g = field.grid();
    let mut out = [(0, 0); 2];
    for (slot, eps) in out.iter_mut().zip([0.18, 0.17]) {
        let c = label_components(&field.parallel_set(eps)?);
        let centre = c
            .bounded_background
            .iter()
            .filter(|b| g.center(&g.coords(b.representative)).iter().all(|v| *v > 1.0 / 3.0))
            .map(|b| b.multiplicity)
            .sum();
        *slot = (c.b2, centre);
    }
    Ok(out)
}

fn menger(h: f64) -> Result<Vec<CheckRow>> {
    let [(b18, c18), (b17, c17)] = menger_cavities(h)?;
    let o18 = menger_cavity_count(0.18)?.total as f64;
    let o17 = menger_cavity_count(0.17)?.total as f64;
    Ok(vec![
        CheckRow::exact("cavities eps=0.18".into(), b18 as f64, o18),
        CheckRow::exact("cavities eps=0.17".into(), b17 as f64, o17),
        CheckRow::exact("cavity change 0.18 to 0.17".into(), b17 as f64 - b18 as f64, o17 - o18),
        CheckRow::exact("interior cube cavity change".into(), c17 as f64 - c18 as f64, 1.0),
    ])
}

fn dynamics(samples: usize, seed: u64) -> Result<Vec<CheckRow>> {
    let ifs = Ifs::cantor_dust(1.0 / 3.0)?;
    let b = NetSpec::new(&ifs, NetVariant::Ball, 2.0)?.b;
    let mut rows = Vec::new();
    // the finite-n offset decays like 1/n; at n = 2000 it is near 0.2%
    let n = 2000;
    let (mc, target) = verify_28(&ifs, samples, n, seed, b)?;
    rows.push(CheckRow::relative(format!("birkhoff mean n={n}"), mc.mean, target, 0.01));
    rows.push(CheckRow::relative("entropy target".into(), entropy_target(&ifs), 3f64.ln(), 1e-12));
    let integ = verify_integrability_5(&ifs, samples, seed)?;
    rows.push(CheckRow {
        check: "mean |ln d(x, J^c)| finite".into(),
        computed: integ.mean,
        expected: f64::INFINITY,
        tolerance: 0.0,
        pass: integ.mean.is_finite() && !integ.degenerate_warning(),
    });
    Ok(rows)
}

fn nets(h: f64, samples: usize, seed: u64) -> Result<Vec<CheckRow>> {
    let ifs = Ifs::cantor_dust(1.0 / 3.0)?;
    let net = NetSpec::mass(&ifs, seed)?;
    let grid = GridSpec::covering(ifs.cube(), h, 0.3)?;
    let field = DistanceField::from_sites(&rasterize_sites(&ifs, &grid, 1 << 26)?, true)?;
    let mut rows = Vec::new();
    for k in [1, 2] {
        let c = check_identity_31(&ifs, &field, &net, 0.2, k, samples, seed, &Default::default())?;
        rows.push(CheckRow {
            check: format!("identity k={k} eps=0.2"),
            computed: c.mean,
            expected: c.target,
            tolerance: c.confidence,
            pass: c.passed(),
        });
    }
    Ok(rows)
}
