//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test --release --test acceptance`; pass criterion numbers (`4 12`) to run
//! a subset. A FAIL is reported, not raised: the process fails only when a criterion cannot
//! be evaluated at all.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use fraccurv::cli::menger_cavities;
use fraccurv::curvature::{
    bound_lemma41, curvature_totals, euler_characteristic, label_components, CurvatureProfile, Method, TotalsOptions,
};
use fraccurv::dynamics::{sample_seed, verify_28, Orbit};
use fraccurv::grid::{rasterize_sites, DistanceField, GridSpec};
use fraccurv::ifs::Ifs;
use fraccurv::nets::{
    boundedness_diagnostic, cantor_windows, check_identity_31, delta_schedule, eps_schedule, global_fractal_curvature,
    local_density, mass_radius_factor, self_similar_extension, DiagnosticOptions, FractalEstimate, LocalOptions,
    NetSpec, NetVariant,
};
use fraccurv::oracles::{cantor_components, cantor_critical_values, cantor_euler, menger_critical_values};
use fraccurv::shapes::{point_field, scaled, steiner_checks};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn cantor() -> Ifs {
    Ifs::cantor_dust(1.0 / 3.0).unwrap()
}

fn field(ifs: &Ifs, grid: &GridSpec) -> DistanceField {
    DistanceField::from_sites(&rasterize_sites(ifs, grid, 1 << 28).unwrap(), false).unwrap()
}

fn c1_euler_table() -> Outcome {
    let ifs = cantor();
    let f = field(&ifs, &GridSpec::octant(ifs.cube(), 1.0 / 2187.0, 0.21).unwrap());
    let table = [(0.20, 0), (0.17, -4), (0.1672, -12), (0.0662, 0), (0.0566, -16)];
    let mut pass = true;
    let mut parts = Vec::new();
    let mut slowest: f64 = 0.0;
    for (eps, want) in table {
        let t = Instant::now();
        let chi = euler_characteristic(&f.parallel_set(eps).unwrap());
        slowest = slowest.max(t.elapsed().as_secs_f64());
        let oracle = cantor_euler(1.0 / 3.0, eps).unwrap();
        pass &= chi == want && oracle == Some(want);
        parts.push(format!("{eps}:{chi}/{want}"));
    }
    pass &= slowest <= 120.0;
    outcome(pass, format!("grid/oracle χ {}; slowest ε {slowest:.2}s", parts.join(" ")))
}

fn c2_components() -> Outcome {
    let ifs = cantor();
    let f = field(&ifs, &GridSpec::octant(ifs.cube(), 1.0 / 2187.0, 0.1).unwrap());
    let mut pass = true;
    let mut parts = Vec::new();
    for (eps, want) in [(0.09, 4u64), (0.03, 16)] {
        let got = label_components(&f.parallel_set(eps).unwrap()).components;
        pass &= got == want && cantor_components(1.0 / 3.0, eps).unwrap() == Some(want);
        parts.push(format!("ε={eps}: {got} (want {want})"));
    }
    outcome(pass, parts.join("; "))
}

fn c3_menger_cavities() -> Outcome {
    let t = Instant::now();
    let [(b18, c18), (b17, c17)] = menger_cavities(1.0 / 729.0).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let total = b17 as i64 - b18 as i64;
    let centre = c17 as i64 - c18 as i64;
    outcome(
        total == 7 && centre == 1 && secs <= 900.0,
        format!(
            "cavities {b18} at 0.18, {b17} at 0.17: change {total} (literal 7); interior cube {c18} -> {c17}: change {centre} (required 1); {secs:.0}s"
        ),
    )
}

/// Cubical rows of the Cantor dust on `[1/6, 1]` at `h = 1/729`, extended below `1/6` by
/// the scaling identity down to `floor`.
fn cantor_profile(floor: f64) -> CurvatureProfile {
    let ifs = cantor();
    let f = field(&ifs, &GridSpec::covering(ifs.cube(), 1.0 / 729.0, 1.02).unwrap());
    let critical = cantor_critical_values(1.0 / 3.0, 12, 6).unwrap().values();
    let width = 2.0 * (f.grid().h + f.site_error());
    let eps = eps_schedule(1.0 / 6.0, 1.0, 32, &critical, width, 8).unwrap();
    let opts = TotalsOptions {
        critical,
        skip_topology: true,
        ..Default::default()
    };
    let mut p = CurvatureProfile::new(2);
    for e in eps {
        p.rows.push(curvature_totals(&f, e, Method::Cubical, &opts).unwrap());
    }
    self_similar_extension(&p, &ifs, floor).unwrap()
}

fn global(profile: &CurvatureProfile, k: usize, floor: f64) -> FractalEstimate {
    let deltas = delta_schedule(1.0, floor, 0.8).unwrap();
    global_fractal_curvature(profile, cantor().dimension(), k, &deltas, 1.0).unwrap()
}

fn c4_ratio(profile: &CurvatureProfile) -> Outcome {
    let target = 2.0 - 4f64.ln() / 3f64.ln();
    let c1 = global(profile, 1, 1e-3);
    let c2 = global(profile, 2, 1e-3);
    let ratio = c1.extrapolated / c2.extrapolated;
    let deep = global(profile, 1, 1e-30).extrapolated / global(profile, 2, 1e-30).extrapolated;
    outcome(
        ((ratio - target) / target).abs() <= 0.05,
        format!(
            "Ĉ1 {:.4} (band {:.3}) / Ĉ2 {:.4} (band {:.3}) = {ratio:.4} vs {target:.6}; at δ=1e-30 {deep:.4}; 2·ratio {:.4}",
            c1.extrapolated,
            c1.band,
            c2.extrapolated,
            c2.band,
            2.0 * ratio
        ),
    )
}

fn c5_ergodic() -> Outcome {
    let ifs = cantor();
    let b = NetSpec::new(&ifs, NetVariant::Ball, 2.0).unwrap().b;
    let (mc, target) = verify_28(&ifs, 1000, 200, 11, b).unwrap();
    let rel = (mc.mean - target) / target;
    let (deep, _) = verify_28(&ifs, 1000, 2000, 11, b).unwrap();
    outcome(
        rel.abs() <= 0.01,
        format!(
            "mean {:.6} ± {:.6} vs ln 3 = {target:.6}: {:+.2}% at n=200 (b={b}); n=2000 gives {:+.3}%",
            mc.mean,
            mc.std_error,
            100.0 * rel,
            100.0 * (deep.mean - target) / target
        ),
    )
}

fn c6_identity() -> Outcome {
    let ifs = cantor();
    let net = NetSpec::mass(&ifs, 1).unwrap();
    let grid = GridSpec::covering(ifs.cube(), 1.0 / 729.0, 0.3).unwrap();
    let f = DistanceField::from_sites(&rasterize_sites(&ifs, &grid, 1 << 26).unwrap(), true).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for k in [1, 2] {
        let c = check_identity_31(&ifs, &f, &net, 0.2, k, 1000, 5, &TotalsOptions::default()).unwrap();
        pass &= c.passed();
        parts.push(format!(
            "k={k}: {:.5} vs {:.5} ({:+.2}%, 3σ {:.2}%)",
            c.mean,
            c.target,
            100.0 * c.relative_error,
            100.0 * c.confidence
        ));
    }
    outcome(pass, parts.join("; "))
}

fn c7_area_bound() -> Outcome {
    let mut violations = 0;
    let mut probes = 0;
    let mut worst: f64 = 0.0;
    let scenes = [
        (cantor(), 1.0 / 729.0, cantor_critical_values(1.0 / 3.0, 8, 6).unwrap().values()),
        (Ifs::menger().unwrap(), 1.0 / 243.0, menger_critical_values(4, 6).values()),
    ];
    for (ifs, h, critical) in scenes {
        let d = ifs.dim() as f64;
        let f = field(&ifs, &GridSpec::covering(ifs.cube(), h, 0.35).unwrap());
        let budget = h + f.site_error();
        let mut r = 8.0 * budget;
        while r < 0.33 {
            if critical.iter().all(|c| (c - r).abs() > 2.0 * budget) {
                let area = f.boundary_area(r, h).unwrap();
                let bound = d / r * f.volume(r).unwrap();
                // the boundary estimate is accurate to a few percent at these resolutions
                let tolerance = 0.05 * bound;
                probes += 1;
                worst = worst.max(area / bound);
                if area > bound + tolerance {
                    violations += 1;
                }
            }
            r *= 1.15;
        }
    }
    outcome(
        violations == 0,
        format!("{violations} violations in {probes} regular radii; largest area/bound {worst:.3}"),
    )
}

fn c8_euler_bound() -> Outcome {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
    let example = bound_lemma41(1.0 / 6.0, 2f64.sqrt());
    let mut violations = 0;
    let mut probes = 0;
    while probes < 50 {
        let rho: f64 = rng.gen_range(0.2..0.45);
        let ifs = Ifs::cantor_dust(rho).unwrap();
        let h = 1.0 / 243.0;
        let f = field(&ifs, &GridSpec::covering(ifs.cube(), h, 0.5).unwrap());
        let floor = 8.0 * (h + f.site_error());
        let eps: f64 = (floor.ln() + rng.gen::<f64>() * (0.45 / floor).ln()).exp();
        let critical = cantor_critical_values(rho, 10, 6).unwrap();
        if critical.distance(eps) <= 2.0 * (h + f.site_error()) {
            continue;
        }
        probes += 1;
        let chi = euler_characteristic(&f.parallel_set(eps).unwrap()) as f64;
        if chi > bound_lemma41(eps, ifs.cube().diameter()) {
            violations += 1;
        }
    }
    outcome(
        violations == 0 && (example - 54.97).abs() < 0.01,
        format!("{violations} violations in {probes} (ρ, ε) probes; bound at ε=1/6, |F|=√2: {example:.2}"),
    )
}

fn c9_steiner() -> Outcome {
    let checks = steiner_checks(1.0 / 512.0, 1.0 / 256.0).unwrap();
    let pass = checks.iter().all(|c| c.max_relative_error() <= 0.02);
    let parts: Vec<String> = checks
        .iter()
        .map(|c| {
            let v: Vec<String> = c.computed.iter().map(|x| format!("{x:.4}")).collect();
            format!("{} ({}) max err {:.2}%", c.name, v.join(", "), 100.0 * c.max_relative_error())
        })
        .collect();
    outcome(pass, parts.join("; "))
}

fn c10_homogeneity() -> Outcome {
    let h = 1.0 / 729.0;
    let opts = TotalsOptions {
        skip_topology: true,
        ..Default::default()
    };
    let base = cantor();
    // ε = 0.3 is regular and far from every critical radius
    let eps = 0.3;
    let dust = |lam: f64| {
        let ifs = scaled(&base, lam).unwrap();
        let f = field(&ifs, &GridSpec::covering(ifs.cube(), h, 1.1 * eps * lam).unwrap());
        curvature_totals(&f, eps * lam, Method::Steiner, &opts).unwrap().c
    };
    let r = 0.4;
    let disk = |lam: f64| {
        let f = point_field(2, h, r * lam).unwrap();
        curvature_totals(&f, r * lam, Method::Steiner, &opts).unwrap().c
    };
    let mut worst: f64 = 0.0;
    for (name, run) in [("dust", &dust as &dyn Fn(f64) -> Vec<f64>), ("disk", &disk)] {
        let c = run(1.0);
        for lam in [2.0, 3.0] {
            let s = run(lam);
            for k in 0..3 {
                let dev = (s[k] / (c[k] * lam.powi(k as i32)) - 1.0).abs();
                if dev > worst {
                    worst = dev;
                }
                if dev > 0.02 {
                    eprintln!("  {name} λ={lam} k={k}: deviation {:.2}%", 100.0 * dev);
                }
            }
        }
    }
    outcome(worst <= 0.02, format!("largest |C_k(λ)/(λ^k C_k) − 1| = {:.2}% over dust ε=0.3 and disk r=0.4, λ ∈ {{2, 3}}", 100.0 * worst))
}

fn c11_boundedness() -> Outcome {
    let ifs = cantor();
    let windows = cantor_windows(1.0 / 3.0, 0, 3);
    let rep = boundedness_diagnostic(&ifs, 0, &windows, &[1e-2, 1e-3], &DiagnosticOptions::default()).unwrap();
    let k2 = rep.window("k2").unwrap().sup;
    let k3 = rep.window("k3").unwrap().sup;
    let a2 = rep.average_at(1e-2).unwrap();
    let a3 = rep.average_at(1e-3).unwrap();
    let sups: Vec<String> = rep.windows.iter().map(|w| format!("{} {:.3}", w.label, w.sup)).collect();
    outcome(
        k3 >= 1.8 * k2 && a3 <= 2.0 * a2 && a2 <= 2.0 * a3,
        format!("sups {}; k3/k2 {:.3}; log-average {a2:.4} (δ=1e-2) {a3:.4} (δ=1e-3)", sups.join(", "), k3 / k2),
    )
}

fn c12_local_global(profile: &CurvatureProfile) -> Outcome {
    let ifs = cantor();
    let floor = 1e-100;
    let g = global(profile, 2, floor);
    let target = g.extrapolated / g.m;
    let net = NetSpec::mass(&ifs, 1).unwrap();
    let opts = LocalOptions {
        per_decade: 8,
        qmc_points: 256,
        radius_factor: mass_radius_factor(&ifs, 1),
        ..Default::default()
    };
    let deltas = delta_schedule(net.eps0, floor, 0.8).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for i in 0..5 {
        let mut x = Orbit::random(&ifs, sample_seed(12, i));
        let est = local_density(&ifs, None, &net, &mut x, 2, &deltas, &opts).unwrap();
        let allowed = (0.1 * target).max(est.band + g.band);
        let ok = (est.extrapolated - target).abs() <= allowed;
        pass &= ok;
        parts.push(format!("{:.3}{}", est.extrapolated, if ok { "" } else { "*" }));
    }
    outcome(
        pass,
        format!("global Ĉ2/m {target:.4} (band {:.3}, δ→1e-100); local [{}]", g.band, parts.join(", ")),
    )
}

fn main() {
    let wanted: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let run = |id: u32| wanted.is_empty() || wanted.contains(&id);
    let profile = if run(4) || run(12) { Some(cantor_profile(1e-100)) } else { None };
    let p = profile.as_ref();
    let criteria: Vec<(u32, &str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        (1, "Cantor dust Euler table", Box::new(c1_euler_table)),
        (2, "component counts", Box::new(c2_components)),
        (3, "Menger cavity birth", Box::new(c3_menger_cavities)),
        (4, "fractal curvature ratio", Box::new(move || c4_ratio(p.unwrap()))),
        (5, "ergodic limit at n = 200", Box::new(c5_ergodic)),
        (6, "mass-net identity", Box::new(c6_identity)),
        (7, "boundary area bound", Box::new(c7_area_bound)),
        (8, "Euler characteristic bound", Box::new(c8_euler_bound)),
        (9, "Steiner extractor", Box::new(c9_steiner)),
        (10, "homogeneity", Box::new(c10_homogeneity)),
        (11, "boundedness contrast", Box::new(c11_boundedness)),
        (12, "local density equals global", Box::new(move || c12_local_global(p.unwrap()))),
    ];
    let mut errors = 0;
    let mut passed = 0;
    let mut total = 0;
    for (id, name, f) in &criteria {
        if !run(*id) {
            continue;
        }
        total += 1;
        let t = Instant::now();
        match catch_unwind(AssertUnwindSafe(f)) {
            Ok(o) => {
                passed += o.pass as usize;
                println!(
                    "{} criterion {id:>2} {name}: {} [{:.1}s]",
                    if o.pass { "PASS" } else { "FAIL" },
                    o.detail,
                    t.elapsed().as_secs_f64()
                );
            }
            Err(_) => {
                errors += 1;
                println!("FAIL criterion {id:>2} {name}: could not be evaluated");
            }
        }
    }
    println!("acceptance: {passed}/{total} PASS");
    if errors > 0 {
        std::process::exit(1);
    }
}
