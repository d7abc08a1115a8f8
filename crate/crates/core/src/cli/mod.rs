//! Command-line front end.
//!
//! Every CSV starts with a `#` comment carrying the scene hash, grid hash and seed. Exit codes:
//! 0 ok, 1 usage or parse error, 2 numerical-quality failure, 3 invariant violation.

mod svg;
mod verify;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::curvature::{curvature_totals, CurvatureProfile, Method, TotalsOptions, RESIDUAL_LIMIT};
use crate::dynamics::{verify_28, Orbit};
use crate::grid::{cache_key, load_or_compute, rasterize_points, rasterize_sites, DistanceField, GridSpec, DEFAULT_SITE_BUDGET};
use crate::ifs::{parse_scene, Ifs};
use crate::nets::{
    delta_schedule, eps_schedule, global_fractal_curvature, local_density, mass_radius_factor, self_similar_extension,
    FractalEstimate, LocalOptions, NetSpec, NetVariant,
};
use crate::oracles::{cantor_critical_values, menger_critical_values};
use crate::{Error, Result};

pub use verify::{menger_cavities, run_suite, CheckRow, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_QUALITY: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "fraccurv", version, about = "Curvature measures of parallel sets of self-similar fractals")]
pub struct Cli {
    /// Cap on worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the similarity dimension D.
    Dimension(SceneArgs),
    /// Mark the sites of F on a grid and report their count and error.
    Rasterize {
        #[command(flatten)]
        scene: SceneArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Curvature totals C_0..C_d over an ε schedule.
    Profile {
        #[command(flatten)]
        scene: SceneArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        eps: EpsArgs,
        #[arg(long, value_enum, default_value_t = MethodArg::Both)]
        method: MethodArg,
        #[command(flatten)]
        out: OutArgs,
        /// Exit 2 when a Steiner fit away from critical radii exceeds the residual limit.
        #[arg(long)]
        strict: bool,
    },
    /// Rescaled log-averaged fractal curvatures.
    Fractal {
        #[command(flatten)]
        scene: SceneArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        eps: EpsArgs,
        #[command(flatten)]
        delta: DeltaArgs,
        /// Curvature indices, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = [0usize, 1, 2])]
        k: Vec<usize>,
        /// Extend rows below the first-level separation by the scaling identity.
        #[arg(long)]
        extend: bool,
        /// Exit 2 when an oscillation band exceeds this value.
        #[arg(long)]
        max_band: Option<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Local fractal curvature densities at μ-random points.
    LocalDensity {
        #[command(flatten)]
        scene: SceneArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        net: NetArgs,
        #[command(flatten)]
        delta: DeltaArgs,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 5)]
        points: usize,
        /// ε samples per decade of the local integral.
        #[arg(long, default_value_t = 8)]
        eps_per_decade: usize,
        /// Quasi-Monte Carlo points per volume for k = d.
        #[arg(long, default_value_t = 256)]
        qmc: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Mean of |ln δ(x, n)|/n over μ-random points against the entropy limit.
    Birkhoff {
        #[command(flatten)]
        scene: SceneArgs,
        #[command(flatten)]
        net: NetArgs,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Oracle and invariant suites; exit 0 iff every row passes.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Grid spacing override.
        #[arg(long)]
        grid_h: Option<f64>,
        /// Monte Carlo sample count override.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Builtin {
    CantorDust,
    Menger,
    UnitSquare,
    UnitCube,
    /// A single point in the plane; its parallel sets are disks.
    Disk,
    /// A single point in space; its parallel sets are balls.
    Ball,
}

#[derive(Args, Clone, Debug)]
pub struct SceneArgs {
    /// Scene file (JSON).
    #[arg(long, conflicts_with = "builtin", required_unless_present = "builtin")]
    pub scene: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub builtin: Option<Builtin>,
    /// Contraction ratio of the Cantor dust.
    #[arg(long, default_value_t = 1.0 / 3.0)]
    pub rho: f64,
    /// Mass parameter m replacing H^D(F).
    #[arg(long)]
    pub mass_m: Option<f64>,
}

#[derive(Args, Clone, Debug)]
pub struct GridArgs {
    #[arg(long, default_value_t = 1.0 / 243.0)]
    pub grid_h: f64,
    /// Largest parallel radius the grid supports; defaults to the largest requested radius.
    #[arg(long)]
    pub margin: Option<f64>,
    /// Directory of cached distance fields.
    #[arg(long)]
    pub cache: Option<PathBuf>,
}

#[derive(Args, Clone, Debug)]
pub struct EpsArgs {
    /// Defaults to the resolution floor 8·(h + site error).
    #[arg(long)]
    pub eps_min: Option<f64>,
    /// Defaults to ε₀ = m^{1/D}.
    #[arg(long)]
    pub eps_max: Option<f64>,
    #[arg(long, default_value_t = 32)]
    pub eps_per_decade: usize,
    /// Extra density inside critical windows.
    #[arg(long, default_value_t = 8)]
    pub refine: usize,
}

#[derive(Args, Clone, Debug)]
pub struct DeltaArgs {
    #[arg(long, default_value_t = 0.8)]
    pub delta_ratio: f64,
    /// Smallest δ; defaults to the resolution floor (or 1e-30 with --extend and for local densities).
    #[arg(long)]
    pub delta_min: Option<f64>,
}

#[derive(Args, Clone, Debug)]
pub struct NetArgs {
    #[arg(long, value_enum, default_value_t = NetArg::Mass)]
    pub net: NetArg,
    /// Net constant; the mass net defaults to twice the empirical radius factor.
    #[arg(long)]
    pub a: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum NetArg {
    Ball,
    Footpoint,
    Mass,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Cubical,
    Steiner,
    Both,
}

#[derive(Args, Clone, Debug)]
pub struct OutArgs {
    /// Output directory; CSV goes to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also render an SVG plot (profile only).
    #[arg(long)]
    pub svg: bool,
}

/// A loaded scene: an IFS, or a single point whose parallel sets are round.
pub enum Scene {
    Ifs(Ifs),
    Point(usize),
}

impl Scene {
    pub fn load(args: &SceneArgs) -> Result<Self> {
        let scene = match (&args.scene, args.builtin) {
            (Some(path), _) => Scene::Ifs(parse_scene(&std::fs::read_to_string(path)?)?),
            (None, Some(Builtin::CantorDust)) => Scene::Ifs(Ifs::cantor_dust(args.rho)?),
            (None, Some(Builtin::Menger)) => Scene::Ifs(Ifs::menger()?),
            (None, Some(Builtin::UnitSquare)) => Scene::Ifs(Ifs::unit_cube(2)?),
            (None, Some(Builtin::UnitCube)) => Scene::Ifs(Ifs::unit_cube(3)?),
            (None, Some(Builtin::Disk)) => Scene::Point(2),
            (None, Some(Builtin::Ball)) => Scene::Point(3),
            (None, None) => return Err(Error::InvalidInput("give --scene or --builtin".into())),
        };
        match (scene, args.mass_m) {
            (Scene::Ifs(ifs), Some(m)) => Ok(Scene::Ifs(ifs.with_mass(m)?)),
            (s, _) => Ok(s),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Scene::Ifs(ifs) => ifs.dim(),
            Scene::Point(d) => *d,
        }
    }

    pub fn ifs(&self) -> Result<&Ifs> {
        match self {
            Scene::Ifs(ifs) => Ok(ifs),
            Scene::Point(_) => Err(Error::InvalidInput("this command needs a self-similar scene".into())),
        }
    }

    fn fingerprint(&self) -> String {
        match self {
            Scene::Ifs(ifs) => ifs.fingerprint(),
            Scene::Point(d) => format!("point;dim={d}"),
        }
    }

    /// Known critical radii of the builtin fractals.
    fn critical(&self, args: &SceneArgs) -> Result<Vec<f64>> {
        Ok(match args.builtin {
            Some(Builtin::CantorDust) if args.scene.is_none() && args.rho < 0.5 => {
                cantor_critical_values(args.rho, 12, 6)?.values()
            }
            Some(Builtin::Menger) if args.scene.is_none() => menger_critical_values(6, 6).values(),
            _ => Vec::new(),
        })
    }

    pub fn grid(&self, h: f64, margin: f64) -> Result<GridSpec> {
        match self {
            Scene::Ifs(ifs) => GridSpec::covering(ifs.cube(), h, margin),
            Scene::Point(d) => GridSpec::around_point(&vec![0.0; *d], margin + 2.0 * h, h, margin),
        }
    }

    pub fn field(&self, grid: &GridSpec, with_feet: bool, cache: Option<&Path>) -> Result<DistanceField> {
        let compute = || -> Result<DistanceField> {
            let sites = match self {
                Scene::Ifs(ifs) => rasterize_sites(ifs, grid, DEFAULT_SITE_BUDGET)?,
                Scene::Point(d) => rasterize_points(&[vec![0.0; *d]], grid)?,
            };
            DistanceField::from_sites(&sites, with_feet)
        };
        match cache {
            Some(dir) => {
                let key = cache_key(&format!("{};feet={with_feet}", self.fingerprint()), grid);
                load_or_compute(dir, &key, compute)
            }
            None => compute(),
        }
    }
}

fn short_hash(s: &str) -> String {
    hex::encode(&Sha256::digest(s.as_bytes())[..8])
}

/// `# fraccurv <command> scene=<hash> grid=<hash> seed=<seed>`.
pub fn provenance(command: &str, scene: &str, grid: Option<&GridSpec>, seed: Option<u64>) -> String {
    format!(
        "# fraccurv {command} scene={} grid={} seed={}",
        short_hash(scene),
        grid.map(|g| short_hash(&g.fingerprint())).unwrap_or_else(|| "none".into()),
        seed.map(|s| s.to_string()).unwrap_or_else(|| "none".into()),
    )
}

/// Writer for `name` inside the output directory, or stdout.
fn sink(out: &OutArgs, name: &str) -> Result<Box<dyn Write>> {
    match &out.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            Ok(Box::new(BufWriter::new(File::create(dir.join(name))?)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout()))),
    }
}

fn floor_of(field: &DistanceField) -> f64 {
    8.0 * (field.grid().h + field.site_error())
}

fn check_floor(v: f64, floor: f64) -> Result<()> {
    if v < floor * (1.0 - 1e-9) {
        return Err(Error::InvalidInput(format!(
            "radius {v} lies below the resolution floor 8·(h + site error) = {floor:.4e}"
        )));
    }
    Ok(())
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidInput(_) | Error::Scene(_) | Error::Json(_) | Error::Io(_) | Error::Cache(_) => EXIT_USAGE,
        Error::Degenerate(_)
        | Error::OutsideMargin { .. }
        | Error::SiteBudget { .. }
        | Error::EmptySites
        | Error::ProfileGap(_) => EXIT_QUALITY,
    }
}

/// Parses the arguments and runs the command; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Some(n) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run(command: Command) -> Result<i32> {
    match command {
        Command::Dimension(scene) => cmd_dimension(&scene),
        Command::Rasterize { scene, grid, out } => cmd_rasterize(&scene, &grid, &out),
        Command::Profile {
            scene,
            grid,
            eps,
            method,
            out,
            strict,
        } => cmd_profile(&scene, &grid, &eps, method, &out, strict),
        Command::Fractal {
            scene,
            grid,
            eps,
            delta,
            k,
            extend,
            max_band,
            out,
        } => cmd_fractal(&scene, &grid, &eps, &delta, &k, extend, max_band, &out),
        Command::LocalDensity {
            scene,
            grid,
            net,
            delta,
            k,
            points,
            eps_per_decade,
            qmc,
            seed,
            out,
        } => cmd_local_density(&scene, &grid, &net, &delta, k, points, eps_per_decade, qmc, seed, &out),
        Command::Birkhoff {
            scene,
            net,
            samples,
            n,
            seed,
            out,
        } => cmd_birkhoff(&scene, &net, samples, n, seed, &out),
        Command::Verify {
            suite,
            grid_h,
            samples,
            seed,
            out,
        } => cmd_verify(suite, grid_h, samples, seed, &out),
    }
}

fn cmd_dimension(args: &SceneArgs) -> Result<i32> {
    let scene = Scene::load(args)?;
    let d = match &scene {
        Scene::Ifs(ifs) => ifs.dimension(),
        Scene::Point(_) => 0.0,
    };
    println!("{d:.6}");
    if let Scene::Ifs(ifs) = &scene {
        if ifs.overlap_warning() {
            eprintln!("warning: first-level boxes overlap; the open set condition is not verified");
        }
    }
    Ok(EXIT_OK)
}

fn cmd_rasterize(args: &SceneArgs, grid_args: &GridArgs, out: &OutArgs) -> Result<i32> {
    let scene = Scene::load(args)?;
    let grid = scene.grid(grid_args.grid_h, grid_args.margin.unwrap_or(0.25))?;
    let sites = match &scene {
        Scene::Ifs(ifs) => rasterize_sites(ifs, &grid, DEFAULT_SITE_BUDGET)?,
        Scene::Point(d) => rasterize_points(&[vec![0.0; *d]], &grid)?,
    };
    eprintln!(
        "sites {} site_error {:.6e} depth {} cells {}",
        sites.count(),
        sites.site_error,
        sites.depth,
        grid.len()
    );
    if let Some(dir) = &grid_args.cache {
        scene.field(&grid, false, Some(dir))?;
    }
    let mut w = sink(out, "sites.csv")?;
    writeln!(w, "{}", provenance("rasterize", &scene.fingerprint(), Some(&grid), None))?;
    let axes: Vec<String> = (0..grid.dim()).map(|i| format!("x{i}")).collect();
    writeln!(w, "index,{}", axes.join(","))?;
    for (i, p) in sites.points().iter().enumerate() {
        let cs: Vec<String> = p.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{i},{}", cs.join(","))?;
    }
    w.flush()?;
    Ok(EXIT_OK)
}

fn default_eps_max(scene: &Scene) -> f64 {
    match scene {
        Scene::Ifs(ifs) => ifs.eps0(),
        Scene::Point(_) => 1.0,
    }
}

/// Rows for every `ε` and method, computed in parallel.
fn profile_rows(field: &DistanceField, eps: &[f64], methods: &[Method], opts: &TotalsOptions) -> Result<CurvatureProfile> {
    let jobs: Vec<(f64, Method)> = eps.iter().flat_map(|&e| methods.iter().map(move |&m| (e, m))).collect();
    let rows = jobs
        .par_iter()
        .map(|&(e, m)| curvature_totals(field, e, m, opts))
        .collect::<Result<Vec<_>>>()?;
    let mut p = CurvatureProfile::new(field.grid().dim());
    p.rows = rows;
    Ok(p)
}

fn cmd_profile(
    args: &SceneArgs,
    grid_args: &GridArgs,
    eps_args: &EpsArgs,
    method: MethodArg,
    out: &OutArgs,
    strict: bool,
) -> Result<i32> {
    let scene = Scene::load(args)?;
    let eps_max = eps_args.eps_max.unwrap_or_else(|| default_eps_max(&scene));
    let grid = scene.grid(grid_args.grid_h, grid_args.margin.unwrap_or(1.02 * eps_max))?;
    let field = scene.field(&grid, false, grid_args.cache.as_deref())?;
    let floor = floor_of(&field);
    let eps_min = eps_args.eps_min.unwrap_or(floor);
    check_floor(eps_min, floor)?;
    let critical = scene.critical(args)?;
    let width = 2.0 * (grid.h + field.site_error());
    let eps = if eps_min >= eps_max {
        vec![eps_max]
    } else {
        eps_schedule(eps_min, eps_max, eps_args.eps_per_decade, &critical, width, eps_args.refine)?
    };
    let methods = match method {
        MethodArg::Cubical => vec![Method::Cubical],
        MethodArg::Steiner => vec![Method::Steiner],
        MethodArg::Both => vec![Method::Cubical, Method::Steiner],
    };
    let opts = TotalsOptions {
        critical,
        ..Default::default()
    };
    let profile = profile_rows(&field, &eps, &methods, &opts)?;
    let mut w = sink(out, "profile.csv")?;
    writeln!(w, "{}", provenance("profile", &scene.fingerprint(), Some(&grid), None))?;
    profile.write_csv(&mut w)?;
    w.flush()?;
    if out.svg {
        let dir = out.out.clone().unwrap_or_else(|| PathBuf::from("."));
        std::fs::create_dir_all(&dir)?;
        std::fs::write(dir.join("profile.svg"), svg::profile_svg(&profile))?;
    }
    let bad = profile
        .rows
        .iter()
        .filter(|r| r.method == Method::Steiner && !r.near_critical && !(r.residual <= RESIDUAL_LIMIT))
        .count();
    if bad > 0 {
        eprintln!("warning: {bad} Steiner row(s) exceed the residual limit {RESIDUAL_LIMIT}");
        if strict {
            return Ok(EXIT_QUALITY);
        }
    }
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn cmd_fractal(
    args: &SceneArgs,
    grid_args: &GridArgs,
    eps_args: &EpsArgs,
    delta_args: &DeltaArgs,
    ks: &[usize],
    extend: bool,
    max_band: Option<f64>,
    out: &OutArgs,
) -> Result<i32> {
    let scene = Scene::load(args)?;
    let ifs = scene.ifs()?;
    let d = ifs.dim();
    if let Some(&k) = ks.iter().find(|&&k| k > d) {
        return Err(Error::InvalidInput(format!("k = {k} exceeds the dimension {d}")));
    }
    let eps0 = ifs.eps0();
    let eps_max = eps_args.eps_max.unwrap_or(eps0);
    let grid = scene.grid(grid_args.grid_h, grid_args.margin.unwrap_or(1.02 * eps_max))?;
    let field = scene.field(&grid, false, grid_args.cache.as_deref())?;
    let floor = floor_of(&field);
    let critical = scene.critical(args)?;
    let width = 2.0 * (grid.h + field.site_error());
    let eps_min = match eps_args.eps_min {
        Some(e) => e,
        None if extend => 0.5 * ifs.first_level_gap(),
        None => floor,
    };
    check_floor(eps_min, floor)?;
    let eps = eps_schedule(eps_min, eps_max, eps_args.eps_per_decade, &critical, width, eps_args.refine)?;
    // C_1 in three dimensions comes from the Steiner fit only
    let mut methods = vec![Method::Cubical];
    if d == 3 && ks.contains(&1) {
        methods.push(Method::Steiner);
    }
    let opts = TotalsOptions {
        critical,
        ..Default::default()
    };
    let mut profile = profile_rows(&field, &eps, &methods, &opts)?;
    let delta_min = delta_args.delta_min.unwrap_or(if extend { 1e-30 } else { floor });
    if extend {
        profile = self_similar_extension(&profile, ifs, delta_min)?;
    } else {
        check_floor(delta_min, floor)?;
    }
    let deltas = delta_schedule(eps0, delta_min, delta_args.delta_ratio)?;
    let header = provenance("fractal", &scene.fingerprint(), Some(&grid), None);
    let mut estimates: Vec<FractalEstimate> = Vec::new();
    for &k in ks {
        let est = global_fractal_curvature(&profile, ifs.dimension(), k, &deltas, eps0)?;
        if let Some(dir) = &out.out {
            std::fs::create_dir_all(dir)?;
            let mut w = BufWriter::new(File::create(dir.join(format!("fractal_k{k}.csv")))?);
            writeln!(w, "{header}")?;
            est.write_csv(&mut w)?;
            w.flush()?;
        }
        estimates.push(est);
    }
    let find = |k: usize| estimates.iter().find(|e| e.k == k);
    let ratio = match (find(d - 1), find(d)) {
        (Some(a), Some(b)) => Some(serde_json::json!({
            "computed": a.extrapolated / b.extrapolated,
            "expected": d as f64 - ifs.dimension(),
        })),
        _ => None,
    };
    let summary = serde_json::json!({
        "estimates": estimates.iter().map(FractalEstimate::summary_json).collect::<Vec<_>>(),
        "ratio": ratio,
    });
    let mut w = sink(out, "fractal.json")?;
    if out.out.is_none() {
        writeln!(w, "{header}")?;
    }
    serde_json::to_writer_pretty(&mut w, &summary)?;
    writeln!(w)?;
    w.flush()?;
    if let Some(limit) = max_band {
        if estimates.iter().any(|e| !(e.band <= limit)) {
            eprintln!("error: an oscillation band exceeds --max-band {limit}");
            return Ok(EXIT_QUALITY);
        }
    }
    Ok(EXIT_OK)
}

fn net_spec(ifs: &Ifs, args: &NetArgs, seed: u64) -> Result<NetSpec> {
    let variant = match args.net {
        NetArg::Ball => NetVariant::Ball,
        NetArg::Footpoint => NetVariant::Footpoint,
        NetArg::Mass => NetVariant::Mass,
    };
    match (variant, args.a) {
        (NetVariant::Mass, None) => NetSpec::mass(ifs, seed),
        (v, a) => NetSpec::new(ifs, v, a.unwrap_or(2.0)),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_local_density(
    args: &SceneArgs,
    grid_args: &GridArgs,
    net_args: &NetArgs,
    delta_args: &DeltaArgs,
    k: usize,
    points: usize,
    per_decade: usize,
    qmc: usize,
    seed: u64,
    out: &OutArgs,
) -> Result<i32> {
    let scene = Scene::load(args)?;
    let ifs = scene.ifs()?;
    let d = ifs.dim();
    let net = net_spec(ifs, net_args, seed)?;
    let (grid, field) = if k < d {
        let grid = scene.grid(grid_args.grid_h, grid_args.margin.unwrap_or(0.6 * ifs.cube().diameter()))?;
        let field = scene.field(&grid, true, grid_args.cache.as_deref())?;
        (Some(grid), Some(field))
    } else {
        (None, None)
    };
    let delta_min = delta_args.delta_min.unwrap_or(1e-30);
    let deltas = delta_schedule(net.eps0, delta_min, delta_args.delta_ratio)?;
    let opts = LocalOptions {
        per_decade,
        qmc_points: qmc,
        radius_factor: mass_radius_factor(ifs, seed),
        ..Default::default()
    };
    let mut w = sink(out, "local_density.csv")?;
    writeln!(w, "{}", provenance("local-density", &scene.fingerprint(), grid.as_ref(), Some(seed)))?;
    let axes: Vec<String> = (0..d).map(|i| format!("x{i}")).collect();
    writeln!(w, "point_index,{},k,extrapolated,band", axes.join(","))?;
    for i in 0..points {
        let mut x = Orbit::random(ifs, crate::dynamics::sample_seed(seed, i));
        let (p, _) = x.point(0);
        let est = local_density(ifs, field.as_ref(), &net, &mut x, k, &deltas, &opts)?;
        let cs: Vec<String> = p.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{i},{},{k},{},{}", cs.join(","), est.extrapolated, est.band)?;
    }
    w.flush()?;
    Ok(EXIT_OK)
}

fn cmd_birkhoff(args: &SceneArgs, net_args: &NetArgs, samples: usize, n: usize, seed: u64, out: &OutArgs) -> Result<i32> {
    let scene = Scene::load(args)?;
    let ifs = scene.ifs()?;
    let net = net_spec(ifs, net_args, seed)?;
    let (mc, target) = verify_28(ifs, samples, n, seed, net.b)?;
    let mut w = sink(out, "birkhoff.csv")?;
    writeln!(w, "{}", provenance("birkhoff", &scene.fingerprint(), None, Some(seed)))?;
    writeln!(w, "sample_index,value")?;
    for (i, v) in mc.values.iter().enumerate() {
        writeln!(w, "{i},{v}")?;
    }
    writeln!(
        w,
        "# summary n={n} b={} mean={} std_error={} target={} relative_error={} degenerate={}",
        net.b,
        mc.mean,
        mc.std_error,
        target,
        (mc.mean - target) / target,
        mc.degenerate
    )?;
    w.flush()?;
    if mc.degenerate_warning() {
        eprintln!("warning: {} of {} samples hit a cylinder boundary", mc.degenerate, samples);
    }
    Ok(EXIT_OK)
}

fn cmd_verify(suite: Suite, grid_h: Option<f64>, samples: Option<usize>, seed: u64, out: &OutArgs) -> Result<i32> {
    let rows = run_suite(suite, grid_h, samples, seed)?;
    let mut w = sink(out, &format!("verify_{}.csv", suite.name()))?;
    writeln!(w, "{}", provenance(&format!("verify {}", suite.name()), suite.name(), None, Some(seed)))?;
    writeln!(w, "check,computed,expected,tolerance,pass")?;
    for r in &rows {
        writeln!(w, "{},{},{},{},{}", r.check, r.computed, r.expected, r.tolerance, r.pass)?;
    }
    w.flush()?;
    let failed = rows.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        eprintln!("{failed} of {} checks failed", rows.len());
        return Ok(EXIT_INVARIANT);
    }
    Ok(EXIT_OK)
}
