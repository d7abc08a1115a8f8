use std::fmt;
use std::io::Write;
use std::str::FromStr;

use super::{label_components, sample_depths, steiner_extract, InnerCollar, DEFAULT_WINDOW};
use crate::grid::DistanceField;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Cubical Euler characteristic, boundary area from the volume derivative, and volume.
    Cubical,
    /// Every curvature from the inner collar polynomial; volume from cell counts.
    Steiner,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Cubical => "cubical",
            Method::Steiner => "steiner",
        })
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cubical" => Ok(Method::Cubical),
            "steiner" => Ok(Method::Steiner),
            "disc-union" | "discs" => Err(Error::InvalidInput(
                "the disc-union estimator is not a grid method".into(),
            )),
            _ => Err(Error::InvalidInput(format!("unknown method {s:?}"))),
        }
    }
}

/// One `(ε, method)` row of a curvature profile.
#[derive(Clone, Debug, PartialEq)]
pub struct ProfileRow {
    pub eps: f64,
    pub method: Method,
    /// `C_0..C_d`; entries a method does not provide are NaN.
    pub c: Vec<f64>,
    pub components: u64,
    pub b1: i64,
    pub b2: u64,
    pub near_critical: bool,
    /// Steiner fit residual; NaN for the cubical method.
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct TotalsOptions {
    /// Steiner fit window as a fraction of `ε`.
    pub window: f64,
    /// Known critical radii; rows within `2·(h + site_error)` of one are flagged.
    pub critical: Vec<f64>,
    /// Skip component labeling (components and Betti numbers are then reported as 0).
    pub skip_topology: bool,
}

impl Default for TotalsOptions {
    fn default() -> Self {
        Self {
            window: DEFAULT_WINDOW,
            critical: Vec::new(),
            skip_topology: false,
        }
    }
}

/// Share of the reach estimate `√(ε² − c²)` used as fit window above a critical radius `c`.
pub const REACH_SHARE: f64 = 0.8;

/// Fit window `β ε`, capped by the reach estimate `√(ε² − c²)` when the largest known
/// critical radius `c` below `ε` is given: just above `c` two balls have freshly merged and
/// the reach of the complement is that of their lens.
pub fn fit_window(eps: f64, opts: &TotalsOptions) -> f64 {
    let base = opts.window * eps;
    match opts.critical.iter().cloned().filter(|&c| c < eps).max_by(f64::total_cmp) {
        Some(c) => base.min(REACH_SHARE * (eps * eps - c * c).sqrt()),
        None => base,
    }
}

pub fn near_critical(eps: f64, critical: &[f64], width: f64) -> bool {
    critical.iter().any(|c| (c - eps).abs() <= width)
}

pub fn curvature_totals(
    field: &DistanceField,
    eps: f64,
    method: Method,
    opts: &TotalsOptions,
) -> Result<ProfileRow> {
    let grid = field.grid();
    let d = grid.dim();
    let body = field.parallel_set(eps)?;
    let volume = body.volume();
    let (components, b1, b2, euler) = if opts.skip_topology {
        (0, 0, 0, None)
    } else {
        let c = label_components(&body);
        (c.components, c.b1, c.b2, Some(c.euler))
    };
    let mut c = vec![f64::NAN; d + 1];
    c[d] = volume;
    let mut residual = f64::NAN;
    match method {
        Method::Cubical => {
            c[0] = match euler {
                Some(e) => e as f64,
                None => super::euler_characteristic(&body) as f64,
            };
            c[d - 1] = 0.5 * field.boundary_area(eps, grid.h)?;
        }
        Method::Steiner => {
            let t_max = fit_window(eps, opts);
            let collar = InnerCollar::parallel_set(field, eps, false)?;
            let samples = collar.volumes(&sample_depths(d, t_max));
            let fit = steiner_extract(&samples, d, t_max)?;
            c[..d].copy_from_slice(&fit.curvatures);
            residual = fit.residual;
        }
    }
    let width = 2.0 * (grid.h + field.site_error());
    Ok(ProfileRow {
        eps,
        method,
        c,
        components,
        b1,
        b2,
        near_critical: near_critical(eps, &opts.critical, width),
        residual,
    })
}

/// Rows of a curvature profile in dimension `d`.
#[derive(Clone, Debug, Default)]
pub struct CurvatureProfile {
    pub d: usize,
    pub rows: Vec<ProfileRow>,
}

impl CurvatureProfile {
    pub fn new(d: usize) -> Self {
        Self { d, rows: Vec::new() }
    }

    pub fn header(d: usize) -> String {
        let cs: Vec<String> = (0..=d).map(|k| format!("C{k}")).collect();
        format!("eps,method,{},components,b1,b2,near_critical,residual", cs.join(","))
    }

    /// Rows of one method, sorted by ascending `ε`.
    pub fn series(&self, method: Method) -> Vec<&ProfileRow> {
        let mut v: Vec<&ProfileRow> = self.rows.iter().filter(|r| r.method == method).collect();
        v.sort_by(|a, b| a.eps.total_cmp(&b.eps));
        v
    }

    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "{}", Self::header(self.d))?;
        for r in &self.rows {
            let cs: Vec<String> = r.c.iter().map(|v| format!("{v}")).collect();
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                r.eps,
                r.method,
                cs.join(","),
                r.components,
                r.b1,
                r.b2,
                r.near_critical,
                r.residual
            )?;
        }
        Ok(())
    }

    /// Parses the CSV written by [`CurvatureProfile::write_csv`]; `#` lines are skipped.
    pub fn read_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::InvalidInput("empty profile".into()))?;
        let cols = header.split(',').count();
        if cols < 8 {
            return Err(Error::InvalidInput(format!("bad profile header {header:?}")));
        }
        let d = cols - 8 + 1 - 1;
        if header != Self::header(d) {
            return Err(Error::InvalidInput(format!("bad profile header {header:?}")));
        }
        let bad = |l: &str| Error::InvalidInput(format!("bad profile row {l:?}"));
        let mut rows = Vec::new();
        for line in lines {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != cols {
                return Err(bad(line));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad(line));
            rows.push(ProfileRow {
                eps: num(f[0])?,
                method: f[1].parse()?,
                c: f[2..3 + d].iter().map(|s| num(s)).collect::<Result<_>>()?,
                components: f[3 + d].parse().map_err(|_| bad(line))?,
                b1: f[4 + d].parse().map_err(|_| bad(line))?,
                b2: f[5 + d].parse().map_err(|_| bad(line))?,
                near_critical: f[6 + d].parse().map_err(|_| bad(line))?,
                residual: num(f[7 + d])?,
            });
        }
        Ok(Self { d, rows })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{rasterize_points, rasterize_sites, GridSpec};
    use crate::ifs::Ifs;
    use std::f64::consts::PI;

    #[test]
    fn disk_rows_agree() {
        let h = 1.0 / 256.0;
        let grid = GridSpec::around_point(&[0.0, 0.0], 1.3, h, 1.2).unwrap();
        let f = DistanceField::from_sites(&rasterize_points(&[vec![0.0, 0.0]], &grid).unwrap(), false).unwrap();
        let opts = TotalsOptions::default();
        let cub = curvature_totals(&f, 1.0, Method::Cubical, &opts).unwrap();
        let st = curvature_totals(&f, 1.0, Method::Steiner, &opts).unwrap();
        assert_eq!(cub.c[0], 1.0);
        assert!((st.c[0] - 1.0).abs() < 0.02, "{:?}", st.c);
        assert!((st.c[1] - PI).abs() < 0.02 * PI);
        assert!((cub.c[1] - PI).abs() < 0.03 * PI);
        assert_eq!(cub.c[2], st.c[2]);
        assert_eq!(cub.components, 1);
    }

    #[test]
    fn cantor_steiner_euler_rounds() {
        let ifs = Ifs::cantor_dust(1.0 / 3.0).unwrap();
        let grid = GridSpec::covering(ifs.cube(), 1.0 / 729.0, 0.22).unwrap();
        let f = DistanceField::from_sites(&rasterize_sites(&ifs, &grid, 1 << 22).unwrap(), false).unwrap();
        let row = curvature_totals(&f, 0.2, Method::Steiner, &TotalsOptions::default()).unwrap();
        assert!(row.c[0].abs() < 0.25, "{:?} residual {}", row.c, row.residual);
        let cub = curvature_totals(&f, 0.2, Method::Cubical, &TotalsOptions::default()).unwrap();
        assert!((row.c[1] - cub.c[1]).abs() < 0.03 * cub.c[1]);
    }

    #[test]
    fn csv_roundtrip() {
        let mut p = CurvatureProfile::new(2);
        p.rows.push(ProfileRow {
            eps: 0.2,
            method: Method::Cubical,
            c: vec![0.0, 2.5, 1.25],
            components: 1,
            b1: 1,
            b2: 0,
            near_critical: false,
            residual: f64::NAN,
        });
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("eps,method,C0,C1,C2,components,b1,b2,near_critical,residual\n"));
        let q = CurvatureProfile::read_csv(&text).unwrap();
        assert_eq!(q.rows[0].c, p.rows[0].c);
        assert!(q.rows[0].residual.is_nan());
        assert!(CurvatureProfile::read_csv("eps,x\n").is_err());
    }
}
