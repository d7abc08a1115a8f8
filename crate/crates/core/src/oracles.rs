//! Closed-form critical radii, Euler characteristics and cavity counts of parallel sets of
//! the Cantor dust and the Menger sponge.

use std::fmt;

use crate::{Error, Result};

/// Relative distance to a critical radius below which oracles decline to answer.
const CRITICAL_GUARD: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CriticalKind {
    /// Below this radius components separate.
    ComponentSplit,
    /// Below this radius new holes open.
    HoleBirth,
    /// Below this radius new bounded cavities open.
    CavityBirth,
}

impl fmt::Display for CriticalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CriticalKind::ComponentSplit => "component-split",
            CriticalKind::HoleBirth => "hole-birth",
            CriticalKind::CavityBirth => "cavity-birth",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalValue {
    pub value: f64,
    pub kind: CriticalKind,
    pub l: u32,
    /// Band index `k` (Cantor) or `j` (Menger); `None` for the base radius of a level.
    pub index: Option<u32>,
}

/// Critical radii sorted ascending, duplicates removed.
#[derive(Clone, Debug, Default)]
pub struct CriticalCatalog {
    pub entries: Vec<CriticalValue>,
}

impl CriticalCatalog {
    fn from_unsorted(mut entries: Vec<CriticalValue>) -> Self {
        entries.sort_by(|a, b| a.value.total_cmp(&b.value));
        entries.dedup_by(|b, a| (b.value - a.value).abs() <= CRITICAL_GUARD * a.value);
        Self { entries }
    }

    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.value).collect()
    }

    /// Distance from `eps` to the nearest catalogued radius.
    pub fn distance(&self, eps: f64) -> f64 {
        self.entries.iter().map(|e| (e.value - eps).abs()).fold(f64::INFINITY, f64::min)
    }

    /// Largest catalogued radius strictly below `eps`.
    pub fn below(&self, eps: f64) -> Option<f64> {
        self.entries.iter().rev().map(|e| e.value).find(|&v| v < eps)
    }
}

fn cantor_tau(rho: f64) -> Result<f64> {
    if !(rho > 0.0 && rho < 0.5) {
        return Err(Error::InvalidInput(format!("cantor dust oracle needs rho in (0, 1/2), got {rho}")));
    }
    Ok(0.5 - rho)
}

/// `ρ^l τ` and `ρ^l τ √(1 + ρ^{2k})` for `l ≤ l_max`, `k ≤ k_max`, with `τ = 1/2 − ρ`.
pub fn cantor_critical_values(rho: f64, l_max: u32, k_max: u32) -> Result<CriticalCatalog> {
    let tau = cantor_tau(rho)?;
    let mut v = Vec::new();
    for l in 0..=l_max {
        let base = rho.powi(l as i32) * tau;
        v.push(CriticalValue {
            value: base,
            kind: CriticalKind::ComponentSplit,
            l,
            index: None,
        });
        for k in 0..=k_max {
            v.push(CriticalValue {
                value: base * (1.0 + rho.powi(2 * k as i32)).sqrt(),
                kind: CriticalKind::HoleBirth,
                l,
                index: Some(k),
            });
        }
    }
    Ok(CriticalCatalog::from_unsorted(v))
}

/// Position of `eps` in the band structure: the level `l` and the rescaled radius
/// `ε' = ρ^{−l} ε ∈ (τ, τ/ρ]`. `None` on a critical radius.
fn cantor_band(rho: f64, eps: f64) -> Result<Option<(u32, f64)>> {
    let tau = cantor_tau(rho)?;
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidInput(format!("radius {eps} must be positive")));
    }
    let mut l = 0u32;
    let mut e = eps;
    while e <= tau * (1.0 + CRITICAL_GUARD) {
        if (e - tau).abs() <= CRITICAL_GUARD * tau {
            return Ok(None);
        }
        e /= rho;
        l += 1;
        if l > 200 {
            return Err(Error::InvalidInput(format!("radius {eps} too small for the oracle")));
        }
    }
    Ok(Some((l, e)))
}

/// Euler characteristic of one level-0 parallel set at rescaled radius `e > τ`:
/// 1 above `√2 τ`, 0 in the `k = 0` band, `−2^{k+2} + 4` in the `k`-band.
fn cantor_chi_base(rho: f64, tau: f64, e: f64) -> Option<i64> {
    let top = 2f64.sqrt() * tau;
    if (e - top).abs() <= CRITICAL_GUARD * top {
        return None;
    }
    if e > top {
        return Some(1);
    }
    // e = τ √(1 + ρ^{2x})  ⇒  x = ln((e/τ)² − 1) / (2 ln ρ)
    let x = ((e / tau).powi(2) - 1.0).ln() / (2.0 * rho.ln());
    let k = x.floor();
    for edge in [k, k + 1.0] {
        let v = tau * (1.0 + rho.powf(2.0 * edge)).sqrt();
        if (e - v).abs() <= CRITICAL_GUARD * v {
            return None;
        }
    }
    if k > 62.0 {
        return None;
    }
    Some(4 - (1i64 << (k as u32 + 2)))
}

/// Euler characteristic of the parallel set `F(ε)` of the Cantor dust; `None` on a
/// critical radius.
pub fn cantor_euler(rho: f64, eps: f64) -> Result<Option<i64>> {
    let tau = cantor_tau(rho)?;
    let Some((l, e)) = cantor_band(rho, eps)? else {
        return Ok(None);
    };
    Ok(cantor_chi_base(rho, tau, e).map(|c| 4i64.pow(l) * c))
}

/// Number of connected components of `F(ε)`: `4^l` for `ρ^l τ < ε ≤ ρ^{l−1} τ`.
pub fn cantor_components(rho: f64, eps: f64) -> Result<Option<u64>> {
    Ok(cantor_band(rho, eps)?.map(|(l, _)| 4u64.pow(l)))
}

/// Number of holes `components − χ`.
pub fn cantor_holes(rho: f64, eps: f64) -> Result<Option<i64>> {
    Ok(match (cantor_components(rho, eps)?, cantor_euler(rho, eps)?) {
        (Some(c), Some(chi)) => Some(c as i64 - chi),
        _ => None,
    })
}

/// Menger critical radii: `3^{−l}/2` and `(1/(2·3^l)) √(1 + 3^{−2j})` for `1 ≤ l ≤ l_max`,
/// `j ≤ j_max`.
pub fn menger_critical_values(l_max: u32, j_max: u32) -> CriticalCatalog {
    let mut v = Vec::new();
    for l in 1..=l_max.max(1) {
        let base = 0.5 * 3f64.powi(-(l as i32));
        v.push(CriticalValue {
            value: base,
            kind: CriticalKind::ComponentSplit,
            l,
            index: None,
        });
        for j in 0..=j_max {
            v.push(CriticalValue {
                value: base * (1.0 + 9f64.powi(-(j as i32))).sqrt(),
                kind: CriticalKind::CavityBirth,
                l,
                index: Some(j),
            });
        }
    }
    CriticalCatalog::from_unsorted(v)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MengerCavities {
    pub l: u32,
    pub j: u32,
    /// `2^j − 1` spherical holes in each removed cube of generation `l`.
    pub per_cube: u64,
    /// `20^{l−1} · 7` removed cubes of generation `l`, each with `per_cube` holes.
    pub total: u64,
}

/// Cavity count of the Menger sponge parallel set in the band
/// `(1/(2·3^l)) √(1 + 3^{−2j−2}) < ε < (1/(2·3^l)) √(1 + 3^{−2j})`.
pub fn menger_cavity_count(eps: f64) -> Result<MengerCavities> {
    if !(eps > 0.0 && eps < 0.5 * 2f64.sqrt() / 3.0) {
        return Err(Error::InvalidInput(format!("radius {eps} lies outside every Menger band")));
    }
    let mut l = 1u32;
    while eps <= 0.5 * 3f64.powi(-(l as i32)) {
        l += 1;
        if l > 40 {
            return Err(Error::InvalidInput(format!("radius {eps} too small for the oracle")));
        }
    }
    let base = 0.5 * 3f64.powi(-(l as i32));
    let top = base * 2f64.sqrt();
    if eps >= top * (1.0 - CRITICAL_GUARD) {
        return Err(Error::InvalidInput(format!("radius {eps} lies outside every Menger band")));
    }
    let x = ((eps / base).powi(2) - 1.0).ln() / (-2.0 * 3f64.ln());
    let j = x.floor();
    for edge in [j, j + 1.0] {
        let v = base * (1.0 + 9f64.powf(-edge)).sqrt();
        if (eps - v).abs() <= CRITICAL_GUARD * v {
            return Err(Error::InvalidInput(format!("radius {eps} is critical")));
        }
    }
    let j = j as u32;
    let per_cube = (1u64 << j.min(62)) - 1;
    Ok(MengerCavities {
        l,
        j,
        per_cube,
        total: 20u64.pow(l - 1) * 7 * per_cube,
    })
}

/// `ln 20 / ln 3`.
pub fn menger_dimension() -> f64 {
    20f64.ln() / 3f64.ln()
}
