//! Browser bindings: scene dimension and exact curvatures of planar Cantor dust approximations.

use fraccurv::curvature::discs::DiscSites;
use fraccurv::ifs::{parse_scene, Ifs};
use fraccurv::oracles::cantor_euler;
use wasm_bindgen::prelude::*;

fn js_err(e: fraccurv::Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

/// Similarity dimension of a JSON scene.
#[wasm_bindgen]
pub fn dimension(scene_json: &str) -> Result<f64, JsValue> {
    Ok(parse_scene(scene_json).map_err(js_err)?.dimension())
}

/// Images of the lower-left corner under all words of length `level`, as `[x0, y0, x1, y1, ..]`.
#[wasm_bindgen]
pub fn dust_sites(rho: f64, level: u32) -> Result<Vec<f64>, JsValue> {
    Ok(sites(rho, level)?.into_iter().flatten().collect())
}

fn sites(rho: f64, level: u32) -> Result<Vec<[f64; 2]>, JsValue> {
    if level > 7 {
        return Err(JsValue::from_str("level must be at most 7"));
    }
    let ifs = Ifs::cantor_dust(rho).map_err(js_err)?;
    let mut pts = vec![vec![0.0, 0.0]];
    for _ in 0..level {
        pts = pts
            .iter()
            .flat_map(|p| ifs.maps().iter().map(move |m| m.apply(p)))
            .collect();
    }
    // every site stands for a square of side rho^level; use its centre
    let half = 0.5 * rho.powi(level as i32);
    Ok(pts.into_iter().map(|p| [p[0] + half, p[1] + half]).collect())
}

/// `[C0, C0 variation, C1, closed-form χ or NaN]` for the union of `ε`-discs around the sites.
///
/// The sites lie within `rho^level / √2` of the dust, so the union is the parallel set of the
/// dust up to that Hausdorff error.
#[wasm_bindgen]
pub fn dust_curvatures(rho: f64, eps: f64, level: u32) -> Result<Vec<f64>, JsValue> {
    let s = DiscSites::new(&sites(rho, level)?).map_err(js_err)?;
    let c = s.union(eps).map_err(js_err)?.totals();
    let oracle = cantor_euler(rho, eps).map_err(js_err)?.map_or(f64::NAN, |v| v as f64);
    Ok(vec![c.c0, c.c0_var, c.c1, oracle])
}
