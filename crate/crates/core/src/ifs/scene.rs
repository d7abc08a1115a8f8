use serde::{Deserialize, Serialize};

use super::{Aabb, Ifs, Similarity};
use crate::{Error, Result};

/// On-disk scene description.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub dim: usize,
    pub cube: SceneCube,
    pub maps: Vec<SceneMap>,
    #[serde(default)]
    pub mass: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneCube {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneMap {
    pub ratio: f64,
    #[serde(default)]
    pub rotation: Option<Rotation>,
    #[serde(default)]
    pub reflect: bool,
    pub translate: Vec<f64>,
}

/// Planar angle in radians, or an explicit orthogonal matrix (rows).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Rotation {
    Angle(f64),
    Matrix(Vec<Vec<f64>>),
}

impl SceneMap {
    fn to_similarity(&self, d: usize) -> Result<Similarity> {
        let mut o = vec![0.0; d * d];
        match &self.rotation {
            None => (0..d).for_each(|i| o[i * d + i] = 1.0),
            Some(Rotation::Angle(theta)) => {
                if d != 2 {
                    return Err(Error::Scene(format!(
                        "rotation angle given in dimension {d}; use a matrix"
                    )));
                }
                let (s, c) = theta.sin_cos();
                o.copy_from_slice(&[c, -s, s, c]);
            }
            Some(Rotation::Matrix(rows)) => {
                if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                    return Err(Error::Scene(format!("rotation matrix is not {d}×{d}")));
                }
                for (i, row) in rows.iter().enumerate() {
                    o[i * d..(i + 1) * d].copy_from_slice(row);
                }
            }
        }
        if self.reflect {
            // compose with the reflection negating the last coordinate
            for i in 0..d {
                o[i * d + d - 1] = -o[i * d + d - 1];
            }
        }
        if self.translate.len() != d {
            return Err(Error::Scene(format!(
                "translation has {} entries, expected {d}",
                self.translate.len()
            )));
        }
        Similarity::new(self.ratio, o, self.translate.clone())
    }
}

impl SceneFile {
    pub fn to_ifs(&self) -> Result<Ifs> {
        if self.cube.min.len() != self.dim || self.cube.max.len() != self.dim {
            return Err(Error::Scene("cube corners do not match dim".into()));
        }
        let cube = Aabb::new(self.cube.min.clone(), self.cube.max.clone())?;
        let maps = self
            .maps
            .iter()
            .map(|m| m.to_similarity(self.dim))
            .collect::<Result<Vec<_>>>()?;
        Ifs::new(maps, cube, self.mass.unwrap_or(1.0))
    }
}

pub fn parse_scene(text: &str) -> Result<Ifs> {
    let scene: SceneFile =
        serde_json::from_str(text).map_err(|e| Error::Scene(e.to_string()))?;
    scene.to_ifs()
}
