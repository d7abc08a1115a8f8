use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{DistanceField, GridSpec};
use crate::{Error, Result};

const MAGIC: &[u8; 4] = b"FCDF";
const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Header {
    grid: GridSpec,
    site_error: f64,
    has_feet: bool,
}

/// Hex SHA-256 of the scene fingerprint and grid.
pub fn cache_key(scene_fingerprint: &str, grid: &GridSpec) -> String {
    let mut hasher = Sha256::new();
    hasher.update(scene_fingerprint.as_bytes());
    hasher.update(b"\n");
    hasher.update(grid.fingerprint().as_bytes());
    hex::encode(hasher.finalize())
}

/// Layout: magic, version, header length, JSON header with the grid, then little-endian
/// `u64` squared distances (units of `h²`) and, when present, `u32` foot indices.
pub fn store_field(path: &Path, field: &DistanceField) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let header = serde_json::to_vec(&Header {
        grid: field.grid().clone(),
        site_error: field.site_error(),
        has_feet: field.feet().is_some(),
    })?;
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(header.len() as u32).to_le_bytes())?;
    w.write_all(&header)?;
    for &v in field.d2() {
        w.write_all(&(v as u64).to_le_bytes())?;
    }
    if let Some(feet) = field.feet() {
        for &f in feet {
            w.write_all(&f.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn load_field(path: &Path) -> Result<DistanceField> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Cache("bad magic".into()));
    }
    let mut word = [0u8; 4];
    r.read_exact(&mut word)?;
    let version = u32::from_le_bytes(word);
    if version != VERSION {
        return Err(Error::Cache(format!("unsupported version {version}")));
    }
    r.read_exact(&mut word)?;
    let mut header = vec![0u8; u32::from_le_bytes(word) as usize];
    r.read_exact(&mut header)?;
    let header: Header = serde_json::from_slice(&header)?;
    let n = header.grid.len();
    let mut d2 = Vec::with_capacity(n);
    let mut buf = [0u8; 8];
    for _ in 0..n {
        r.read_exact(&mut buf)?;
        let v = u64::from_le_bytes(buf);
        d2.push(u32::try_from(v).map_err(|_| Error::Cache("squared distance overflow".into()))?);
    }
    let feet = if header.has_feet {
        let mut feet = Vec::with_capacity(n);
        for _ in 0..n {
            r.read_exact(&mut word)?;
            feet.push(u32::from_le_bytes(word));
        }
        Some(feet)
    } else {
        None
    };
    if r.read(&mut buf)? != 0 {
        return Err(Error::Cache("trailing bytes".into()));
    }
    DistanceField::from_parts(header.grid, d2, feet, header.site_error)
}

/// Loads `dir/<key>.fcdf` if present, otherwise computes and stores it.
pub fn load_or_compute(
    dir: &Path,
    key: &str,
    compute: impl FnOnce() -> Result<DistanceField>,
) -> Result<DistanceField> {
    let path: PathBuf = dir.join(format!("{key}.fcdf"));
    if path.exists() {
        if let Ok(f) = load_field(&path) {
            return Ok(f);
        }
    }
    let field = compute()?;
    std::fs::create_dir_all(dir)?;
    store_field(&path, &field)?;
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::rasterize_sites;
    use crate::ifs::Ifs;

    #[test]
    fn roundtrip() {
        let ifs = Ifs::cantor_dust(1.0 / 3.0).unwrap();
        let grid = GridSpec::covering(ifs.cube(), 1.0 / 81.0, 0.2).unwrap();
        let field = DistanceField::from_sites(&rasterize_sites(&ifs, &grid, 1 << 20).unwrap(), true).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let key = cache_key(&ifs.fingerprint(), &grid);
        assert_eq!(key.len(), 64);
        let a = load_or_compute(dir.path(), &key, || Ok(field.clone())).unwrap();
        let b = load_or_compute(dir.path(), &key, || panic!("cache miss")).unwrap();
        assert_eq!(a.d2(), b.d2());
        assert_eq!(a.feet(), b.feet());
        assert_eq!(b.grid(), &grid);
        assert_ne!(key, cache_key(&Ifs::menger().unwrap().fingerprint(), &grid));
    }

    #[test]
    fn rejects_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.fcdf");
        std::fs::write(&p, b"nope").unwrap();
        assert!(load_field(&p).is_err());
    }
}
