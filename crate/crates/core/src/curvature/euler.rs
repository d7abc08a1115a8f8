use crate::grid::{BinaryGrid, GridSpec};

/// Euler characteristic of the union of closed foreground cubes.
///
/// Every face of the cubical complex is owned by its lowest corner; a vertex's
/// contribution depends only on the `2^d` cells around it. On mirrored grids
/// faces strictly inside the stored half count twice and faces on the plane once.
pub fn euler_characteristic(grid: &BinaryGrid) -> i64 {
    let spec = grid.grid();
    let d = spec.dim();
    let table = presence_table(d);
    let strides = spec.strides();
    let ranges: Vec<usize> = (0..d)
        .map(|a| if spec.mirror[a] { spec.cells[a] } else { spec.cells[a] + 1 })
        .collect();
    let total: usize = ranges.iter().product();
    let mut chi = 0i64;
    let mut v = vec![0usize; d];
    for _ in 0..total {
        let mut config = 0usize;
        for o in 0..1usize << d {
            let mut idx = 0usize;
            let mut inside = true;
            for a in 0..d {
                let c = if o >> a & 1 == 1 { v[a] } else { v[a].wrapping_sub(1) };
                if c >= spec.cells[a] {
                    inside = false;
                    break;
                }
                idx += c * strides[a];
            }
            if inside && grid.get(idx) {
                config |= 1 << o;
            }
        }
        if config != 0 {
            chi += vertex_contribution(spec, &v, table[config]);
        }
        for a in 0..d {
            v[a] += 1;
            if v[a] < ranges[a] {
                break;
            }
            v[a] = 0;
        }
    }
    chi
}

/// For each configuration of the `2^d` cells around a vertex, the set of owned faces
/// present, as a bitmask over axis subsets `S` (face spanning the axes in `S`).
fn presence_table(d: usize) -> Vec<u8> {
    let corners = 1usize << d;
    (0..1usize << corners)
        .map(|config| {
            let mut mask = 0u8;
            for s in 0..corners {
                // the face spanning S lies in cell o iff o has a 1 on every axis of S
                let present = (0..corners).any(|o| o & s == s && config >> o & 1 == 1);
                if present {
                    mask |= 1 << s;
                }
            }
            mask
        })
        .collect()
}

fn vertex_contribution(spec: &GridSpec, v: &[usize], present: u8) -> i64 {
    let d = spec.dim();
    let mut sum = 0i64;
    for s in 0..1usize << d {
        if present >> s & 1 == 0 {
            continue;
        }
        let mut w = 1i64;
        for a in 0..d {
            if spec.mirror[a] {
                let spans = s >> a & 1 == 1;
                w *= if spans && v[a] + 1 == spec.cells[a] { 1 } else { 2 };
            }
        }
        let sign = if (s.count_ones() & 1) == 1 { -1 } else { 1 };
        sum += sign * w;
    }
    sum
}
