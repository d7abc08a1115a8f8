use std::collections::VecDeque;

use bitvec::prelude::*;

use super::euler_characteristic;
use crate::grid::{BinaryGrid, GridSpec};

/// A bounded background component (a hole in 2D, a cavity in 3D).
#[derive(Clone, Debug, PartialEq)]
pub struct BoundedComponent {
    /// Smallest stored linear index in the component.
    pub representative: usize,
    pub cells: u64,
    /// Number of copies in the unfolded grid.
    pub multiplicity: u64,
}

/// Betti numbers of the foreground, with `χ = b0 − b1 + b2`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentCounts {
    pub components: u64,
    /// Holes (2D) or tunnels (3D).
    pub b1: i64,
    /// Cavities (3D); zero in 2D.
    pub b2: u64,
    pub euler: i64,
    pub bounded_background: Vec<BoundedComponent>,
}

/// Foreground components under vertex adjacency, bounded background components under face
/// adjacency, and the remaining Betti number from the Euler characteristic.
pub fn label_components(grid: &BinaryGrid) -> ComponentCounts {
    let spec = grid.grid();
    let d = spec.dim();
    let euler = euler_characteristic(grid);
    let fg = sweep(grid, true, &full_offsets(d));
    let bg = sweep(grid, false, &face_offsets(d));
    let components: u64 = fg.iter().map(|c| c.multiplicity).sum();
    let bounded: Vec<BoundedComponent> = bg.into_iter().filter(|c| c.cells > 0).collect();
    let enclosed: u64 = bounded.iter().map(|c| c.multiplicity).sum();
    let (b1, b2) = if d == 3 {
        (components as i64 + enclosed as i64 - euler, enclosed)
    } else {
        (enclosed as i64, 0)
    };
    ComponentCounts {
        components,
        b1,
        b2,
        euler,
        bounded_background: bounded,
    }
}

fn full_offsets(d: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for k in 0..3usize.pow(d as u32) {
        let off: Vec<i64> = (0..d).map(|a| (k / 3usize.pow(a as u32) % 3) as i64 - 1).collect();
        if off.iter().any(|&o| o != 0) {
            out.push(off);
        }
    }
    out
}

fn face_offsets(d: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for a in 0..d {
        for s in [-1, 1] {
            let mut off = vec![0; d];
            off[a] = s;
            out.push(off);
        }
    }
    out
}

/// Neighbor coordinate along one axis, folding across a mirror plane.
#[inline]
fn step(spec: &GridSpec, axis: usize, c: usize, o: i64) -> Option<usize> {
    let n = spec.cells[axis] as i64;
    let t = c as i64 + o;
    if t < 0 {
        return None;
    }
    if t >= n {
        if spec.mirror[axis] {
            let r = 2 * n - 2 - t;
            return (r >= 0).then_some(r as usize);
        }
        return None;
    }
    Some(t as usize)
}

/// Components of cells with value `fg`. For background sweeps, components reaching the outer
/// (non-mirror) boundary are reported with `cells == 0`.
fn sweep(grid: &BinaryGrid, fg: bool, offsets: &[Vec<i64>]) -> Vec<BoundedComponent> {
    let spec = grid.grid();
    let d = spec.dim();
    let n = spec.len();
    let strides = spec.strides();
    let mirrored = spec.mirror.iter().filter(|&&m| m).count();
    let mut seen: BitVec<usize, Lsb0> = bitvec![usize, Lsb0; 0; n];
    let mut queue = VecDeque::new();
    let mut out = Vec::new();
    let mut coords = vec![0usize; d];
    for start in 0..n {
        if seen[start] || grid.get(start) != fg {
            continue;
        }
        seen.set(start, true);
        queue.push_back(start as u32);
        let mut size = 0u64;
        let mut planes = vec![false; d];
        let mut exterior = false;
        while let Some(cur) = queue.pop_front() {
            let cur = cur as usize;
            size += 1;
            let mut rem = cur;
            for a in 0..d {
                coords[a] = rem % spec.cells[a];
                rem /= spec.cells[a];
                if spec.mirror[a] && coords[a] + 1 == spec.cells[a] {
                    planes[a] = true;
                }
            }
            for off in offsets {
                let mut idx = 0usize;
                let mut ok = true;
                for a in 0..d {
                    match step(spec, a, coords[a], off[a]) {
                        Some(c) => idx += c * strides[a],
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if !ok {
                    exterior = true;
                    continue;
                }
                if !seen[idx] && grid.get(idx) == fg {
                    seen.set(idx, true);
                    queue.push_back(idx as u32);
                }
            }
        }
        let touched = planes.iter().filter(|&&p| p).count();
        out.push(BoundedComponent {
            representative: start,
            cells: if !fg && exterior { 0 } else { size },
            multiplicity: 1u64 << (mirrored - touched),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn diagonal_pair_is_connected() {
        let spec = GridSpec::new(vec![0.0; 2], 1.0, vec![4, 4], 0.0, vec![false; 2]).unwrap();
        let b = BinaryGrid::from_fn(spec.clone(), |i| [spec.linear(&[1, 1]), spec.linear(&[2, 2])].contains(&i));
        let c = label_components(&b);
        assert_eq!((c.components, c.b1, c.euler), (1, 0, 1));
    }

    #[test]
    fn hollow_box() {
        let spec = GridSpec::new(vec![0.0; 3], 1.0, vec![5, 5, 5], 0.0, vec![false; 3]).unwrap();
        let b = BinaryGrid::from_fn(spec.clone(), |i| {
            let c = spec.coords(i);
            c.iter().all(|&v| (1..=3).contains(&v)) && c != vec![2, 2, 2]
        });
        let c = label_components(&b);
        assert_eq!((c.components, c.b2, c.b1, c.euler), (1, 1, 0, 2));
        assert_eq!(c.bounded_background[0].representative, spec.linear(&[2, 2, 2]));
    }

    #[test]
    fn betti_relation_random() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for trial in 0..60 {
            let d = 2 + trial % 2;
            let n = rng.gen_range(2..9);
            let spec = GridSpec::new(vec![0.0; d], 1.0, vec![n; d], 0.0, vec![false; d]).unwrap();
            let p = rng.gen_range(0.2..0.8);
            let b = BinaryGrid::from_fn(spec, |_| rng.gen_bool(p));
            let c = label_components(&b);
            assert_eq!(c.components as i64 - c.b1 + c.b2 as i64, c.euler);
            assert!(c.b1 >= 0);
        }
    }

    #[test]
    fn mirror_counts_match_unfolded() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        for trial in 0..60 {
            let d = 2 + trial % 2;
            let n = rng.gen_range(2..7);
            let half = GridSpec::new(vec![0.0; d], 1.0, vec![n; d], 0.0, vec![true; d]).unwrap();
            let full = GridSpec::new(vec![0.0; d], 1.0, vec![2 * n - 1; d], 0.0, vec![false; d]).unwrap();
            let p = rng.gen_range(0.3..0.7);
            let hb = BinaryGrid::from_fn(half.clone(), |_| rng.gen_bool(p));
            let fb = BinaryGrid::from_fn(full.clone(), |i| {
                let c: Vec<usize> =
                    full.coords(i).iter().map(|&x| if x >= n { 2 * n - 2 - x } else { x }).collect();
                hb.get(half.linear(&c))
            });
            let (a, b) = (label_components(&hb), label_components(&fb));
            assert_eq!((a.components, a.b1, a.b2, a.euler), (b.components, b.b1, b.b2, b.euler));
        }
    }
}
