use rayon::prelude::*;

use super::BinaryGrid;
use crate::{Error, Result};

pub const INF: u32 = u32::MAX;

/// Squared distances in units of `h²` and, optionally, the linear index of a nearest site.
pub struct EdtOutput {
    pub d2: Vec<u32>,
    pub feet: Option<Vec<u32>>,
}

/// Exact squared Euclidean distance transform from the cells of `sites` that are set
/// (or unset, with `invert`), by separable lower envelopes of parabolas.
///
/// Among equidistant sites the one with the smallest linear index is reported.
pub fn squared_edt(sites: &BinaryGrid, invert: bool, with_feet: bool) -> Result<EdtOutput> {
    let grid = sites.grid();
    if with_feet && grid.is_mirrored() {
        return Err(Error::InvalidInput("foot indices are not tracked on mirrored grids".into()));
    }
    let n = grid.len();
    let mut d2 = vec![INF; n];
    let mut any = false;
    for (i, v) in d2.iter_mut().enumerate() {
        if sites.get(i) != invert {
            *v = 0;
            any = true;
        }
    }
    if !any {
        return Err(Error::EmptySites);
    }
    let mut feet = with_feet.then(|| (0..n as u32).collect::<Vec<u32>>());
    let strides = grid.strides();
    for axis in 0..grid.dim() {
        let len = grid.cells[axis];
        let stride = strides[axis];
        let block = stride * len;
        let mirror = grid.mirror[axis];
        let work = |d2_block: &mut [u32], mut feet_block: Option<&mut [u32]>| {
            let mut line = LineScratch::new(len, mirror, feet_block.is_some());
            for low in 0..stride {
                for p in 0..len {
                    line.f[p] = d2_block[low + p * stride];
                }
                if let Some(fb) = feet_block.as_deref() {
                    for p in 0..len {
                        line.foot[p] = fb[low + p * stride];
                    }
                }
                line.run();
                for p in 0..len {
                    d2_block[low + p * stride] = line.g[p];
                }
                if let Some(fb) = feet_block.as_deref_mut() {
                    for p in 0..len {
                        fb[low + p * stride] = line.foot_out[p];
                    }
                }
            }
        };
        match feet.as_mut() {
            Some(ft) => d2
                .par_chunks_mut(block)
                .zip(ft.par_chunks_mut(block))
                .for_each(|(a, b)| work(a, Some(b))),
            None => d2.par_chunks_mut(block).for_each(|a| work(a, None)),
        }
    }
    Ok(EdtOutput { d2, feet })
}

/// Buffers for one line; mirrored lines are unfolded to length `2n − 1`.
struct LineScratch {
    n: usize,
    mirror: bool,
    track: bool,
    f: Vec<u32>,
    foot: Vec<u32>,
    g: Vec<u32>,
    foot_out: Vec<u32>,
    v: Vec<usize>,
    z_num: Vec<i64>,
    z_den: Vec<i64>,
}

impl LineScratch {
    fn new(n: usize, mirror: bool, track: bool) -> Self {
        let m = if mirror { 2 * n - 1 } else { n };
        Self {
            n,
            mirror,
            track,
            f: vec![0; m],
            foot: vec![0; if track { m } else { 0 }],
            g: vec![0; n],
            foot_out: vec![0; if track { n } else { 0 }],
            v: Vec::with_capacity(m),
            z_num: Vec::with_capacity(m),
            z_den: Vec::with_capacity(m),
        }
    }

    fn run(&mut self) {
        let n = self.n;
        let m = if self.mirror {
            for i in n..2 * n - 1 {
                self.f[i] = self.f[2 * n - 2 - i];
            }
            2 * n - 1
        } else {
            n
        };
        let f = &self.f;
        let key = |q: usize| f[q] as i64 + (q * q) as i64;
        self.v.clear();
        self.z_num.clear();
        self.z_den.clear();
        for q in 0..m {
            if f[q] == INF {
                continue;
            }
            loop {
                let Some(&vk) = self.v.last() else {
                    self.v.push(q);
                    self.z_num.push(i64::MIN);
                    self.z_den.push(1);
                    break;
                };
                // intersection s = num / den of the parabolas rooted at vk and q
                let num = key(q) - key(vk);
                let den = 2 * (q - vk) as i64;
                let k = self.v.len() - 1;
                let zn = self.z_num[k];
                let zd = self.z_den[k];
                let at_or_before = zn != i64::MIN && num * zd <= zn * den;
                if at_or_before {
                    self.v.pop();
                    self.z_num.pop();
                    self.z_den.pop();
                } else {
                    self.v.push(q);
                    self.z_num.push(num);
                    self.z_den.push(den);
                    break;
                }
            }
        }
        if self.v.is_empty() {
            self.g.fill(INF);
            return;
        }
        let mut k = 0;
        for p in 0..n {
            // advance only when the next parabola is strictly better: ties keep the smaller root
            while k + 1 < self.v.len() && self.z_num[k + 1] < p as i64 * self.z_den[k + 1] {
                k += 1;
            }
            let q = self.v[k];
            let dp = p as i64 - q as i64;
            self.g[p] = (dp * dp) as u32 + f[q];
            if self.track {
                self.foot_out[p] = self.foot[q];
            }
        }
    }
}
