use bitvec::prelude::*;

use super::GridSpec;

/// One bit per cell; a set bit is a closed foreground cube.
#[derive(Clone, Debug, PartialEq)]
pub struct BinaryGrid {
    grid: GridSpec,
    bits: BitVec<usize, Lsb0>,
}

impl BinaryGrid {
    pub fn empty(grid: GridSpec) -> Self {
        let n = grid.len();
        Self {
            grid,
            bits: bitvec![usize, Lsb0; 0; n],
        }
    }

    pub fn full(grid: GridSpec) -> Self {
        let n = grid.len();
        Self {
            grid,
            bits: bitvec![usize, Lsb0; 1; n],
        }
    }

    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(usize) -> bool) -> Self {
        let n = grid.len();
        let mut bits = BitVec::with_capacity(n);
        bits.extend((0..n).map(&mut f));
        Self { grid, bits }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn bits(&self) -> &BitSlice<usize, Lsb0> {
        &self.bits
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        self.bits.set(i, v);
    }

    pub fn count_ones(&self) -> usize {
        self.bits.count_ones()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter_ones()
    }

    /// Foreground cell count in the unfolded grid.
    pub fn weighted_count(&self) -> u64 {
        if !self.grid.is_mirrored() {
            return self.count_ones() as u64;
        }
        self.iter_ones().map(|i| self.grid.weight(&self.grid.coords(i))).sum()
    }

    /// Foreground cell count times `h^d`.
    pub fn volume(&self) -> f64 {
        self.weighted_count() as f64 * self.grid.cell_volume()
    }

    pub fn is_subset_of(&self, other: &BinaryGrid) -> bool {
        self.bits
            .as_raw_slice()
            .iter()
            .zip(other.bits.as_raw_slice())
            .all(|(a, b)| a & !b == 0)
    }

    pub fn complement(&self) -> BinaryGrid {
        let mut bits = self.bits.clone();
        bits = !bits;
        Self {
            grid: self.grid.clone(),
            bits,
        }
    }
}
