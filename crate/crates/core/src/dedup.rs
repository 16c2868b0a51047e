//! Two-level deduplication: values are bucketed on a coarse quantization
//! grid and candidate collisions are confirmed with a caller-supplied exact
//! comparison. Cells adjacent to a coordinate lying near a cell boundary are
//! probed too, so nearly equal values never escape by straddling a boundary.

use alloc::vec::Vec;

use hashbrown::HashMap;
use num_traits::Float;

/// Index of `N`-dimensional real keys.
#[derive(Clone, Debug)]
pub struct QuantIndex<const N: usize> {
    grid: f64,
    margin: f64,
    cells: HashMap<[i64; N], Vec<usize>>,
}

impl<const N: usize> QuantIndex<N> {
    /// `grid` is the cell width; neighbouring cells are probed when a
    /// coordinate lies within `margin` of a cell boundary.
    pub fn new(grid: f64, margin: f64) -> Self {
        QuantIndex { grid, margin, cells: HashMap::new() }
    }

    fn cell(&self, v: &[f64; N]) -> [i64; N] {
        let mut k = [0i64; N];
        for i in 0..N {
            k[i] = (v[i] / self.grid).floor() as i64;
        }
        k
    }

    /// Returns the first stored id accepted by `same`, probing the home cell
    /// and every neighbouring cell whose boundary is within the margin.
    pub fn find<F: FnMut(usize) -> bool>(&self, v: &[f64; N], mut same: F) -> Option<usize> {
        let home = self.cell(v);
        let mut offsets: Vec<(usize, i64)> = Vec::new();
        for i in 0..N {
            let frac = v[i] / self.grid - home[i] as f64;
            let m = self.margin / self.grid;
            if frac < m {
                offsets.push((i, -1));
            } else if frac > 1.0 - m {
                offsets.push((i, 1));
            }
        }
        for mask in 0u32..(1u32 << offsets.len()) {
            let mut k = home;
            for (j, (i, o)) in offsets.iter().enumerate() {
                if mask & (1 << j) != 0 {
                    k[*i] += o;
                }
            }
            if let Some(ids) = self.cells.get(&k) {
                for &id in ids {
                    if same(id) {
                        return Some(id);
                    }
                }
            }
        }
        None
    }

    pub fn insert(&mut self, v: &[f64; N], id: usize) {
        let k = self.cell(v);
        self.cells.entry(k).or_default().push(id);
    }

    pub fn len(&self) -> usize {
        self.cells.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn straddling_values_are_found() {
        let mut idx = QuantIndex::<2>::new(1e-6, 1e-9);
        let a = [3e-6 - 1e-12, 0.5];
        idx.insert(&a, 0);
        let b = [3e-6 + 1e-12, 0.5];
        let hit = idx.find(&b, |id| id == 0);
        assert_eq!(hit, Some(0));
        assert_eq!(idx.find(&[1.0, 1.0], |_| true), None);
    }
}
