use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

/// Square grid of `n × n` flags, row-major, 64 per word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BitGrid {
    n: usize,
    words_per_row: usize,
    words: Vec<u64>,
}

impl BitGrid {
    pub fn new(n: usize, value: bool) -> BitGrid {
        let words_per_row = n.div_ceil(64);
        let mut g = BitGrid { n, words_per_row, words: vec![0; words_per_row * n] };
        if value {
            for j in 0..n {
                g.set_range(j, 0, n, true);
            }
        }
        g
    }

    pub fn side(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.words[j * self.words_per_row + i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        let w = &mut self.words[j * self.words_per_row + i / 64];
        if value {
            *w |= 1 << (i % 64);
        } else {
            *w &= !(1 << (i % 64));
        }
    }

    /// Sets or clears cells `i0..i1` of row `j`.
    pub fn set_range(&mut self, j: usize, i0: usize, i1: usize, value: bool) {
        let i1 = i1.min(self.n);
        if i0 >= i1 {
            return;
        }
        let row = j * self.words_per_row;
        let (w0, w1) = (i0 / 64, (i1 - 1) / 64);
        for w in w0..=w1 {
            let lo = if w == w0 { i0 % 64 } else { 0 };
            let hi = if w == w1 { (i1 - 1) % 64 + 1 } else { 64 };
            let mask = if hi - lo == 64 { u64::MAX } else { ((1u64 << (hi - lo)) - 1) << lo };
            if value {
                self.words[row + w] |= mask;
            } else {
                self.words[row + w] &= !mask;
            }
        }
    }

    pub fn count(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Cells set in both grids.
    pub fn count_and(&self, other: &BitGrid) -> u64 {
        self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones() as u64).sum()
    }

    /// Half-resolution grid whose cell is set iff any of its four children is.
    pub fn pool(&self) -> BitGrid {
        let m = self.n / 2;
        let mut out = BitGrid::new(m, false);
        for j in 0..m {
            for i in 0..m {
                if self.get(2 * i, 2 * j) || self.get(2 * i + 1, 2 * j) || self.get(2 * i, 2 * j + 1) || self.get(2 * i + 1, 2 * j + 1)
                {
                    out.set(i, j, true);
                }
            }
        }
        out
    }
}
