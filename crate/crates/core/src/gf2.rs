//! Dense GF(2) linear algebra on matrices of up to 128 columns.
//!
//! Rows are stored as `u128` words, bit `j` holding column `j`. This is
//! the workhorse behind parity checks, coset labeling, and the random
//! code search.

use crate::bits::BitString;
use crate::error::{Error, Result};
use rand::Rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: Vec<u128>,
    cols: usize,
}

impl BitMatrix {
    pub fn new(rows: Vec<u128>, cols: usize) -> Self {
        assert!(cols <= 128);
        let mask = mask(cols);
        assert!(rows.iter().all(|r| r & !mask == 0), "row bits beyond column count");
        BitMatrix { rows, cols }
    }

    pub fn zero(n_rows: usize, cols: usize) -> Self {
        BitMatrix { rows: vec![0; n_rows], cols }
    }

    pub fn identity(n: usize) -> Self {
        BitMatrix {
            rows: (0..n).map(|i| 1u128 << i).collect(),
            cols: n,
        }
    }

    pub fn random<R: Rng + ?Sized>(n_rows: usize, cols: usize, rng: &mut R) -> Self {
        let m = mask(cols);
        BitMatrix {
            rows: (0..n_rows).map(|_| rng.gen::<u128>() & m).collect(),
            cols,
        }
    }

    pub fn from_rows(rows: &[BitString]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols));
        BitMatrix {
            rows: rows.iter().map(|r| r.word()).collect(),
            cols,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> u128 {
        self.rows[i]
    }

    pub fn row_bits(&self, i: usize) -> BitString {
        BitString::from_word(self.rows[i], self.cols)
    }

    pub fn rows(&self) -> &[u128] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.rows[i] >> j) & 1 == 1
    }

    /// Matrix-vector product over GF(2); bit `i` of the result is the
    /// parity of row `i` AND `v`.
    pub fn mul_word(&self, v: u128) -> u128 {
        let mut out = 0u128;
        for (i, row) in self.rows.iter().enumerate() {
            if (row & v).count_ones() % 2 == 1 {
                out |= 1 << i;
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &BitString) -> Result<BitString> {
        if v.len() != self.cols {
            return Err(Error::parameter(format!(
                "vector length {} does not match {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok(BitString::from_word(self.mul_word(v.word()), self.rows.len()))
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        rank_of(&mut rows)
    }

    /// Stacks `self` on top of `other` (same column count).
    pub fn stack(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.cols);
        let mut rows = self.rows.clone();
        rows.extend_from_slice(&other.rows);
        BitMatrix { rows, cols: self.cols }
    }

    /// One solution `x` of `self * x = rhs`, if any.
    ///
    /// Gaussian elimination on the augmented system; free variables are
    /// set to zero, so the result is deterministic.
    pub fn solve(&self, rhs: u128) -> Option<u128> {
        let n_rows = self.rows.len();
        let mut aug: Vec<(u128, bool)> = (0..n_rows)
            .map(|i| (self.rows[i], (rhs >> i) & 1 == 1))
            .collect();
        let mut pivot_cols = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if let Some(p) = (r..n_rows).find(|&i| (aug[i].0 >> c) & 1 == 1) {
                aug.swap(r, p);
                let (prow, pb) = aug[r];
                for (i, entry) in aug.iter_mut().enumerate() {
                    if i != r && (entry.0 >> c) & 1 == 1 {
                        entry.0 ^= prow;
                        entry.1 ^= pb;
                    }
                }
                pivot_cols.push(c);
                r += 1;
            }
        }
        // inconsistent if a zero row has rhs 1
        if aug[r..].iter().any(|&(row, b)| row == 0 && b) {
            return None;
        }
        let mut x = 0u128;
        for (i, &c) in pivot_cols.iter().enumerate() {
            if aug[i].1 {
                x |= 1 << c;
            }
        }
        Some(x)
    }

    /// Basis of the kernel {x : self * x = 0}.
    pub fn nullspace(&self) -> Vec<u128> {
        let n_rows = self.rows.len();
        let mut rows = self.rows.clone();
        let mut pivot_of_col: Vec<Option<usize>> = vec![None; self.cols];
        let mut r = 0;
        for c in 0..self.cols {
            if r >= n_rows {
                break;
            }
            if let Some(p) = (r..n_rows).find(|&i| (rows[i] >> c) & 1 == 1) {
                rows.swap(r, p);
                let prow = rows[r];
                for (i, row) in rows.iter_mut().enumerate() {
                    if i != r && (*row >> c) & 1 == 1 {
                        *row ^= prow;
                    }
                }
                pivot_of_col[c] = Some(r);
                r += 1;
            }
        }
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_of_col[free].is_some() {
                continue;
            }
            let mut v = 1u128 << free;
            for c in 0..self.cols {
                if let Some(pr) = pivot_of_col[c] {
                    if (rows[pr] >> free) & 1 == 1 {
                        v |= 1 << c;
                    }
                }
            }
            basis.push(v);
        }
        basis
    }
}

fn mask(cols: usize) -> u128 {
    if cols == 128 {
        u128::MAX
    } else {
        (1u128 << cols) - 1
    }
}

fn rank_of(rows: &mut [u128]) -> usize {
    let mut rank = 0;
    for c in 0..128 {
        if let Some(p) = (rank..rows.len()).find(|&i| (rows[i] >> c) & 1 == 1) {
            rows.swap(rank, p);
            let prow = rows[rank];
            for (i, row) in rows.iter_mut().enumerate() {
                if i != rank && (*row >> c) & 1 == 1 {
                    *row ^= prow;
                }
            }
            rank += 1;
        }
    }
    rank
}
