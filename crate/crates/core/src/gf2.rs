//! Dense GF(2) linear algebra on u64-packed rows.
//!
//! Small and direct: enough for exact erasure solving and nullspace
//! sampling on desk-scale codes (n up to a few thousand).

/// A dense binary matrix with an optional augmented column block.
#[derive(Debug, Clone)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        let words_per_row = cols.div_ceil(64);
        BitMatrix { rows, cols, words_per_row, data: vec![0; rows * words_per_row] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r * self.words_per_row + c / 64] >> (c % 64) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        let w = r * self.words_per_row + c / 64;
        let mask = 1u64 << (c % 64);
        if value {
            self.data[w] |= mask;
        } else {
            self.data[w] &= !mask;
        }
    }

    pub fn flip(&mut self, r: usize, c: usize) {
        self.data[r * self.words_per_row + c / 64] ^= 1u64 << (c % 64);
    }

    fn xor_row_into(&mut self, src: usize, dst: usize) {
        let (a, b) = (src * self.words_per_row, dst * self.words_per_row);
        for w in 0..self.words_per_row {
            let v = self.data[a + w];
            self.data[b + w] ^= v;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.words_per_row {
            self.data.swap(a * self.words_per_row + w, b * self.words_per_row + w);
        }
    }

    /// In-place reduced row echelon form over the first `pivot_cols` columns
    /// (columns past that are carried along, e.g. an RHS). Returns the pivot
    /// column of each pivot row, in order.
    pub fn reduce(&mut self, pivot_cols: usize) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..pivot_cols.min(self.cols) {
            let Some(p) = (row..self.rows).find(|&r| self.get(r, col)) else {
                continue;
            };
            self.swap_rows(row, p);
            for r in 0..self.rows {
                if r != row && self.get(r, col) {
                    self.xor_row_into(row, r);
                }
            }
            pivots.push(col);
            row += 1;
            if row == self.rows {
                break;
            }
        }
        pivots
    }

    /// True when row `r` has no set bit among columns `0..limit` except
    /// possibly `except`.
    pub fn row_is_unit(&self, r: usize, limit: usize, except: usize) -> bool {
        for c in 0..limit {
            if c != except && self.get(r, c) {
                return false;
            }
        }
        true
    }
}
