use std::fmt;

use crate::error::{Error, Result};

use super::vector::BitVector;

/// Incremental basis of a GF(2) subspace with pivot bookkeeping.
///
/// Vectors are stored reduced against all earlier entries, so membership is a
/// single forward pass.
#[derive(Clone, Debug, Default)]
pub struct XorBasis {
    reduced: Vec<(usize, BitVector)>,
}

impl XorBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dim(&self) -> usize {
        self.reduced.len()
    }

    fn reduce(&self, v: &mut BitVector) {
        for (pivot, b) in &self.reduced {
            if v.get(*pivot) {
                v.xor_unchecked(b);
            }
        }
    }

    /// Adds `v` to the basis. Returns `false` if it was already in the span.
    pub fn insert(&mut self, v: &BitVector) -> bool {
        let mut r = v.clone();
        self.reduce(&mut r);
        match r.first_one() {
            Some(pivot) => {
                self.reduced.push((pivot, r));
                true
            }
            None => false,
        }
    }

    pub fn contains(&self, v: &BitVector) -> bool {
        let mut r = v.clone();
        self.reduce(&mut r);
        r.is_zero()
    }
}

/// A dense m x n matrix over GF(2), stored as packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitVector>,
}

impl BitMatrix {
    /// Empty matrix with `cols` columns and no rows.
    pub fn new(cols: usize) -> Result<Self> {
        if cols == 0 {
            return Err(Error::Argument("matrix needs at least one column".into()));
        }
        Ok(Self { cols, rows: Vec::new() })
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVector>) -> Result<Self> {
        let mut m = Self::new(cols)?;
        for r in rows {
            m.push_row(r)?;
        }
        Ok(m)
    }

    /// Parses one bitstring per row. All rows must have the same length.
    pub fn from_strs<S: AsRef<str>>(rows: &[S]) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|r| r.as_ref().parse::<BitVector>())
            .collect::<Result<Vec<_>>>()?;
        let cols = parsed.first().map(BitVector::len).ok_or_else(|| {
            Error::Argument("cannot infer column count from zero rows".into())
        })?;
        Self::from_rows(cols, parsed)
    }

    pub fn push_row(&mut self, row: BitVector) -> Result<()> {
        if row.len() != self.cols {
            return Err(Error::Dimension(format!(
                "row of length {} pushed into matrix with {} columns",
                row.len(),
                self.cols
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.rows[r].set(c, value);
    }

    /// Column `j` as a vector of length `nrows`.
    pub fn column(&self, j: usize) -> BitVector {
        let mut c = BitVector::zeros(self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            if row.get(j) {
                c.set(i, true);
            }
        }
        c
    }

    pub fn columns(&self) -> Vec<BitVector> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    /// Transpose. Only defined when the result has at least one column.
    pub fn transpose(&self) -> Result<BitMatrix> {
        BitMatrix::from_rows(self.rows.len(), self.columns())
    }

    /// Submatrix made of the listed rows, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> BitMatrix {
        BitMatrix {
            cols: self.cols,
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }

    /// GF(2) rank by row elimination.
    pub fn rank(&self) -> usize {
        let mut basis = XorBasis::new();
        for r in &self.rows {
            basis.insert(r);
        }
        basis.dim()
    }

    /// Linearly independent columns of the matrix spanning its column space.
    ///
    /// The returned vectors are actual columns (length `nrows`), chosen
    /// greedily from left to right.
    pub fn column_space_basis(&self) -> Vec<BitVector> {
        let mut basis = XorBasis::new();
        let mut chosen = Vec::new();
        for j in 0..self.cols {
            if basis.dim() == self.rows.len() {
                break;
            }
            let col = self.column(j);
            if basis.insert(&col) {
                chosen.push(col);
            }
        }
        chosen
    }

    /// Basis of `{x : row . x = 0 for every row}`.
    pub fn null_space(&self) -> Vec<BitVector> {
        // Reduced row echelon form with explicit pivot columns.
        let mut rows: Vec<BitVector> = self.rows.clone();
        let mut pivots: Vec<usize> = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            let Some(p) = (r..rows.len()).find(|&i| rows[i].get(c)) else {
                continue;
            };
            rows.swap(r, p);
            let pivot_row = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && row.get(c) {
                    row.xor_unchecked(&pivot_row);
                }
            }
            pivots.push(c);
            r += 1;
            if r == rows.len() {
                break;
            }
        }
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|free| {
                let mut v = BitVector::zeros(self.cols);
                v.set(free, true);
                for (row, &pc) in rows.iter().zip(&pivots) {
                    if row.get(free) {
                        v.set(pc, true);
                    }
                }
                v
            })
            .collect()
    }

    fn check_column_pair(&self, a: usize, b: usize) -> Result<()> {
        if a >= self.cols || b >= self.cols {
            return Err(Error::Argument(format!(
                "column index out of range: ({a}, {b}) with {} columns",
                self.cols
            )));
        }
        if a == b {
            return Err(Error::Argument(format!("column pair must be distinct, got {a} twice")));
        }
        Ok(())
    }

    /// Returns a copy with column `dst` replaced by `dst XOR src`.
    pub fn add_column(&self, src: usize, dst: usize) -> Result<BitMatrix> {
        let mut out = self.clone();
        out.add_column_in_place(src, dst)?;
        Ok(out)
    }

    pub fn add_column_in_place(&mut self, src: usize, dst: usize) -> Result<()> {
        self.check_column_pair(src, dst)?;
        for row in &mut self.rows {
            if row.get(src) {
                row.flip(dst);
            }
        }
        Ok(())
    }

    pub fn swap_columns_in_place(&mut self, a: usize, b: usize) -> Result<()> {
        self.check_column_pair(a, b)?;
        for row in &mut self.rows {
            let (x, y) = (row.get(a), row.get(b));
            row.set(a, y);
            row.set(b, x);
        }
        Ok(())
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitMatrix({}x{}) [", self.rows.len(), self.cols)?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{r}")?;
        }
        f.write_str("]")
    }
}
