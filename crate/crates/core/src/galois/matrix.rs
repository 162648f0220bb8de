use super::GaloisField;

/// Dense row-major matrix over a Galois field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldMatrix {
    rows: usize,
    cols: usize,
    data: Vec<usize>,
}

impl FieldMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: &[Vec<usize>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix rows");
        Self {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> usize {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: usize) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[usize] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<usize> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<usize>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    /// `self · otherᵀ`.
    pub fn mul_transpose(&self, other: &FieldMatrix, field: &GaloisField) -> FieldMatrix {
        assert_eq!(self.cols, other.cols, "inner dimensions differ");
        let mut out = FieldMatrix::zeros(self.rows, other.rows);
        for i in 0..self.rows {
            for j in 0..other.rows {
                let v = self
                    .row(i)
                    .iter()
                    .zip(other.row(j))
                    .fold(0, |acc, (&a, &b)| field.add_raw(acc, field.mul_raw(a, b)));
                out.set(i, j, v);
            }
        }
        out
    }

    /// Rank by Gaussian elimination over the field.
    pub fn rank(&self, field: &GaloisField) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for c in 0..m.cols {
            let Some(pivot) = (rank..m.rows).find(|&r| m.get(r, c) != 0) else {
                continue;
            };
            for k in 0..m.cols {
                m.data.swap(pivot * m.cols + k, rank * m.cols + k);
            }
            let s = field.inv_raw(m.get(rank, c));
            for k in 0..m.cols {
                m.set(rank, k, field.mul_raw(s, m.get(rank, k)));
            }
            for r in 0..m.rows {
                let f = m.get(r, c);
                if r != rank && f != 0 {
                    let nf = field.neg_raw(f);
                    for k in 0..m.cols {
                        let v = field.add_raw(m.get(r, k), field.mul_raw(nf, m.get(rank, k)));
                        m.set(r, k, v);
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// True when no column is zero and no column is a scalar multiple of
    /// another.
    pub fn columns_pairwise_independent(&self, field: &GaloisField) -> bool {
        let cols: Vec<Vec<usize>> = (0..self.cols).map(|c| self.column(c)).collect();
        if cols.iter().any(|c| c.iter().all(|&v| v == 0)) {
            return false;
        }
        for i in 0..cols.len() {
            for j in i + 1..cols.len() {
                let dependent = (1..field.order()).any(|s| {
                    cols[j]
                        .iter()
                        .zip(&cols[i])
                        .all(|(&b, &a)| b == field.mul_raw(s, a))
                });
                if dependent {
                    return false;
                }
            }
        }
        true
    }
}
