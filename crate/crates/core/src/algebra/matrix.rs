use super::{AlgebraError, Polynomial, VarList};

/// Dense row-major matrix of polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Polynomial>,
}

/// A `k × k` minor together with the row and column subsets that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Minor {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub value: Polynomial,
}

impl PolyMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Polynomial>) -> Result<Self, AlgebraError> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(AlgebraError::Shape { rows, cols, entries: entries.len() });
        }
        Ok(PolyMatrix { rows, cols, entries })
    }

    /// Builds a matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(columns: &[Vec<Polynomial>]) -> Result<Self, AlgebraError> {
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(AlgebraError::Shape { rows, cols: columns.len(), entries: 0 });
        }
        let mut entries = Vec::with_capacity(rows * columns.len());
        for r in 0..rows {
            for c in columns {
                entries.push(c[r].clone());
            }
        }
        Self::new(rows, columns.len(), entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Polynomial {
        &self.entries[r * self.cols + c]
    }

    pub fn column(&self, c: usize) -> Vec<Polynomial> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn vars(&self) -> &VarList {
        self.entries[0].vars()
    }

    /// Determinant of the submatrix on `rows × cols`, Laplace-expanded along
    /// the `expand_row`-th selected row.
    pub fn sub_determinant(&self, rows: &[usize], cols: &[usize], expand_row: usize) -> Polynomial {
        debug_assert_eq!(rows.len(), cols.len());
        let vars = self.vars().clone();
        match rows.len() {
            0 => Polynomial::one(&vars),
            1 => self.get(rows[0], cols[0]).clone(),
            2 => {
                let a = self.get(rows[0], cols[0]) * self.get(rows[1], cols[1]);
                let b = self.get(rows[0], cols[1]) * self.get(rows[1], cols[0]);
                a - b
            }
            _ => {
                let r = rows[expand_row];
                let rest: Vec<usize> = rows.iter().copied().filter(|&x| x != r).collect();
                let mut acc = Polynomial::zero(&vars);
                for (j, &c) in cols.iter().enumerate() {
                    let entry = self.get(r, c);
                    if entry.is_zero() {
                        continue;
                    }
                    let sub_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                    let cof = self.sub_determinant(&rest, &sub_cols, 0);
                    let term = entry * &cof;
                    if (expand_row + j).is_multiple_of(2) {
                        acc = acc + term;
                    } else {
                        acc = acc - term;
                    }
                }
                acc
            }
        }
    }

    /// All `k × k` minors: row subsets in lexicographic order, and within each,
    /// column subsets in lexicographic order.
    pub fn minors(&self, k: usize) -> Result<Vec<Minor>, AlgebraError> {
        if k == 0 || k > self.rows.min(self.cols) {
            return Err(AlgebraError::MinorSize { k, rows: self.rows, cols: self.cols });
        }
        let mut out = Vec::new();
        for rows in combinations(self.rows, k) {
            for cols in combinations(self.cols, k) {
                let value = self.sub_determinant(&rows, &cols, 0);
                out.push(Minor { rows: rows.clone(), cols, value });
            }
        }
        Ok(out)
    }
}

/// `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        // rightmost position that can still advance
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Polynomial-valued minors of `m` of size `k`, in [`PolyMatrix::minors`] order.
pub fn minors(m: &PolyMatrix, k: usize) -> Result<Vec<Polynomial>, AlgebraError> {
    Ok(m.minors(k)?.into_iter().map(|mi| mi.value).collect())
}
