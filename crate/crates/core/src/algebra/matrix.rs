//! Dense matrices over a finite field, Gaussian elimination, and the text
//! exchange format shared by every module.

use std::fmt::Write as _;

use super::{AlgebraError, Elem, FiniteField};

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: FiniteField,
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl std::fmt::Debug for Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Matrix {}x{} over {:?}", self.rows, self.cols, self.field)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

/// `dst -= c * src`, elementwise.
#[inline]
pub(crate) fn axpy_sub(f: &FiniteField, dst: &mut [Elem], c: Elem, src: &[Elem]) {
    if c == 0 {
        return;
    }
    if f.degree() == 1 {
        let p = f.characteristic() as u64;
        let nc = p - c as u64;
        for (d, &s) in dst.iter_mut().zip(src) {
            if s != 0 {
                *d = ((*d as u64 + nc * s as u64) % p) as Elem;
            }
        }
    } else {
        for (d, &s) in dst.iter_mut().zip(src) {
            if s != 0 {
                *d = f.sub(*d, f.mul(c, s));
            }
        }
    }
}

impl Matrix {
    pub fn zeros(field: &FiniteField, rows: usize, cols: usize) -> Self {
        Self { field: field.clone(), rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: &FiniteField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(field: &FiniteField, rows: Vec<Vec<Elem>>) -> Result<Self, AlgebraError> {
        let cols = rows.first().map_or(0, Vec::len);
        Self::from_rows_with_cols(field, rows, cols)
    }

    /// Like [`Matrix::from_rows`] but keeps the column count when `rows` is empty.
    pub fn from_rows_with_cols(
        field: &FiniteField,
        rows: Vec<Vec<Elem>>,
        cols: usize,
    ) -> Result<Self, AlgebraError> {
        let n_rows = rows.len();
        let mut data = Vec::with_capacity(n_rows * cols);
        for row in rows {
            if row.len() != cols {
                return Err(AlgebraError::DimensionMismatch(format!(
                    "row of length {} in a matrix with {cols} columns",
                    row.len()
                )));
            }
            if let Some(&bad) = row.iter().find(|&&e| !field.contains(e)) {
                return Err(AlgebraError::InvalidElement(bad));
            }
            data.extend(row);
        }
        Ok(Self { field: field.clone(), rows: n_rows, cols, data })
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Elem {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Elem) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Elem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Elem> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Elem>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, AlgebraError> {
        if self.cols != other.rows {
            return Err(AlgebraError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for r in 0..self.rows {
            let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a != 0 {
                    axpy_sub(f, dst, f.neg(a), other.row(k));
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Elem]) -> Result<Vec<Elem>, AlgebraError> {
        if v.len() != self.cols {
            return Err(AlgebraError::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        let f = &self.field;
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(v).fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b))))
            .collect())
    }

    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(&self.field, self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                out.set(r, j, self.get(r, c));
            }
        }
        out
    }

    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(&self.field, rows.len(), self.cols);
        for (i, &r) in rows.iter().enumerate() {
            out.data[i * self.cols..(i + 1) * self.cols].copy_from_slice(self.row(r));
        }
        out
    }

    pub fn vstack(&self, other: &Matrix) -> Result<Matrix, AlgebraError> {
        if self.cols != other.cols {
            return Err(AlgebraError::DimensionMismatch("vstack column counts differ".into()));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Matrix { field: self.field.clone(), rows: self.rows + other.rows, cols: self.cols, data })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&e| e == 0)
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let f = self.field.clone();
        let cols = self.cols;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..cols {
                    self.data.swap(pr * cols + j, r * cols + j);
                }
            }
            let inv = f.inv_nonzero(self.get(r, c));
            for j in c..cols {
                let v = self.get(r, j);
                self.set(r, j, f.mul(v, inv));
            }
            let pivot_row = self.row(r)[c..].to_vec();
            for i in 0..self.rows {
                if i != r {
                    let factor = self.get(i, c);
                    if factor != 0 {
                        let dst = &mut self.data[i * cols + c..(i + 1) * cols];
                        axpy_sub(&f, dst, factor, &pivot_row);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let p = m.rref_in_place();
        (m, p)
    }

    pub fn rank(&self) -> usize {
        // Forward elimination only.
        let f = &self.field;
        let mut m = self.data.clone();
        let cols = self.cols;
        let mut r = 0;
        for c in 0..cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| m[i * cols + c] != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..cols {
                    m.swap(pr * cols + j, r * cols + j);
                }
            }
            let inv = f.inv_nonzero(m[r * cols + c]);
            let pivot_row: Vec<Elem> = m[r * cols + c..(r + 1) * cols].iter().map(|&v| f.mul(v, inv)).collect();
            for i in r + 1..self.rows {
                let factor = m[i * cols + c];
                if factor != 0 {
                    axpy_sub(f, &mut m[i * cols + c..(i + 1) * cols], factor, &pivot_row);
                }
            }
            r += 1;
        }
        r
    }

    /// Basis of the right kernel `{x : M x = 0}`, one basis vector per row.
    pub fn nullspace(&self) -> Matrix {
        let f = &self.field;
        let (red, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        let mut basis = Matrix::zeros(f, free.len(), self.cols);
        for (b, &fc) in free.iter().enumerate() {
            basis.set(b, fc, 1);
            for (pr, &pc) in pivots.iter().enumerate() {
                basis.set(b, pc, f.neg(red.get(pr, fc)));
            }
        }
        basis
    }

    /// Some `x` with `M x = rhs`, or `None` when the system is inconsistent.
    pub fn solve(&self, rhs: &[Elem]) -> Result<Option<Vec<Elem>>, AlgebraError> {
        if rhs.len() != self.rows {
            return Err(AlgebraError::DimensionMismatch(format!(
                "right-hand side of length {} for {} rows",
                rhs.len(),
                self.rows
            )));
        }
        let mut aug = Matrix::zeros(&self.field, self.rows, self.cols + 1);
        for r in 0..self.rows {
            aug.data[r * (self.cols + 1)..r * (self.cols + 1) + self.cols].copy_from_slice(self.row(r));
            aug.set(r, self.cols, rhs[r]);
        }
        let pivots = aug.rref_in_place();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![0; self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug.get(r, self.cols);
        }
        Ok(Some(x))
    }

    /// Serializes to the text exchange format.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let f = &self.field;
        if f.degree() > 1 {
            let coeffs: Vec<String> = f.modulus().iter().map(u32::to_string).collect();
            let _ = writeln!(s, "{} {} {}", f.characteristic(), f.degree(), coeffs.join(" "));
        }
        let _ = writeln!(s, "{} {} {}", f.order(), self.rows, self.cols);
        for r in 0..self.rows {
            let line: Vec<String> = self.row(r).iter().map(u32::to_string).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        s
    }

    /// Parses the text exchange format.
    pub fn from_text(text: &str) -> Result<Matrix, AlgebraError> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let parse_nums = |line: &str| -> Result<Vec<u64>, AlgebraError> {
            line.split_whitespace()
                .map(|t| t.parse::<u64>().map_err(|e| AlgebraError::Parse(format!("{t:?}: {e}"))))
                .collect()
        };
        let first = parse_nums(lines.next().ok_or_else(|| AlgebraError::Parse("empty input".into()))?)?;
        let (field, header) = if first.len() == 3 {
            (FiniteField::of_order(first[0])?, first)
        } else {
            if first.len() < 4 {
                return Err(AlgebraError::Parse("malformed field header".into()));
            }
            let p = first[0] as u32;
            let m = first[1] as usize;
            let modulus: Vec<u32> = first[2..].iter().map(|&c| c as u32).collect();
            if modulus.len() != m + 1 {
                return Err(AlgebraError::Parse(format!("expected {} modulus coefficients", m + 1)));
            }
            let field = FiniteField::with_modulus(p, modulus)?;
            let header =
                parse_nums(lines.next().ok_or_else(|| AlgebraError::Parse("missing size line".into()))?)?;
            if header.len() != 3 || header[0] != field.order() as u64 {
                return Err(AlgebraError::Parse("size line does not match field header".into()));
            }
            (field, header)
        };
        let (rows, cols) = (header[1] as usize, header[2] as usize);
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            let line = lines.next().ok_or_else(|| AlgebraError::Parse(format!("missing row {r}")))?;
            let vals = parse_nums(line)?;
            if vals.len() != cols {
                return Err(AlgebraError::Parse(format!("row {r} has {} entries, expected {cols}", vals.len())));
            }
            for v in vals {
                if v >= field.order() as u64 {
                    return Err(AlgebraError::InvalidElement(v as u32));
                }
                data.push(v as Elem);
            }
        }
        Ok(Matrix { field, rows, cols, data })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identity_rank() {
        let f = FiniteField::prime(11).unwrap();
        let i = Matrix::identity(&f, 3);
        assert_eq!(i.rank(), 3);
        assert_eq!(i.nullspace().rows(), 0);
    }

    #[test]
    fn zero_matrix() {
        let f = FiniteField::prime(11).unwrap();
        let z = Matrix::zeros(&f, 2, 4);
        assert_eq!(z.rank(), 0);
        assert_eq!(z.nullspace().rows(), 4);
    }

    #[test]
    fn solve_consistent_and_not() {
        let f = FiniteField::prime(7).unwrap();
        let m = Matrix::from_rows(&f, vec![vec![1, 2], vec![2, 4]]).unwrap();
        let x = m.solve(&[3, 6]).unwrap().unwrap();
        assert_eq!(m.mul_vec(&x).unwrap(), vec![3, 6]);
        assert_eq!(m.solve(&[3, 5]).unwrap(), None);
    }

    #[test]
    fn text_round_trip_extension_field() {
        let f = FiniteField::new(2, 4).unwrap();
        let m = Matrix::from_rows(&f, vec![vec![1, 15, 7], vec![0, 3, 9]]).unwrap();
        let text = m.to_text();
        assert!(text.starts_with("2 4 1 1 0 0 1\n16 2 3\n"));
        assert_eq!(Matrix::from_text(&text).unwrap(), m);
    }

    #[test]
    fn text_rejects_out_of_range() {
        assert!(matches!(Matrix::from_text("11 1 2\n3 11\n"), Err(AlgebraError::InvalidElement(11))));
        assert!(Matrix::from_text("11 2 2\n3 1\n").is_err());
    }

    fn small_matrix() -> impl Strategy<Value = (Vec<Vec<u32>>, Vec<usize>)> {
        (1usize..6, 1usize..7).prop_flat_map(|(r, c)| {
            (
                prop::collection::vec(prop::collection::vec(0u32..5, c), r),
                Just((0..r).collect::<Vec<_>>()).prop_shuffle(),
            )
        })
    }

    proptest! {
        #[test]
        fn rank_nullity_and_shuffle((rows, perm) in small_matrix()) {
            let f = FiniteField::prime(5).unwrap();
            let m = Matrix::from_rows(&f, rows).unwrap();
            let k = m.nullspace();
            prop_assert_eq!(m.rank() + k.rows(), m.cols());
            prop_assert!(m.mul(&k.transpose()).unwrap().is_zero());
            prop_assert_eq!(m.select_rows(&perm).rank(), m.rank());
            prop_assert_eq!(m.rref().1.len(), m.rank());
        }
    }
}
