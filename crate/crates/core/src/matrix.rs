//! Dense exact matrices over a [`Field`], row-major.
//!
//! Vectors are rows and group elements act on the right throughout the
//! library, so "the action of s on v" is always `v * s`. Elimination uses
//! exact pivoting with full reduction at every step; dimensions stay small
//! (<= ~36) so fraction growth is not a concern.

use crate::error::{Error, Result};
use crate::field::{Field, QuadExtScalar};
use crate::rational::Rat;
use rand::Rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix<T> {
    pub rows: usize,
    pub cols: usize,
    data: Vec<T>,
}

pub type MatrixF = Matrix<Rat>;
pub type MatrixE = Matrix<QuadExtScalar>;

impl<T: Clone + PartialEq + std::fmt::Debug> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn at(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// Stack vertically: [self; other].
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Self { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn submatrix(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        Self::from_fn(nr, nc, |i, j| self.at(r0 + i, c0 + j).clone())
    }
}

impl<T: Clone + PartialEq + std::fmt::Debug> Matrix<T> {
    pub fn zero<K: Field<Elem = T>>(k: &K, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| k.zero())
    }

    pub fn identity<K: Field<Elem = T>>(k: &K, n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { k.one() } else { k.zero() })
    }

    pub fn is_zero<K: Field<Elem = T>>(&self, k: &K) -> bool {
        self.data.iter().all(|x| k.is_zero(x))
    }

    pub fn add<K: Field<Elem = T>>(&self, k: &K, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |i, j| k.add(self.at(i, j), other.at(i, j)))
    }

    pub fn sub<K: Field<Elem = T>>(&self, k: &K, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |i, j| k.sub(self.at(i, j), other.at(i, j)))
    }

    pub fn neg<K: Field<Elem = T>>(&self, k: &K) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| k.neg(self.at(i, j)))
    }

    pub fn scale<K: Field<Elem = T>>(&self, k: &K, c: &T) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| k.mul(c, self.at(i, j)))
    }

    pub fn mul<K: Field<Elem = T>>(&self, k: &K, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch in mul");
        Self::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = k.zero();
            for t in 0..self.cols {
                let a = self.at(i, t);
                if k.is_zero(a) {
                    continue;
                }
                acc = k.add(&acc, &k.mul(a, other.at(t, j)));
            }
            acc
        })
    }

    pub fn conj<K: Field<Elem = T>>(&self, k: &K) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| k.conj(self.at(i, j)))
    }

    /// Conjugate transpose with respect to the field involution.
    pub fn conj_transpose<K: Field<Elem = T>>(&self, k: &K) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| k.conj(self.at(j, i)))
    }

    /// Kronecker product in the row-action convention:
    /// (v (x) w) . kron(A, B) corresponds to index (i,j) -> (k,l) entry A[i][k] B[j][l].
    pub fn kron<K: Field<Elem = T>>(&self, k: &K, other: &Self) -> Self {
        let (m, n) = (self.rows, other.rows);
        let (mc, nc) = (self.cols, other.cols);
        Self::from_fn(m * n, mc * nc, |rc, cc| {
            let (i, j) = (rc / n, rc % n);
            let (a, b) = (cc / nc, cc % nc);
            k.mul(self.at(i, a), other.at(j, b))
        })
    }

    /// Reduced row echelon form together with the rank. Row operations only,
    /// first-nonzero pivoting, so the result is canonical for the row space.
    pub fn rref<K: Field<Elem = T>>(&self, k: &K) -> (Self, usize) {
        let mut m = self.clone();
        let mut pivot_row = 0;
        for col in 0..m.cols {
            if pivot_row == m.rows {
                break;
            }
            let Some(pr) = (pivot_row..m.rows).find(|&i| !k.is_zero(m.at(i, col))) else {
                continue;
            };
            m.swap_rows(pivot_row, pr);
            let inv = k.inv(m.at(pivot_row, col)).unwrap();
            for j in 0..m.cols {
                let v = k.mul(&inv, m.at(pivot_row, j));
                m.set(pivot_row, j, v);
            }
            for i in 0..m.rows {
                if i == pivot_row || k.is_zero(m.at(i, col)) {
                    continue;
                }
                let f = m.at(i, col).clone();
                for j in 0..m.cols {
                    let v = k.sub(m.at(i, j), &k.mul(&f, m.at(pivot_row, j)));
                    m.set(i, j, v);
                }
            }
            pivot_row += 1;
        }
        (m, pivot_row)
    }

    pub fn rank<K: Field<Elem = T>>(&self, k: &K) -> usize {
        self.rref(k).1
    }

    pub fn det<K: Field<Elem = T>>(&self, k: &K) -> T {
        assert_eq!(self.rows, self.cols, "det of non-square matrix");
        let mut m = self.clone();
        let n = m.rows;
        let mut det = k.one();
        for col in 0..n {
            for i in col..n {
                let row: Vec<&T> = (col..n).map(|j| m.at(i, j)).collect();
                if let Some(l) = k.normalizer(&row) {
                    for j in col..n {
                        let v = k.mul(&l, m.at(i, j));
                        m.set(i, j, v);
                    }
                    det = k.mul(&det, &k.inv(&l).expect("normalizer is nonzero"));
                }
            }
            let Some(pr) = (col..n).find(|&i| !k.is_zero(m.at(i, col))) else {
                return k.zero();
            };
            if pr != col {
                m.swap_rows(col, pr);
                det = k.neg(&det);
            }
            let pivot = m.at(col, col).clone();
            det = k.mul(&det, &pivot);
            let inv = k.inv(&pivot).unwrap();
            for i in col + 1..n {
                if k.is_zero(m.at(i, col)) {
                    continue;
                }
                let f = k.mul(m.at(i, col), &inv);
                for j in col..n {
                    let v = k.sub(m.at(i, j), &k.mul(&f, m.at(col, j)));
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    pub fn inverse<K: Field<Elem = T>>(&self, k: &K) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::ShapeMismatch(format!("{}x{} not square", self.rows, self.cols)));
        }
        let n = self.rows;
        // Gauss-Jordan on [self | I].
        let mut m = Self::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self.at(i, j).clone()
            } else if j - n == i {
                k.one()
            } else {
                k.zero()
            }
        });
        for col in 0..n {
            for i in col..n {
                let row: Vec<&T> = (0..2 * n).map(|j| m.at(i, j)).collect();
                if let Some(l) = k.normalizer(&row) {
                    for j in 0..2 * n {
                        let v = k.mul(&l, m.at(i, j));
                        m.set(i, j, v);
                    }
                }
            }
            let Some(pr) = (col..n).find(|&i| !k.is_zero(m.at(i, col))) else {
                return Err(Error::SingularMatrix);
            };
            m.swap_rows(col, pr);
            let inv = k.inv(m.at(col, col)).unwrap();
            for j in 0..2 * n {
                let v = k.mul(&inv, m.at(col, j));
                m.set(col, j, v);
            }
            for i in 0..n {
                if i == col || k.is_zero(m.at(i, col)) {
                    continue;
                }
                let f = m.at(i, col).clone();
                for j in 0..2 * n {
                    let v = k.sub(m.at(i, j), &k.mul(&f, m.at(col, j)));
                    m.set(i, j, v);
                }
            }
        }
        Ok(m.submatrix(0, n, n, n))
    }

    /// Basis (as rows) of { v : v * self = 0 }.
    pub fn row_kernel<K: Field<Elem = T>>(&self, k: &K) -> Self {
        // Row-reduce [self | I]; zero rows of the left block give kernel rows
        // on the right.
        let n = self.rows;
        let mut m = Self::from_fn(n, self.cols + n, |i, j| {
            if j < self.cols {
                self.at(i, j).clone()
            } else if j - self.cols == i {
                k.one()
            } else {
                k.zero()
            }
        });
        let mut pivot_row = 0;
        for col in 0..self.cols {
            if pivot_row == n {
                break;
            }
            let Some(pr) = (pivot_row..n).find(|&i| !k.is_zero(m.at(i, col))) else {
                continue;
            };
            m.swap_rows(pivot_row, pr);
            let inv = k.inv(m.at(pivot_row, col)).unwrap();
            for j in 0..m.cols {
                let v = k.mul(&inv, m.at(pivot_row, j));
                m.set(pivot_row, j, v);
            }
            for i in 0..n {
                if i == pivot_row || k.is_zero(m.at(i, col)) {
                    continue;
                }
                let f = m.at(i, col).clone();
                for j in 0..m.cols {
                    let v = k.sub(m.at(i, j), &k.mul(&f, m.at(pivot_row, j)));
                    m.set(i, j, v);
                }
            }
            pivot_row += 1;
        }
        let kernel_rows: Vec<Vec<T>> = (pivot_row..n)
            .map(|i| (0..n).map(|j| m.at(i, self.cols + j).clone()).collect())
            .collect();
        if kernel_rows.is_empty() {
            Self { rows: 0, cols: n, data: vec![] }
        } else {
            Self::from_rows(kernel_rows)
        }
    }

    /// Solve x * A = b for a row vector x (A = self, b a 1 x cols matrix).
    pub fn solve_row<K: Field<Elem = T>>(&self, k: &K, b: &Self) -> Result<Self> {
        if b.rows != 1 || b.cols != self.cols {
            return Err(Error::ShapeMismatch("rhs must be 1 x cols".into()));
        }
        // Solve A^T y = b^T by row reduction of [A^T | b^T].
        let at = self.transpose();
        let n = at.rows;
        let mut m = Self::from_fn(n, at.cols + 1, |i, j| {
            if j < at.cols {
                at.at(i, j).clone()
            } else {
                b.at(0, i).clone()
            }
        });
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut pivot_row = 0;
        for col in 0..at.cols {
            if pivot_row == n {
                break;
            }
            let Some(pr) = (pivot_row..n).find(|&i| !k.is_zero(m.at(i, col))) else {
                continue;
            };
            m.swap_rows(pivot_row, pr);
            let inv = k.inv(m.at(pivot_row, col)).unwrap();
            for j in 0..m.cols {
                let v = k.mul(&inv, m.at(pivot_row, j));
                m.set(pivot_row, j, v);
            }
            for i in 0..n {
                if i == pivot_row || k.is_zero(m.at(i, col)) {
                    continue;
                }
                let f = m.at(i, col).clone();
                for j in 0..m.cols {
                    let v = k.sub(m.at(i, j), &k.mul(&f, m.at(pivot_row, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push((pivot_row, col));
            pivot_row += 1;
        }
        // Inconsistent if a zero row has nonzero rhs.
        for i in pivot_row..n {
            if !k.is_zero(m.at(i, at.cols)) {
                return Err(Error::SingularMatrix);
            }
        }
        let mut x = vec![k.zero(); at.cols];
        for (row, col) in pivots {
            x[col] = m.at(row, at.cols).clone();
        }
        Ok(Self { rows: 1, cols: at.cols, data: x })
    }

    /// Invertible U (rows x rows) and R (cols x cols) with
    /// U * self * R = [[1_j, 0], [0, 0]], j = rank. Pivots may be chosen at
    /// random among the admissible nonzero entries.
    pub fn rank_normal_form<K: Field<Elem = T>, G: Rng>(
        &self,
        k: &K,
        mut rng: Option<&mut G>,
    ) -> (Self, Self, usize) {
        let mut m = self.clone();
        let mut u = Self::identity(k, self.rows);
        let mut r = Self::identity(k, self.cols);
        let mut t = 0;
        while t < m.rows && t < m.cols {
            // content normalization: scaling a row of (m, u) or a column of
            // (m, r) by a nonzero scalar is an ordinary elimination step and
            // keeps the transform entries small
            for i in t..m.rows {
                let row: Vec<&T> = (t..m.cols).map(|j| m.at(i, j)).collect();
                if let Some(l) = k.normalizer(&row) {
                    for j in 0..m.cols {
                        let v = k.mul(&l, m.at(i, j));
                        m.set(i, j, v);
                    }
                    for j in 0..u.cols {
                        let v = k.mul(&l, u.at(i, j));
                        u.set(i, j, v);
                    }
                }
            }
            for j in t..m.cols {
                let col: Vec<&T> = (t..m.rows).map(|i| m.at(i, j)).collect();
                if let Some(l) = k.normalizer(&col) {
                    for i in 0..m.rows {
                        let v = k.mul(&l, m.at(i, j));
                        m.set(i, j, v);
                    }
                    for i in 0..r.rows {
                        let v = k.mul(&l, r.at(i, j));
                        r.set(i, j, v);
                    }
                }
            }
            let candidates: Vec<(usize, usize)> = (t..m.rows)
                .flat_map(|i| (t..m.cols).map(move |j| (i, j)))
                .filter(|&(i, j)| !k.is_zero(m.at(i, j)))
                .collect();
            if candidates.is_empty() {
                break;
            }
            let (pi, pj) = match rng.as_deref_mut() {
                Some(g) => candidates[g.gen_range(0..candidates.len())],
                None => candidates[0],
            };
            m.swap_rows(t, pi);
            u.swap_rows(t, pi);
            m.swap_cols(t, pj);
            r.swap_cols(t, pj);
            // Scale row t so the pivot is 1.
            let inv = k.inv(m.at(t, t)).unwrap();
            for j in 0..m.cols {
                let v = k.mul(&inv, m.at(t, j));
                m.set(t, j, v);
            }
            for j in 0..u.cols {
                let v = k.mul(&inv, u.at(t, j));
                u.set(t, j, v);
            }
            // Clear the rest of column t with row ops.
            for i in 0..m.rows {
                if i == t || k.is_zero(m.at(i, t)) {
                    continue;
                }
                let f = m.at(i, t).clone();
                for j in 0..m.cols {
                    let v = k.sub(m.at(i, j), &k.mul(&f, m.at(t, j)));
                    m.set(i, j, v);
                }
                for j in 0..u.cols {
                    let v = k.sub(u.at(i, j), &k.mul(&f, u.at(t, j)));
                    u.set(i, j, v);
                }
            }
            // Clear the rest of row t with column ops.
            for j in 0..m.cols {
                if j == t || k.is_zero(m.at(t, j)) {
                    continue;
                }
                let f = m.at(t, j).clone();
                for i in 0..m.rows {
                    let v = k.sub(m.at(i, j), &k.mul(&f, m.at(i, t)));
                    m.set(i, j, v);
                }
                for i in 0..r.rows {
                    let v = k.sub(r.at(i, j), &k.mul(&f, r.at(i, t)));
                    r.set(i, j, v);
                }
            }
            t += 1;
        }
        (u, r, t)
    }

    /// Row spaces equal, as subspaces.
    pub fn same_row_space<K: Field<Elem = T>>(&self, k: &K, other: &Self) -> bool {
        if self.cols != other.cols {
            return false;
        }
        let (a, ra) = self.rref(k);
        let (b, rb) = other.rref(k);
        ra == rb && a.submatrix(0, 0, ra, a.cols) == b.submatrix(0, 0, rb, b.cols)
    }
}

impl MatrixE {
    /// Restriction of scalars from E to F: each E-dimension becomes two
    /// F-dimensions via the ordered basis (1, delta), interleaved in place.
    /// Multiplication by a + b*delta becomes the 2x2 block [[a, b*Delta], [b, a]].
    pub fn restrict_scalars(&self, delta_sq: &Rat) -> MatrixF {
        MatrixF::from_fn(2 * self.rows, 2 * self.cols, |i, j| {
            let e = self.at(i / 2, j / 2);
            match (i % 2, j % 2) {
                (0, 0) | (1, 1) => e.a.clone(),
                (0, 1) => &e.b * delta_sq,
                (1, 0) => e.b.clone(),
                _ => unreachable!(),
            }
        })
    }
}
