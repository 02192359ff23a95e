//! The split isometry group of the standard (-epsilon)-hermitian form
//! [[0, 1_r], [-1_r, 0]] over a field with involution, acting on row vectors
//! on the right: { M : M T M* = T }.
//!
//! Over E with the Galois involution this is the split unitary group U(W);
//! over F with the trivial involution it is Sp(2r). Both share the Weyl
//! elements tau_j, the Siegel parabolic P stabilizing Y = span{e_i^*}, the
//! Bruhat decomposition M = p1 tau_j p2, and the cell invariants
//! j(M) = rank of the Y-to-X block and x(M) = det(p1 p2 |_Y).

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::Matrix;
use crate::rational::{rat, Rat};
use rand::Rng;

#[derive(Debug, Clone)]
pub struct SplitGroup<K: Field> {
    pub k: K,
    pub r: usize,
}

/// h = p1 tau_j p2 with p1, p2 in the parabolic P; x_class is the raw
/// determinant det(p1 p2 |_Y), a representative of the coset invariant.
#[derive(Debug, Clone)]
pub struct BruhatData<T> {
    pub p1: Matrix<T>,
    pub j: usize,
    pub p2: Matrix<T>,
    pub x_class: T,
}

impl<K: Field> SplitGroup<K> {
    pub fn new(k: K, r: usize) -> Self {
        assert!(r >= 1);
        Self { k, r }
    }

    pub fn dim(&self) -> usize {
        2 * self.r
    }

    /// The fixed Gram matrix [[0, 1_r], [-1_r, 0]].
    pub fn gram(&self) -> Matrix<K::Elem> {
        let r = self.r;
        let k = &self.k;
        Matrix::from_fn(2 * r, 2 * r, |i, j| {
            if i < r && j == i + r {
                k.one()
            } else if i >= r && j == i - r {
                k.neg(&k.one())
            } else {
                k.zero()
            }
        })
    }

    /// The unique nu with M T M* = nu T, which must lie in the fixed field of
    /// the involution.
    pub fn similitude_factor(&self, m: &Matrix<K::Elem>) -> Result<K::Elem> {
        let k = &self.k;
        let n = self.dim();
        if m.rows != n || m.cols != n {
            return Err(Error::ShapeMismatch(format!("{}x{}, expected {n}x{n}", m.rows, m.cols)));
        }
        let t = self.gram();
        let mtm = m.mul(k, &t).mul(k, &m.conj_transpose(k));
        let nu = mtm.at(0, self.r).clone();
        if k.is_zero(&nu) {
            return Err(Error::NotSimilitude);
        }
        if mtm != t.scale(k, &nu) {
            return Err(Error::NotSimilitude);
        }
        if k.conj(&nu) != nu {
            return Err(Error::NotSimilitude);
        }
        Ok(nu)
    }

    pub fn is_isometry(&self, m: &Matrix<K::Elem>) -> bool {
        matches!(self.similitude_factor(m), Ok(nu) if nu == self.k.one())
    }

    /// Membership in the parabolic P stabilizing Y: isometry with zero
    /// Y-to-X block.
    pub fn in_parabolic(&self, m: &Matrix<K::Elem>) -> bool {
        self.is_isometry(m) && self.y_to_x_block(m).is_zero(&self.k)
    }

    pub fn y_to_x_block(&self, m: &Matrix<K::Elem>) -> Matrix<K::Elem> {
        m.submatrix(self.r, 0, self.r, self.r)
    }

    pub fn y_block(&self, m: &Matrix<K::Elem>) -> Matrix<K::Elem> {
        m.submatrix(self.r, self.r, self.r, self.r)
    }

    /// Weyl element: e_i -> -e_i^*, e_i^* -> e_i for i <= j, identity on the
    /// remaining hyperbolic planes. tau_0 = id.
    pub fn tau(&self, j: usize) -> Result<Matrix<K::Elem>> {
        if j > self.r {
            return Err(Error::IndexOutOfRange);
        }
        let (r, k) = (self.r, &self.k);
        Ok(Matrix::from_fn(2 * r, 2 * r, |row, col| {
            if row < r {
                if row < j && col == row + r {
                    k.neg(&k.one())
                } else if row >= j && col == row {
                    k.one()
                } else {
                    k.zero()
                }
            } else {
                let i = row - r;
                if (i < j && col == i) || (i >= j && col == row) {
                    k.one()
                } else {
                    k.zero()
                }
            }
        }))
    }

    /// tau_j^{-1}: e_i -> e_i^*, e_i^* -> -e_i for i <= j.
    pub fn tau_inverse(&self, j: usize) -> Matrix<K::Elem> {
        let (r, k) = (self.r, &self.k);
        Matrix::from_fn(2 * r, 2 * r, |row, col| {
            if row < r {
                if (row < j && col == row + r) || (row >= j && col == row) {
                    k.one()
                } else {
                    k.zero()
                }
            } else {
                let i = row - r;
                if i < j && col == i {
                    k.neg(&k.one())
                } else if i >= j && col == row {
                    k.one()
                } else {
                    k.zero()
                }
            }
        })
    }

    /// Levi element diag(A, (A*)^{-1}) for invertible A.
    pub fn levi(&self, a: &Matrix<K::Elem>) -> Result<Matrix<K::Elem>> {
        let (r, k) = (self.r, &self.k);
        assert_eq!((a.rows, a.cols), (r, r));
        let d = a.conj_transpose(k).inverse(k)?;
        Ok(Matrix::from_fn(2 * r, 2 * r, |i, j| {
            if i < r && j < r {
                a.at(i, j).clone()
            } else if i >= r && j >= r {
                d.at(i - r, j - r).clone()
            } else {
                k.zero()
            }
        }))
    }

    /// Unipotent element [[1, b], [0, 1]]; membership requires b* = b.
    pub fn unipotent(&self, b: &Matrix<K::Elem>) -> Result<Matrix<K::Elem>> {
        let (r, k) = (self.r, &self.k);
        assert_eq!((b.rows, b.cols), (r, r));
        if b.conj_transpose(k) != *b {
            return Err(Error::NotSimilitude);
        }
        Ok(Matrix::from_fn(2 * r, 2 * r, |i, j| {
            if i == j {
                k.one()
            } else if i < r && j >= r {
                b.at(i, j - r).clone()
            } else {
                k.zero()
            }
        }))
    }

    /// Scaling element d(y) = diag(1_r, y 1_r), a similitude with factor y.
    pub fn d(&self, y: &Rat) -> Result<Matrix<K::Elem>> {
        if y == &rat(0, 1) {
            return Err(Error::ZeroScale);
        }
        let (r, k) = (self.r, &self.k);
        let ye = k.from_rat(y);
        Ok(Matrix::from_fn(2 * r, 2 * r, |i, j| {
            if i != j {
                k.zero()
            } else if i < r {
                k.one()
            } else {
                ye.clone()
            }
        }))
    }

    /// h^y = d(y)^{-1} h d(y): scale the Y-rows by 1/y and the Y-columns by y.
    pub fn conj_by_d(&self, h: &Matrix<K::Elem>, y: &Rat) -> Result<Matrix<K::Elem>> {
        if y == &rat(0, 1) {
            return Err(Error::ZeroScale);
        }
        let k = &self.k;
        let r = self.r;
        let ye = k.from_rat(y);
        let yi = k.inv(&ye).unwrap();
        Ok(Matrix::from_fn(2 * r, 2 * r, |i, j| {
            let mut v = h.at(i, j).clone();
            if i >= r {
                v = k.mul(&v, &yi);
            }
            if j >= r {
                v = k.mul(&v, &ye);
            }
            v
        }))
    }

    /// Isometry part h_1 = d(nu(h))^{-1} h: scale the Y-rows by 1/nu.
    pub fn isometry_part(&self, h: &Matrix<K::Elem>, nu: &Rat) -> Matrix<K::Elem> {
        let k = &self.k;
        let r = self.r;
        let ni = k.inv(&k.from_rat(nu)).expect("nonzero nu");
        Matrix::from_fn(2 * r, 2 * r, |i, j| {
            if i >= r {
                k.mul(h.at(i, j), &ni)
            } else {
                h.at(i, j).clone()
            }
        })
    }

    /// Fast inverse from the defining identity: M T M* = nu T gives
    /// M^{-1} = -nu^{-1} T M* T, and multiplication by T is a signed block
    /// swap.
    pub fn fast_inverse(&self, m: &Matrix<K::Elem>, nu: &Rat) -> Matrix<K::Elem> {
        let k = &self.k;
        let r = self.r;
        let ni = k.inv(&k.from_rat(nu)).expect("nonzero nu");
        // (T M* T)_{ij} with sign bookkeeping: T row-swaps with a sign on the
        // lower half, T on the right column-swaps with a sign on the left.
        Matrix::from_fn(2 * r, 2 * r, |i, j| {
            let (si, ii) = if i < r { (1, i + r) } else { (-1, i - r) };
            let (sj, jj) = if j < r { (-1, j + r) } else { (1, j - r) };
            let v = k.conj(m.at(jj, ii));
            let v = k.mul(&v, &ni);
            if si * sj * -1 < 0 {
                k.neg(&v)
            } else {
                v
            }
        })
    }

    fn apply_block_diag_left(
        &self,
        a: &Matrix<K::Elem>,
        dblk: &Matrix<K::Elem>,
        m: &Matrix<K::Elem>,
    ) -> Matrix<K::Elem> {
        // diag(a, dblk) . m
        let k = &self.k;
        let r = self.r;
        Matrix::from_fn(2 * r, 2 * r, |i, j| {
            let mut acc = k.zero();
            if i < r {
                for t in 0..r {
                    if !k.is_zero(a.at(i, t)) {
                        acc = k.add(&acc, &k.mul(a.at(i, t), m.at(t, j)));
                    }
                }
            } else {
                for t in 0..r {
                    if !k.is_zero(dblk.at(i - r, t)) {
                        acc = k.add(&acc, &k.mul(dblk.at(i - r, t), m.at(t + r, j)));
                    }
                }
            }
            acc
        })
    }

    fn apply_block_diag_right(
        &self,
        m: &Matrix<K::Elem>,
        a: &Matrix<K::Elem>,
        dblk: &Matrix<K::Elem>,
    ) -> Matrix<K::Elem> {
        // m . diag(a, dblk)
        let k = &self.k;
        let r = self.r;
        Matrix::from_fn(2 * r, 2 * r, |i, j| {
            let mut acc = k.zero();
            if j < r {
                for t in 0..r {
                    if !k.is_zero(a.at(t, j)) {
                        acc = k.add(&acc, &k.mul(m.at(i, t), a.at(t, j)));
                    }
                }
            } else {
                for t in 0..r {
                    if !k.is_zero(dblk.at(t, j - r)) {
                        acc = k.add(&acc, &k.mul(m.at(i, t + r), dblk.at(t, j - r)));
                    }
                }
            }
            acc
        })
    }

    fn unipotent_apply_left(&self, b: &Matrix<K::Elem>, m: &Matrix<K::Elem>) -> Matrix<K::Elem> {
        // [[1, b], [0, 1]] . m : X-rows += b . Y-rows
        let k = &self.k;
        let r = self.r;
        Matrix::from_fn(2 * r, 2 * r, |i, j| {
            if i < r {
                let mut acc = m.at(i, j).clone();
                for t in 0..r {
                    if !k.is_zero(b.at(i, t)) {
                        acc = k.add(&acc, &k.mul(b.at(i, t), m.at(t + r, j)));
                    }
                }
                acc
            } else {
                m.at(i, j).clone()
            }
        })
    }

    fn unipotent_apply_right(&self, m: &Matrix<K::Elem>, b: &Matrix<K::Elem>) -> Matrix<K::Elem> {
        // m . [[1, b], [0, 1]] : Y-cols += X-cols . b
        let k = &self.k;
        let r = self.r;
        Matrix::from_fn(2 * r, 2 * r, |i, j| {
            if j >= r {
                let mut acc = m.at(i, j).clone();
                for t in 0..r {
                    if !k.is_zero(b.at(t, j - r)) {
                        acc = k.add(&acc, &k.mul(m.at(i, t), b.at(t, j - r)));
                    }
                }
                acc
            } else {
                m.at(i, j).clone()
            }
        })
    }

    fn tau_inv_apply_left(&self, j: usize, m: &Matrix<K::Elem>) -> Matrix<K::Elem> {
        // tau_j^{-1} . m : X-row i <- Y-row i, Y-row i <- -(X-row i) for i < j
        let k = &self.k;
        let r = self.r;
        Matrix::from_fn(2 * r, 2 * r, |i, col| {
            if i < r {
                if i < j {
                    m.at(i + r, col).clone()
                } else {
                    m.at(i, col).clone()
                }
            } else {
                let ii = i - r;
                if ii < j {
                    k.neg(m.at(ii, col))
                } else {
                    m.at(i, col).clone()
                }
            }
        })
    }

    /// Shared Bruhat reduction: returns (U, R, j, x_unip, y_unip, p_right)
    /// with h = lev((U*)^{-1})^{-1} u(x)^{-1} tau_j p_right u(y)^{-1} lev(R)^{-1}.
    #[allow(clippy::type_complexity)]
    fn bruhat_reduce<G: Rng>(
        &self,
        h: &Matrix<K::Elem>,
        mut rng: Option<&mut G>,
    ) -> Result<(
        Matrix<K::Elem>,
        Matrix<K::Elem>,
        usize,
        Matrix<K::Elem>,
        Matrix<K::Elem>,
        Matrix<K::Elem>,
    )> {
        let k = &self.k;
        let r = self.r;
        if !self.is_isometry(h) {
            return Err(Error::NotIsometry);
        }
        let c = self.y_to_x_block(h);
        let (u, rm, j) = c.rank_normal_form(k, rng.as_deref_mut());
        // lev_left = diag((U*)^{-1}, U) sends c to U c; lev_right = diag(R, (R*)^{-1}).
        let a_left = u.conj_transpose(k).inverse(k).expect("U invertible");
        let rm_star_inv = rm.conj_transpose(k).inverse(k).expect("R invertible");
        let h1 = self.apply_block_diag_right(
            &self.apply_block_diag_left(&a_left, &u, h),
            &rm,
            &rm_star_inv,
        );

        // c(h1) = [[1_j, 0], [0, 0]]; the group relations force the Y-block
        // shape d = [[d_JJ, d_JK], [0, d_KK]] with d_JJ hermitian.
        let d1 = self.y_block(&h1);
        let mut y = Matrix::zero(k, r, r);
        for row in 0..j {
            for col in 0..r {
                y.set(row, col, k.neg(d1.at(row, col)));
            }
        }
        for row in j..r {
            for col in 0..j {
                // mirror to keep y* = y
                y.set(row, col, k.neg(&k.conj(d1.at(col, row))));
            }
        }
        debug_assert!(d1.submatrix(j, 0, r - j, j).is_zero(k), "parabolic shape violated");
        let h2 = self.unipotent_apply_right(&h1, &y);

        // Kill the X-to-X block outside its KK corner from the left.
        let a2 = h2.submatrix(0, 0, r, r);
        let mut x = Matrix::zero(k, r, r);
        for row in 0..j {
            for col in 0..j {
                x.set(row, col, k.neg(a2.at(row, col)));
            }
        }
        for row in j..r {
            for col in 0..j {
                x.set(row, col, k.neg(a2.at(row, col)));
                x.set(col, row, k.neg(&k.conj(a2.at(row, col))));
            }
        }
        let h3 = self.unipotent_apply_left(&x, &h2);

        let p_right = self.tau_inv_apply_left(j, &h3);
        if !self.y_to_x_block(&p_right).is_zero(k) {
            return Err(Error::Calibration(
                "bruhat reduction did not land in the parabolic".into(),
            ));
        }
        Ok((u, rm, j, x, y, p_right))
    }

    /// Bruhat decomposition h = p1 tau_j p2 of an isometry, with exact
    /// reconstruction. Pivot choices during the rank normalization can be
    /// randomized; different choices change p1, p2 and move x_class within
    /// its coset.
    pub fn bruhat<G: Rng>(
        &self,
        h: &Matrix<K::Elem>,
        rng: Option<&mut G>,
    ) -> Result<BruhatData<K::Elem>> {
        let k = &self.k;
        let (u, rm, j, x, y, p_right) = self.bruhat_reduce(h, rng)?;
        // h = (lev_left^{-1} u(x)^{-1}) tau_j (p_right u(y)^{-1} lev_right^{-1});
        // the factors invert structurally: u(x)^{-1} = u(-x), lev(A)^{-1} = lev(A^{-1}).
        let a_left = u.conj_transpose(k).inverse(k).unwrap();
        let lev_left_inv = self.levi(&a_left.inverse(k).unwrap())?;
        let lev_right_inv = self.levi(&rm.inverse(k).unwrap())?;
        let p1 = lev_left_inv.mul(k, &self.unipotent(&x.neg(k))?);
        let p2 = p_right
            .mul(k, &self.unipotent(&y.neg(k))?)
            .mul(k, &lev_right_inv);
        let tau = self.tau(j)?;
        let recon = p1.mul(k, &tau).mul(k, &p2);
        if &recon != h {
            return Err(Error::Calibration("bruhat reconstruction mismatch".into()));
        }
        let x_class = k.mul(&self.y_block(&p1).det(k), &self.y_block(&p2).det(k));
        if k.is_zero(&x_class) {
            return Err(Error::Calibration("vanishing bruhat determinant".into()));
        }
        Ok(BruhatData { p1, j, p2, x_class })
    }

    /// The cell invariants (x(h), j(h)) alone. x is assembled from the
    /// determinants of the reduction factors:
    /// det(p1|_Y) = det(U)^{-1} and det(p2|_Y) = det(p_right|_Y) conj(det R).
    /// Exactly equal to the x_class of [`Self::bruhat`] for the same pivots.
    pub fn bruhat_invariants<G: Rng>(
        &self,
        h: &Matrix<K::Elem>,
        rng: Option<&mut G>,
    ) -> Result<(K::Elem, usize)> {
        let k = &self.k;
        let (u, rm, j, _x, _y, p_right) = self.bruhat_reduce(h, rng)?;
        let det_u_inv = k.inv(&u.det(k)).expect("U invertible");
        let det_pr = self.y_block(&p_right).det(k);
        let x_class = k.mul(&det_u_inv, &k.mul(&det_pr, &k.conj(&rm.det(k))));
        if k.is_zero(&x_class) {
            return Err(Error::Calibration("vanishing bruhat determinant".into()));
        }
        Ok((x_class, j))
    }

    fn sample_elem<G: Rng>(&self, rng: &mut G) -> K::Elem
    where
        K: FieldWithSampler,
    {
        self.k.sample_small(rng)
    }

    /// Random Levi factor: invertible A with small entries.
    pub fn random_levi<G: Rng>(&self, rng: &mut G) -> Matrix<K::Elem>
    where
        K: FieldWithSampler,
    {
        let k = &self.k;
        loop {
            let a = Matrix::from_fn(self.r, self.r, |_, _| self.sample_elem(rng));
            if !k.is_zero(&a.det(k)) {
                return self.levi(&a).unwrap();
            }
        }
    }

    /// Random unipotent factor: b = c + c* is automatically hermitian.
    pub fn random_unipotent<G: Rng>(&self, rng: &mut G) -> Matrix<K::Elem>
    where
        K: FieldWithSampler,
    {
        let k = &self.k;
        let c = Matrix::from_fn(self.r, self.r, |_, _| self.sample_elem(rng));
        let b = c.add(k, &c.conj_transpose(k));
        self.unipotent(&b).unwrap()
    }

    /// Random word in Levi, unipotent and Weyl generators. word_len = 0 gives
    /// the identity. Every output is verified to be an isometry.
    pub fn random_isometry<G: Rng>(&self, rng: &mut G, word_len: usize) -> Matrix<K::Elem>
    where
        K: FieldWithSampler,
    {
        let k = &self.k;
        let mut m = Matrix::identity(k, 2 * self.r);
        for _ in 0..word_len {
            let f = match rng.gen_range(0..3) {
                0 => self.random_levi(rng),
                1 => self.random_unipotent(rng),
                _ => self.tau(rng.gen_range(0..=self.r)).unwrap(),
            };
            m = m.mul(k, &f);
        }
        debug_assert!(self.is_isometry(&m));
        m
    }

    /// Random parabolic element: unipotent times Levi.
    pub fn random_parabolic<G: Rng>(&self, rng: &mut G) -> Matrix<K::Elem>
    where
        K: FieldWithSampler,
    {
        self.random_unipotent(rng).mul(&self.k, &self.random_levi(rng))
    }

    /// Random element of the big Bruhat cell P tau_r P; its Y-image is
    /// transverse to Y.
    pub fn random_big_cell<G: Rng>(&self, rng: &mut G) -> Matrix<K::Elem>
    where
        K: FieldWithSampler,
    {
        self.random_parabolic(rng)
            .mul(&self.k, &self.tau(self.r).unwrap())
            .mul(&self.k, &self.random_parabolic(rng))
    }
}

/// Small-element sampling for randomized instance generation; numerators and
/// denominators stay within +-3 to keep exact fractions small downstream.
pub trait FieldWithSampler: Field {
    fn sample_small<G: Rng>(&self, rng: &mut G) -> Self::Elem;
}

impl FieldWithSampler for crate::field::RationalField {
    fn sample_small<G: Rng>(&self, rng: &mut G) -> Rat {
        rat(rng.gen_range(-3..=3), rng.gen_range(1..=3))
    }
}

impl FieldWithSampler for crate::field::QuadExtField {
    fn sample_small<G: Rng>(&self, rng: &mut G) -> crate::field::QuadExtScalar {
        crate::field::QuadExtScalar::new(
            rat(rng.gen_range(-3..=3), rng.gen_range(1..=3)),
            rat(rng.gen_range(-3..=3), rng.gen_range(1..=3)),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{QuadExtField, QuadExtScalar, RationalField};
    use crate::matrix::MatrixE;
    use crate::rational::{is_rational_square, rat_int};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ugroup(r: usize) -> SplitGroup<QuadExtField> {
        SplitGroup::new(QuadExtField::new(rat_int(2)), r)
    }

    fn spgroup(r: usize) -> SplitGroup<RationalField> {
        SplitGroup::new(RationalField, r)
    }

    #[test]
    fn tau_and_d_basics() {
        let g = ugroup(2);
        let k = &g.k;
        assert_eq!(g.tau(0).unwrap(), MatrixE::identity(k, 4));
        assert!(g.tau(3).is_err());
        for j in 0..=2 {
            let t = g.tau(j).unwrap();
            assert_eq!(g.similitude_factor(&t).unwrap(), k.one());
        }
        // tau_1 on r = 1: e -> -e^*, e^* -> e
        let g1 = ugroup(1);
        let t1 = g1.tau(1).unwrap();
        assert_eq!(*t1.at(0, 1), g1.k.neg(&g1.k.one()));
        assert_eq!(*t1.at(1, 0), g1.k.one());
        // tau_j^2 acts as -1 on the first j planes
        let g2 = ugroup(2);
        let t = g2.tau(1).unwrap();
        let t2 = t.mul(&g2.k, &t);
        assert_eq!(*t2.at(0, 0), g2.k.neg(&g2.k.one()));
        assert_eq!(*t2.at(1, 1), g2.k.one());

        let d = g.d(&rat_int(5)).unwrap();
        assert_eq!(g.similitude_factor(&d).unwrap(), k.from_rat(&rat_int(5)));
        assert!(g.d(&rat_int(0)).is_err());
    }

    #[test]
    fn similitude_factor_detects_non_members() {
        let g = ugroup(1);
        let k = &g.k;
        let m = MatrixE::from_fn(2, 2, |i, j| {
            if i == j { k.from_rat(&rat_int(2)) } else { k.zero() }
        });
        // diag(2, 2): M T M* = 4T, a similitude with nu = 4
        assert_eq!(g.similitude_factor(&m).unwrap(), k.from_rat(&rat_int(4)));
        // [[1, delta], [0, 1]] is not a similitude: the unipotent block must
        // be hermitian and conj(delta) = -delta
        let bad = MatrixE::from_rows(vec![
            vec![k.one(), QuadExtScalar::delta()],
            vec![k.zero(), k.one()],
        ]);
        assert!(g.similitude_factor(&bad).is_err());
        // scalar delta: nu = N(delta) = -Delta = -2
        let dd = MatrixE::from_fn(2, 2, |i, j| {
            if i == j { QuadExtScalar::delta() } else { k.zero() }
        });
        assert_eq!(g.similitude_factor(&dd).unwrap(), k.from_rat(&rat_int(-2)));
    }

    #[test]
    fn generators_are_isometries() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = ugroup(2);
        for _ in 0..20 {
            assert!(g.is_isometry(&g.random_levi(&mut rng)));
            assert!(g.is_isometry(&g.random_unipotent(&mut rng)));
            let p = g.random_parabolic(&mut rng);
            assert!(g.in_parabolic(&p));
        }
        let s = spgroup(3);
        for _ in 0..10 {
            assert!(s.is_isometry(&s.random_isometry(&mut rng, 6)));
        }
    }

    #[test]
    fn bruhat_cells_of_generators() {
        let g = ugroup(2);
        let mut none: Option<&mut ChaCha8Rng> = None;
        // parabolic element: j = 0, x = det(h|_Y)
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = g.random_parabolic(&mut rng);
        let b = g.bruhat(&p, none.as_deref_mut()).unwrap();
        assert_eq!(b.j, 0);
        assert_eq!(b.x_class, g.y_block(&p).det(&g.k));
        // tau_j decomposes with itself
        for j in 0..=2 {
            let t = g.tau(j).unwrap();
            let b = g.bruhat(&t, none.as_deref_mut()).unwrap();
            assert_eq!(b.j, j);
        }
    }

    #[test]
    fn bruhat_roundtrip_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for r in [1, 2] {
            let g = ugroup(r);
            for _ in 0..40 {
                let h = g.random_isometry(&mut rng, 6);
                let b = g.bruhat(&h, Some(&mut rng)).unwrap();
                assert!(g.in_parabolic(&b.p1));
                assert!(g.in_parabolic(&b.p2));
                let recon = b.p1.mul(&g.k, &g.tau(b.j).unwrap()).mul(&g.k, &b.p2);
                assert_eq!(recon, h);
                // j is the rank of the Y-to-X block
                assert_eq!(b.j, g.y_to_x_block(&h).rank(&g.k));
                // decompose again with different pivots: same j, x differs by
                // an element of norm-class (checked further in spaces tests)
                let b2 = g.bruhat(&h, Some(&mut rng)).unwrap();
                assert_eq!(b.j, b2.j);
            }
        }
    }

    #[test]
    fn bruhat_roundtrip_symplectic_x_mod_squares() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for r in [1, 2, 3] {
            let g = spgroup(r);
            for _ in 0..30 {
                let h = g.random_isometry(&mut rng, 6);
                let b1 = g.bruhat(&h, Some(&mut rng)).unwrap();
                let b2 = g.bruhat(&h, Some(&mut rng)).unwrap();
                assert_eq!(b1.j, b2.j);
                // x is well defined modulo rational squares
                assert!(is_rational_square(&(&b1.x_class / &b2.x_class)));
                let recon = b1.p1.mul(&g.k, &g.tau(b1.j).unwrap()).mul(&g.k, &b1.p2);
                assert_eq!(recon, h);
            }
        }
    }

    #[test]
    fn fast_inverse_matches_generic() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let g = ugroup(2);
        for _ in 0..20 {
            let h = g.random_isometry(&mut rng, 5);
            let d = g.d(&rat_int(3)).unwrap();
            let m = h.mul(&g.k, &d);
            let nu = rat_int(3);
            assert_eq!(g.fast_inverse(&m, &nu), m.inverse(&g.k).unwrap());
        }
        let s = spgroup(3);
        for _ in 0..10 {
            let m = s.random_isometry(&mut rng, 5);
            assert_eq!(s.fast_inverse(&m, &rat_int(1)), m.inverse(&s.k).unwrap());
        }
    }

    #[test]
    fn bruhat_invariants_match_full_decomposition() {
        let mut rng = ChaCha8Rng::seed_from_u64(78);
        let g = ugroup(2);
        let s = spgroup(3);
        for _ in 0..20 {
            let h = g.random_isometry(&mut rng, 6);
            let mut r1 = ChaCha8Rng::seed_from_u64(123);
            let mut r2 = ChaCha8Rng::seed_from_u64(123);
            let full = g.bruhat(&h, Some(&mut r1)).unwrap();
            let (x, j) = g.bruhat_invariants(&h, Some(&mut r2)).unwrap();
            assert_eq!((x, j), (full.x_class, full.j));

            let m = s.random_isometry(&mut rng, 6);
            let mut r1 = ChaCha8Rng::seed_from_u64(5);
            let mut r2 = ChaCha8Rng::seed_from_u64(5);
            let full = s.bruhat(&m, Some(&mut r1)).unwrap();
            let (x, j) = s.bruhat_invariants(&m, Some(&mut r2)).unwrap();
            assert_eq!((x, j), (full.x_class, full.j));
        }
    }

    #[test]
    fn non_isometry_rejected_by_bruhat() {
        let g = ugroup(1);
        let d = g.d(&rat_int(3)).unwrap();
        let mut none: Option<&mut ChaCha8Rng> = None;
        assert!(matches!(g.bruhat(&d, none.as_deref_mut()), Err(Error::NotIsometry)));
    }
}
