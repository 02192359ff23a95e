//! The doubled symplectic space BW = V (x)_E W over F.
//!
//! Elements of BW are m x n matrices Z over E (the pure tensor v (x) w is the
//! outer product), with the F-valued symplectic form
//!
//!   << Z, Z' >> = -1/2 Tr_{E/F}( tr( Phi_V^{-1} Z' T_W Z* ) ),
//!
//! which on pure tensors is 1/2 Tr_{E/F}( (v, v') conj<w, w'> ). The pair
//! (G, H) embeds by Z -> g^{-1} Z h; this is a homomorphism with similitude
//! factor nu(g)^{-1} nu(h).
//!
//! BX = V (x) X and BY = V (x) Y form a complete polarization. The adapted
//! F-basis lists the X-tensors {v_k (x) e_i} in (k, i) order, then their
//! delta-multiples, and then a Y-side basis corrected by the inverse pairing
//! matrix so the Gram becomes the standard [[0, 1], [-1, 0]]. d(y), tau_j and
//! the Bruhat invariants x(s), j(s) of Sp(BW) are taken in that basis.

use crate::error::{Error, Result};
use crate::field::{Field, QuadExtScalar, RationalField};
use crate::matrix::{MatrixE, MatrixF};
use crate::rational::{rat_int, Rat};
use crate::spaces::{HermitianSpace, SimilitudeElement, SplitSkewSpace};
use crate::splitgroup::{BruhatData, SplitGroup};
use num_traits::Zero;
use rand::Rng;

/// Element of GSp(BW) in the adapted basis.
#[derive(Debug, Clone, PartialEq)]
pub struct GSpElement {
    pub mat: MatrixF,
    pub nu: Rat,
}

impl GSpElement {
    pub fn is_isometry(&self) -> bool {
        self.nu == rat_int(1)
    }
}

/// A Lagrangian of BW, stored as a full-row-rank mn x 2mn spanning matrix in
/// reduced echelon form (the canonical representative of its row space).
#[derive(Debug, Clone, PartialEq)]
pub struct Lagrangian {
    pub span: MatrixF,
}

#[derive(Debug, Clone)]
pub struct DoubledSpace {
    pub v: HermitianSpace,
    pub w: SplitSkewSpace,
    /// Half-dimension over F: mn = m * n.
    pub mn: usize,
    /// Sp(BW) machinery (rank mn over F) in the adapted basis.
    pub sp: SplitGroup<RationalField>,
    /// Rows are the adapted basis vectors in raw-tensor coordinates.
    to_adapted: MatrixF,
    from_adapted: MatrixF,
    gram_v_inv: MatrixE,
}

impl DoubledSpace {
    pub fn build(v: HermitianSpace, w: SplitSkewSpace) -> Result<Self> {
        let perm: Vec<usize> = (0..v.m * w.n()).collect();
        Self::build_permuted(v, w, &perm)
    }

    /// Build with a permutation of the adapted symplectic basis (applied to
    /// the e_i and e_i^* in parallel, which keeps the Gram standard). All
    /// mu_8-level outputs are independent of this choice.
    pub fn build_permuted(v: HermitianSpace, w: SplitSkewSpace, perm: &[usize]) -> Result<Self> {
        let f = RationalField;
        let m = v.m;
        let n = w.n();
        let r = w.r();
        let mn = m * n;
        assert_eq!(perm.len(), mn);
        {
            let mut seen = vec![false; mn];
            for &p in perm {
                assert!(p < mn && !seen[p], "invalid basis permutation");
                seen[p] = true;
            }
        }
        if v.gram.conj(&v.field) != v.gram {
            return Err(Error::InvalidConfig(
                "doubling requires an F-valued hermitian Gram for V (diagonalize first)".into(),
            ));
        }
        let gram_v_inv = v.gram.inverse(&v.field).map_err(|_| Error::DegenerateForm)?;
        let t_w = w.gram();

        // Raw F-basis of BW = M_{m x n}(E): X-tensors, then delta X-tensors,
        // then the Y side in the same order.
        let decode = |slot: usize| -> (usize, usize, bool) {
            // returns (k, i, is_delta) with i the W-index in 0..n
            let half = slot / mn; // 0 = BX side, 1 = BY side
            let rem = slot % mn;
            let is_delta = rem >= m * r;
            let rem = rem % (m * r);
            let (k, i0) = (rem / r, rem % r);
            (k, i0 + half * r, is_delta)
        };

        let delta = QuadExtScalar::delta();
        let pair = |a: usize, b: usize| -> Rat {
            let (ka, ia, da) = decode(a);
            let (kb, ib, db) = decode(b);
            let k = &v.field;
            let mut z = k.mul(gram_v_inv.at(ka, kb), t_w.at(ib, ia));
            if db {
                z = k.mul(&z, &delta);
            }
            if da {
                z = k.mul(&z, &k.conj(&delta));
            }
            // -1/2 Tr_{E/F}(z) = -z.a
            -z.a
        };

        let dim = 2 * mn;
        let raw_gram = MatrixF::from_fn(dim, dim, pair);
        // sanity of the trace form
        if raw_gram != raw_gram.transpose().neg(&f) {
            return Err(Error::DegenerateForm);
        }
        if !raw_gram.submatrix(0, 0, mn, mn).is_zero(&f)
            || !raw_gram.submatrix(mn, mn, mn, mn).is_zero(&f)
        {
            return Err(Error::DegenerateForm);
        }
        let p = raw_gram.submatrix(0, mn, mn, mn);
        let q = p.transpose().inverse(&f).map_err(|_| Error::DegenerateForm)?;

        // adapted basis rows (in raw coordinates): permuted X block, then the
        // same permutation of the pairing-corrected Y block
        let to_adapted = MatrixF::from_fn(dim, dim, |i, j| {
            if i < mn {
                if j < mn && j == perm[i] {
                    rat_int(1)
                } else {
                    rat_int(0)
                }
            } else if j >= mn {
                q.at(perm[i - mn], j - mn).clone()
            } else {
                rat_int(0)
            }
        });
        let from_adapted = to_adapted.inverse(&f).expect("basis change invertible");

        let sp = SplitGroup::new(RationalField, mn);
        let adapted_gram = to_adapted.mul(&f, &raw_gram).mul(&f, &to_adapted.transpose());
        if adapted_gram != sp.gram() {
            return Err(Error::DegenerateForm);
        }
        Ok(Self { v, w, mn, sp, to_adapted, from_adapted, gram_v_inv })
    }

    pub fn dim(&self) -> usize {
        2 * self.mn
    }

    pub fn element(&self, mat: MatrixF) -> Result<GSpElement> {
        let nu = self.sp.similitude_factor(&mat)?;
        Ok(GSpElement { mat, nu })
    }

    pub fn identity(&self) -> GSpElement {
        GSpElement { mat: MatrixF::identity(&RationalField, self.dim()), nu: rat_int(1) }
    }

    pub fn compose(&self, a: &GSpElement, b: &GSpElement) -> GSpElement {
        GSpElement { mat: a.mat.mul(&RationalField, &b.mat), nu: &a.nu * &b.nu }
    }

    /// a . d(y): scales the Y-columns, avoiding a full product.
    pub fn compose_d(&self, a: &GSpElement, y: &Rat) -> Result<GSpElement> {
        if y.is_zero() {
            return Err(Error::ZeroScale);
        }
        let mn = self.mn;
        let mat = MatrixF::from_fn(a.mat.rows, a.mat.cols, |i, j| {
            if j >= mn {
                a.mat.at(i, j) * y
            } else {
                a.mat.at(i, j).clone()
            }
        });
        Ok(GSpElement { mat, nu: &a.nu * y })
    }

    pub fn inverse(&self, a: &GSpElement) -> GSpElement {
        GSpElement { mat: self.sp.fast_inverse(&a.mat, &a.nu), nu: a.nu.recip() }
    }

    /// The embedding iota(g, h): Z -> g^{-1} Z h, expressed in the adapted
    /// basis. nu(iota(g, h)) = nu(g)^{-1} nu(h).
    pub fn iota(&self, g: &SimilitudeElement, h: &SimilitudeElement) -> Result<GSpElement> {
        let ke = &self.v.field;
        let f = RationalField;
        let (m, n, r) = (self.v.m, self.w.n(), self.w.r());
        let mn = self.mn;
        if g.mat.rows != m || h.mat.rows != n {
            return Err(Error::ShapeMismatch("iota expects elements of G and H".into()));
        }
        let g_inv_t = g.mat.inverse(ke).map_err(|_| Error::SingularMatrix)?.transpose();
        let big = g_inv_t.kron(ke, &h.mat); // row (k,i) -> col (l,j) over E

        let slot = |k: usize, i: usize, is_delta: bool| -> usize {
            let half = if i < r { 0 } else { 1 };
            let i0 = i % r;
            half * mn + (is_delta as usize) * (m * r) + k * r + i0
        };
        let dim = self.dim();
        let mut raw = MatrixF::zero(&f, dim, dim);
        for k in 0..m {
            for i in 0..n {
                for l in 0..m {
                    for j in 0..n {
                        let e = big.at(k * n + i, l * n + j);
                        if e.is_zero() {
                            continue;
                        }
                        // plain source: a + b delta lands in (plain, delta)
                        let src = slot(k, i, false);
                        raw.set(src, slot(l, j, false), e.a.clone());
                        raw.set(src, slot(l, j, true), e.b.clone());
                        // delta source: delta (a + b delta) = Delta b + a delta
                        let src = slot(k, i, true);
                        raw.set(src, slot(l, j, false), &e.b * &ke.delta_sq);
                        raw.set(src, slot(l, j, true), e.a.clone());
                    }
                }
            }
        }
        let mat = self.to_adapted.mul(&f, &raw).mul(&f, &self.from_adapted);
        let el = self.element(mat)?;
        let expected = h.nu.clone() / &g.nu;
        assert_eq!(el.nu, expected, "iota similitude factor must be nu(g)^-1 nu(h)");
        Ok(el)
    }

    pub fn iota_v(&self, h: &SimilitudeElement) -> Result<GSpElement> {
        let one = self.v.identity();
        self.iota(&one, h)
    }

    pub fn iota_w(&self, g: &SimilitudeElement) -> Result<GSpElement> {
        let one = self.w.identity();
        self.iota(g, &one)
    }

    /// d(y) = diag(1_mn, y 1_mn) in the adapted basis.
    pub fn d_big(&self, y: &Rat) -> Result<GSpElement> {
        Ok(GSpElement { mat: self.sp.d(y)?, nu: y.clone() })
    }

    /// s_1 = d(nu(s))^{-1} s in Sp(BW).
    pub fn isometry_part(&self, s: &GSpElement) -> GSpElement {
        GSpElement { mat: self.sp.isometry_part(&s.mat, &s.nu), nu: rat_int(1) }
    }

    /// s^y = d(y)^{-1} s d(y).
    pub fn conj_by_d(&self, s: &GSpElement, y: &Rat) -> Result<GSpElement> {
        if y.is_zero() {
            return Err(Error::ZeroScale);
        }
        Ok(GSpElement { mat: self.sp.conj_by_d(&s.mat, y)?, nu: s.nu.clone() })
    }

    /// Bruhat invariants of s in Sp(BW): x(s) well defined mod squares, the
    /// cell index j, and the witnessing parabolic pair.
    pub fn bruhat<G: Rng>(
        &self,
        s: &GSpElement,
        rng: Option<&mut G>,
    ) -> Result<BruhatData<Rat>> {
        if !s.is_isometry() {
            return Err(Error::NotIsometry);
        }
        self.sp.bruhat(&s.mat, rng)
    }

    /// (x(s), j(s)) without materializing the parabolic pair.
    pub fn bruhat_invariants<G: Rng>(
        &self,
        s: &GSpElement,
        rng: Option<&mut G>,
    ) -> Result<(Rat, usize)> {
        if !s.is_isometry() {
            return Err(Error::NotIsometry);
        }
        self.sp.bruhat_invariants(&s.mat, rng)
    }

    pub fn in_siegel_parabolic(&self, s: &GSpElement) -> bool {
        s.is_isometry() && self.sp.in_parabolic(&s.mat)
    }

    /// The standard Lagrangian BY = span{e_i^*}.
    pub fn standard_y(&self) -> Lagrangian {
        let f = RationalField;
        Lagrangian {
            span: MatrixF::from_fn(self.mn, self.dim(), |i, j| {
                if j == i + self.mn {
                    f.one()
                } else {
                    f.zero()
                }
            }),
        }
    }

    pub fn standard_x(&self) -> Lagrangian {
        let f = RationalField;
        Lagrangian {
            span: MatrixF::from_fn(self.mn, self.dim(), |i, j| {
                if j == i { f.one() } else { f.zero() }
            }),
        }
    }

    /// Canonicalize a spanning matrix into a Lagrangian, checking dimension
    /// and isotropy.
    pub fn lagrangian(&self, span: MatrixF) -> Result<Lagrangian> {
        let f = RationalField;
        if span.cols != self.dim() || span.rows != self.mn {
            return Err(Error::ShapeMismatch("lagrangian span must be mn x 2mn".into()));
        }
        let (rref, rank) = span.rref(&f);
        if rank != self.mn {
            return Err(Error::NotLagrangian);
        }
        let gram = self.sp.gram();
        let pairings = rref.mul(&f, &gram).mul(&f, &rref.transpose());
        if !pairings.is_zero(&f) {
            return Err(Error::NotLagrangian);
        }
        Ok(Lagrangian { span: rref })
    }

    /// Image L . s, again in canonical form. Stays Lagrangian for any
    /// similitude s (the form only rescales).
    pub fn lagrangian_image(&self, l: &Lagrangian, s: &GSpElement) -> Lagrangian {
        let f = RationalField;
        let moved = l.span.mul(&f, &s.mat);
        let (rref, rank) = moved.rref(&f);
        debug_assert_eq!(rank, self.mn);
        Lagrangian { span: rref }
    }

    /// The symplectic pairing of two vectors in adapted coordinates.
    pub fn pair(&self, a: &MatrixF, b: &MatrixF) -> Rat {
        let f = RationalField;
        let v = a.mul(&f, &self.sp.gram()).mul(&f, &b.transpose());
        v.at(0, 0).clone()
    }

    pub fn gram_v_inv(&self) -> &MatrixE {
        &self.gram_v_inv
    }
}
