//! Local invariants at an odd prime p: Legendre and Hilbert symbols, the
//! quadratic character of E/F, diagonalization of quadratic spaces, and Weil
//! indices gamma_F(psi_c . a x^2) with an independent truncated-Gauss-sum
//! oracle.
//!
//! F itself stays rational; only these invariants consult p. The closed-form
//! Weil index is checked against the oracle on the four square classes every
//! time a context is built.

use crate::error::{Error, Result};
use crate::field::QuadExtScalar;
use crate::matrix::MatrixF;
use crate::mu8::Mu8;
use crate::rational::{
    is_odd_prime, is_square_at_p, legendre_residue, rat_int, unit_part, unit_residue, val_p,
    Rat,
};
use num_traits::Zero;

/// The arithmetic environment: odd prime p, the extension constant Delta
/// (nonzero, a non-square in Q_p) and the scale c of the additive character
/// psi_c(x) = e^{2 pi i frac_p(c x)}. The character eta used by Weil indices
/// is psi_{c/2}.
#[derive(Debug, Clone)]
pub struct LocalContext {
    pub p: u64,
    pub delta_sq: Rat,
    pub psi_scale: Rat,
}

impl LocalContext {
    pub fn new(p: u64, delta_sq: Rat) -> Result<Self> {
        Self::with_psi_scale(p, delta_sq, rat_int(1))
    }

    pub fn with_psi_scale(p: u64, delta_sq: Rat, psi_scale: Rat) -> Result<Self> {
        if !is_odd_prime(p) {
            return Err(Error::InvalidConfig(format!("p = {p} is not an odd prime")));
        }
        if delta_sq.is_zero() {
            return Err(Error::InvalidConfig("Delta must be nonzero".into()));
        }
        if is_square_at_p(&delta_sq, p) {
            return Err(Error::InvalidConfig(format!(
                "Delta = {delta_sq} is a square at p = {p}; E would not be a field locally"
            )));
        }
        if psi_scale.is_zero() {
            return Err(Error::InvalidConfig("psi scale must be nonzero".into()));
        }
        let ctx = Self { p, delta_sq, psi_scale };
        ctx.check_weil_closed_form()?;
        Ok(ctx)
    }

    /// The scale of eta = (1/2) psi.
    pub fn eta_scale(&self) -> Rat {
        &self.psi_scale / rat_int(2)
    }

    /// E/F is unramified at p iff Delta has even valuation with non-residue
    /// unit part.
    pub fn is_unramified(&self) -> bool {
        val_p(&self.delta_sq, self.p) % 2 == 0
    }

    /// Closed form vs Gauss-sum oracle on the four square classes, for both
    /// psi and eta scales.
    fn check_weil_closed_form(&self) -> Result<()> {
        let u = crate::rational::smallest_nonresidue(self.p) as i64;
        let p = self.p as i64;
        for a in [rat_int(1), rat_int(u), rat_int(p), rat_int(u * p)] {
            for scale in [self.psi_scale.clone(), self.eta_scale()] {
                let n = (val_p(&(&a * &scale), self.p) + 3) as u32;
                let closed = weil_index_scalar(&a, self, &scale)?;
                let oracle = weil_index_gauss_oracle(&a, self, &scale, n)?;
                if closed != oracle {
                    return Err(Error::Calibration(format!(
                        "weil index closed form {closed} != oracle {oracle} at a={a}, c={scale}, p={}",
                        self.p
                    )));
                }
            }
        }
        Ok(())
    }

    /// Representatives of the four square classes of Q_p^*.
    pub fn square_class_reps(&self) -> [Rat; 4] {
        let u = crate::rational::smallest_nonresidue(self.p) as i64;
        let p = self.p as i64;
        [rat_int(1), rat_int(u), rat_int(p), rat_int(u * p)]
    }
}

/// Legendre symbol of a p-unit rational, as +1/-1 in mu_8.
pub fn legendre(u: &Rat, ctx: &LocalContext) -> Result<Mu8> {
    if u.is_zero() {
        return Err(Error::ZeroArgument);
    }
    if val_p(u, ctx.p) != 0 {
        return Err(Error::NotAUnit);
    }
    let r = unit_residue(u, ctx.p, 1);
    Ok(Mu8::from_sign(legendre_residue(&r, ctx.p)))
}

/// Hilbert symbol (a, b)_p for odd p: with a = p^alpha u, b = p^beta v,
/// (a,b) = (-1/p)^{alpha beta} (u/p)^beta (v/p)^alpha.
pub fn hilbert_symbol(a: &Rat, b: &Rat, ctx: &LocalContext) -> Result<Mu8> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroArgument);
    }
    let p = ctx.p;
    let alpha = val_p(a, p);
    let beta = val_p(b, p);
    let u = unit_part(a, p);
    let v = unit_part(b, p);
    let leg = |x: &Rat| legendre_residue(&unit_residue(x, p, 1), p);
    let minus_one_leg = p % 4 == 1;
    let mut positive = true;
    if alpha % 2 != 0 && beta % 2 != 0 && !minus_one_leg {
        positive = !positive;
    }
    if beta % 2 != 0 && !leg(&u) {
        positive = !positive;
    }
    if alpha % 2 != 0 && !leg(&v) {
        positive = !positive;
    }
    Ok(Mu8::from_sign(positive))
}

/// The quadratic character of F^* attached to E: epsilon_{E/F}(x) = (x, Delta)_p.
/// +1 exactly on norms from E.
pub fn epsilon_ef(x: &Rat, ctx: &LocalContext) -> Result<Mu8> {
    hilbert_symbol(x, &ctx.delta_sq, ctx)
}

pub fn is_local_norm(x: &Rat, ctx: &LocalContext) -> Result<bool> {
    Ok(epsilon_ef(x, ctx)? == Mu8::ONE)
}

/// Norm of an E-scalar in this context.
pub fn norm_ef(x: &QuadExtScalar, ctx: &LocalContext) -> Rat {
    x.norm(&ctx.delta_sq)
}

/// A nondegenerate diagonal quadratic space over F.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadSpaceF {
    pub diag: Vec<Rat>,
}

impl QuadSpaceF {
    pub fn new(diag: Vec<Rat>) -> Self {
        assert!(diag.iter().all(|d| !d.is_zero()), "degenerate entry in quadratic space");
        Self { diag }
    }

    pub fn empty() -> Self {
        Self { diag: vec![] }
    }

    pub fn rank(&self) -> usize {
        self.diag.len()
    }

    pub fn orthogonal_sum(&self, other: &Self) -> Self {
        let mut diag = self.diag.clone();
        diag.extend(other.diag.iter().cloned());
        Self { diag }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        assert!(!c.is_zero());
        Self { diag: self.diag.iter().map(|d| d * c).collect() }
    }

    pub fn discriminant(&self) -> Rat {
        self.diag.iter().product()
    }
}

/// Outcome of symmetric diagonalization: congruent diagonal form (nonzero
/// part), the radical dimension, and the witness C with C G C^T diagonal.
#[derive(Debug, Clone)]
pub struct Diagonalization {
    pub space: QuadSpaceF,
    pub radical_dim: usize,
    pub witness: MatrixF,
}

/// Diagonalize a symmetric bilinear Gram matrix by simultaneous row/column
/// operations.
pub fn diagonalize(g: &MatrixF) -> Result<Diagonalization> {
    let f = crate::field::RationalField;
    if g.rows != g.cols {
        return Err(Error::ShapeMismatch(format!("{}x{}", g.rows, g.cols)));
    }
    if g != &g.transpose() {
        return Err(Error::NotSymmetric);
    }
    let n = g.rows;
    let mut m = g.clone();
    let mut c = MatrixF::identity(&f, n);
    let row_add = |m: &mut MatrixF, c: &mut MatrixF, dst: usize, src: usize, fac: &Rat| {
        for j in 0..n {
            let v = m.at(dst, j) + fac * m.at(src, j);
            m.set(dst, j, v);
        }
        for i in 0..n {
            let v = m.at(i, dst) + fac * m.at(i, src);
            m.set(i, dst, v);
        }
        for j in 0..n {
            let v = c.at(dst, j) + fac * c.at(src, j);
            c.set(dst, j, v);
        }
    };
    let mut k = 0;
    while k < n {
        if m.at(k, k).is_zero() {
            // Bring a nonzero diagonal entry to position k, creating one from
            // an off-diagonal entry if necessary.
            let diag_pivot = (k..n).find(|&i| !m.at(i, i).is_zero());
            match diag_pivot {
                Some(i) => {
                    m.swap_rows(k, i);
                    m.swap_cols(k, i);
                    c.swap_rows(k, i);
                }
                None => {
                    let off = (k..n)
                        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
                        .find(|&(i, j)| !m.at(i, j).is_zero());
                    let Some((i, j)) = off else {
                        break; // all-zero block: the radical
                    };
                    row_add(&mut m, &mut c, i, j, &rat_int(1));
                    m.swap_rows(k, i);
                    m.swap_cols(k, i);
                    c.swap_rows(k, i);
                }
            }
        }
        let pivot = m.at(k, k).clone();
        for i in (k + 1)..n {
            if m.at(i, k).is_zero() {
                continue;
            }
            let fac = -(m.at(i, k) / &pivot);
            row_add(&mut m, &mut c, i, k, &fac);
        }
        k += 1;
    }
    let diag: Vec<Rat> = (0..k).map(|i| m.at(i, i).clone()).collect();
    Ok(Diagonalization {
        space: QuadSpaceF::new(diag),
        radical_dim: n - k,
        witness: c,
    })
}

/// Closed-form Weil index gamma_F(psi_c . a x^2) for odd p: trivial when
/// val_p(a c) is even; for odd valuation it is the normalized quadratic Gauss
/// sum twisted by the Legendre symbol of the unit part.
pub fn weil_index_scalar(a: &Rat, ctx: &LocalContext, character_scale: &Rat) -> Result<Mu8> {
    if a.is_zero() {
        return Err(Error::ZeroArgument);
    }
    assert!(!character_scale.is_zero());
    let w = a * character_scale;
    if val_p(&w, ctx.p) % 2 == 0 {
        return Ok(Mu8::ONE);
    }
    let u = unit_part(&w, ctx.p);
    let leg = legendre_residue(&unit_residue(&u, ctx.p, 1), ctx.p);
    let gauss = if ctx.p % 4 == 1 { Mu8::ONE } else { Mu8::I };
    Ok(Mu8::from_sign(leg) * gauss)
}

/// Truncated-Gauss-sum oracle for the Weil index. Computes
/// S_t = sum_{x mod p^t} e^{2 pi i (u x^2 mod p^t) / p^t} where u is the unit
/// part of a c and t runs over the parity class of val_p(a c) (the truncation
/// exponent t = 2k - val arising from integrating over p^{-k} Z_p), snaps
/// S_t / |S_t| to the nearest eighth root within 1e-6, and requires two
/// consecutive truncations to agree.
pub fn weil_index_gauss_oracle(
    a: &Rat,
    ctx: &LocalContext,
    character_scale: &Rat,
    precision: u32,
) -> Result<Mu8> {
    if a.is_zero() {
        return Err(Error::ZeroArgument);
    }
    let w = a * character_scale;
    let v = val_p(&w, ctx.p);
    if (precision as i64) < v + 3 {
        return Err(Error::PrecisionTooLow);
    }
    let u = unit_part(&w, ctx.p);
    // smallest t >= precision - v with t = v mod 2
    let mut t1 = (precision as i64 - v).max(1) as u32;
    if (t1 as i64 - v) % 2 != 0 {
        t1 += 1;
    }
    let s1 = snap_truncated_sum(&u, ctx.p, t1)?;
    let s2 = snap_truncated_sum(&u, ctx.p, t1 + 2)?;
    if s1 != s2 {
        return Err(Error::PrecisionTooLow);
    }
    Ok(s1)
}

fn snap_truncated_sum(u: &Rat, p: u64, t: u32) -> Result<Mu8> {
    let modulus = p.checked_pow(t).expect("p^t fits in u64");
    let u_res = unit_residue(u, p, t);
    let u_int: u128 = u_res.to_string().parse().expect("residue fits in u128");
    let (mut re, mut im) = (0.0f64, 0.0f64);
    let step = 2.0 * std::f64::consts::PI / modulus as f64;
    for x in 0..modulus {
        let sq = (x as u128 * x as u128) % modulus as u128;
        let ph = (u_int * sq) % modulus as u128;
        let angle = step * ph as f64;
        re += angle.cos();
        im += angle.sin();
    }
    let norm = (re * re + im * im).sqrt();
    if norm < 1e-9 {
        return Err(Error::SnapFailure);
    }
    let (re, im) = (re / norm, im / norm);
    for e in 0..8i64 {
        let a = std::f64::consts::PI / 4.0 * e as f64;
        if (re - a.cos()).abs() < 1e-6 && (im - a.sin()).abs() < 1e-6 {
            return Ok(Mu8::new(e));
        }
    }
    Err(Error::SnapFailure)
}

/// gamma_F(y, eta) = gamma(eta . y x^2) / gamma(eta . x^2), eta = (1/2) psi.
pub fn gamma_eta(y: &Rat, ctx: &LocalContext) -> Result<Mu8> {
    if y.is_zero() {
        return Err(Error::ZeroArgument);
    }
    let c = ctx.eta_scale();
    let num = weil_index_scalar(y, ctx, &c)?;
    let den = weil_index_scalar(&rat_int(1), ctx, &c)?;
    Ok(num / den)
}

/// gamma_F(eta . q) for a diagonal quadratic space: multiplicative over the
/// orthogonal sum, +1 on the empty space.
pub fn weil_index_quadspace(q: &QuadSpaceF, ctx: &LocalContext) -> Result<Mu8> {
    let c = ctx.eta_scale();
    let mut acc = Mu8::ONE;
    for a in &q.diag {
        acc = acc * weil_index_scalar(a, ctx, &c)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Field, QuadExtField};
    use crate::rational::rat;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ctx35() -> (LocalContext, LocalContext) {
        (
            LocalContext::new(3, rat_int(-1)).unwrap(),
            LocalContext::new(5, rat_int(2)).unwrap(),
        )
    }

    #[test]
    fn context_validation() {
        assert!(LocalContext::new(2, rat_int(3)).is_err());
        assert!(LocalContext::new(9, rat_int(2)).is_err());
        // 4 is a square at 5
        assert!(LocalContext::new(5, rat_int(4)).is_err());
        // -1 is a square at 5 (2^2 = -1 mod 5)
        assert!(LocalContext::new(5, rat_int(-1)).is_err());
        assert!(LocalContext::new(5, rat_int(2)).is_ok());
        // non-squarefree Delta is allowed: 12 = 4*3, class of 3 at 5
        assert!(LocalContext::new(5, rat_int(12)).is_ok());
    }

    #[test]
    fn legendre_values() {
        let (_, c5) = ctx35();
        let c7 = LocalContext::new(7, rat_int(3)).unwrap();
        assert_eq!(legendre(&rat_int(1), &c5).unwrap(), Mu8::ONE);
        assert_eq!(legendre(&rat_int(2), &c5).unwrap(), Mu8::MINUS_ONE);
        assert_eq!(legendre(&rat_int(4), &c7).unwrap(), Mu8::ONE);
        assert_eq!(legendre(&rat_int(5), &c5), Err(Error::NotAUnit));
        assert_eq!(legendre(&rat_int(0), &c5), Err(Error::ZeroArgument));
    }

    #[test]
    fn hilbert_examples() {
        let (c3, c5) = ctx35();
        // (1, b) = 1 always
        for b in [-7, -1, 2, 3, 15] {
            assert_eq!(hilbert_symbol(&rat_int(1), &rat_int(b), &c5).unwrap(), Mu8::ONE);
        }
        // (2,3)_3 = -1: oracle below confirms z^2 = 2x^2 + 3y^2 has no
        // nontrivial solution mod 27.
        assert_eq!(hilbert_symbol(&rat_int(2), &rat_int(3), &c3).unwrap(), Mu8::MINUS_ONE);
        // (5,5)_5 = (-1,5)_5 = legendre(-1 mod 5) = +1
        assert_eq!(hilbert_symbol(&rat_int(5), &rat_int(5), &c5).unwrap(), Mu8::ONE);
        assert_eq!(hilbert_symbol(&rat_int(0), &rat_int(1), &c5), Err(Error::ZeroArgument));
    }

    #[test]
    fn hilbert_2_3_at_3_oracle() {
        // exhaustive: z^2 = 2x^2 + 3y^2 mod 27 with (x,y,z) not all divisible by 3
        let m = 27i64;
        let mut found = false;
        for x in 0..m {
            for y in 0..m {
                for z in 0..m {
                    if x % 3 == 0 && y % 3 == 0 && z % 3 == 0 {
                        continue;
                    }
                    if (z * z - 2 * x * x - 3 * y * y).rem_euclid(m) == 0 {
                        found = true;
                    }
                }
            }
        }
        assert!(!found, "(2,3)_3 must be -1");
    }

    #[test]
    fn hilbert_properties() {
        let (c3, c5) = ctx35();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let sample = |rng: &mut ChaCha8Rng| loop {
            let v = rat(rng.gen_range(-60..60), rng.gen_range(1..40));
            if !v.is_zero() {
                return v;
            }
        };
        for ctx in [&c3, &c5] {
            for _ in 0..500 {
                let a = sample(&mut rng);
                let b = sample(&mut rng);
                let c = sample(&mut rng);
                let ab = hilbert_symbol(&a, &b, ctx).unwrap();
                // symmetry
                assert_eq!(ab, hilbert_symbol(&b, &a, ctx).unwrap());
                // bimultiplicativity
                assert_eq!(
                    hilbert_symbol(&(&a * &c), &b, ctx).unwrap(),
                    ab * hilbert_symbol(&c, &b, ctx).unwrap()
                );
                // (a, -a) = 1
                assert_eq!(hilbert_symbol(&a, &(-a.clone()), ctx).unwrap(), Mu8::ONE);
                // (a, 1-a) = 1 for a != 0, 1
                if a != rat_int(1) {
                    let one_minus = rat_int(1) - &a;
                    assert_eq!(hilbert_symbol(&a, &one_minus, ctx).unwrap(), Mu8::ONE);
                }
            }
        }
    }

    #[test]
    fn epsilon_kills_norms() {
        let (c3, c5) = ctx35();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for ctx in [&c3, &c5] {
            let e = QuadExtField::new(ctx.delta_sq.clone());
            for _ in 0..500 {
                let z = QuadExtScalar::new(
                    rat(rng.gen_range(-9..10), rng.gen_range(1..5)),
                    rat(rng.gen_range(-9..10), rng.gen_range(1..5)),
                );
                if e.is_zero(&z) {
                    continue;
                }
                let n = norm_ef(&z, ctx);
                assert_eq!(epsilon_ef(&n, ctx).unwrap(), Mu8::ONE);
            }
            // squares are norms
            assert_eq!(epsilon_ef(&rat(49, 9), ctx).unwrap(), Mu8::ONE);
            // p is a non-norm in the unramified case
            assert!(ctx.is_unramified());
            assert_eq!(epsilon_ef(&rat_int(ctx.p as i64), ctx).unwrap(), Mu8::MINUS_ONE);
        }
    }

    #[test]
    fn epsilon_p_oracle_unramified() {
        // exhaustive check mod p^3 that p is not a norm a^2 - Delta b^2
        let m = 125i64;
        let mut norms = std::collections::HashSet::new();
        for a in 0..m {
            for b in 0..m {
                norms.insert((a * a - 2 * b * b).rem_euclid(m));
            }
        }
        assert!(!norms.contains(&5));
    }

    #[test]
    fn diagonalize_examples() {
        let f = crate::field::RationalField;
        let id2 = MatrixF::identity(&f, 2);
        let d = diagonalize(&id2).unwrap();
        assert_eq!(d.space.diag, vec![rat_int(1), rat_int(1)]);
        assert_eq!(d.radical_dim, 0);

        let hyp = MatrixF::from_rows(vec![
            vec![rat_int(0), rat_int(1)],
            vec![rat_int(1), rat_int(0)],
        ]);
        let d = diagonalize(&hyp).unwrap();
        assert_eq!(d.space.rank(), 2);
        // congruence witness: C G C^T = diag
        let cgct = d.witness.mul(&f, &hyp).mul(&f, &d.witness.transpose());
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { d.space.diag[i].clone() } else { rat_int(0) };
                assert_eq!(*cgct.at(i, j), want);
            }
        }
        // hyperbolic: discriminant is -1 mod squares
        assert!(crate::rational::is_rational_square(&-d.space.discriminant()));

        let z = MatrixF::zero(&f, 3, 3);
        let d = diagonalize(&z).unwrap();
        assert_eq!(d.space.rank(), 0);
        assert_eq!(d.radical_dim, 3);

        let ns = MatrixF::from_rows(vec![
            vec![rat_int(0), rat_int(1)],
            vec![rat_int(2), rat_int(0)],
        ]);
        assert!(matches!(diagonalize(&ns), Err(Error::NotSymmetric)));
    }

    #[test]
    fn diagonalize_random_witness() {
        let f = crate::field::RationalField;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let n = rng.gen_range(1..6);
            let a = MatrixF::from_fn(n, n, |_, _| rat(rng.gen_range(-3..4), 1));
            let g = a.add(&f, &a.transpose());
            let d = diagonalize(&g).unwrap();
            let cgct = d.witness.mul(&f, &g).mul(&f, &d.witness.transpose());
            for i in 0..n {
                for j in 0..n {
                    let want = if i == j && i < d.space.rank() {
                        d.space.diag[i].clone()
                    } else {
                        rat_int(0)
                    };
                    assert_eq!(*cgct.at(i, j), want);
                }
            }
            assert_eq!(d.space.rank() + d.radical_dim, n);
            assert_eq!(g.rank(&f), d.space.rank());
        }
    }

    #[test]
    fn weil_index_frozen_values() {
        let (_, c5) = ctx35();
        // gamma(eta . x^2)/gamma(eta . x^2) = 1
        let g1 = gamma_eta(&rat_int(1), &c5).unwrap();
        assert_eq!(g1, Mu8::ONE);
        // unit squares
        assert_eq!(gamma_eta(&rat_int(9), &c5).unwrap(), Mu8::ONE);
        // frozen from the oracle at N = 4: a = p = 5, c = 1/2.
        // unit part of 5/2 is 1/2; 2^{-1} = 3 mod 5 is a non-residue; p = 1 mod 4.
        let got = weil_index_gauss_oracle(&rat_int(5), &c5, &rat(1, 2), 4).unwrap();
        assert_eq!(got, Mu8::MINUS_ONE);
        assert_eq!(weil_index_scalar(&rat_int(5), &c5, &rat(1, 2)).unwrap(), Mu8::MINUS_ONE);
    }

    #[test]
    fn oracle_unit_unramified_is_one() {
        for (p, d) in [(3u64, -1i64), (5, 2), (7, 3)] {
            let ctx = LocalContext::new(p, rat_int(d)).unwrap();
            for u in [1i64, 2, -3] {
                if u.rem_euclid(p as i64) == 0 {
                    continue;
                }
                let got = weil_index_gauss_oracle(&rat_int(u), &ctx, &rat_int(1), 3).unwrap();
                assert_eq!(got, Mu8::ONE, "unit {u} at p={p}");
            }
        }
    }

    #[test]
    fn oracle_matches_closed_form_on_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for (p, d) in [(3u64, -1i64), (5, 2), (7, 3)] {
            let ctx = LocalContext::new(p, rat_int(d)).unwrap();
            for _ in 0..40 {
                let a = loop {
                    let v = rat(rng.gen_range(-30..30), rng.gen_range(1..20));
                    if !v.is_zero() {
                        break v;
                    }
                };
                let c = ctx.eta_scale();
                let n = (val_p(&(&a * &c), p) + 3) as u32;
                assert_eq!(
                    weil_index_scalar(&a, &ctx, &c).unwrap(),
                    weil_index_gauss_oracle(&a, &ctx, &c, n).unwrap(),
                    "a = {a}, p = {p}"
                );
            }
        }
    }

    #[test]
    fn gamma_eta_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (p, d) in [(3u64, -1i64), (5, 2), (7, 3)] {
            let ctx = LocalContext::new(p, rat_int(d)).unwrap();
            for _ in 0..500 {
                let y = loop {
                    let v = rat(rng.gen_range(-40..40), rng.gen_range(1..30));
                    if !v.is_zero() {
                        break v;
                    }
                };
                let x = loop {
                    let v = rat(rng.gen_range(-40..40), rng.gen_range(1..30));
                    if !v.is_zero() {
                        break v;
                    }
                };
                // gamma(y, eta)^2 = (-1, y)
                let g = gamma_eta(&y, &ctx).unwrap();
                assert_eq!(g.pow(2), hilbert_symbol(&rat_int(-1), &y, &ctx).unwrap());
                // (x, y) = gamma(x)^{-1} gamma(y)^{-1} gamma(xy)
                let gxy = gamma_eta(&(&x * &y), &ctx).unwrap();
                let gx = gamma_eta(&x, &ctx).unwrap();
                let gy = gamma_eta(&y, &ctx).unwrap();
                assert_eq!(hilbert_symbol(&x, &y, &ctx).unwrap(), gxy / (gx * gy));
            }
        }
    }

    #[test]
    fn quadspace_weil_index() {
        let (_, c5) = ctx35();
        assert_eq!(weil_index_quadspace(&QuadSpaceF::empty(), &c5).unwrap(), Mu8::ONE);
        // <1> has gamma = weil_index_scalar(1, eta)
        let single = QuadSpaceF::new(vec![rat_int(1)]);
        assert_eq!(
            weil_index_quadspace(&single, &c5).unwrap(),
            weil_index_scalar(&rat_int(1), &c5, &c5.eta_scale()).unwrap()
        );
        // multiplicativity over sums, checked against the oracle per entry
        let q = QuadSpaceF::new(vec![rat_int(5), rat_int(2)]);
        let parts = weil_index_scalar(&rat_int(5), &c5, &c5.eta_scale()).unwrap()
            * weil_index_scalar(&rat_int(2), &c5, &c5.eta_scale()).unwrap();
        assert_eq!(weil_index_quadspace(&q, &c5).unwrap(), parts);
        // hyperbolic planes contribute +1, independent of the scale a
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let a = loop {
                let v = rat(rng.gen_range(-20..20), rng.gen_range(1..10));
                if !v.is_zero() {
                    break v;
                }
            };
            let hyp = QuadSpaceF::new(vec![a.clone(), -a.clone()]);
            assert_eq!(weil_index_quadspace(&hyp, &c5).unwrap(), Mu8::ONE);
        }
    }

    #[test]
    fn quadspace_invariances() {
        let (c3, _) = ctx35();
        let q = QuadSpaceF::new(vec![rat_int(3), rat_int(2), rat_int(-1)]);
        let permuted = QuadSpaceF::new(vec![rat_int(-1), rat_int(3), rat_int(2)]);
        assert_eq!(
            weil_index_quadspace(&q, &c3).unwrap(),
            weil_index_quadspace(&permuted, &c3).unwrap()
        );
        let scaled = QuadSpaceF::new(vec![rat(3 * 49, 4), rat_int(2), rat_int(-1)]);
        assert_eq!(
            weil_index_quadspace(&q, &c3).unwrap(),
            weil_index_quadspace(&scaled, &c3).unwrap()
        );
    }
}
