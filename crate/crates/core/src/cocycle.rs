//! Leray invariants of Lagrangian triples, the Rao cocycle c_BY on Sp(BW),
//! the similitude cocycle C on GSp(BW), Kudla's splitting beta_{V,chi} over
//! U(W), and the commutator pairing between the two halves of the dual pair.
//!
//! The Leray invariant is evaluated through the Kashiwara ternary form
//! Q(x1, x2, x3) = <<x1,x2>> + <<x2,x3>> + <<x3,x1>> on L1 + L2 + L3, reduced
//! modulo its radical and split hyperbolic pairs; in general position the
//! direct description (L2, v -> <<v1, v3>>) is used as an independent
//! cross-check. The overall scale convention (sign and factor of two) is not
//! pinned by the defining formulas; it is fixed once by requiring the
//! splitting identity for beta_{V,chi} on a reference configuration, and the
//! chosen constants are frozen here. `calibrate_leray_scales` re-derives them.

use crate::doubling::{DoubledSpace, GSpElement, Lagrangian};
use crate::error::{Error, Result};
use crate::field::{Field, QuadExtScalar, RationalField};
use crate::local::{
    diagonalize, gamma_eta, hilbert_symbol, norm_ef, weil_index_quadspace, LocalContext,
    QuadSpaceF,
};
use crate::matrix::MatrixF;
use crate::mu8::Mu8;
use crate::rational::{is_rational_square, rat, rat_int, val_p, Rat};
use crate::spaces::{HermitianSpace, SimilitudeElement};
use num_traits::Zero;

/// Frozen Leray scale for the Kashiwara route. Calibration over the square
/// classes {1, -1, 2, -2} found every candidate consistent with relation (3)
/// and the twisted 2-cocycle identity (the identities compare Witt classes of
/// Leray forms, and those comparisons are blind to a uniform square-class
/// rescale), so the plain unrescaled form is frozen.
pub fn leray_scale_kashiwara() -> Rat {
    rat_int(1)
}

/// Frozen scale for the direct general-position form, calibrated to agree
/// with the Kashiwara route.
pub fn leray_scale_direct() -> Rat {
    rat_int(1)
}

fn omega_block(d: &DoubledSpace, a: &Lagrangian, b: &Lagrangian) -> MatrixF {
    let f = RationalField;
    a.span.mul(&f, &d.sp.gram()).mul(&f, &b.span.transpose())
}

/// The Kashiwara Gram of the ordered triple on L1 + L2 + L3 (unscaled).
fn kashiwara_gram(d: &DoubledSpace, l1: &Lagrangian, l2: &Lagrangian, l3: &Lagrangian) -> MatrixF {
    let f = RationalField;
    let mn = d.mn;
    let half = rat(1, 2);
    let o12 = omega_block(d, l1, l2);
    let o23 = omega_block(d, l2, l3);
    let o31 = omega_block(d, l3, l1);
    MatrixF::from_fn(3 * mn, 3 * mn, |i, j| {
        let (bi, ri) = (i / mn, i % mn);
        let (bj, rj) = (j / mn, j % mn);
        let v = match (bi, bj) {
            (0, 1) => o12.at(ri, rj).clone(),
            (1, 0) => o12.at(rj, ri).clone(),
            (1, 2) => o23.at(ri, rj).clone(),
            (2, 1) => o23.at(rj, ri).clone(),
            (2, 0) => o31.at(ri, rj).clone(),
            (0, 2) => o31.at(rj, ri).clone(),
            _ => f.zero(),
        };
        v * &half
    })
}

/// Drop pairs <a, -a (square)> from a diagonal form; the Weil index of such a
/// pair is +1, so this only normalizes the returned space.
fn split_hyperbolic_pairs(mut diag: Vec<Rat>) -> Vec<Rat> {
    'outer: loop {
        for i in 0..diag.len() {
            for j in (i + 1)..diag.len() {
                if is_rational_square(&-(&diag[i] * &diag[j])) {
                    diag.remove(j);
                    diag.remove(i);
                    continue 'outer;
                }
            }
        }
        return diag;
    }
}

fn leray_invariant_scaled(
    d: &DoubledSpace,
    l1: &Lagrangian,
    l2: &Lagrangian,
    l3: &Lagrangian,
    scale: &Rat,
) -> Result<QuadSpaceF> {
    for l in [l1, l2, l3] {
        if l.span.rows != d.mn || l.span.cols != d.dim() {
            return Err(Error::NotLagrangian);
        }
    }
    let gram = kashiwara_gram(d, l1, l2, l3);
    let diag = diagonalize(&gram)?;
    let trimmed = split_hyperbolic_pairs(diag.space.diag);
    Ok(QuadSpaceF { diag: trimmed.into_iter().map(|a| a * scale).collect() })
}

/// The Leray invariant of an ordered Lagrangian triple, as a quadratic space
/// over F (scaled by the frozen calibration constant). Degenerate positions
/// are handled by the radical quotient of the Kashiwara form.
pub fn leray_invariant(
    d: &DoubledSpace,
    l1: &Lagrangian,
    l2: &Lagrangian,
    l3: &Lagrangian,
) -> Result<QuadSpaceF> {
    leray_invariant_scaled(d, l1, l2, l3, &leray_scale_kashiwara())
}

/// Whether the triple is in general position: L1, L3 transverse and L2
/// transverse to both.
pub fn in_general_position(
    d: &DoubledSpace,
    l1: &Lagrangian,
    l2: &Lagrangian,
    l3: &Lagrangian,
) -> bool {
    let f = RationalField;
    let full = d.dim();
    l1.span.vstack(&l3.span).rank(&f) == full
        && l2.span.vstack(&l1.span).rank(&f) == full
        && l2.span.vstack(&l3.span).rank(&f) == full
}

/// General-position Leray form directly on L2: q(v) = <<v1, v3>> where
/// v = v1 + v3 along BW = L1 + L3. Used to cross-validate the Kashiwara
/// route; only valid in general position.
pub fn leray_direct(
    d: &DoubledSpace,
    l1: &Lagrangian,
    l2: &Lagrangian,
    l3: &Lagrangian,
) -> Result<QuadSpaceF> {
    let f = RationalField;
    if !in_general_position(d, l1, l2, l3) {
        return Err(Error::DegenerateForm);
    }
    let mn = d.mn;
    let stacked = l1.span.vstack(&l3.span);
    // decompose each basis vector of L2
    let mut comp1 = Vec::with_capacity(mn);
    let mut comp3 = Vec::with_capacity(mn);
    for i in 0..mn {
        let v = l2.span.submatrix(i, 0, 1, d.dim());
        let coeffs = stacked.solve_row(&f, &v)?;
        let alpha = coeffs.submatrix(0, 0, 1, mn);
        let beta = coeffs.submatrix(0, mn, 1, mn);
        comp1.push(alpha.mul(&f, &l1.span));
        comp3.push(beta.mul(&f, &l3.span));
    }
    let gram = MatrixF::from_fn(mn, mn, |i, j| d.pair(&comp1[i], &comp3[j]));
    if gram != gram.transpose() {
        return Err(Error::Calibration("direct Leray form must be symmetric".into()));
    }
    let diag = diagonalize(&gram)?;
    let trimmed = split_hyperbolic_pairs(diag.space.diag);
    let scale = leray_scale_direct();
    Ok(QuadSpaceF { diag: trimmed.into_iter().map(|a| a * &scale).collect() })
}

fn rao_cocycle_scaled(
    s1: &GSpElement,
    s2: &GSpElement,
    d: &DoubledSpace,
    ctx: &LocalContext,
    scale: &Rat,
) -> Result<Mu8> {
    if !s1.is_isometry() || !s2.is_isometry() {
        return Err(Error::NotIsometry);
    }
    let y = d.standard_y();
    let mid = d.lagrangian_image(&y, &d.inverse(s2));
    let right = d.lagrangian_image(&y, s1);
    let leray = leray_invariant_scaled(d, &y, &mid, &right, scale)?;
    weil_index_quadspace(&leray, ctx)
}

/// Rao's cocycle on Sp(BW):
/// c_BY(s1, s2) = gamma_F(eta . L(BY, BY s2^{-1}, BY s1)).
pub fn rao_cocycle(
    s1: &GSpElement,
    s2: &GSpElement,
    d: &DoubledSpace,
    ctx: &LocalContext,
) -> Result<Mu8> {
    rao_cocycle_scaled(s1, s2, d, ctx, &leray_scale_kashiwara())
}

/// mu(y, s) = (x(s), y)_F gamma_F(y, eta)^{j(s)} for s in Sp(BW).
pub fn mu(y: &Rat, s: &GSpElement, d: &DoubledSpace, ctx: &LocalContext) -> Result<Mu8> {
    if y.is_zero() {
        return Err(Error::ZeroScale);
    }
    if !s.is_isometry() {
        return Err(Error::NotIsometry);
    }
    let none: Option<&mut rand_chacha::ChaCha8Rng> = None;
    let (x_class, j) = d.bruhat_invariants(s, none)?;
    let symbol = hilbert_symbol(&x_class, y, ctx)?;
    Ok(symbol * gamma_eta(y, ctx)?.pow(j as i64))
}

fn big_cocycle_c_scaled(
    g: &GSpElement,
    gp: &GSpElement,
    d: &DoubledSpace,
    ctx: &LocalContext,
    scale: &Rat,
) -> Result<Mu8> {
    let g1 = d.isometry_part(g);
    let gp1 = d.isometry_part(gp);
    let twisted = d.conj_by_d(&g1, &gp.nu)?;
    Ok(rao_cocycle_scaled(&twisted, &gp1, d, ctx, scale)? * mu(&gp.nu, &g1, d, ctx)?)
}

/// The similitude cocycle C(g, g') = c_BY(g_1^{nu(g')}, g'_1) mu(nu(g'), g_1);
/// restricts to the Rao cocycle on Sp x Sp.
pub fn big_cocycle_c(
    g: &GSpElement,
    gp: &GSpElement,
    d: &DoubledSpace,
    ctx: &LocalContext,
) -> Result<Mu8> {
    big_cocycle_c_scaled(g, gp, d, ctx, &leray_scale_kashiwara())
}

/// The character chi of E^* with chi|_{F^*} = epsilon_{E/F}^m. Trivial for
/// even m; the unramified quadratic character chi(x) = (-1)^{v_E(x)} for odd
/// m when E/F is unramified at p. No ramified construction is provided:
/// such configurations are rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CharacterChi {
    Trivial,
    UnramifiedQuadratic,
}

impl CharacterChi {
    pub fn for_space(v: &HermitianSpace, ctx: &LocalContext) -> Result<Self> {
        if v.m % 2 == 0 {
            Ok(CharacterChi::Trivial)
        } else if ctx.is_unramified() {
            Ok(CharacterChi::UnramifiedQuadratic)
        } else {
            Err(Error::ChiUnavailable)
        }
    }

    pub fn eval(&self, x: &QuadExtScalar, ctx: &LocalContext) -> Result<Mu8> {
        if x.is_zero() {
            return Err(Error::ZeroArgument);
        }
        match self {
            CharacterChi::Trivial => Ok(Mu8::ONE),
            CharacterChi::UnramifiedQuadratic => {
                // v_E(x) = val_p(N(x)) / 2 in the unramified case
                let n = norm_ef(x, ctx);
                let v = val_p(&n, ctx.p);
                assert!(v % 2 == 0, "norm valuation must be even in the unramified case");
                Ok(Mu8::from_sign((v / 2) % 2 == 0))
            }
        }
    }
}

/// RV: the 2m-dimensional F-space underlying V with quadratic form
/// (1/2) Tr_{E/F} ( , ).
pub fn rv_space(v: &HermitianSpace, _ctx: &LocalContext) -> Result<QuadSpaceF> {
    let k = &v.field;
    if v.gram.conj(k) != v.gram {
        return Err(Error::InvalidConfig(
            "RV requires an F-valued hermitian Gram (diagonalize first)".into(),
        ));
    }
    let m = v.m;
    let delta = QuadExtScalar::delta();
    // F-basis {v_0..v_{m-1}, delta v_0..delta v_{m-1}};
    // B(lambda_a v_ka, lambda_b v_kb) = (1/2) Tr(conj(lambda_a) lambda_b Phi_{ka kb})
    let gram = MatrixF::from_fn(2 * m, 2 * m, |a, b| {
        let (ka, da) = (a % m, a >= m);
        let (kb, db) = (b % m, b >= m);
        let mut z = v.gram.at(ka, kb).clone();
        if db {
            z = k.mul(&z, &delta);
        }
        if da {
            z = k.mul(&z, &k.conj(&delta));
        }
        z.a.clone()
    });
    let d = diagonalize(&gram)?;
    if d.radical_dim != 0 {
        return Err(Error::DegenerateForm);
    }
    Ok(d.space)
}

/// Kudla's splitting beta_{V,chi}(h) = chi(x(h)) gamma_F(eta . RV)^{-j(h)}
/// for h in U(W).
pub fn beta_v_chi(
    h: &SimilitudeElement,
    d: &DoubledSpace,
    chi: CharacterChi,
    ctx: &LocalContext,
) -> Result<Mu8> {
    if !h.is_isometry() {
        return Err(Error::NotIsometry);
    }
    let none: Option<&mut rand_chacha::ChaCha8Rng> = None;
    let (x_class, j) = d.w.bruhat_invariants(h, none)?;
    let rv = rv_space(&d.v, ctx)?;
    let gamma_rv = weil_index_quadspace(&rv, ctx)?;
    Ok(chi.eval(&x_class, ctx)? * gamma_rv.pow(-(j as i64)))
}

/// The commutator of preimages of iota_W(g) and iota_V(h) in the metaplectic
/// cover: central components cancel, leaving
/// C(iota_W(g), iota_V(h)) / C(iota_V(h), iota_W(g)).
pub fn commutator_value(
    g: &SimilitudeElement,
    h: &SimilitudeElement,
    d: &DoubledSpace,
    ctx: &LocalContext,
) -> Result<Mu8> {
    let iw = d.iota_w(g)?;
    let iv = d.iota_v(h)?;
    let num = big_cocycle_c(&iw, &iv, d, ctx)?;
    let den = big_cocycle_c(&iv, &iw, d, ctx)?;
    Ok(num / den)
}

/// Outcome of re-deriving the frozen scale constants on the reference
/// configuration (p = 3, Delta = -1, m = 1, V = <1>, r = 1).
#[derive(Debug, Clone)]
pub struct LerayCalibration {
    pub kashiwara_passing: Vec<Rat>,
    pub direct_passing: Vec<Rat>,
}

/// Enumerate candidate scales and select those under which (a) relation (3)
/// holds for every seeded pair and (b) the similitude cocycle satisfies the
/// 2-cocycle identity on triples mixing iota-images with d(y)-twists (the
/// mu-factor is scale-free, so the twisted identity pins the phase that
/// iota_V-triples alone cannot see). The direct general-position form is then
/// calibrated against the selected Kashiwara route.
pub fn calibrate_leray_scales(pairs: usize) -> Result<LerayCalibration> {
    use rand::{Rng, SeedableRng};
    let ctx = LocalContext::new(3, rat_int(-1))?;
    let field = crate::field::QuadExtField::new(rat_int(-1));
    let v = HermitianSpace::diagonal(&[rat_int(1)], field.clone())?;
    let w = crate::spaces::SplitSkewSpace::new(1, field);
    let d = DoubledSpace::build(v, w)?;
    let chi = CharacterChi::for_space(&d.v, &ctx)?;

    let candidates = [rat_int(1), rat_int(-1), rat_int(2), rat_int(-2)];
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xCA11B);
    let mut samples = Vec::with_capacity(pairs);
    for _ in 0..pairs {
        let h = d.w.random_isometry(&mut rng, 6);
        let hp = d.w.random_isometry(&mut rng, 6);
        samples.push((h, hp));
    }
    // mixed GSp triples with all four square classes of nu
    let mut gsp_triples = Vec::with_capacity(pairs);
    let random_gsp = |rng: &mut rand_chacha::ChaCha8Rng| -> Result<GSpElement> {
        let h = d.w.random_isometry(rng, 4);
        let g = d.v.random_isometry(rng)?;
        let el = d.iota(&g, &h)?;
        let reps = ctx.square_class_reps();
        let y = &reps[rng.gen_range(0..4)];
        d.compose_d(&el, y)
    };
    for _ in 0..pairs {
        gsp_triples.push((
            random_gsp(&mut rng)?,
            random_gsp(&mut rng)?,
            random_gsp(&mut rng)?,
        ));
    }

    let rv = rv_space(&d.v, &ctx)?;
    let gamma_rv = weil_index_quadspace(&rv, &ctx)?;
    let beta = |h: &SimilitudeElement| -> Result<Mu8> {
        let none: Option<&mut rand_chacha::ChaCha8Rng> = None;
        let (x_class, j) = d.w.bruhat_invariants(h, none)?;
        Ok(chi.eval(&x_class, &ctx)? * gamma_rv.pow(-(j as i64)))
    };

    let mut kashiwara_passing = Vec::new();
    for cand in &candidates {
        let mut ok = true;
        for (h, hp) in &samples {
            let lhs = rao_cocycle_scaled(&d.iota_v(h)?, &d.iota_v(hp)?, &d, &ctx, cand)?;
            let prod = d.w.compose(h, hp);
            let rhs = beta(h)?.inv() * beta(hp)?.inv() * beta(&prod)?;
            if lhs != rhs {
                ok = false;
                break;
            }
        }
        for (a, b, c) in &gsp_triples {
            if !ok {
                break;
            }
            let lhs = big_cocycle_c_scaled(a, b, &d, &ctx, cand)?
                * big_cocycle_c_scaled(&d.compose(a, b), c, &d, &ctx, cand)?;
            let rhs = big_cocycle_c_scaled(a, &d.compose(b, c), &d, &ctx, cand)?
                * big_cocycle_c_scaled(b, c, &d, &ctx, cand)?;
            if lhs != rhs {
                ok = false;
            }
        }
        if ok {
            kashiwara_passing.push(cand.clone());
        }
    }

    // general-position triples for the direct-form comparison
    let mut gp_triples = Vec::new();
    while gp_triples.len() < pairs {
        let s1 = GSpElement { mat: d.sp.random_big_cell(&mut rng), nu: rat_int(1) };
        let s2 = GSpElement { mat: d.sp.random_big_cell(&mut rng), nu: rat_int(1) };
        let y = d.standard_y();
        let mid = d.lagrangian_image(&y, &d.inverse(&s2));
        let right = d.lagrangian_image(&y, &s1);
        if in_general_position(&d, &y, &mid, &right) {
            gp_triples.push((mid, right));
        }
    }
    let mut direct_passing = Vec::new();
    for cand in &candidates {
        let mut ok = true;
        let mut seen_general = 0;
        for (mid, right) in &gp_triples {
            let y = d.standard_y();
            seen_general += 1;
            let space_k =
                leray_invariant_scaled(&d, &y, mid, right, &leray_scale_kashiwara())?;
            let mn = d.mn;
            let f = RationalField;
            let stacked = y.span.vstack(&right.span);
            let mut comps = Vec::with_capacity(mn);
            for i in 0..mn {
                let vrow = mid.span.submatrix(i, 0, 1, d.dim());
                let coeffs = stacked.solve_row(&f, &vrow)?;
                comps.push((
                    coeffs.submatrix(0, 0, 1, mn).mul(&f, &y.span),
                    coeffs.submatrix(0, mn, 1, mn).mul(&f, &right.span),
                ));
            }
            let gram_d = MatrixF::from_fn(mn, mn, |i, j| d.pair(&comps[i].0, &comps[j].1));
            let space_d = QuadSpaceF {
                diag: diagonalize(&gram_d)?.space.diag.iter().map(|a| a * cand).collect(),
            };
            if weil_index_quadspace(&space_k, &ctx)? != weil_index_quadspace(&space_d, &ctx)? {
                ok = false;
                break;
            }
        }
        if ok && seen_general > 0 {
            direct_passing.push(cand.clone());
        }
    }

    Ok(LerayCalibration { kashiwara_passing, direct_passing })
}
