//! Configuration-driven verification suites.
//!
//! Each suite checks one family of identities on randomized instances. A
//! trial is a pure function of (config, seed, suite, trial index), so runs
//! are reproducible and any failing instance can be replayed from the
//! counterexample dump alone.

use crate::cocycle::{beta_v_chi, big_cocycle_c, commutator_value, rao_cocycle, CharacterChi};
use crate::doubling::{DoubledSpace, GSpElement};
use crate::error::{Error, Result};
use crate::field::{Field, QuadExtField, QuadExtScalar};
use crate::local::{
    epsilon_ef, gamma_eta, hilbert_symbol, is_local_norm, norm_ef, weil_index_gauss_oracle,
    weil_index_scalar, LocalContext,
};
use crate::matrix::MatrixE;
use crate::mu8::Mu8;
use crate::rational::{is_rational_square, parse_rat, rat, rat_int, val_p, Rat};
use crate::spaces::{in_h_plus, HermitianSpace, SimilitudeElement, SplitSkewSpace};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

pub const ALL_SUITES: &[&str] = &[
    "cocycle-identity",
    "relation-3",
    "lemma-31-1",
    "lemma-31-2",
    "prop-32-H",
    "prop-32-G",
    "prop-33",
    "gamma-props",
    "bruhat-roundtrip",
    "space-dichotomy",
    "h-plus",
];

const COUNTEREXAMPLE_DUMP_LIMIT: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub p: u64,
    pub delta: Rat,
    pub m: usize,
    pub gram_v: Vec<Rat>,
    pub r: usize,
    pub trials: usize,
    pub seed: u64,
    pub word_len: usize,
    pub suites: Vec<String>,
    pub search_bound: i64,
    /// Scale c of the additive character psi_c; eta is psi_{c/2}. Raw Weil
    /// indices depend on it, the verified identities do not.
    pub psi_scale: Rat,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !crate::rational::is_odd_prime(self.p) {
            return Err(Error::InvalidConfig(format!("p = {} is not an odd prime", self.p)));
        }
        if self.delta.is_zero() {
            return Err(Error::InvalidConfig("delta must be nonzero".into()));
        }
        if crate::rational::is_square_at_p(&self.delta, self.p) {
            return Err(Error::InvalidConfig(format!(
                "delta = {} is a square at p = {}",
                self.delta, self.p
            )));
        }
        if self.m == 0 || self.gram_v.len() != self.m {
            return Err(Error::InvalidConfig(format!(
                "gram_V must list exactly m = {} nonzero coefficients",
                self.m
            )));
        }
        if self.gram_v.iter().any(|c| c.is_zero()) {
            return Err(Error::InvalidConfig("gram_V entries must be nonzero".into()));
        }
        if self.r == 0 {
            return Err(Error::InvalidConfig("r must be at least 1".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if self.search_bound < 1 {
            return Err(Error::InvalidConfig("search_bound must be at least 1".into()));
        }
        if self.psi_scale.is_zero() {
            return Err(Error::InvalidConfig("psi_scale must be nonzero".into()));
        }
        for s in &self.suites {
            if !ALL_SUITES.contains(&s.as_str()) {
                return Err(Error::UnknownSuite(s.clone()));
            }
        }
        Ok(())
    }

    /// Parse the flat key-value config format: `key = value` lines with `#`
    /// comments. Unknown keys are rejected.
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::InvalidConfig(format!(
                    "line {}: expected `key = value`",
                    lineno + 1
                )));
            };
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        Self::from_map(&map)
    }

    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self> {
        let get = |k: &str| map.get(k).map(|s| s.as_str());
        let parse_u64 = |k: &str, d: u64| -> Result<u64> {
            match get(k) {
                None => Ok(d),
                Some(s) => s
                    .parse()
                    .map_err(|_| Error::InvalidConfig(format!("bad integer for {k}: {s}"))),
            }
        };
        let p = parse_u64("p", 3)?;
        let delta = match get("delta") {
            None => return Err(Error::InvalidConfig("missing key: delta".into())),
            Some(s) => {
                parse_rat(s).ok_or_else(|| Error::InvalidConfig(format!("bad rational: {s}")))?
            }
        };
        let m = parse_u64("m", 1)? as usize;
        let gram_v = match get("gram_V") {
            None => vec![rat_int(1); m],
            Some(s) => s
                .split(',')
                .map(|t| {
                    parse_rat(t)
                        .ok_or_else(|| Error::InvalidConfig(format!("bad gram_V entry: {t}")))
                })
                .collect::<Result<Vec<_>>>()?,
        };
        let suites = match get("suites") {
            None => ALL_SUITES.iter().map(|s| s.to_string()).collect(),
            Some(s) => s.split(',').map(|t| t.trim().to_string()).filter(|t| !t.is_empty()).collect(),
        };
        let psi_scale = match get("psi_scale") {
            None => rat_int(1),
            Some(s) => {
                parse_rat(s).ok_or_else(|| Error::InvalidConfig(format!("bad rational: {s}")))?
            }
        };
        let cfg = RunConfig {
            p,
            delta,
            m,
            gram_v,
            r: parse_u64("r", 1)? as usize,
            trials: parse_u64("trials", 100)? as usize,
            seed: parse_u64("seed", 0)?,
            word_len: parse_u64("word_len", 6)? as usize,
            suites,
            search_bound: parse_u64("search_bound", 3)? as i64,
            psi_scale,
        };
        for k in map.keys() {
            if ![
                "p", "delta", "m", "gram_V", "r", "trials", "seed", "word_len", "suites",
                "search_bound", "psi_scale",
            ]
            .contains(&k.as_str())
            {
                return Err(Error::InvalidConfig(format!("unknown config key: {k}")));
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_map(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("p".into(), self.p.to_string());
        m.insert("delta".into(), self.delta.to_string());
        m.insert("m".into(), self.m.to_string());
        m.insert(
            "gram_V".into(),
            self.gram_v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","),
        );
        m.insert("r".into(), self.r.to_string());
        m.insert("trials".into(), self.trials.to_string());
        m.insert("seed".into(), self.seed.to_string());
        m.insert("word_len".into(), self.word_len.to_string());
        m.insert("suites".into(), self.suites.join(","));
        m.insert("search_bound".into(), self.search_bound.to_string());
        m.insert("psi_scale".into(), self.psi_scale.to_string());
        m
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Counterexample {
    pub trial: usize,
    pub check: String,
    pub inputs: BTreeMap<String, String>,
    pub expected: String,
    pub actual: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SuiteReport {
    pub suite: String,
    pub trials: usize,
    pub failures: usize,
    pub counterexamples: Vec<Counterexample>,
    pub elapsed_ms: u64,
}

/// Full verification environment derived from a config.
pub struct Env {
    pub cfg: RunConfig,
    pub ctx: LocalContext,
    pub field: QuadExtField,
    pub v: HermitianSpace,
    pub w: SplitSkewSpace,
    pub d: DoubledSpace,
}

impl Env {
    pub fn build(cfg: &RunConfig) -> Result<Self> {
        cfg.validate()?;
        let ctx = LocalContext::with_psi_scale(cfg.p, cfg.delta.clone(), cfg.psi_scale.clone())?;
        let field = QuadExtField::new(cfg.delta.clone());
        let v = HermitianSpace::diagonal(&cfg.gram_v, field.clone())?;
        let w = SplitSkewSpace::new(cfg.r, field.clone());
        let d = DoubledSpace::build(v.clone(), w.clone())?;
        Ok(Self { cfg: cfg.clone(), ctx, field, v, w, d })
    }

    fn chi(&self) -> Result<CharacterChi> {
        CharacterChi::for_space(&self.v, &self.ctx)
    }

    fn trial_rng(&self, suite: &str, trial: usize) -> ChaCha8Rng {
        let mut h = 0xcbf29ce484222325u64;
        for b in suite.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        ChaCha8Rng::seed_from_u64(
            self.cfg.seed ^ h.rotate_left(17) ^ (trial as u64).wrapping_mul(0x9E3779B97F4A7C15),
        )
    }

    fn beta(&self, h: &SimilitudeElement, chi: CharacterChi) -> Result<Mu8> {
        beta_v_chi(h, &self.d, chi, &self.ctx)
    }

    /// Random element of GU(V): Cayley isometry times a scalar, and for even
    /// m occasionally a block similitude with factor p.
    fn random_g<G: Rng>(&self, rng: &mut G) -> Result<SimilitudeElement> {
        let g = self.v.random_similitude(rng)?;
        if self.v.m % 2 == 0 && rng.gen_bool(0.34) {
            if let Ok(extra) =
                self.v.similitude_with_factor(&rat_int(self.cfg.p as i64), self.cfg.search_bound)
            {
                return Ok(self.v.compose(&g, &extra));
            }
        }
        Ok(g)
    }

    fn random_h<G: Rng>(&self, rng: &mut G) -> SimilitudeElement {
        self.w.random_similitude(rng, self.cfg.word_len, &self.ctx)
    }

    /// Random GSp element drawn from iota-images and d(y) scalings.
    fn random_gsp<G: Rng>(&self, rng: &mut G) -> Result<GSpElement> {
        let g = self.random_g(rng)?;
        let h = self.random_h(rng);
        let el = self.d.iota(&g, &h)?;
        let reps = self.ctx.square_class_reps();
        let y = &reps[rng.gen_range(0..4)];
        self.d.compose_d(&el, y)
    }

    fn nonzero_rat<G: Rng>(&self, rng: &mut G) -> Rat {
        loop {
            let v = rat(rng.gen_range(-40..=40), rng.gen_range(1..=20));
            if !v.is_zero() {
                return v;
            }
        }
    }
}

fn fmt_mat<T: std::fmt::Display + Clone + PartialEq + std::fmt::Debug>(
    m: &crate::matrix::Matrix<T>,
) -> String {
    let mut s = String::new();
    for i in 0..m.rows {
        if i > 0 {
            s.push(';');
        }
        for j in 0..m.cols {
            if j > 0 {
                s.push(',');
            }
            let _ = write!(s, "{}", m.at(i, j));
        }
    }
    s
}

/// Outcome of one trial: None = pass, Some = counterexample data.
type TrialOutcome = Option<(String, BTreeMap<String, String>, String, String)>;

fn check(
    name: &str,
    expected: Mu8,
    actual: Mu8,
    inputs: &BTreeMap<String, String>,
) -> TrialOutcome {
    if expected == actual {
        None
    } else {
        Some((
            name.to_string(),
            inputs.clone(),
            expected.exponent().to_string(),
            actual.exponent().to_string(),
        ))
    }
}

fn bool_check(name: &str, ok: bool, inputs: &BTreeMap<String, String>) -> TrialOutcome {
    if ok {
        None
    } else {
        Some((name.to_string(), inputs.clone(), "pass".into(), "fail".into()))
    }
}

fn run_trial(env: &Env, suite: &str, trial: usize) -> Result<TrialOutcome> {
    let mut rng = env.trial_rng(suite, trial);
    let ctx = &env.ctx;
    let d = &env.d;
    match suite {
        "cocycle-identity" => {
            let a = env.random_gsp(&mut rng)?;
            let b = env.random_gsp(&mut rng)?;
            let c = env.random_gsp(&mut rng)?;
            let mut inputs = BTreeMap::new();
            inputs.insert("a".into(), fmt_mat(&a.mat));
            inputs.insert("b".into(), fmt_mat(&b.mat));
            inputs.insert("c".into(), fmt_mat(&c.mat));
            let lhs = big_cocycle_c(&a, &b, d, ctx)? * big_cocycle_c(&d.compose(&a, &b), &c, d, ctx)?;
            let rhs = big_cocycle_c(&a, &d.compose(&b, &c), d, ctx)? * big_cocycle_c(&b, &c, d, ctx)?;
            if let Some(cex) = check("2-cocycle identity for C", lhs, rhs, &inputs) {
                return Ok(Some(cex));
            }
            // c_BY triviality on parabolic pairs
            let p = GSpElement { mat: d.sp.random_parabolic(&mut rng), nu: rat_int(1) };
            let s = d.isometry_part(&a);
            let mut pins = BTreeMap::new();
            pins.insert("p".into(), fmt_mat(&p.mat));
            pins.insert("s".into(), fmt_mat(&s.mat));
            if let Some(cex) = check(
                "c_BY(p, s) = 1 on the parabolic",
                Mu8::ONE,
                rao_cocycle(&p, &s, d, ctx)?,
                &pins,
            ) {
                return Ok(Some(cex));
            }
            Ok(check(
                "c_BY(s, p) = 1 on the parabolic",
                Mu8::ONE,
                rao_cocycle(&s, &p, d, ctx)?,
                &pins,
            ))
        }
        "relation-3" => {
            let chi = env.chi()?;
            let h = env.w.random_isometry(&mut rng, env.cfg.word_len);
            let hp = env.w.random_isometry(&mut rng, env.cfg.word_len);
            let mut inputs = BTreeMap::new();
            inputs.insert("h".into(), fmt_mat(&h.mat));
            inputs.insert("h'".into(), fmt_mat(&hp.mat));
            let lhs = rao_cocycle(&d.iota_v(&h)?, &d.iota_v(&hp)?, d, ctx)?;
            let rhs = env.beta(&h, chi)?.inv()
                * env.beta(&hp, chi)?.inv()
                * env.beta(&env.w.compose(&h, &hp), chi)?;
            Ok(check("relation (3)", lhs, rhs, &inputs))
        }
        "lemma-31-1" => {
            let h = env.w.random_isometry(&mut rng, env.cfg.word_len);
            let y = env.nonzero_rat(&mut rng);
            let hy = env.w.conj_by_d(&h, &y)?;
            let bh = env.w.bruhat(&h, Some(&mut rng))?;
            let bhy = env.w.bruhat(&hy, Some(&mut rng))?;
            let mut inputs = BTreeMap::new();
            inputs.insert("h".into(), fmt_mat(&h.mat));
            inputs.insert("y".into(), y.to_string());
            inputs.insert("x(h)".into(), bh.x_class.to_string());
            inputs.insert("x(h^y)".into(), bhy.x_class.to_string());
            if let Some(cex) = bool_check("j(h^y) = j(h)", bh.j == bhy.j, &inputs) {
                return Ok(Some(cex));
            }
            let field = env.w.field();
            let expect = field.mul(&bh.x_class, &field.from_rat(&y.pow(bh.j as i32)));
            let ratio = field.div(&bhy.x_class, &expect).ok_or(Error::ZeroArgument)?;
            let in_norms = match ratio.as_base() {
                Some(f_part) => is_local_norm(&f_part, ctx)?,
                None => false,
            };
            Ok(bool_check("x(h^y) = x(h) y^{j(h)} mod norms", in_norms, &inputs))
        }
        "lemma-31-2" => {
            let h = env.w.random_isometry(&mut rng, env.cfg.word_len);
            let bh = env.w.bruhat(&h, Some(&mut rng))?;
            let s = d.iota_v(&h)?;
            let bs = d.bruhat(&s, Some(&mut rng))?;
            let m = env.v.m;
            let mut inputs = BTreeMap::new();
            inputs.insert("h".into(), fmt_mat(&h.mat));
            inputs.insert("j(h)".into(), bh.j.to_string());
            inputs.insert("j(iota_V(h))".into(), bs.j.to_string());
            inputs.insert("x(iota_V(h))".into(), bs.x_class.to_string());
            if let Some(cex) = bool_check("j(iota_V(h)) = 2m j(h)", bs.j == 2 * m * bh.j, &inputs) {
                return Ok(Some(cex));
            }
            let n_x = norm_ef(&bh.x_class, ctx);
            let minus_delta = -env.field.delta_sq.clone();
            let expect = n_x.pow(m as i32) * minus_delta.pow((m * bh.j) as i32);
            Ok(bool_check(
                "x(iota_V(h)) = N(x(h))^m (-Delta)^{m j(h)} mod squares",
                is_rational_square(&(&bs.x_class / &expect)),
                &inputs,
            ))
        }
        "prop-32-H" => {
            let chi = env.chi()?;
            let m = env.v.m;
            let h = env.random_h(&mut rng);
            let hp = env.random_h(&mut rng);
            let mut inputs = BTreeMap::new();
            inputs.insert("h".into(), fmt_mat(&h.mat));
            inputs.insert("h'".into(), fmt_mat(&hp.mat));
            let h1 = env.w.project_isometry(&h);
            let hp1 = env.w.project_isometry(&hp);
            let prod1 = env.w.project_isometry(&env.w.compose(&h, &hp));
            let (x1, _) = env.w.bruhat_invariants(&h1, Some(&mut rng))?;
            let c_val = big_cocycle_c(&d.iota_v(&h)?, &d.iota_v(&hp)?, d, ctx)?;
            let symbol = hilbert_symbol(&norm_ef(&x1, ctx), &hp.nu, ctx)?.pow(m as i64);
            let rhs = env.beta(&h1, chi)?.inv()
                * env.beta(&hp1, chi)?.inv()
                * env.beta(&prod1, chi)?
                * symbol;
            if let Some(cex) =
                check("C(iota_V h, iota_V h') displayed formula", c_val, rhs, &inputs)
            {
                return Ok(Some(cex));
            }
            if m % 2 == 0 {
                // s(h) = beta(h_1) trivializes the restricted cocycle
                let lhs = env.beta(&h1, chi)? * env.beta(&hp1, chi)? * c_val;
                let rhs = env.beta(&prod1, chi)?;
                return Ok(check("m even: beta trivializes C on H", lhs, rhs, &inputs));
            }
            Ok(None)
        }
        "prop-32-G" => {
            let g = env.random_g(&mut rng)?;
            let gp = env.random_g(&mut rng)?;
            let mr = (env.v.m * env.w.r()) as i64;
            let mut inputs = BTreeMap::new();
            inputs.insert("g".into(), fmt_mat(&g.mat));
            inputs.insert("g'".into(), fmt_mat(&gp.mat));
            inputs.insert("nu(g)".into(), g.nu.to_string());
            inputs.insert("nu(g')".into(), gp.nu.to_string());
            let c_val = big_cocycle_c(&d.iota_w(&g)?, &d.iota_w(&gp)?, d, ctx)?;
            let symbol = hilbert_symbol(&g.nu, &gp.nu, ctx)?.pow(mr);
            if let Some(cex) = check("C(iota_W g, iota_W g') = (nu, nu')^{mr}", c_val, symbol, &inputs)
            {
                return Ok(Some(cex));
            }
            // t(g) = gamma(nu(g), eta)^{mr} trivializes via the gamma coboundary
            let t = |x: &SimilitudeElement| -> Result<Mu8> {
                Ok(gamma_eta(&x.nu, ctx)?.pow(mr))
            };
            let lhs = t(&g)? * t(&gp)? * c_val;
            let rhs = t(&env.v.compose(&g, &gp))?;
            Ok(check("gamma-coboundary trivializes C on G", lhs, rhs, &inputs))
        }
        "prop-33" => {
            let m = env.v.m;
            let mr = (m * env.w.r()) as i64;
            let g = env.random_g(&mut rng)?;
            let h = env.random_h(&mut rng);
            let mut inputs = BTreeMap::new();
            inputs.insert("g".into(), fmt_mat(&g.mat));
            inputs.insert("h".into(), fmt_mat(&h.mat));
            inputs.insert("nu(g)".into(), g.nu.to_string());
            inputs.insert("nu(h)".into(), h.nu.to_string());
            let com = commutator_value(&g, &h, d, ctx)?;
            // closed formula from the proof
            let h1 = env.w.project_isometry(&h);
            let (x1, j1) = env.w.bruhat_invariants(&h1, Some(&mut rng))?;
            let g_nu_inv = g.nu.recip();
            let num = hilbert_symbol(&g.nu, &h.nu, ctx)?.pow(mr);
            let den = hilbert_symbol(&norm_ef(&x1, ctx), &g_nu_inv, ctx)?.pow(m as i64)
                * hilbert_symbol(&env.field.delta_sq, &g_nu_inv, ctx)?
                    .pow((m * j1) as i64);
            if let Some(cex) = check("commutator closed formula", num / den, com, &inputs) {
                return Ok(Some(cex));
            }
            if m % 2 == 0 {
                return Ok(check("m even: commutator trivial", Mu8::ONE, com, &inputs));
            }
            Ok(None)
        }
        "gamma-props" => {
            let y = env.nonzero_rat(&mut rng);
            let x = env.nonzero_rat(&mut rng);
            let mut inputs = BTreeMap::new();
            inputs.insert("x".into(), x.to_string());
            inputs.insert("y".into(), y.to_string());
            let gy = gamma_eta(&y, ctx)?;
            if let Some(cex) = check(
                "gamma(y, eta)^2 = (-1, y)",
                hilbert_symbol(&rat_int(-1), &y, ctx)?,
                gy.pow(2),
                &inputs,
            ) {
                return Ok(Some(cex));
            }
            let gx = gamma_eta(&x, ctx)?;
            let gxy = gamma_eta(&(&x * &y), ctx)?;
            if let Some(cex) = check(
                "(x,y) = gamma(x)^-1 gamma(y)^-1 gamma(xy)",
                hilbert_symbol(&x, &y, ctx)?,
                gxy / (gx * gy),
                &inputs,
            ) {
                return Ok(Some(cex));
            }
            // closed form vs the truncated Gauss sum oracle
            let c = ctx.eta_scale();
            let n = (val_p(&(&x * &c), ctx.p) + 3) as u32;
            Ok(check(
                "weil index closed form = gauss oracle",
                weil_index_gauss_oracle(&x, ctx, &c, n)?,
                weil_index_scalar(&x, ctx, &c)?,
                &inputs,
            ))
        }
        "bruhat-roundtrip" => {
            // U(W) side: one fully verified decomposition, then an
            // invariants-only re-decomposition with fresh pivots
            let h = env.w.random_isometry(&mut rng, env.cfg.word_len);
            let b1 = env.w.bruhat(&h, Some(&mut rng))?;
            let (x2, j2) = env.w.bruhat_invariants(&h, Some(&mut rng))?;
            let mut inputs = BTreeMap::new();
            inputs.insert("h".into(), fmt_mat(&h.mat));
            let field = env.w.field();
            let recon = b1
                .p1
                .mul(field, &env.w.group.tau(b1.j).unwrap())
                .mul(field, &b1.p2);
            if let Some(cex) = bool_check("U(W) reconstruction p1 tau_j p2 = h", recon == h.mat, &inputs)
            {
                return Ok(Some(cex));
            }
            if let Some(cex) = bool_check("U(W) j stable under re-pivoting", b1.j == j2, &inputs) {
                return Ok(Some(cex));
            }
            let ratio = field.div(&b1.x_class, &x2).ok_or(Error::ZeroArgument)?;
            let ok = matches!(ratio.as_base(), Some(f) if is_local_norm(&f, ctx)?);
            if let Some(cex) = bool_check("U(W) x well defined mod norms", ok, &inputs) {
                return Ok(Some(cex));
            }
            // Sp(BW) side
            let s = GSpElement { mat: d.sp.random_isometry(&mut rng, env.cfg.word_len), nu: rat_int(1) };
            let c1 = d.bruhat(&s, Some(&mut rng))?;
            let (sx2, sj2) = d.bruhat_invariants(&s, Some(&mut rng))?;
            let mut sins = BTreeMap::new();
            sins.insert("s".into(), fmt_mat(&s.mat));
            let f = crate::field::RationalField;
            let recon = c1.p1.mul(&f, &d.sp.tau(c1.j).unwrap()).mul(&f, &c1.p2);
            if let Some(cex) = bool_check("Sp reconstruction p1 tau_j p2 = s", recon == s.mat, &sins) {
                return Ok(Some(cex));
            }
            if let Some(cex) = bool_check("Sp j stable under re-pivoting", c1.j == sj2, &sins) {
                return Ok(Some(cex));
            }
            Ok(bool_check(
                "Sp x well defined mod squares",
                is_rational_square(&(&c1.x_class / &sx2)),
                &sins,
            ))
        }
        "space-dichotomy" => {
            let (vp, vm) = dichotomy_pair(env)?;
            let mut inputs = BTreeMap::new();
            inputs.insert("gram_V+".into(), fmt_mat(&vp.gram));
            inputs.insert("gram_V-".into(), fmt_mat(&vm.gram));
            if let Some(cex) = check("epsilon(V+) = +1", Mu8::ONE, vp.epsilon(ctx), &inputs) {
                return Ok(Some(cex));
            }
            if let Some(cex) = check("epsilon(V-) = -1", Mu8::MINUS_ONE, vm.epsilon(ctx), &inputs) {
                return Ok(Some(cex));
            }
            // congruence invariance under a random change of basis
            let c = loop {
                let c = MatrixE::from_fn(env.v.m, env.v.m, |_, _| {
                    QuadExtScalar::new(
                        rat(rng.gen_range(-3..=3), 1),
                        rat(rng.gen_range(-3..=3), 1),
                    )
                });
                if !env.field.is_zero(&c.det(&env.field)) {
                    break c;
                }
            };
            let moved = vp.congruent(&c)?;
            Ok(check("epsilon is a congruence invariant", vp.epsilon(ctx), moved.epsilon(ctx), &inputs))
        }
        "h-plus" => {
            let m = env.v.m;
            let reps = ctx.square_class_reps();
            let mut inputs = BTreeMap::new();
            inputs.insert(
                "square_classes".into(),
                reps.iter().map(|y| y.to_string()).collect::<Vec<_>>().join(","),
            );
            let passing = reps
                .iter()
                .filter(|y| in_h_plus(&env.w.d(y).unwrap(), &env.v, ctx))
                .count();
            let want = if m % 2 == 0 { 4 } else { 2 };
            if let Some(cex) = bool_check(
                "index of H+ over the square classes of nu",
                passing == want,
                &inputs,
            ) {
                return Ok(Some(cex));
            }
            // random h: membership matches the norm test for odd m
            let h = env.random_h(&mut rng);
            let mut hins = BTreeMap::new();
            hins.insert("h".into(), fmt_mat(&h.mat));
            hins.insert("nu(h)".into(), h.nu.to_string());
            let member = in_h_plus(&h, &env.v, ctx);
            let want = m % 2 == 0 || epsilon_ef(&h.nu, ctx)? == Mu8::ONE;
            Ok(bool_check("in_H_plus matches the norm criterion", member == want, &hins))
        }
        other => Err(Error::UnknownSuite(other.to_string())),
    }
}

/// Gram representatives of the two hermitian classes V^+- for the configured
/// dimension, built from the config Gram by adjusting the last coefficient.
fn dichotomy_pair(env: &Env) -> Result<(HermitianSpace, HermitianSpace)> {
    let mut plus = None;
    let mut minus = None;
    let p = env.cfg.p as i64;
    let u = crate::rational::smallest_nonresidue(env.cfg.p) as i64;
    for c in [1, u, p, u * p, -1, -u, -p, -u * p] {
        let mut coeffs = env.cfg.gram_v.clone();
        let last = coeffs.last_mut().unwrap();
        *last = &*last * rat_int(c);
        let cand = HermitianSpace::diagonal(&coeffs, env.field.clone())?;
        match cand.epsilon(&env.ctx).as_sign() {
            Some(true) if plus.is_none() => plus = Some(cand),
            Some(false) if minus.is_none() => minus = Some(cand),
            _ => {}
        }
        if plus.is_some() && minus.is_some() {
            break;
        }
    }
    match (plus, minus) {
        (Some(p), Some(m)) => Ok((p, m)),
        _ => Err(Error::Calibration("dichotomy representatives not found".into())),
    }
}

/// Witness search for the prop-33 suite when m is odd: scalar similitudes of
/// V with unit non-residue norm against d(p)-twisted elements of H. Returns the
/// number of attempts used, or None if no witness was found.
pub fn prop33_witness_search(env: &Env, max_attempts: usize) -> Result<Option<usize>> {
    let bound = env.cfg.search_bound.max(3);
    let mut scalars = Vec::new();
    for den in 1..=bound {
        for n1 in -bound..=bound {
            for n2 in -bound..=bound {
                let z = QuadExtScalar::new(rat(n1, den), rat(n2, den));
                if z.is_zero() {
                    continue;
                }
                let n = norm_ef(&z, &env.ctx);
                if val_p(&n, env.cfg.p) == 0 && epsilon_ef(&n, &env.ctx)? == Mu8::ONE {
                    scalars.push(z);
                }
            }
        }
    }
    let mut attempt = 0;
    for trial in 0..max_attempts {
        let mut rng = env.trial_rng("prop-33-witness", trial);
        let g = if trial < scalars.len() {
            env.v.scalar(&scalars[trial])?
        } else {
            let z = &scalars[rng.gen_range(0..scalars.len().max(1))];
            let iso = env.v.random_isometry(&mut rng)?;
            env.v.compose(&iso, &env.v.scalar(z)?)
        };
        let h_base = env.w.random_isometry(&mut rng, env.cfg.word_len);
        let h = env.w.compose(&h_base, &env.w.d(&rat_int(env.cfg.p as i64))?);
        attempt += 1;
        if commutator_value(&g, &h, &env.d, &env.ctx)? != Mu8::ONE {
            return Ok(Some(attempt));
        }
    }
    Ok(None)
}

pub fn run_suite(env: &Env, name: &str) -> Result<SuiteReport> {
    run_suite_with_trials(env, name, env.cfg.trials)
}

/// Run a suite with an explicit trial count (the acceptance criteria pin
/// different counts per suite).
pub fn run_suite_with_trials(env: &Env, name: &str, trials: usize) -> Result<SuiteReport> {
    if !ALL_SUITES.contains(&name) {
        return Err(Error::UnknownSuite(name.to_string()));
    }
    let start = std::time::Instant::now();
    let mut failures = 0usize;
    let mut counterexamples = Vec::new();
    for trial in 0..trials {
        if let Some((checkname, inputs, expected, actual)) = run_trial(env, name, trial)? {
            failures += 1;
            if counterexamples.len() < COUNTEREXAMPLE_DUMP_LIMIT {
                counterexamples.push(Counterexample {
                    trial,
                    check: checkname,
                    inputs,
                    expected,
                    actual,
                });
            }
        }
    }
    // witness half of the prop-33 suite: required whenever the formula can be
    // nontrivial (odd m and odd mr; for even mr with unramified Delta the
    // commutator is identically +1 and no witness exists)
    if name == "prop-33" && env.v.m % 2 == 1 && (env.v.m * env.w.r()) % 2 == 1 {
        if prop33_witness_search(env, 100)?.is_none() {
            failures += 1;
            counterexamples.push(Counterexample {
                trial: trials,
                check: "m odd: noncommuting witness exists".into(),
                inputs: BTreeMap::new(),
                expected: "witness within 100 samples".into(),
                actual: "none found".into(),
            });
        }
    }
    Ok(SuiteReport {
        suite: name.to_string(),
        trials,
        failures,
        counterexamples,
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

/// Top-level report document: the echoed config and one report per suite.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunDocument {
    pub config: BTreeMap<String, String>,
    pub reports: Vec<SuiteReport>,
}

impl RunDocument {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(|r| r.failures == 0)
    }

    /// Strip timing for determinism comparisons.
    pub fn normalized(&self) -> Self {
        let mut doc = self.clone();
        for r in &mut doc.reports {
            r.elapsed_ms = 0;
        }
        doc
    }
}

pub fn run_all(cfg: &RunConfig) -> Result<RunDocument> {
    let env = Env::build(cfg)?;
    let mut reports = Vec::new();
    for name in &cfg.suites {
        reports.push(run_suite(&env, name)?);
    }
    Ok(RunDocument { config: cfg.to_map(), reports })
}

/// Replay file format: the config map plus the failing (suite, trial).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReplayFile {
    pub config: BTreeMap<String, String>,
    pub suite: String,
    pub trial: usize,
    pub counterexample: Counterexample,
}

/// Re-run a single dumped instance; trials are pure functions of
/// (config, seed, suite, trial), so this reproduces the exact inputs.
pub fn replay(file: &ReplayFile) -> Result<Option<Counterexample>> {
    let cfg = RunConfig::from_map(&file.config)?;
    let env = Env::build(&cfg)?;
    Ok(run_trial(&env, &file.suite, file.trial)?.map(
        |(checkname, inputs, expected, actual)| Counterexample {
            trial: file.trial,
            check: checkname,
            inputs,
            expected,
            actual,
        },
    ))
}

/// The default verification battery: p in {3, 5, 7} with the smallest
/// positive non-residue as Delta, (m, r) in {1, 2, 3} x {1, 2}, identity
/// Gram for V.
pub fn default_battery(seed: u64, trials: usize) -> Vec<RunConfig> {
    let mut configs = Vec::new();
    for p in [3u64, 5, 7] {
        let delta = rat_int(crate::rational::smallest_nonresidue(p) as i64);
        for m in [1usize, 2, 3] {
            for r in [1usize, 2] {
                configs.push(RunConfig {
                    p,
                    delta: delta.clone(),
                    m,
                    gram_v: vec![rat_int(1); m],
                    r,
                    trials,
                    seed,
                    word_len: 6,
                    suites: ALL_SUITES.iter().map(|s| s.to_string()).collect(),
                    search_bound: 3,
                    psi_scale: rat_int(1),
                });
            }
        }
    }
    configs
}
