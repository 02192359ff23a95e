//! Field contexts for exact scalar arithmetic.
//!
//! Matrix code is generic over a [`Field`] carrying the operations, so one
//! Gaussian elimination serves both the rationals and the quadratic extension
//! E = F(delta) with delta^2 = Delta. Each field also carries its involution
//! (identity on F, Galois conjugation on E), which is what the hermitian
//! machinery keys on.

use crate::rational::Rat;
use num_traits::{One, Zero};
use std::fmt;

/// Element a + b*delta of E = F(delta), delta^2 = Delta. Delta lives in the
/// ambient [`QuadExtField`], not in the scalar.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadExtScalar {
    pub a: Rat,
    pub b: Rat,
}

impl QuadExtScalar {
    pub fn new(a: Rat, b: Rat) -> Self {
        Self { a, b }
    }

    pub fn from_base(a: Rat) -> Self {
        Self { a, b: Rat::zero() }
    }

    pub fn delta() -> Self {
        Self { a: Rat::zero(), b: Rat::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Galois conjugate a + b*delta -> a - b*delta.
    pub fn conj(&self) -> Self {
        Self { a: self.a.clone(), b: -self.b.clone() }
    }

    /// Trace to the base field: x + conj(x) = 2a.
    pub fn trace(&self) -> Rat {
        &self.a + &self.a
    }

    /// Norm to the base field: x * conj(x) = a^2 - Delta b^2.
    pub fn norm(&self, delta_sq: &Rat) -> Rat {
        &self.a * &self.a - delta_sq * (&self.b * &self.b)
    }

    /// The base-field part if b = 0.
    pub fn as_base(&self) -> Option<Rat> {
        if self.b.is_zero() {
            Some(self.a.clone())
        } else {
            None
        }
    }
}

impl fmt::Display for QuadExtScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "{}d", self.b)
        } else {
            write!(f, "{}+{}d", self.a, self.b)
        }
    }
}

/// Exact field operations over a cloneable element type. `conj` is the
/// involution used by conjugate-transposes; it defaults to the identity.
pub trait Field {
    type Elem: Clone + PartialEq + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn sub(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn neg(&self, x: &Self::Elem) -> Self::Elem;
    fn mul(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    /// None for zero input.
    fn inv(&self, x: &Self::Elem) -> Option<Self::Elem>;
    fn is_zero(&self, x: &Self::Elem) -> bool;
    fn conj(&self, x: &Self::Elem) -> Self::Elem {
        x.clone()
    }
    fn from_rat(&self, x: &Rat) -> Self::Elem;

    fn div(&self, x: &Self::Elem, y: &Self::Elem) -> Option<Self::Elem> {
        self.inv(y).map(|yi| self.mul(x, &yi))
    }

    /// A scalar that shrinks the content of a slice of entries when they are
    /// all multiplied by it (e.g. clearing denominators and dividing out the
    /// numerator gcd). Multiplying a row or column by it is an ordinary
    /// elimination step; None means no shrink is available.
    fn normalizer(&self, elems: &[&Self::Elem]) -> Option<Self::Elem> {
        let _ = elems;
        None
    }
}

pub(crate) fn rational_content_normalizer<'a>(
    parts: impl Iterator<Item = &'a Rat>,
) -> Option<Rat> {
    use num_bigint::BigInt;
    use num_integer::Integer;
    let mut gcd_num: Option<BigInt> = None;
    let mut lcm_den: Option<BigInt> = None;
    for x in parts {
        if x.is_zero() {
            continue;
        }
        let n = x.numer();
        gcd_num = Some(match gcd_num {
            None => n.clone(),
            Some(g) => g.gcd(n),
        });
        let d = x.denom();
        lcm_den = Some(match lcm_den {
            None => d.clone(),
            Some(l) => l.lcm(d),
        });
    }
    let (g, l) = (gcd_num?, lcm_den?);
    let lambda = Rat::new(l, g);
    if lambda.is_one() {
        None
    } else {
        Some(lambda)
    }
}

/// The base field F, realized as the rationals.
#[derive(Debug, Clone, Copy, Default)]
pub struct RationalField;

impl Field for RationalField {
    type Elem = Rat;

    fn zero(&self) -> Rat {
        Rat::zero()
    }
    fn one(&self) -> Rat {
        Rat::one()
    }
    fn add(&self, x: &Rat, y: &Rat) -> Rat {
        x + y
    }
    fn sub(&self, x: &Rat, y: &Rat) -> Rat {
        x - y
    }
    fn neg(&self, x: &Rat) -> Rat {
        -x
    }
    fn mul(&self, x: &Rat, y: &Rat) -> Rat {
        x * y
    }
    fn inv(&self, x: &Rat) -> Option<Rat> {
        if x.is_zero() {
            None
        } else {
            Some(x.recip())
        }
    }
    fn is_zero(&self, x: &Rat) -> bool {
        x.is_zero()
    }
    fn from_rat(&self, x: &Rat) -> Rat {
        x.clone()
    }
    fn normalizer(&self, elems: &[&Rat]) -> Option<Rat> {
        rational_content_normalizer(elems.iter().copied())
    }
}

/// The quadratic extension E = F(delta) with delta^2 = Delta. Delta need not
/// be squarefree; it must be nonzero (non-squareness at p is checked by the
/// local context, not here).
#[derive(Debug, Clone)]
pub struct QuadExtField {
    pub delta_sq: Rat,
}

impl QuadExtField {
    pub fn new(delta_sq: Rat) -> Self {
        assert!(!delta_sq.is_zero(), "Delta must be nonzero");
        Self { delta_sq }
    }
}

impl Field for QuadExtField {
    type Elem = QuadExtScalar;

    fn zero(&self) -> QuadExtScalar {
        QuadExtScalar::new(Rat::zero(), Rat::zero())
    }
    fn one(&self) -> QuadExtScalar {
        QuadExtScalar::new(Rat::one(), Rat::zero())
    }
    fn add(&self, x: &QuadExtScalar, y: &QuadExtScalar) -> QuadExtScalar {
        QuadExtScalar::new(&x.a + &y.a, &x.b + &y.b)
    }
    fn sub(&self, x: &QuadExtScalar, y: &QuadExtScalar) -> QuadExtScalar {
        QuadExtScalar::new(&x.a - &y.a, &x.b - &y.b)
    }
    fn neg(&self, x: &QuadExtScalar) -> QuadExtScalar {
        QuadExtScalar::new(-x.a.clone(), -x.b.clone())
    }
    fn mul(&self, x: &QuadExtScalar, y: &QuadExtScalar) -> QuadExtScalar {
        // (a + b d)(c + e d) = ac + be Delta + (ae + bc) d
        QuadExtScalar::new(
            &x.a * &y.a + &self.delta_sq * (&x.b * &y.b),
            &x.a * &y.b + &x.b * &y.a,
        )
    }
    fn inv(&self, x: &QuadExtScalar) -> Option<QuadExtScalar> {
        if x.is_zero() {
            return None;
        }
        let n = x.norm(&self.delta_sq);
        assert!(!n.is_zero(), "nonzero element with zero norm: Delta is a rational square");
        let ni = n.recip();
        Some(QuadExtScalar::new(&x.a * &ni, -(&x.b * &ni)))
    }
    fn is_zero(&self, x: &QuadExtScalar) -> bool {
        x.is_zero()
    }
    fn conj(&self, x: &QuadExtScalar) -> QuadExtScalar {
        x.conj()
    }
    fn from_rat(&self, x: &Rat) -> QuadExtScalar {
        QuadExtScalar::from_base(x.clone())
    }
    fn normalizer(&self, elems: &[&QuadExtScalar]) -> Option<QuadExtScalar> {
        rational_content_normalizer(elems.iter().flat_map(|e| [&e.a, &e.b]))
            .map(QuadExtScalar::from_base)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};
    use proptest::prelude::*;

    fn e(a: (i64, i64), b: (i64, i64)) -> QuadExtScalar {
        QuadExtScalar::new(rat(a.0, a.1), rat(b.0, b.1))
    }

    #[test]
    fn conj_fixes_base_and_negates_delta() {
        let k = QuadExtField::new(rat_int(2));
        assert_eq!(k.conj(&e((1, 1), (0, 1))), e((1, 1), (0, 1)));
        assert_eq!(k.conj(&QuadExtScalar::delta()), e((0, 1), (-1, 1)));
        assert_eq!(k.conj(&e((2, 1), (3, 1))), e((2, 1), (-3, 1)));
    }

    #[test]
    fn norms_with_delta_two() {
        let d2 = rat_int(2);
        assert_eq!(e((1, 1), (0, 1)).norm(&d2), rat_int(1));
        assert_eq!(QuadExtScalar::delta().norm(&d2), rat_int(-2));
        assert_eq!(e((3, 1), (1, 1)).norm(&d2), rat_int(7));
    }

    #[test]
    fn trace_is_twice_base_part() {
        assert_eq!(e((3, 2), (5, 1)).trace(), rat_int(3));
    }

    fn arb_scalar() -> impl Strategy<Value = QuadExtScalar> {
        ((-9i64..10, 1i64..5), (-9i64..10, 1i64..5)).prop_map(|(a, b)| e(a, b))
    }

    proptest! {
        #[test]
        fn field_axioms(x in arb_scalar(), y in arb_scalar(), z in arb_scalar()) {
            let k = QuadExtField::new(rat_int(3));
            prop_assert_eq!(k.mul(&k.mul(&x, &y), &z), k.mul(&x, &k.mul(&y, &z)));
            prop_assert_eq!(k.add(&k.add(&x, &y), &z), k.add(&x, &k.add(&y, &z)));
            prop_assert_eq!(k.mul(&x, &k.add(&y, &z)),
                            k.add(&k.mul(&x, &y), &k.mul(&x, &z)));
            prop_assert_eq!(k.mul(&x, &y), k.mul(&y, &x));
            if !x.is_zero() {
                let xi = k.inv(&x).unwrap();
                prop_assert_eq!(k.mul(&x, &xi), k.one());
            }
        }

        #[test]
        fn norm_is_multiplicative(x in arb_scalar(), y in arb_scalar()) {
            let k = QuadExtField::new(rat(-5, 1));
            let lhs = k.mul(&x, &y).norm(&k.delta_sq);
            let rhs = x.norm(&k.delta_sq) * y.norm(&k.delta_sq);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn conj_is_multiplicative_involution(x in arb_scalar(), y in arb_scalar()) {
            let k = QuadExtField::new(rat_int(2));
            prop_assert_eq!(k.conj(&k.conj(&x)), x.clone());
            prop_assert_eq!(k.conj(&k.mul(&x, &y)), k.mul(&k.conj(&x), &k.conj(&y)));
        }
    }
}
