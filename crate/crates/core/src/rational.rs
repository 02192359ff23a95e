//! Helpers for exact rationals: p-adic valuations, unit parts, square tests
//! and the p-adic fractional part used by additive characters.
//!
//! `Rat` (num_rational::BigRational) is the element type of the base field F.
//! It is always stored in lowest terms with positive denominator, so all
//! arithmetic here is exact.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

/// p-adic valuation of a nonzero integer.
pub fn val_p_int(n: &BigInt, p: u64) -> i64 {
    assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0i64;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// p-adic valuation of a nonzero rational.
pub fn val_p(x: &Rat, p: u64) -> i64 {
    assert!(!x.is_zero(), "valuation of zero");
    val_p_int(x.numer(), p) - val_p_int(x.denom(), p)
}

/// Unit part of a nonzero rational: x / p^{val_p(x)}.
pub fn unit_part(x: &Rat, p: u64) -> Rat {
    let v = val_p(x, p);
    let pw = pow_rat(&rat_int(p as i64), -v);
    x * pw
}

pub fn pow_rat(x: &Rat, e: i64) -> Rat {
    x.pow(e as i32)
}

/// Residue of a p-unit rational mod p^k, as an integer in [0, p^k).
pub fn unit_residue(x: &Rat, p: u64, k: u32) -> BigUint {
    let pk = BigInt::from(p).pow(k);
    let num = x.numer().mod_floor(&pk);
    let den = x.denom().mod_floor(&pk);
    let den_inv = mod_inverse(&den, &pk).expect("denominator not a unit mod p^k");
    (num * den_inv)
        .mod_floor(&pk)
        .to_biguint()
        .expect("mod_floor is nonnegative")
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Whether a rational is the square of a rational (exact test).
pub fn is_rational_square(x: &Rat) -> bool {
    if x.is_zero() {
        return true;
    }
    if x.is_negative() {
        return false;
    }
    is_int_square(&x.numer().to_biguint().unwrap()) && is_int_square(&x.denom().to_biguint().unwrap())
}

fn is_int_square(n: &BigUint) -> bool {
    let r = n.sqrt();
    &(&r * &r) == n
}

/// Whether a nonzero rational is a square in Q_p, p odd: even valuation and
/// unit part a quadratic residue mod p.
pub fn is_square_at_p(x: &Rat, p: u64) -> bool {
    assert!(!x.is_zero());
    if val_p(x, p) % 2 != 0 {
        return false;
    }
    let u = unit_residue(&unit_part(x, p), p, 1);
    legendre_residue(&u, p)
}

/// Euler's criterion for an integer residue in [0, p).
pub fn legendre_residue(u: &BigUint, p: u64) -> bool {
    let p_big = BigUint::from(p);
    assert!(!u.is_zero() && u < &p_big);
    let e = (p - 1) / 2;
    u.modpow(&BigUint::from(e), &p_big).is_one()
}

/// The p-adic fractional part of a rational, as (c, k) with frac = c / p^k,
/// 0 <= c < p^k and k = max(0, -val_p(x)). frac_p(x) is x mod Z_p viewed in
/// Z[1/p]/Z.
pub fn frac_p(x: &Rat, p: u64) -> (BigUint, u32) {
    if x.is_zero() {
        return (BigUint::zero(), 0);
    }
    let v = val_p(x, p);
    if v >= 0 {
        return (BigUint::zero(), 0);
    }
    let k = (-v) as u32;
    // x = u / p^k with u a p-unit; reduce u mod p^k.
    let u = x * Rat::from(BigInt::from(p).pow(k));
    (unit_residue(&u, p, k), k)
}

/// First integer u in 2..p that is a quadratic non-residue mod p.
pub fn smallest_nonresidue(p: u64) -> u64 {
    (2..p)
        .find(|&u| !legendre_residue(&BigUint::from(u), p))
        .expect("odd prime has a non-residue")
}

pub fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Parse a rational from a string like "3", "-5/7".
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Rat::new(n, d))
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(Rat::from(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuations() {
        assert_eq!(val_p(&rat(12, 1), 3), 1);
        assert_eq!(val_p(&rat(1, 9), 3), -2);
        assert_eq!(val_p(&rat(50, 49), 7), -2);
        assert_eq!(unit_part(&rat(12, 1), 3), rat(4, 1));
    }

    #[test]
    fn unit_residues() {
        // 1/2 mod 5 = 3
        assert_eq!(unit_residue(&rat(1, 2), 5, 1), BigUint::from(3u32));
        assert_eq!(unit_residue(&rat(-1, 1), 3, 1), BigUint::from(2u32));
    }

    #[test]
    fn square_tests() {
        assert!(is_rational_square(&rat(4, 9)));
        assert!(!is_rational_square(&rat(-4, 9)));
        assert!(!is_rational_square(&rat(2, 1)));
        assert!(is_square_at_p(&rat(4, 9), 5));
        assert!(is_square_at_p(&rat(6, 1), 5)); // 6 = 1 mod 5, residue
        assert!(!is_square_at_p(&rat(5, 1), 5));
        assert!(!is_square_at_p(&rat(2, 1), 5));
    }

    #[test]
    fn fractional_part() {
        // frac_3(1/3) = 1/3
        assert_eq!(frac_p(&rat(1, 3), 3), (BigUint::from(1u32), 1));
        // frac_3(5) = 0
        assert_eq!(frac_p(&rat(5, 1), 3), (BigUint::zero(), 0));
        // frac_3(1/6) = c/3 with c = unit residue of 1/2 mod 3 = 2
        assert_eq!(frac_p(&rat(1, 6), 3), (BigUint::from(2u32), 1));
        // frac_5(7/25): 7 mod 25 = 7
        assert_eq!(frac_p(&rat(7, 25), 5), (BigUint::from(7u32), 2));
    }

    #[test]
    fn nonresidues() {
        assert_eq!(smallest_nonresidue(3), 2);
        assert_eq!(smallest_nonresidue(5), 2);
        assert_eq!(smallest_nonresidue(7), 3);
    }

    #[test]
    fn legendre_exhaustive_mod5() {
        // oracle: enumerate squares mod 5
        let squares: Vec<u64> = (1..5).map(|x| (x * x) % 5).collect();
        assert!(!squares.contains(&2));
        assert!(!legendre_residue(&BigUint::from(2u32), 5));
        assert!(legendre_residue(&BigUint::from(4u32), 7));
    }
}
