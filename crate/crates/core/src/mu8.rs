//! Eighth roots of unity as exponents mod 8: the value group of every
//! cocycle, Hilbert symbol and Weil index in the library.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Div, Mul};

/// zeta_8^exponent with zeta_8 = e^{2 pi i / 8}. The subgroup {0, 4}
/// represents {+1, -1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mu8(u8);

impl Mu8 {
    pub const ONE: Mu8 = Mu8(0);
    pub const MINUS_ONE: Mu8 = Mu8(4);
    pub const I: Mu8 = Mu8(2);

    pub fn new(exp: i64) -> Self {
        Mu8(exp.rem_euclid(8) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn from_sign(positive: bool) -> Self {
        if positive { Mu8::ONE } else { Mu8::MINUS_ONE }
    }

    /// Some(+1/-1) when the value is real.
    pub fn as_sign(self) -> Option<bool> {
        match self.0 {
            0 => Some(true),
            4 => Some(false),
            _ => None,
        }
    }

    pub fn inv(self) -> Self {
        Mu8::new(-(self.0 as i64))
    }

    pub fn pow(self, e: i64) -> Self {
        Mu8::new(self.0 as i64 * e.rem_euclid(8))
    }
}

impl Mul for Mu8 {
    type Output = Mu8;
    fn mul(self, rhs: Mu8) -> Mu8 {
        Mu8::new(self.0 as i64 + rhs.0 as i64)
    }
}

impl Div for Mu8 {
    type Output = Mu8;
    fn div(self, rhs: Mu8) -> Mu8 {
        Mu8::new(self.0 as i64 - rhs.0 as i64)
    }
}

impl fmt::Display for Mu8 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            0 => write!(f, "1"),
            2 => write!(f, "i"),
            4 => write!(f, "-1"),
            6 => write!(f, "-i"),
            e => write!(f, "z8^{e}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_law() {
        assert_eq!(Mu8::new(3) * Mu8::new(7), Mu8::new(2));
        assert_eq!(Mu8::new(3) / Mu8::new(5), Mu8::new(-2));
        assert_eq!(Mu8::MINUS_ONE * Mu8::MINUS_ONE, Mu8::ONE);
        assert_eq!(Mu8::new(1).pow(-3), Mu8::new(5));
        assert_eq!(Mu8::I.pow(2), Mu8::MINUS_ONE);
        assert_eq!(Mu8::from_sign(false).as_sign(), Some(false));
        assert_eq!(Mu8::I.as_sign(), None);
    }
}
