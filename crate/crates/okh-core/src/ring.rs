//! The coefficient ring k = Z[pi]/(pi^2 - 1).
//!
//! Elements are written a + b*pi. The units of k are exactly
//! {1, -1, pi, -pi}; everything the cube construction multiplies by is a
//! unit, so entries of differentials and chain maps stay tiny. Arithmetic
//! is checked: an overflow here means a logic error upstream, not a large
//! computation.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

/// Element a + b*pi of Z[pi]/(pi^2 - 1).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RingElem {
    pub a: i64,
    pub b: i64,
}

/// Specialization pi -> +1 or pi -> -1.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum PiValue {
    /// pi = +1: the even theory.
    Plus,
    /// pi = -1: the odd theory.
    Minus,
}

impl PiValue {
    pub fn sign(self) -> i64 {
        match self {
            PiValue::Plus => 1,
            PiValue::Minus => -1,
        }
    }
}

impl RingElem {
    pub const ZERO: RingElem = RingElem { a: 0, b: 0 };
    pub const ONE: RingElem = RingElem { a: 1, b: 0 };
    pub const PI: RingElem = RingElem { a: 0, b: 1 };

    pub fn new(a: i64, b: i64) -> Self {
        RingElem { a, b }
    }

    pub fn from_int(a: i64) -> Self {
        RingElem { a, b: 0 }
    }

    /// pi^e for e >= 0.
    pub fn pi_pow(e: i64) -> Self {
        if e.rem_euclid(2) == 0 {
            Self::ONE
        } else {
            Self::PI
        }
    }

    /// (-1)^e.
    pub fn sign_pow(e: i64) -> Self {
        if e.rem_euclid(2) == 0 {
            Self::ONE
        } else {
            -Self::ONE
        }
    }

    pub fn is_zero(self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// The four units of k, in the fixed search order used by
    /// unit-comparison routines.
    pub const UNITS: [RingElem; 4] = [
        RingElem { a: 1, b: 0 },
        RingElem { a: -1, b: 0 },
        RingElem { a: 0, b: 1 },
        RingElem { a: 0, b: -1 },
    ];

    /// Units square to one, so every unit is its own inverse.
    pub fn is_unit(self) -> bool {
        (self.a.abs() == 1 && self.b == 0) || (self.a == 0 && self.b.abs() == 1)
    }

    pub fn unit_inverse(self) -> RingElem {
        debug_assert!(self.is_unit());
        self
    }

    /// Evaluate at pi = +/-1.
    pub fn specialize(self, at: PiValue) -> i64 {
        match at {
            PiValue::Plus => self.a.checked_add(self.b).expect("ring overflow"),
            PiValue::Minus => self.a.checked_sub(self.b).expect("ring overflow"),
        }
    }
}

impl Add for RingElem {
    type Output = RingElem;
    fn add(self, rhs: RingElem) -> RingElem {
        RingElem {
            a: self.a.checked_add(rhs.a).expect("ring overflow"),
            b: self.b.checked_add(rhs.b).expect("ring overflow"),
        }
    }
}

impl AddAssign for RingElem {
    fn add_assign(&mut self, rhs: RingElem) {
        *self = *self + rhs;
    }
}

impl Sub for RingElem {
    type Output = RingElem;
    fn sub(self, rhs: RingElem) -> RingElem {
        self + (-rhs)
    }
}

impl SubAssign for RingElem {
    fn sub_assign(&mut self, rhs: RingElem) {
        *self = *self - rhs;
    }
}

impl Neg for RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        RingElem {
            a: self.a.checked_neg().expect("ring overflow"),
            b: self.b.checked_neg().expect("ring overflow"),
        }
    }
}

impl Mul for RingElem {
    type Output = RingElem;
    // (a + b pi)(c + d pi) = (ac + bd) + (ad + bc) pi, using pi^2 = 1.
    fn mul(self, rhs: RingElem) -> RingElem {
        let ac = self.a.checked_mul(rhs.a).expect("ring overflow");
        let bd = self.b.checked_mul(rhs.b).expect("ring overflow");
        let ad = self.a.checked_mul(rhs.b).expect("ring overflow");
        let bc = self.b.checked_mul(rhs.a).expect("ring overflow");
        RingElem {
            a: ac.checked_add(bd).expect("ring overflow"),
            b: ad.checked_add(bc).expect("ring overflow"),
        }
    }
}

impl fmt::Debug for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a, self.b) {
            (a, 0) => write!(f, "{a}"),
            (0, 1) => write!(f, "pi"),
            (0, -1) => write!(f, "-pi"),
            (0, b) => write!(f, "{b}pi"),
            (a, b) if b < 0 => write!(f, "{a}{b}pi"),
            (a, b) => write!(f, "{a}+{b}pi"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_squares_to_one() {
        assert_eq!(RingElem::PI * RingElem::PI, RingElem::ONE);
    }

    #[test]
    fn units_are_exactly_four() {
        for u in RingElem::UNITS {
            assert!(u.is_unit());
            assert_eq!(u * u.unit_inverse(), RingElem::ONE);
        }
        assert!(!RingElem::new(1, 1).is_unit()); // 1 + pi kills 1 - pi
        assert!(!RingElem::new(2, 0).is_unit());
        assert!(RingElem::new(1, 1) * RingElem::new(1, -1) == RingElem::ZERO);
    }

    #[test]
    fn specializations() {
        let x = RingElem::new(3, -2);
        assert_eq!(x.specialize(PiValue::Plus), 1);
        assert_eq!(x.specialize(PiValue::Minus), 5);
    }
}
