//! Exact arithmetic for half-integers, the value domain of the sharp exponent.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign};

/// A rational with denominator 1 or 2, stored as a count of halves.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt {
    halves: i64,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { halves: 0 };
    pub const HALF: HalfInt = HalfInt { halves: 1 };
    pub const ONE: HalfInt = HalfInt { halves: 2 };

    pub fn from_int(n: i64) -> Self {
        HalfInt { halves: 2 * n }
    }

    pub fn from_halves(halves: i64) -> Self {
        HalfInt { halves }
    }

    /// Numerator of the canonical form (denominator 1 when the value is integral).
    pub fn numerator(self) -> i64 {
        if self.halves % 2 == 0 {
            self.halves / 2
        } else {
            self.halves
        }
    }

    /// Denominator of the canonical form: 1 or 2.
    pub fn denominator(self) -> i64 {
        if self.halves % 2 == 0 {
            1
        } else {
            2
        }
    }

    pub fn is_integer(self) -> bool {
        self.halves % 2 == 0
    }

    pub fn to_f64(self) -> f64 {
        self.halves as f64 / 2.0
    }

    /// `base^self`, exact for perfect squares: computed as `sqrt(base)^halves`
    /// so e.g. 4^(3/2) is exactly 8.
    pub fn pow_of(self, base: f64) -> f64 {
        debug_assert!(self.halves >= 0);
        if self.is_integer() {
            base.powi((self.halves / 2) as i32)
        } else {
            base.sqrt().powi(self.halves as i32)
        }
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt { halves: self.halves + rhs.halves }
    }
}

impl AddAssign for HalfInt {
    fn add_assign(&mut self, rhs: HalfInt) {
        self.halves += rhs.halves;
    }
}

impl Sum for HalfInt {
    fn sum<I: Iterator<Item = HalfInt>>(iter: I) -> HalfInt {
        iter.fold(HalfInt::ZERO, Add::add)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.halves / 2)
        } else {
            write!(f, "{}/2", self.halves)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_forms() {
        let three_halves = HalfInt::from_halves(3);
        assert_eq!(three_halves.numerator(), 3);
        assert_eq!(three_halves.denominator(), 2);
        assert_eq!(three_halves.to_string(), "3/2");

        let two = HalfInt::from_halves(4);
        assert_eq!(two.numerator(), 2);
        assert_eq!(two.denominator(), 1);
        assert_eq!(two.to_string(), "2");
    }

    #[test]
    fn sums_stay_exact() {
        let r: HalfInt = std::iter::repeat_n(HalfInt::HALF, 3).sum();
        assert_eq!(r, HalfInt::from_halves(3));
        assert_eq!(r.to_f64(), 1.5);
    }

    #[test]
    fn exact_powers() {
        assert_eq!(HalfInt::from_halves(3).pow_of(4.0), 8.0);
        assert_eq!(HalfInt::from_halves(3).pow_of(9.0), 27.0);
        assert_eq!(HalfInt::from_int(2).pow_of(5.0), 25.0);
        assert_eq!(HalfInt::ZERO.pow_of(7.0), 1.0);
    }
}
