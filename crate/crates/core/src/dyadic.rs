//! Exact arithmetic on dyadic rationals `num / 2^e`.
//!
//! Knots and translation parameters throughout the crate are dyadic, and
//! index-set computations must never drift, so breakpoint arithmetic is kept
//! exact. Coefficient arithmetic stays in `f64`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

/// A dyadic rational `num / 2^log2_den`, kept normalized so that `num` is odd
/// or `log2_den` is zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: i64,
    log2_den: u32,
}

impl Dyadic {
    /// Builds `num / 2^log2_den`, normalizing the representation.
    pub fn new(num: i64, log2_den: u32) -> Self {
        let mut d = Dyadic { num, log2_den };
        d.normalize();
        d
    }

    pub fn from_int(n: i64) -> Self {
        Dyadic { num: n, log2_den: 0 }
    }

    pub fn zero() -> Self {
        Dyadic::from_int(0)
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn log2_den(&self) -> u32 {
        self.log2_den
    }

    fn normalize(&mut self) {
        if self.num == 0 {
            self.log2_den = 0;
            return;
        }
        while self.log2_den > 0 && self.num % 2 == 0 {
            self.num /= 2;
            self.log2_den -= 1;
        }
    }

    /// Exact conversion; any value this crate produces has |num| far below 2^53.
    pub fn to_f64(&self) -> f64 {
        self.num as f64 / f64::powi(2.0, self.log2_den as i32)
    }

    /// Multiplies by `2^s` (exact).
    pub fn mul_pow2(self, s: i32) -> Self {
        if s >= 0 {
            let shift = s as u32;
            let reduce = shift.min(self.log2_den);
            let num = self
                .num
                .checked_shl(shift - reduce)
                .expect("dyadic overflow in mul_pow2");
            Dyadic::new(num, self.log2_den - reduce)
        } else {
            Dyadic::new(self.num, self.log2_den + (-s) as u32)
        }
    }

    pub fn is_integer(&self) -> bool {
        self.log2_den == 0
    }

    /// The integer value, if this dyadic is an integer.
    pub fn to_integer(&self) -> Option<i64> {
        self.is_integer().then_some(self.num)
    }

    /// Both numerators over the common denominator `2^max(e1, e2)`.
    fn common(self, other: Dyadic) -> (i64, i64, u32) {
        let e = self.log2_den.max(other.log2_den);
        let a = self
            .num
            .checked_shl(e - self.log2_den)
            .expect("dyadic overflow");
        let b = other
            .num
            .checked_shl(e - other.log2_den)
            .expect("dyadic overflow");
        (a, b, e)
    }

    pub fn min(self, other: Dyadic) -> Dyadic {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Dyadic) -> Dyadic {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        let (a, b, e) = self.common(rhs);
        Dyadic::new(a.checked_add(b).expect("dyadic overflow"), e)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        let (a, b, e) = self.common(rhs);
        Dyadic::new(a.checked_sub(b).expect("dyadic overflow"), e)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { num: -self.num, log2_den: self.log2_den }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.log2_den.max(other.log2_den);
        let a = (self.num as i128) << (e - self.log2_den);
        let b = (other.num as i128) << (e - other.log2_den);
        a.cmp(&b)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.num, self.log2_den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization() {
        let d = Dyadic::new(4, 2);
        assert_eq!(d.num(), 1);
        assert_eq!(d.log2_den(), 0);
        let d = Dyadic::new(6, 3);
        assert_eq!((d.num(), d.log2_den()), (3, 2));
        let z = Dyadic::new(0, 7);
        assert_eq!((z.num(), z.log2_den()), (0, 0));
    }

    #[test]
    fn exact_arithmetic() {
        let a = Dyadic::new(1, 2); // 1/4
        let b = Dyadic::new(1, 1); // 1/2
        assert_eq!(a + b, Dyadic::new(3, 2));
        assert_eq!(b - a, Dyadic::new(1, 2));
        assert_eq!(-(a - b), Dyadic::new(1, 2));
        assert_eq!(a.mul_pow2(2), Dyadic::from_int(1));
        assert_eq!(Dyadic::from_int(3).mul_pow2(-3), Dyadic::new(3, 3));
    }

    #[test]
    fn ordering() {
        let mut xs = vec![
            Dyadic::new(3, 1),  // 1.5
            Dyadic::from_int(-1),
            Dyadic::new(5, 2),  // 1.25
            Dyadic::zero(),
        ];
        xs.sort();
        let vals: Vec<f64> = xs.iter().map(Dyadic::to_f64).collect();
        assert_eq!(vals, vec![-1.0, 0.0, 1.25, 1.5]);
    }

    #[test]
    fn display_format() {
        assert_eq!(Dyadic::new(-3, 2).to_string(), "-3/2^2");
        assert_eq!(Dyadic::from_int(5).to_string(), "5/2^0");
    }

    #[test]
    fn integer_conversion() {
        assert_eq!(Dyadic::new(8, 2).to_integer(), Some(2));
        assert_eq!(Dyadic::new(1, 1).to_integer(), None);
    }
}
