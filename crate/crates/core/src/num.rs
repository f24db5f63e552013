//! Exact rational arithmetic helpers shared by every module.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// The rational number type used everywhere. All distances, grid
/// coordinates and count fractions are values of this type.
pub type Q = num_rational::BigRational;

pub fn q(num: i64, den: i64) -> Q {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn qu(n: u64) -> Q {
    BigRational::from_integer(BigInt::from(n))
}

pub fn q_zero() -> Q {
    BigRational::zero()
}

pub fn q_one() -> Q {
    BigRational::one()
}

/// 2^(-k), exactly.
pub fn pow2_neg(k: u32) -> Q {
    BigRational::new(BigInt::one(), BigInt::one() << k)
}

/// Unreduced count fraction, for report output. `Q` reduces on
/// construction, which would destroy witnesses like 24408/27459.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountFrac {
    pub num: u64,
    pub den: u64,
}

impl CountFrac {
    pub fn new(num: u64, den: u64) -> Self {
        CountFrac { num, den }
    }

    pub fn to_q(&self) -> Q {
        BigRational::new(BigInt::from(self.num), BigInt::from(self.den))
    }
}

impl std::fmt::Display for CountFrac {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Render a rational as "num/den" (reduced form, denominator always shown).
pub fn q_str(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pow2_neg_values() {
        assert_eq!(pow2_neg(0), q(1, 1));
        assert_eq!(pow2_neg(1), q(1, 2));
        assert_eq!(pow2_neg(10), q(1, 1024));
    }

    #[test]
    fn count_frac_is_not_reduced() {
        let f = CountFrac::new(24408, 27459);
        assert_eq!(f.to_string(), "24408/27459");
        assert_eq!(f.to_q(), q(8, 9));
    }
}
