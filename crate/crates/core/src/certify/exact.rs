//! Exact comparison of quantities `c * n^(a/b)` and guaranteed-error enclosures of their sums.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Decimal digits kept by [`Interval`] enclosures of irrational terms.
const DIGITS: u32 = 40;

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `coef * base^(num/den)` with `coef >= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Surd {
    pub coef: BigRational,
    pub base: BigUint,
    pub num: u32,
    pub den: u32,
}

impl Surd {
    pub fn rational(coef: BigRational) -> Surd {
        assert!(!coef.is_negative(), "surd coefficient must be non-negative");
        Surd { coef, base: BigUint::one(), num: 0, den: 1 }
    }

    pub fn integer(n: u64) -> Surd {
        Surd::rational(int(n))
    }

    pub fn power(coef: BigRational, base: u64, num: u32, den: u32) -> Surd {
        assert!(!coef.is_negative() && den > 0);
        let g = num.gcd(&den).max(1);
        Surd { coef, base: BigUint::from(base), num: num / g, den: den / g }
    }

    /// `self^k` as an exact rational, for `den | k`.
    fn raised(&self, k: u32) -> BigRational {
        debug_assert_eq!(k % self.den, 0);
        let e = (self.num as u64 * (k / self.den) as u64) as u32;
        let b = BigInt::from(self.base.pow(e));
        num_traits::pow(self.coef.clone(), k as usize) * BigRational::from_integer(b)
    }

    pub fn cmp_exact(&self, other: &Surd) -> Ordering {
        let k = self.den.lcm(&other.den);
        self.raised(k).cmp(&other.raised(k))
    }

    /// Enclosure `[lo, hi]` with width below `coef * 10^-40`.
    pub fn interval(&self) -> Interval {
        if self.num == 0 || self.den == 1 {
            let v = self.coef.clone() * BigRational::from_integer(BigInt::from(self.base.pow(self.num)));
            return Interval::exact(v);
        }
        let scale = BigUint::from(10u32).pow(DIGITS);
        let radicand = self.base.pow(self.num) * scale.pow(self.den);
        let r = radicand.nth_root(self.den);
        let scale = BigInt::from(scale);
        let lo = BigRational::new(BigInt::from(r.clone()), scale.clone());
        let hi = if r.pow(self.den) == radicand {
            lo.clone()
        } else {
            BigRational::new(BigInt::from(r + 1u32), scale)
        };
        Interval { lo: &self.coef * lo, hi: &self.coef * hi }
    }
}

impl PartialOrd for Surd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_exact(other))
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num == 0 {
            write!(f, "{}", self.coef)
        } else {
            write!(f, "{}*{}^({}/{})", self.coef, self.base, self.num, self.den)
        }
    }
}

/// A closed rational interval known to contain a real number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Interval {
    pub fn exact(v: BigRational) -> Interval {
        Interval { lo: v.clone(), hi: v }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigInt::from(2)
    }

    pub fn error_bound(&self) -> BigRational {
        (&self.hi - &self.lo) / BigInt::from(2)
    }

    pub fn to_f64(&self) -> f64 {
        self.midpoint().to_f64().unwrap_or(f64::NAN)
    }

    /// Decimal rendering of the midpoint with `places` fractional digits.
    pub fn decimal(&self, places: u32) -> String {
        decimal(&self.midpoint(), places)
    }
}

impl std::ops::Add for Interval {
    type Output = Interval;
    fn add(self, o: Interval) -> Interval {
        Interval { lo: self.lo + o.lo, hi: self.hi + o.hi }
    }
}

impl std::iter::Sum for Interval {
    fn sum<I: Iterator<Item = Interval>>(iter: I) -> Interval {
        iter.fold(Interval::exact(BigRational::zero()), |a, b| a + b)
    }
}

/// Rounds half away from zero to `places` decimals.
pub fn decimal(v: &BigRational, places: u32) -> String {
    let scale = BigInt::from(10u32).pow(places);
    let scaled = v * BigRational::from_integer(scale.clone());
    let rounded = scaled.round().to_integer();
    let neg = rounded.is_negative();
    let (whole, frac) = rounded.abs().div_rem(&scale);
    let sign = if neg { "-" } else { "" };
    if places == 0 {
        format!("{sign}{whole}")
    } else {
        format!("{sign}{whole}.{:0>width$}", frac.to_string(), width = places as usize)
    }
}

/// `floor(n^(num/den))` exactly.
pub fn floor_power(n: u64, num: u32, den: u32) -> u64 {
    BigUint::from(n).pow(num).nth_root(den).to_u64().expect("fits in u64")
}
