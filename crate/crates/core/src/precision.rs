//! Fixed-point reals with 256 fractional bits.
//!
//! Symbol values (`log p`, `sqrt m`, user-supplied decimals) are held at
//! roughly 77 significant decimal digits so that frequencies can be
//! evaluated and ordered far below double precision.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::OnceLock;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Number of fractional bits carried by [`HighPrecision`].
pub const FRAC_BITS: u32 = 256;

/// Guard bits used inside series evaluations.
const GUARD_BITS: u32 = 32;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HighPrecision(BigInt);

impl HighPrecision {
    pub fn zero() -> Self {
        HighPrecision(BigInt::zero())
    }

    pub fn from_integer(n: &BigInt) -> Self {
        HighPrecision(n << FRAC_BITS)
    }

    /// Nearest fixed-point value to `r`.
    pub fn from_ratio(r: &BigRational) -> Self {
        HighPrecision(div_round(&(r.numer() << FRAC_BITS), r.denom()))
    }

    /// `sqrt(m)` rounded down at the last fractional bit.
    pub fn sqrt_of(m: u64) -> Self {
        let scaled = BigInt::from(m) << (2 * FRAC_BITS);
        HighPrecision(scaled.sqrt())
    }

    /// Natural logarithm of a positive integer.
    pub fn ln_of(m: u64) -> Self {
        assert!(m >= 1, "logarithm of zero");
        if m == 1 {
            return Self::zero();
        }
        let k = 63 - m.leading_zeros();
        let pow = 1u64 << k;
        let work = FRAC_BITS + GUARD_BITS;
        let mut acc = ln2_working() * BigInt::from(k);
        if m != pow {
            // m / 2^k in (1, 2): ln y = 2 atanh((y-1)/(y+1)), argument below 1/3
            let x = BigRational::new(BigInt::from(m - pow), BigInt::from(m + pow));
            acc += atanh_working(&x, work) << 1;
        }
        HighPrecision(shift_round(&acc, GUARD_BITS))
    }

    /// Parses a decimal literal (`-12.5e-3`) or a rational `p/q`.
    pub fn parse(text: &str) -> Option<Self> {
        crate::rational::parse_decimal_or_ratio(text).map(|r| Self::from_ratio(&r))
    }

    pub fn mul_ratio(&self, r: &BigRational) -> Self {
        HighPrecision(div_round(&(&self.0 * r.numer()), r.denom()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        HighPrecision(shift_round(&(&self.0 * &other.0), FRAC_BITS))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        HighPrecision(self.0.abs())
    }

    /// True when `|self| < 2^(-bits)`.
    pub fn is_below_pow2(&self, bits: u32) -> bool {
        assert!(bits <= FRAC_BITS);
        self.0.abs() < (BigInt::one() << (FRAC_BITS - bits))
    }

    pub fn to_f64(&self) -> f64 {
        // keep 64 fractional bits, the rest only disturbs rounding
        let head = shift_round(&self.0, FRAC_BITS - 64);
        head.to_f64().unwrap_or(f64::NAN) * 2f64.powi(-64)
    }

    /// Decimal rendering with exactly `digits` fractional digits (rounded).
    pub fn to_decimal(&self, digits: usize) -> String {
        let scaled = div_round(&(&self.0 * BigInt::from(10u32).pow(digits as u32)), &(BigInt::one() << FRAC_BITS));
        let negative = scaled.is_negative();
        let mut body = scaled.abs().to_string();
        if body.len() <= digits {
            body = format!("{}{}", "0".repeat(digits + 1 - body.len()), body);
        }
        let split = body.len() - digits;
        let sign = if negative { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{body}")
        } else {
            format!("{sign}{}.{}", &body[..split], &body[split..])
        }
    }
}

impl fmt::Display for HighPrecision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal(60))
    }
}

impl Add for &HighPrecision {
    type Output = HighPrecision;
    fn add(self, rhs: &HighPrecision) -> HighPrecision {
        HighPrecision(&self.0 + &rhs.0)
    }
}

impl Sub for &HighPrecision {
    type Output = HighPrecision;
    fn sub(self, rhs: &HighPrecision) -> HighPrecision {
        HighPrecision(&self.0 - &rhs.0)
    }
}

impl Neg for &HighPrecision {
    type Output = HighPrecision;
    fn neg(self) -> HighPrecision {
        HighPrecision(-&self.0)
    }
}

impl std::iter::Sum for HighPrecision {
    fn sum<I: Iterator<Item = HighPrecision>>(iter: I) -> Self {
        HighPrecision(iter.map(|h| h.0).sum())
    }
}

fn div_round(num: &BigInt, den: &BigInt) -> BigInt {
    debug_assert!(den.sign() == Sign::Plus);
    let (q, r) = num.div_mod_floor(den);
    if (r << 1) >= *den {
        q + 1
    } else {
        q
    }
}

fn shift_round(x: &BigInt, bits: u32) -> BigInt {
    if bits == 0 {
        return x.clone();
    }
    let half = BigInt::one() << (bits - 1);
    (x + half) >> bits
}

/// atanh(x) for rational 0 <= x < 1/2, scaled by 2^work.
fn atanh_working(x: &BigRational, work: u32) -> BigInt {
    let xs = div_round(&(x.numer() << work), x.denom());
    let x2 = (&xs * &xs) >> work;
    let mut term = xs;
    let mut sum = BigInt::zero();
    let mut k = 1u32;
    while !term.is_zero() {
        sum += &term / BigInt::from(k);
        term = (&term * &x2) >> work;
        k += 2;
    }
    sum
}

fn ln2_working() -> BigInt {
    static LN2: OnceLock<BigInt> = OnceLock::new();
    LN2.get_or_init(|| {
        let third = BigRational::new(BigInt::one(), BigInt::from(3));
        atanh_working(&third, FRAC_BITS + GUARD_BITS) << 1
    })
    .clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_matches_f64() {
        for m in [2u64, 3, 5, 7, 10, 1000, 65_537, 99_991] {
            let hp = HighPrecision::ln_of(m).to_f64();
            assert!((hp - (m as f64).ln()).abs() < 1e-15, "m={m}");
        }
        assert!(HighPrecision::ln_of(1).is_zero());
    }

    #[test]
    fn ln_is_additive_to_high_precision() {
        // ln 12 = 2 ln 2 + ln 3
        let lhs = HighPrecision::ln_of(12);
        let two_ln2 = &HighPrecision::ln_of(2) + &HighPrecision::ln_of(2);
        let rhs = &two_ln2 + &HighPrecision::ln_of(3);
        assert!((&lhs - &rhs).is_below_pow2(240));
    }

    #[test]
    fn ln2_digits() {
        let ln2 = HighPrecision::ln_of(2).to_decimal(50);
        assert_eq!(ln2, "0.69314718055994530941723212145817656807550013436026");
    }

    #[test]
    fn sqrt_digits() {
        let s = HighPrecision::sqrt_of(2).to_decimal(50);
        assert_eq!(s, "1.41421356237309504880168872420969807856967187537695");
        let sq = HighPrecision::sqrt_of(2);
        let two = HighPrecision::from_integer(&BigInt::from(2));
        assert!((&sq.mul(&sq) - &two).is_below_pow2(250));
    }

    #[test]
    fn decimal_round_trip() {
        let v = HighPrecision::parse("-3.25").unwrap();
        assert_eq!(v.to_decimal(3), "-3.250");
        assert_eq!(v.to_f64(), -3.25);
        let q = HighPrecision::parse("10/3").unwrap();
        assert_eq!(q.to_decimal(4), "3.3333");
        assert_eq!(HighPrecision::parse("1e-2").unwrap().to_decimal(2), "0.01");
    }
}
