//! Sparse rational vectors and the `p/q` text form used by every file format.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::precision::HighPrecision;

pub type Rational = BigRational;

pub fn rational(p: i64, q: i64) -> Rational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Formats as `p` or `p/q` in lowest terms.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p/q`, an integer, or a decimal literal with optional exponent.
pub fn parse_rational(text: &str) -> Option<Rational> {
    parse_decimal_or_ratio(text)
}

pub(crate) fn parse_decimal_or_ratio(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((p, q)) = text.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac_part}0").parse().ok()?;
    let digits = digits / BigInt::from(10);
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut r = if scale >= 0 {
        BigRational::from_integer(digits * ten.pow(scale as u32))
    } else {
        BigRational::new(digits, ten.pow((-scale) as u32))
    };
    if negative {
        r = -r;
    }
    Some(r)
}

/// A finitely supported rational vector stored as sorted `(column, value)`
/// pairs with no zero entries.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalRow(Vec<(usize, Rational)>);

impl RationalRow {
    pub fn zero() -> Self {
        RationalRow(Vec::new())
    }

    pub fn unit(col: usize) -> Self {
        RationalRow(vec![(col, Rational::one())])
    }

    /// Builds a row from arbitrary pairs; duplicates are summed, zeros dropped.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, Rational)>) -> Self {
        let mut v: Vec<(usize, Rational)> = pairs.into_iter().collect();
        v.sort_by_key(|(c, _)| *c);
        let mut out: Vec<(usize, Rational)> = Vec::with_capacity(v.len());
        for (c, r) in v {
            match out.last_mut() {
                Some((lc, lr)) if *lc == c => *lr += r,
                _ => out.push((c, r)),
            }
        }
        out.retain(|(_, r)| !r.is_zero());
        RationalRow(out)
    }

    pub fn from_dense(values: &[Rational]) -> Self {
        Self::from_pairs(values.iter().cloned().enumerate())
    }

    pub fn from_integers(pairs: impl IntoIterator<Item = (usize, i64)>) -> Self {
        Self::from_pairs(pairs.into_iter().map(|(c, v)| (c, BigRational::from_integer(v.into()))))
    }

    pub fn entries(&self) -> &[(usize, Rational)] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, col: usize) -> Rational {
        match self.0.binary_search_by_key(&col, |(c, _)| *c) {
            Ok(i) => self.0[i].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    /// Smallest column with a nonzero entry.
    pub fn leading(&self) -> Option<usize> {
        self.0.first().map(|(c, _)| *c)
    }

    /// One past the largest column with a nonzero entry.
    pub fn width(&self) -> usize {
        self.0.last().map_or(0, |(c, _)| c + 1)
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|(_, r)| r.is_integer())
    }

    pub fn is_natural(&self) -> bool {
        self.0.iter().all(|(_, r)| r.is_integer() && !r.is_negative())
    }

    /// `self + factor * other`.
    pub fn add_scaled(&self, other: &RationalRow, factor: &Rational) -> RationalRow {
        if factor.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            let take_left = j >= other.0.len() || (i < self.0.len() && self.0[i].0 < other.0[j].0);
            let take_right = i >= self.0.len() || (j < other.0.len() && other.0[j].0 < self.0[i].0);
            if take_left {
                out.push(self.0[i].clone());
                i += 1;
            } else if take_right {
                out.push((other.0[j].0, &other.0[j].1 * factor));
                j += 1;
            } else {
                let v = &self.0[i].1 + &other.0[j].1 * factor;
                if !v.is_zero() {
                    out.push((self.0[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
        RationalRow(out)
    }

    pub fn scale(&self, factor: &Rational) -> RationalRow {
        if factor.is_zero() {
            return RationalRow::zero();
        }
        RationalRow(self.0.iter().map(|(c, r)| (*c, r * factor)).collect())
    }

    /// Exact linear combination `sum_k self[k] * rows[k]`.
    pub fn combine(&self, rows: &[RationalRow]) -> RationalRow {
        self.0.iter().fold(RationalRow::zero(), |acc, (k, r)| acc.add_scaled(&rows[*k], r))
    }

    /// Evaluates `sum_k self[k] * values[k]` in fixed point.
    pub fn eval(&self, values: &[HighPrecision]) -> HighPrecision {
        self.0.iter().map(|(c, r)| values[*c].mul_ratio(r)).sum()
    }

    /// Least common multiple of all denominators (1 for the zero row).
    pub fn denominator_lcm(&self) -> BigInt {
        self.0.iter().fold(BigInt::one(), |acc, (_, r)| acc.lcm(r.denom()))
    }

    pub fn to_dense(&self, len: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); len];
        for (c, r) in &self.0 {
            out[*c] = r.clone();
        }
        out
    }

    pub fn to_strings(&self, len: usize) -> Vec<String> {
        self.to_dense(len).iter().map(format_rational).collect()
    }

    /// Integer entries as i64, if every entry is an integer that fits.
    pub fn to_i64_dense(&self, len: usize) -> Option<Vec<i64>> {
        let mut out = vec![0i64; len];
        for (c, r) in &self.0 {
            if !r.is_integer() || *c >= len {
                return None;
            }
            out[*c] = i64::try_from(r.numer()).ok()?;
        }
        Some(out)
    }

    /// Keeps only entries whose column satisfies `keep`, relabelled by `map`.
    pub fn remap(&self, map: impl Fn(usize) -> Option<usize>) -> RationalRow {
        RationalRow::from_pairs(self.0.iter().filter_map(|(c, r)| map(*c).map(|m| (m, r.clone()))))
    }
}

impl fmt::Display for RationalRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        let dense = self.to_dense(self.width());
        for (i, r) in dense.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(&format_rational(r))?;
        }
        f.write_str(")")
    }
}
