//! Frequencies `λ = (λ_n)` with an exact rational representation over a set
//! of declared ℚ-linearly independent symbols.
//!
//! Indices are 1-based throughout the public API: `lambda(1)` is `λ₁`.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::number_theory::{factorize, first_primes, primes_up_to, smallest_prime_factors, square_free_from_two};
use crate::precision::HighPrecision;
use crate::rational::{rational, Rational, RationalRow};
use crate::tail::{limsup_estimate, ExtrapolationPolicy, TailEstimate};

/// Differences below `2^-200` are resolved through the exact rows.
const TIE_BITS: u32 = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyTag {
    Ordinary,
    Linear,
    PadicExample,
    Qli,
    Custom,
}

impl FamilyTag {
    pub fn as_str(self) -> &'static str {
        match self {
            FamilyTag::Ordinary => "ordinary",
            FamilyTag::Linear => "linear",
            FamilyTag::PadicExample => "padic_example",
            FamilyTag::Qli => "qli",
            FamilyTag::Custom => "custom",
        }
    }
}

impl std::str::FromStr for FamilyTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ordinary" => Ok(FamilyTag::Ordinary),
            "linear" => Ok(FamilyTag::Linear),
            "padic_example" | "padic" => Ok(FamilyTag::PadicExample),
            "qli" => Ok(FamilyTag::Qli),
            "custom" => Ok(FamilyTag::Custom),
            other => Err(Error::UnknownFamily(other.to_string())),
        }
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A basis real `b_j`, e.g. `log 2` or `sqrt 3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbol {
    pub name: String,
    pub value: HighPrecision,
    /// Symbols sharing a class are declared ℚ-linearly independent.
    pub class: String,
}

impl Symbol {
    pub fn new(name: impl Into<String>, value: HighPrecision, class: impl Into<String>) -> Self {
        Symbol { name: name.into(), value, class: class.into() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Frequency {
    symbols: Vec<Symbol>,
    rows: Vec<RationalRow>,
    exact: Vec<HighPrecision>,
    numeric: Vec<f64>,
    family: FamilyTag,
}

impl Frequency {
    /// Validates and evaluates a frequency given exact rows over `symbols`.
    ///
    /// All symbols must share one independence class, `λ₁ >= 0`, and the
    /// sequence must be strictly increasing. Comparisons happen in fixed
    /// point; near-ties are settled by comparing rows.
    pub fn new(symbols: Vec<Symbol>, rows: Vec<RationalRow>, family: FamilyTag) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidFrequency("no terms".into()));
        }
        let mut names = HashSet::new();
        for s in &symbols {
            if s.value.is_zero() {
                return Err(Error::InvalidFrequency(format!("symbol `{}` is zero", s.name)));
            }
            if !names.insert(s.name.as_str()) {
                return Err(Error::InvalidFrequency(format!("duplicate symbol `{}`", s.name)));
            }
        }
        if let Some(first) = symbols.first() {
            if let Some(other) = symbols.iter().find(|s| s.class != first.class) {
                return Err(Error::InvalidFrequency(format!(
                    "symbols `{}` and `{}` are in different independence classes",
                    first.name, other.name
                )));
            }
        }
        let values: Vec<HighPrecision> = symbols.iter().map(|s| s.value.clone()).collect();
        let mut exact = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            if row.width() > symbols.len() {
                return Err(Error::InvalidFrequency(format!(
                    "row {} refers to symbol {} but only {} symbols exist",
                    i + 1,
                    row.width(),
                    symbols.len()
                )));
            }
            exact.push(row.eval(&values));
        }
        if exact[0].is_negative() && !exact[0].is_below_pow2(TIE_BITS) {
            return Err(Error::InvalidFrequency("λ₁ is negative".into()));
        }
        for n in 1..rows.len() {
            let diff = &exact[n] - &exact[n - 1];
            if diff.is_below_pow2(TIE_BITS) {
                let msg = if rows[n] == rows[n - 1] {
                    format!("λ_{} = λ_{}", n, n + 1)
                } else {
                    format!("λ_{} and λ_{} agree to 2^-{TIE_BITS}; order cannot be certified", n, n + 1)
                };
                return Err(Error::InvalidFrequency(msg));
            }
            if diff.is_negative() {
                return Err(Error::InvalidFrequency(format!("not increasing at n = {}", n + 1)));
            }
        }
        let numeric = exact.iter().map(HighPrecision::to_f64).collect();
        Ok(Frequency { symbols, rows, exact, numeric, family })
    }

    /// `λ_n = log n` for `n = 1..=count`, rows are prime exponent vectors.
    pub fn ordinary(count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidArgument("N must be at least 1".into()));
        }
        let primes = primes_up_to(count);
        let spf = smallest_prime_factors(count);
        let mut column = vec![usize::MAX; count + 1];
        for (j, &p) in primes.iter().enumerate() {
            column[p as usize] = j;
        }
        let symbols: Vec<Symbol> =
            primes.iter().map(|&p| Symbol::new(format!("log{p}"), HighPrecision::ln_of(p), "log-primes")).collect();
        let rows = (1..=count)
            .map(|n| {
                RationalRow::from_integers(factorize(n, &spf).into_iter().map(|(p, e)| (column[p as usize], e as i64)))
            })
            .collect();
        Frequency::new(symbols, rows, FamilyTag::Ordinary)
    }

    /// Built-in families other than `ordinary`.
    ///
    /// `linear` is `λ_n = n - 1`. `padic_example` is `λ₁ = 1`,
    /// `λ_n = (q² + 1)/q` with `q` the `(n-1)`-th prime. `qli` takes square roots of the first
    /// square-free integers above 1, each its own symbol.
    pub fn family(tag: FamilyTag, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidArgument("N must be at least 1".into()));
        }
        match tag {
            FamilyTag::Ordinary => Frequency::ordinary(count),
            FamilyTag::Linear => {
                let one = vec![Symbol::new("1", HighPrecision::from_integer(&BigInt::from(1)), "rational")];
                let rows = (0..count as i64).map(|k| RationalRow::from_integers([(0, k)])).collect();
                Frequency::new(one, rows, FamilyTag::Linear)
            }
            FamilyTag::PadicExample => {
                let one = vec![Symbol::new("1", HighPrecision::from_integer(&BigInt::from(1)), "rational")];
                let mut rows = vec![RationalRow::from_integers([(0, 1)])];
                for q in first_primes(count - 1) {
                    let q = q as i64;
                    rows.push(RationalRow::from_pairs([(0, rational(q * q + 1, q))]));
                }
                Frequency::new(one, rows, FamilyTag::PadicExample)
            }
            FamilyTag::Qli => {
                let ms = square_free_from_two(count);
                let symbols = ms
                    .iter()
                    .map(|&m| Symbol::new(format!("sqrt{m}"), HighPrecision::sqrt_of(m), "sqrt-square-free"))
                    .collect();
                let rows = (0..count).map(RationalRow::unit).collect();
                Frequency::new(symbols, rows, FamilyTag::Qli)
            }
            FamilyTag::Custom => Err(Error::InvalidArgument("custom frequencies need explicit rows".into())),
        }
    }

    /// Multiplies every `λ_n` by a positive rational; the result is tagged custom.
    pub fn scaled(&self, factor: &Rational) -> Result<Self> {
        if !factor.is_positive() {
            return Err(Error::InvalidArgument("scale factor must be positive".into()));
        }
        let rows = self.rows.iter().map(|r| r.scale(factor)).collect();
        Frequency::new(self.symbols.clone(), rows, FamilyTag::Custom)
    }

    /// The first `m` terms.
    pub fn prefix(&self, m: usize) -> Result<Self> {
        self.check_count(m)?;
        if m == 0 {
            return Err(Error::InvalidArgument("empty prefix".into()));
        }
        Ok(Frequency {
            symbols: self.symbols.clone(),
            rows: self.rows[..m].to_vec(),
            exact: self.exact[..m].to_vec(),
            numeric: self.numeric[..m].to_vec(),
            family: self.family,
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn family_tag(&self) -> FamilyTag {
        self.family
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn symbol_values(&self) -> Vec<HighPrecision> {
        self.symbols.iter().map(|s| s.value.clone()).collect()
    }

    /// `λ_n` as a double.
    pub fn lambda(&self, n: usize) -> f64 {
        self.numeric[n - 1]
    }

    pub fn numeric(&self) -> &[f64] {
        &self.numeric
    }

    pub fn exact_value(&self, n: usize) -> &HighPrecision {
        &self.exact[n - 1]
    }

    /// Exact row of `λ_n` over the symbols.
    pub fn row(&self, n: usize) -> &RationalRow {
        &self.rows[n - 1]
    }

    pub fn rows(&self) -> &[RationalRow] {
        &self.rows
    }

    /// `λ_{n+1} - λ_n` computed in fixed point.
    pub fn gap(&self, n: usize) -> f64 {
        (&self.exact[n] - &self.exact[n - 1]).to_f64()
    }

    pub fn check_index(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.len() {
            Err(Error::IndexOutOfRange { index: n, len: self.len() })
        } else {
            Ok(())
        }
    }

    pub(crate) fn check_count(&self, m: usize) -> Result<()> {
        if m > self.len() {
            Err(Error::IndexOutOfRange { index: m, len: self.len() })
        } else {
            Ok(())
        }
    }
}

/// Estimates `L(λ) = limsup log(n)/λ_n` from the prefix. Terms with
/// `λ_n = 0` are skipped. The estimate is clamped at 0.
pub fn estimate_l(freq: &Frequency, policy: &ExtrapolationPolicy) -> Result<TailEstimate> {
    if freq.len() < 100 {
        return Err(Error::InvalidArgument(format!("estimate_L needs at least 100 terms, got {}", freq.len())));
    }
    let mut est = limsup_estimate(freq.len(), policy, |n| {
        let lambda = freq.lambda(n);
        (lambda > 0.0).then(|| (lambda, (n as f64).ln() / lambda))
    })
    .ok_or_else(|| Error::InvalidFrequency("all terms vanish".into()))?;
    est.value = est.value.max(0.0);
    Ok(est)
}

/// Finite-prefix witness for a gap condition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapWitness {
    /// `min_n gap_n * weight_n` over the prefix.
    pub c_star: f64,
    /// Index `n` attaining the minimum (gap between `λ_n` and `λ_{n+1}`).
    pub argmin: usize,
    /// Minimum over the first and second half of the scanned range.
    pub first_half_min: f64,
    pub second_half_min: f64,
    /// The running minimum did not decrease over the second half.
    pub stabilized: bool,
    /// `c_star > 0` and stabilized; never a claim about the full sequence.
    pub plausible: bool,
}

/// Bohr's condition witness: `C* = min_{n<N} (λ_{n+1} - λ_n) e^{(l+δ)λ_n}`.
pub fn check_bc(freq: &Frequency, l: f64, delta: f64, count: usize) -> Result<GapWitness> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument("delta must be positive".into()));
    }
    gap_witness(freq, count, |lambda| ((l + delta) * lambda).exp())
}

/// Landau's condition witness: `C* = min_{n<N} (λ_{n+1} - λ_n) e^{e^{δλ_n}}`.
pub fn check_lc(freq: &Frequency, delta: f64, count: usize) -> Result<GapWitness> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument("delta must be positive".into()));
    }
    gap_witness(freq, count, |lambda| (delta * lambda).exp().exp())
}

fn gap_witness(freq: &Frequency, count: usize, weight: impl Fn(f64) -> f64) -> Result<GapWitness> {
    freq.check_count(count)?;
    if count < 2 {
        return Err(Error::InvalidArgument("need at least two terms".into()));
    }
    let pairs = count - 1;
    let half = pairs.div_ceil(2);
    let mut c_star = f64::INFINITY;
    let mut argmin = 1;
    let mut first_half_min = f64::INFINITY;
    let mut second_half_min = f64::INFINITY;
    for n in 1..=pairs {
        let w = freq.gap(n) * weight(freq.lambda(n));
        if w < c_star {
            c_star = w;
            argmin = n;
        }
        if n <= half {
            first_half_min = first_half_min.min(w);
        } else {
            second_half_min = second_half_min.min(w);
        }
    }
    let stabilized = second_half_min >= first_half_min;
    Ok(GapWitness {
        c_star,
        argmin,
        first_half_min,
        second_half_min,
        stabilized,
        plausible: c_star > 0.0 && stabilized,
    })
}

/// Checks `exp(sum_k r_k log p_k) = n`, i.e. `prod p_k^{r_k} = n`, exactly.
pub fn ordinary_row_reconstructs(freq: &Frequency, n: usize) -> bool {
    let row = freq.row(n);
    let mut prod = BigRational::from_integer(BigInt::from(1));
    for (k, e) in row.entries() {
        let Some(p) = freq.symbols()[*k].name.strip_prefix("log").and_then(|p| p.parse::<u64>().ok()) else {
            return false;
        };
        if !e.is_integer() {
            return false;
        }
        let e: i32 = match i32::try_from(e.numer()) {
            Ok(v) => v,
            Err(_) => return false,
        };
        let base = BigRational::from_integer(BigInt::from(p));
        prod *= num_traits::pow::Pow::pow(&base, e);
    }
    !prod.is_zero() && prod == BigRational::from_integer(BigInt::from(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordinary_small() {
        let f = Frequency::ordinary(12).unwrap();
        assert_eq!(f.lambda(1), 0.0);
        assert!(f.row(1).is_zero());
        assert!((f.lambda(12) - 12f64.ln()).abs() < 1e-15);
        assert_eq!(f.row(12), &RationalRow::from_integers([(0, 2), (1, 1)]));
        assert_eq!(f.symbols().len(), 5);
        for n in 1..=12 {
            assert!(ordinary_row_reconstructs(&f, n));
        }
        assert_eq!(Frequency::ordinary(1).unwrap().len(), 1);
        assert!(Frequency::ordinary(0).is_err());
    }

    #[test]
    fn families() {
        let lin = Frequency::family(FamilyTag::Linear, 3).unwrap();
        assert_eq!(lin.numeric(), &[0.0, 1.0, 2.0]);
        let pad = Frequency::family(FamilyTag::PadicExample, 3).unwrap();
        assert_eq!(pad.row(2), &RationalRow::from_pairs([(0, rational(5, 2))]));
        assert_eq!(pad.row(3), &RationalRow::from_pairs([(0, rational(10, 3))]));
        let qli = Frequency::family(FamilyTag::Qli, 2).unwrap();
        assert!((qli.lambda(1) - 2f64.sqrt()).abs() < 1e-15);
        assert!((qli.lambda(2) - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(qli.symbols()[0].class, qli.symbols()[1].class);
        assert!("bogus".parse::<FamilyTag>().is_err());
        assert!(Frequency::family(FamilyTag::Custom, 3).is_err());
    }

    #[test]
    fn rejects_bad_frequencies() {
        let one = || vec![Symbol::new("1", HighPrecision::from_integer(&BigInt::from(1)), "q")];
        let dup = vec![RationalRow::from_integers([(0, 1)]), RationalRow::from_integers([(0, 1)])];
        assert!(Frequency::new(one(), dup, FamilyTag::Custom).is_err());
        let dec = vec![RationalRow::from_integers([(0, 2)]), RationalRow::from_integers([(0, 1)])];
        assert!(Frequency::new(one(), dec, FamilyTag::Custom).is_err());
        let neg = vec![RationalRow::from_integers([(0, -1)])];
        assert!(Frequency::new(one(), neg, FamilyTag::Custom).is_err());
        let mixed =
            vec![Symbol::new("a", HighPrecision::sqrt_of(2), "x"), Symbol::new("b", HighPrecision::sqrt_of(3), "y")];
        assert!(Frequency::new(mixed, vec![RationalRow::unit(0)], FamilyTag::Custom).is_err());
        let zero = vec![Symbol::new("z", HighPrecision::zero(), "x")];
        assert!(Frequency::new(zero, vec![RationalRow::zero()], FamilyTag::Custom).is_err());
    }

    #[test]
    fn bc_witness_padic() {
        let f = Frequency::family(FamilyTag::PadicExample, 200).unwrap();
        for delta in [0.01, 0.5, 2.0] {
            let w = check_bc(&f, 0.0, delta, 200).unwrap();
            assert!(w.c_star >= 0.5, "{w:?}");
        }
        let w = check_lc(&f, 0.3, 200).unwrap();
        assert!(w.c_star >= 0.5);
    }

    #[test]
    fn bc_witness_linear_grows() {
        let f = Frequency::family(FamilyTag::Linear, 100).unwrap();
        let w = check_bc(&f, 0.0, 0.1, 100).unwrap();
        assert_eq!(w.argmin, 1);
        assert!((w.c_star - 1.0).abs() < 1e-12);
        assert!(w.second_half_min > 100.0);
        assert!(w.plausible);
        assert!(check_lc(&f, 0.5, 100).unwrap().c_star >= 1.0);
        assert!(check_bc(&f, 0.0, 0.0, 10).is_err());
        assert!(check_bc(&f, 0.0, 0.1, 101).is_err());
    }

    #[test]
    fn estimate_l_needs_prefix() {
        let f = Frequency::family(FamilyTag::Linear, 50).unwrap();
        assert!(estimate_l(&f, &ExtrapolationPolicy::default()).is_err());
    }

    #[test]
    fn scaling() {
        let f = Frequency::ordinary(10).unwrap().scaled(&rational(2, 1)).unwrap();
        assert!((f.lambda(10) - 2.0 * 10f64.ln()).abs() < 1e-14);
        assert_eq!(f.family_tag(), FamilyTag::Custom);
        assert!(Frequency::ordinary(10).unwrap().scaled(&rational(-1, 1)).is_err());
    }
}
