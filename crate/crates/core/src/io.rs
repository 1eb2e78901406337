//! Serializable descriptions of frequencies and series, and term tables.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frequency::{FamilyTag, Frequency, Symbol};
use crate::polynomial::DirichletPolynomial;
use crate::precision::HighPrecision;
use crate::rational::{parse_rational, RationalRow};

/// Either a built-in family (`family`, `count`, optional rational `scale`)
/// or explicit `symbols` with `rows` of rational strings.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencySpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyTag>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    #[serde(alias = "N")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbols: Option<Vec<SymbolSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<Vec<Vec<String>>>,
}

/// `value` is a decimal, `p/q`, `log(m)` or `sqrt(m)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolSpec {
    pub name: String,
    pub value: String,
    #[serde(default = "default_class")]
    pub class: String,
}

fn default_class() -> String {
    "declared".to_string()
}

fn parse_symbol_value(text: &str) -> Result<HighPrecision> {
    let t = text.trim();
    let call = |prefix: &str| -> Option<u64> {
        t.strip_prefix(prefix)?.strip_prefix('(')?.strip_suffix(')')?.trim().parse().ok()
    };
    if let Some(m) = call("log") {
        if m < 2 {
            return Err(Error::Parse(format!("log({m}) is not a positive symbol")));
        }
        return Ok(HighPrecision::ln_of(m));
    }
    if let Some(m) = call("sqrt") {
        return Ok(HighPrecision::sqrt_of(m));
    }
    HighPrecision::parse(t).ok_or_else(|| Error::Parse(format!("cannot read symbol value `{text}`")))
}

impl FrequencySpec {
    pub fn family(tag: FamilyTag, count: usize) -> Self {
        FrequencySpec { family: Some(tag), count: Some(count), ..Self::default() }
    }

    pub fn build(&self) -> Result<Frequency> {
        let base = match (&self.family, &self.symbols, &self.rows) {
            (Some(tag), None, None) => {
                let count = self.count.ok_or_else(|| Error::Parse("a family needs `count`".into()))?;
                Frequency::family(*tag, count)?
            }
            (None | Some(FamilyTag::Custom), Some(symbols), Some(rows)) => {
                let symbols = symbols
                    .iter()
                    .map(|s| Ok(Symbol::new(s.name.clone(), parse_symbol_value(&s.value)?, s.class.clone())))
                    .collect::<Result<Vec<_>>>()?;
                let rows = rows
                    .iter()
                    .enumerate()
                    .map(|(i, r)| {
                        let vals = r
                            .iter()
                            .map(|x| {
                                parse_rational(x)
                                    .ok_or_else(|| Error::Parse(format!("row {}: bad rational `{x}`", i + 1)))
                            })
                            .collect::<Result<Vec<_>>>()?;
                        Ok(RationalRow::from_dense(&vals))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let freq = Frequency::new(symbols, rows, FamilyTag::Custom)?;
                match self.count {
                    Some(c) => freq.prefix(c)?,
                    None => freq,
                }
            }
            _ => return Err(Error::Parse("give either `family` and `count`, or `symbols` and `rows`".into())),
        };
        match &self.scale {
            Some(s) => {
                let r = parse_rational(s).ok_or_else(|| Error::Parse(format!("bad scale `{s}`")))?;
                base.scaled(&r)
            }
            None => Ok(base),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub n: usize,
    #[serde(default)]
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// A polynomial: an inline frequency or a reference to a frequency file,
/// and its nonzero terms.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequency: Option<FrequencySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequency_ref: Option<String>,
    pub terms: Vec<TermSpec>,
}

impl SeriesSpec {
    pub fn from_polynomial(d: &DirichletPolynomial, frequency: FrequencySpec) -> Self {
        SeriesSpec {
            id: None,
            frequency: Some(frequency),
            frequency_ref: None,
            terms: d.terms().iter().map(|(&n, a)| TermSpec { n, re: a.re, im: a.im }).collect(),
        }
    }

    /// Builds the polynomial on an already resolved frequency.
    pub fn build_on(&self, freq: Arc<Frequency>) -> Result<DirichletPolynomial> {
        DirichletPolynomial::from_terms(freq, self.terms.iter().map(|t| (t.n, Complex64::new(t.re, t.im))))
    }
}

pub const TERMS_CSV_HEADER: &str = "n,lambda,re,im";

/// Term table `n,lambda,re,im`, LF-terminated, with a header row.
pub fn terms_csv(d: &DirichletPolynomial) -> String {
    let mut out = format!("{TERMS_CSV_HEADER}\n");
    for (&n, a) in d.terms() {
        out.push_str(&format!("{n},{:.17e},{:.17e},{:.17e}\n", d.frequency().lambda(n), a.re, a.im));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_families_and_scaling() {
        let f = FrequencySpec::family(FamilyTag::Ordinary, 10).build().unwrap();
        assert_eq!(f.len(), 10);
        let spec = FrequencySpec { scale: Some("2".into()), ..FrequencySpec::family(FamilyTag::Ordinary, 10) };
        let g = spec.build().unwrap();
        assert!((g.lambda(3) - 2.0 * 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn builds_explicit_rows() {
        let spec = FrequencySpec {
            symbols: Some(vec![
                SymbolSpec { name: "a".into(), value: "log(2)".into(), class: "c".into() },
                SymbolSpec { name: "b".into(), value: "sqrt(3)".into(), class: "c".into() },
            ]),
            rows: Some(vec![vec!["0".into()], vec!["1".into(), "0".into()], vec!["0".into(), "1/2".into()]]),
            ..FrequencySpec::default()
        };
        let f = spec.build().unwrap();
        assert!((f.lambda(3) - 0.5 * 3f64.sqrt()).abs() < 1e-15);
        let bad = FrequencySpec { rows: Some(vec![vec!["x".into()]]), ..spec.clone() };
        assert!(matches!(bad.build(), Err(Error::Parse(_))));
        assert!(FrequencySpec::default().build().is_err());
    }

    #[test]
    fn symbol_values() {
        assert!((parse_symbol_value("log(3)").unwrap().to_f64() - 3f64.ln()).abs() < 1e-16);
        assert_eq!(parse_symbol_value("1/4").unwrap().to_f64(), 0.25);
        assert!(parse_symbol_value("log(1)").is_err());
        assert!(parse_symbol_value("pi").is_err());
    }

    #[test]
    fn json_round_trip_and_strictness() {
        let text = r#"{"id": "x", "frequency": {"family": "ordinary", "N": 6}, "terms": [{"n": 6, "re": 0.5}]}"#;
        let s: SeriesSpec = serde_json::from_str(text).unwrap();
        assert_eq!(s.frequency.as_ref().unwrap().count, Some(6));
        let again: SeriesSpec = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(again, s);
        assert!(serde_json::from_str::<SeriesSpec>(r#"{"terms": [], "extra": 1}"#).is_err());
    }

    #[test]
    fn term_table() {
        let f = Arc::new(FrequencySpec::family(FamilyTag::Linear, 2).build().unwrap());
        let s = SeriesSpec { terms: vec![TermSpec { n: 2, re: 1.5, im: 0.0 }], ..SeriesSpec::default() };
        let d = s.build_on(f).unwrap();
        assert_eq!(
            terms_csv(&d),
            "n,lambda,re,im\n2,1.00000000000000000e0,1.50000000000000000e0,0.00000000000000000e0\n"
        );
    }
}
