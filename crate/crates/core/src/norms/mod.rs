//! `‖D‖_p` for Dirichlet polynomials.
//!
//! Exact routes: Parseval (`p = 2`) and the even-`p` expansion, which
//! groups the `k`-fold products of terms by their exact frequency sum.
//! Numerical routes: Besicovitch means by composite Gauss–Legendre
//! quadrature, single-period quadrature for one-generator supports, the
//! torus lift for integer-type decompositions, and the supremum norm.

mod quadrature;
mod sup;
mod torus;

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::lattice_from_rows;
use crate::polynomial::DirichletPolynomial;

pub use quadrature::{
    besicovitch_mean, default_schedule, gauss_legendre, norm_besicovitch, norm_periodic, scaled_schedule,
};
pub use sup::{norm_sup, SupOptions, SupStrategy};
pub use torus::{lift, norm_torus, unlift, LiftBasis, TorusPolynomial};

/// Default cap on `k · (terms)^k` for the even-`p` expansion.
pub const DEFAULT_EVEN_BUDGET: u128 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMethod {
    Parseval,
    EvenExact,
    BesicovitchQuadrature,
    PeriodicExact,
    TorusGrid,
    LineSearch,
}

impl NormMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            NormMethod::Parseval => "parseval",
            NormMethod::EvenExact => "even_exact",
            NormMethod::BesicovitchQuadrature => "besicovitch_quadrature",
            NormMethod::PeriodicExact => "periodic_exact",
            NormMethod::TorusGrid => "torus_grid",
            NormMethod::LineSearch => "line_search",
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, NormMethod::Parseval | NormMethod::EvenExact)
    }
}

impl fmt::Display for NormMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for NormMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "parseval" => NormMethod::Parseval,
            "even_exact" => NormMethod::EvenExact,
            "besicovitch_quadrature" | "besicovitch" => NormMethod::BesicovitchQuadrature,
            "periodic_exact" | "periodic" => NormMethod::PeriodicExact,
            "torus_grid" | "torus" => NormMethod::TorusGrid,
            "line_search" | "sup" => NormMethod::LineSearch,
            other => return Err(Error::Parse(format!("unknown norm method `{other}`"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    pub method: NormMethod,
    /// Absolute error bound (or observed Cauchy difference for quadrature);
    /// zero for exact methods, infinite when only a lower bound is known.
    pub error: f64,
    /// `value` is a lower bound of the norm, not an estimate.
    pub lower_bound: bool,
    /// False when a refinement schedule did not show decreasing differences.
    pub converged: bool,
}

impl NormEstimate {
    pub(crate) fn exact(value: f64, method: NormMethod) -> Self {
        NormEstimate { value, method, error: 0.0, lower_bound: false, converged: true }
    }

    /// Upper end of the certified interval.
    pub fn upper(&self) -> f64 {
        self.value + self.error
    }

    /// `series_id,p,method,value,error,lower_bound`
    pub fn csv_row(&self, series_id: &str, p: f64) -> String {
        format!("{},{},{},{:.17e},{:.6e},{}", series_id, p, self.method, self.value, self.error, self.lower_bound)
    }

    pub const CSV_HEADER: &'static str = "series_id,p,method,value,error,lower_bound";
}

/// Parseval: `(Σ |a_n|²)^{1/2}`.
pub fn norm2(d: &DirichletPolynomial) -> NormEstimate {
    let s: f64 = d.terms().values().map(|a| a.norm_sqr()).sum();
    NormEstimate::exact(s.sqrt(), NormMethod::Parseval)
}

/// Exact frequency structure of a polynomial's support: a ℤ-basis of the
/// group generated by the support frequencies and integer coordinates of
/// each term.
#[derive(Clone, Debug)]
pub(crate) struct SupportLattice {
    pub coeffs: Vec<Complex64>,
    pub lambdas: Vec<f64>,
    pub coords: Vec<Vec<i64>>,
    pub rank: usize,
}

pub(crate) fn support_lattice(d: &DirichletPolynomial) -> Result<SupportLattice> {
    let freq = d.frequency();
    let rows: Vec<_> = d.terms().keys().map(|&n| freq.row(n).clone()).collect();
    let (gens, coords) = lattice_from_rows(&rows, freq.symbols().len())?;
    let coords = coords
        .into_iter()
        .map(|c| {
            c.iter()
                .map(|v| v.to_i64().ok_or_else(|| Error::Invariant("lattice coordinate exceeds i64".into())))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SupportLattice {
        coeffs: d.terms().values().copied().collect(),
        lambdas: d.terms().keys().map(|&n| freq.lambda(n)).collect(),
        coords,
        rank: gens.len(),
    })
}

/// Even-`p` norm by exact combinatorics with the default budget.
pub fn norm_even_exact(d: &DirichletPolynomial, p: u32) -> Result<NormEstimate> {
    norm_even_exact_with_budget(d, p, DEFAULT_EVEN_BUDGET)
}

/// `‖D‖_{2k}^{2k}` is the mean of `|f^k|²`; expanding `f^k` and grouping the
/// `k`-tuples of indices by their exact frequency sum (lattice coordinates),
/// Parseval gives `Σ_ν |Σ_{sum = ν} Π a|²`. This is the same as summing
/// `Π_A a · Π_B conj(a)` over all pairs of `k`-tuples with equal frequency
/// sums.
pub fn norm_even_exact_with_budget(d: &DirichletPolynomial, p: u32, budget: u128) -> Result<NormEstimate> {
    if p == 0 || !p.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("even-exact norm needs an even p >= 2, got {p}")));
    }
    let k = p / 2;
    if d.is_zero() {
        return Ok(NormEstimate::exact(0.0, NormMethod::EvenExact));
    }
    let terms = d.len() as u128;
    let needed = (k as u128).saturating_mul(terms.saturating_pow(k));
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let sl = support_lattice(d)?;
    let mut power: BTreeMap<Vec<i64>, Complex64> = BTreeMap::new();
    power.insert(vec![0; sl.rank], Complex64::new(1.0, 0.0));
    for _ in 0..k {
        let mut next: BTreeMap<Vec<i64>, Complex64> = BTreeMap::new();
        for (key, c) in &power {
            for (coord, a) in sl.coords.iter().zip(&sl.coeffs) {
                let sum: Vec<i64> = key.iter().zip(coord).map(|(x, y)| x + y).collect();
                *next.entry(sum).or_insert(Complex64::new(0.0, 0.0)) += c * a;
            }
        }
        power = next;
    }
    let moment: f64 = power.values().map(|c| c.norm_sqr()).sum();
    Ok(NormEstimate::exact(moment.powf(1.0 / p as f64), NormMethod::EvenExact))
}
